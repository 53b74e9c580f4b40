//! Mode-by-mode exact verification of the differential and spectral identities.
//!
//! Every identity is checked on a single basis function. Both sides are then of the
//! form `e^{-n t s} · (r + s u)` with `s = √λ_k` kept symbolic, so the exponentials
//! cancel structurally and the comparison is an equality of rational polynomials.
//! Semigroups and powers of `J`, `M_i` are not looked up from multiplier formulas:
//! they act by eigen-checks, i.e. the operator is applied exactly, the image must be
//! `μ·g` and `μ` must equal the mode's `λ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Zero};

use super::ops::{
    apply_delta, apply_delta_star, apply_jacobi_operator, apply_modified_operator,
    apply_modified_operator_commutator, eigen_ratio, factorized_jacobi_operator,
    jacobi_exact_multi, shifted_basis_exact, RationalParamVector,
};
use super::poly::{rat, PhiPoly};
use super::quad::{ModeFunction, QuadExtScalar, QuadPoly};
use super::Rational;
use crate::{Error, Result};

/// Identities the oracle knows how to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "&'static str", try_from = "&str"))]
pub enum IdentityId {
    /// `δ_j P_k = ½(k_j+α_j+β_j+1) Φ_j P_{k-e_j}^{(α+e_j,β+e_j)}`.
    Derivative,
    /// `δ*_j(Φ_j P_{k-e_j}^{(α+e_j,β+e_j)}) = 2k_j P_k`.
    Adjoint,
    /// `J = Σ_j δ*_j δ_j`.
    Factorization,
    /// `δ_iδ*_i + Σ_{j≠i} δ*_jδ_j = J + [(α_i+½)/(1-x_i) + (β_i+½)/(1+x_i)]`.
    Commutator,
    /// `J P_k = λ_k P_k`.
    EigenJ,
    /// `M_i(Φ_i P_k^{(α+e_i,β+e_i)}) = λ_{k+e_i} Φ_i P_k^{(α+e_i,β+e_i)}`.
    EigenM,
    /// `δ_j U^i_t = δ_i U^j_t`.
    Cr1,
    /// `δ_j P_t = -∂_t U^j_t`.
    Cr2,
    /// `Σ_j δ*_j U^j_t = -∂_t P_t`.
    Cr3,
    /// `(∂_t² - M_j) U^j_t = 0`.
    Cr5,
    /// `δ*_j P̃^j_t = -∂_t Ū^j_t`.
    Hh1,
    /// `δ_1 Ū^1_t = -∂_t P̃^1_t`, one dimension only.
    Hh2,
    /// `(∂_t² - J) Ū^j_t = 0`.
    Hh3,
    /// `Σ_j R̄_j R_j = Π₀`.
    SumRbarR,
    /// `Σ_j Ū^j_t U^j_t = P_{2t} Π₀`.
    Hh4,
    /// `U^j_t = R_j P_t`.
    Spf2,
    /// `F = J^{-1/2} P_t Π₀ f` has `δ_j F = U^j_t f`, `∂_t F = -P_t Π₀ f`, `(∂_t² - J)F = 0`.
    Potential,
}

impl IdentityId {
    pub const ALL: [IdentityId; 17] = [
        IdentityId::Derivative,
        IdentityId::Adjoint,
        IdentityId::Factorization,
        IdentityId::Commutator,
        IdentityId::EigenJ,
        IdentityId::EigenM,
        IdentityId::Cr1,
        IdentityId::Cr2,
        IdentityId::Cr3,
        IdentityId::Cr5,
        IdentityId::Hh1,
        IdentityId::Hh2,
        IdentityId::Hh3,
        IdentityId::SumRbarR,
        IdentityId::Hh4,
        IdentityId::Spf2,
        IdentityId::Potential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Derivative => "derivative",
            IdentityId::Adjoint => "adjoint",
            IdentityId::Factorization => "factorization",
            IdentityId::Commutator => "commutator",
            IdentityId::EigenJ => "eigen_J",
            IdentityId::EigenM => "eigen_M",
            IdentityId::Cr1 => "cr1",
            IdentityId::Cr2 => "cr2",
            IdentityId::Cr3 => "cr3",
            IdentityId::Cr5 => "cr5",
            IdentityId::Hh1 => "hh1",
            IdentityId::Hh2 => "hh2",
            IdentityId::Hh3 => "hh3",
            IdentityId::SumRbarR => "sum_RbarR",
            IdentityId::Hh4 => "hh4",
            IdentityId::Spf2 => "spf2",
            IdentityId::Potential => "potential",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownIdentity(s.into()))
    }
}

impl From<IdentityId> for &'static str {
    fn from(id: IdentityId) -> Self {
        id.name()
    }
}

impl TryFrom<&str> for IdentityId {
    type Error = Error;
    fn try_from(s: &str) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Status {
    Pass,
    Fail,
    /// The identity is not claimed for this configuration (hh2 for `d > 1`).
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityParams {
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
}

/// Outcome of one identity at one mode.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub params: IdentityParams,
    pub mode: Vec<u32>,
    pub status: Status,
    pub residual_terms: Vec<String>,
}

/// All multi-indices of length `d` with `|k| ≤ cap`, in lexicographic order.
pub fn modes_up_to(d: usize, cap: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(d, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, cap, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Check `identity` at every mode with `|k| ≤ degree_cap`.
pub fn verify_identity(
    name: &str,
    p: &RationalParamVector,
    degree_cap: u32,
) -> Result<Vec<IdentityReport>> {
    let id: IdentityId = name.parse()?;
    Ok(modes_up_to(p.dim(), degree_cap)
        .iter()
        .map(|k| verify_identity_at(id, p, k))
        .collect())
}

/// Check `identity` at the single mode `k`.
pub fn verify_identity_at(id: IdentityId, p: &RationalParamVector, k: &[u32]) -> IdentityReport {
    assert_eq!(k.len(), p.dim(), "mode length must match the dimension");
    report_with(&Ctx::new(p, k, &Memo::default()), id)
}

/// Check every identity in `ids` at every mode with `|k| ≤ degree_cap`, sharing
/// basis functions and operator applications across the whole run. Reports are ordered by mode, then
/// by position in `ids`.
pub fn verify_identities(
    ids: &[IdentityId],
    p: &RationalParamVector,
    degree_cap: u32,
) -> Vec<IdentityReport> {
    let mut out = Vec::with_capacity(ids.len());
    let memo = Memo::default();
    for k in modes_up_to(p.dim(), degree_cap) {
        let ctx = Ctx::new(p, &k, &memo);
        out.extend(ids.iter().map(|&id| report_with(&ctx, id)));
    }
    out
}

fn report_with(ctx: &Ctx<'_>, id: IdentityId) -> IdentityReport {
    let (alpha, beta) = ctx.p.to_strings();
    let (status, residual_terms) = if id == IdentityId::Hh2 && ctx.d != 1 {
        (Status::NotApplicable, Vec::new())
    } else {
        match ctx.check(id) {
            Ok(()) => (Status::Pass, Vec::new()),
            Err(terms) => (Status::Fail, terms),
        }
    };
    let k = &ctx.k;
    IdentityReport {
        identity: id,
        params: IdentityParams { alpha, beta },
        mode: k.to_vec(),
        status,
        residual_terms,
    }
}

type Check = core::result::Result<(), Vec<String>>;
type Step<T> = core::result::Result<T, String>;

/// The same functions get `J` and `M_j` applied repeatedly to read off eigenvalues.
type OpCache = BTreeMap<(u8, usize, PhiPoly), Result<PhiPoly>>;

struct Ctx<'a> {
    p: &'a RationalParamVector,
    k: Vec<u32>,
    d: usize,
    lambda: Rational,
    memo: &'a Memo,
}

/// Caches valid for every mode of one parameter vector.
#[derive(Default)]
struct Memo {
    ops: RefCell<OpCache>,
    bases: RefCell<BTreeMap<(Option<usize>, Vec<u32>), PhiPoly>>,
}

fn fail(msg: String) -> Vec<String> {
    vec![msg]
}

impl<'a> Ctx<'a> {
    fn new(p: &'a RationalParamVector, k: &[u32], memo: &'a Memo) -> Self {
        Self {
            p,
            k: k.to_vec(),
            d: p.dim(),
            lambda: p.eigenvalue(k),
            memo,
        }
    }

    /// Standard basis function at `m`, or the one shifted along `shift`.
    fn basis(&self, shift: Option<usize>, m: &[u32]) -> PhiPoly {
        let key = (shift, m.to_vec());
        if let Some(hit) = self.memo.bases.borrow().get(&key) {
            return hit.clone();
        }
        let f = match shift {
            None => jacobi_exact_multi(self.p, m),
            Some(j) => shifted_basis_exact(self.p, j, m),
        };
        self.memo.bases.borrow_mut().insert(key, f.clone());
        f
    }

    fn standard(&self) -> PhiPoly {
        self.basis(None, &self.k)
    }

    /// `Φ_j P_{k-e_j}^{(α+e_j,β+e_j)}`, or `None` when `k_j = 0`.
    fn shifted_below(&self, j: usize) -> Option<PhiPoly> {
        if self.k[j] == 0 {
            return None;
        }
        let mut m = self.k.clone();
        m[j] -= 1;
        Some(self.basis(Some(j), &m))
    }

    fn mode(&self, f: PhiPoly) -> ModeFunction {
        ModeFunction::new(0, QuadPoly::from_poly(self.lambda.clone(), f))
    }

    fn zero_mode(&self) -> ModeFunction {
        ModeFunction::new(0, QuadPoly::zero(self.lambda.clone(), self.d))
    }

    fn map(
        &self,
        f: &ModeFunction,
        op: impl FnMut(&PhiPoly) -> Result<PhiPoly>,
    ) -> Step<ModeFunction> {
        let value = f.value.map(op).map_err(|e| format!("{e}"))?;
        Ok(ModeFunction::new(f.decay, value))
    }

    fn cached(
        &self,
        tag: u8,
        j: usize,
        g: &PhiPoly,
        op: impl FnOnce() -> Result<PhiPoly>,
    ) -> Result<PhiPoly> {
        let key = (tag, j, g.clone());
        if let Some(hit) = self.memo.ops.borrow().get(&key) {
            return hit.clone();
        }
        let v = op();
        self.memo.ops.borrow_mut().insert(key, v.clone());
        v
    }

    fn delta(&self, j: usize, f: &ModeFunction) -> Step<ModeFunction> {
        self.map(f, |g| self.cached(0, j, g, || Ok(apply_delta(j, g))))
    }

    fn delta_star(&self, j: usize, f: &ModeFunction) -> Step<ModeFunction> {
        self.map(f, |g| {
            self.cached(1, j, g, || apply_delta_star(j, self.p, g))
        })
    }

    fn jac(&self, f: &ModeFunction) -> Step<ModeFunction> {
        self.map(f, |g| {
            self.cached(2, 0, g, || apply_jacobi_operator(self.p, g))
        })
    }

    fn modified(&self, j: usize, f: &ModeFunction) -> Step<ModeFunction> {
        self.map(f, |g| {
            self.cached(3, j, g, || apply_modified_operator(j, self.p, g))
        })
    }

    /// Rational `μ` with `op(f) = μ f`; `None` for `f = 0`.
    fn eigen(&self, f: &ModeFunction, image: &ModeFunction, what: &str) -> Step<Option<Rational>> {
        let v = &f.value;
        let w = &image.value;
        let r = eigen_ratio(&v.rational, &w.rational)
            .ok_or_else(|| format!("not an eigenfunction of {what}"))?;
        let u = eigen_ratio(&v.surd, &w.surd)
            .ok_or_else(|| format!("not an eigenfunction of {what}"))?;
        match (r, u) {
            (Some(a), Some(b)) if a != b => Err(format!("not an eigenfunction of {what}")),
            (Some(a), _) | (None, Some(a)) => Ok(Some(a)),
            (None, None) => Ok(None),
        }
    }

    fn require_lambda(&self, mu: &Rational, what: &str) -> Step<()> {
        if *mu == self.lambda {
            Ok(())
        } else {
            Err(format!(
                "{what} eigenvalue {mu} differs from lambda_k = {}",
                self.lambda
            ))
        }
    }

    fn scale(&self, f: &ModeFunction, c: &QuadExtScalar) -> ModeFunction {
        ModeFunction::new(f.decay, f.value.scale(c))
    }

    fn inv_sqrt(&self, f: &ModeFunction) -> Step<ModeFunction> {
        let c = QuadExtScalar::inv_sqrt_lambda(self.lambda.clone())
            .ok_or_else(|| String::from("lambda^{-1/2} at lambda = 0"))?;
        Ok(self.scale(f, &c))
    }

    /// `Π₀` through `J`: constants go to zero, other eigenfunctions are kept.
    fn pi0(&self, f: &ModeFunction) -> Step<ModeFunction> {
        let image = self.jac(f)?;
        match self.eigen(f, &image, "J")? {
            None => Ok(f.clone()),
            Some(mu) if mu.is_zero() => Ok(ModeFunction::new(
                f.decay,
                QuadPoly::zero(self.lambda.clone(), self.d),
            )),
            Some(mu) => {
                self.require_lambda(&mu, "J")?;
                Ok(f.clone())
            }
        }
    }

    /// `P_t^n` on an eigenfunction of `J`.
    fn poisson(&self, f: &ModeFunction, n: u32) -> Step<ModeFunction> {
        let image = self.jac(f)?;
        match self.eigen(f, &image, "J")? {
            None => Ok(f.clone()),
            Some(mu) => {
                self.require_lambda(&mu, "J")?;
                Ok(ModeFunction::new(f.decay + n, f.value.clone()))
            }
        }
    }

    /// `P̃^j_t` on an eigenfunction of `M_j`.
    fn poisson_modified(&self, j: usize, f: &ModeFunction) -> Step<ModeFunction> {
        let image = self.modified(j, f)?;
        match self.eigen(f, &image, "M")? {
            None => Ok(f.clone()),
            Some(mu) => {
                self.require_lambda(&mu, "M")?;
                Ok(ModeFunction::new(f.decay + 1, f.value.clone()))
            }
        }
    }

    /// `J^{-1/2} Π₀`.
    fn jac_inv_sqrt_pi0(&self, f: &ModeFunction) -> Step<ModeFunction> {
        let g = self.pi0(f)?;
        if g.is_zero() {
            return Ok(g);
        }
        self.inv_sqrt(&g)
    }

    /// `R_j = δ_j J^{-1/2} Π₀`.
    fn riesz(&self, j: usize, f: &ModeFunction) -> Step<ModeFunction> {
        self.delta(j, &self.jac_inv_sqrt_pi0(f)?)
    }

    /// `R̄_j = δ*_j M_j^{-1/2}`.
    fn riesz_bar(&self, j: usize, f: &ModeFunction) -> Step<ModeFunction> {
        if f.is_zero() {
            return Ok(f.clone());
        }
        let image = self.modified(j, f)?;
        if let Some(mu) = self.eigen(f, &image, "M")? {
            self.require_lambda(&mu, "M")?;
        }
        self.delta_star(j, &self.inv_sqrt(f)?)
    }

    /// `U^j_t = P̃^j_t R_j`.
    fn conj(&self, j: usize, f: &ModeFunction) -> Step<ModeFunction> {
        self.poisson_modified(j, &self.riesz(j, f)?)
    }

    /// `Ū^j_t = P_t R̄_j`.
    fn conj_bar(&self, j: usize, f: &ModeFunction) -> Step<ModeFunction> {
        self.poisson(&self.riesz_bar(j, f)?, 1)
    }

    fn sum(&self, parts: &[ModeFunction]) -> Step<ModeFunction> {
        let mut acc = self.zero_mode();
        for p in parts {
            acc = acc
                .add(p)
                .ok_or_else(|| String::from("decay mismatch in sum"))?;
        }
        Ok(acc)
    }

    fn compare(&self, label: &str, lhs: &ModeFunction, rhs: &ModeFunction) -> Check {
        let r = lhs.residual(rhs).ok_or_else(|| {
            fail(format!(
                "{label}: decay e^(-{} t s) vs e^(-{} t s)",
                lhs.decay, rhs.decay
            ))
        })?;
        if r.is_zero() {
            Ok(())
        } else {
            Err(r
                .term_strings()
                .into_iter()
                .map(|t| format!("{label}: {t}"))
                .collect())
        }
    }

    fn check(&self, id: IdentityId) -> Check {
        let mut residual = Vec::new();
        let mut run = |label: String, c: Check| {
            if let Err(mut terms) = c {
                if terms.is_empty() {
                    terms.push(format!("{label}: failed"));
                }
                residual.append(&mut terms);
            }
        };
        macro_rules! step {
            ($label:expr, $e:expr) => {
                match $e {
                    Ok(v) => v,
                    Err(msg) => {
                        let label: String = $label;
                        let msg = format!("{}: {}", label, msg);
                        run(label, Err(fail(msg)));
                        continue;
                    }
                }
            };
        }
        let d = self.d;
        let pk = self.standard();
        let f = self.mode(pk.clone());
        match id {
            IdentityId::Derivative => {
                for j in 0..d {
                    let lhs = self
                        .cached(0, j, &pk, || Ok(apply_delta(j, &pk)))
                        .expect("δ is total");
                    let rhs = match self.shifted_below(j) {
                        None => PhiPoly::zero(d),
                        Some(s) => {
                            let c = (rat(self.k[j] as i64)
                                + self.p.alpha(j)
                                + self.p.beta(j)
                                + Rational::one())
                                / rat(2);
                            s.scale(&c)
                        }
                    };
                    run(
                        format!("j={}", j + 1),
                        self.compare("", &self.mode(lhs), &self.mode(rhs)),
                    );
                }
            }
            IdentityId::Adjoint => {
                for j in 0..d {
                    let Some(s) = self.shifted_below(j) else {
                        continue;
                    };
                    let lhs = step!(
                        format!("j={}", j + 1),
                        self.cached(1, j, &s, || apply_delta_star(j, self.p, &s))
                            .map_err(|e| format!("{e}"))
                    );
                    let rhs = pk.scale(&rat(2 * self.k[j] as i64));
                    run(
                        format!("j={}", j + 1),
                        self.compare(&format!("j={}", j + 1), &self.mode(lhs), &self.mode(rhs)),
                    );
                }
            }
            IdentityId::Factorization => {
                let mut monomial = PhiPoly::one(d);
                for (i, &ki) in self.k.iter().enumerate() {
                    monomial = monomial.shift_x(i, ki);
                }
                for (label, g) in [("P_k", &pk), ("x^k", &monomial)] {
                    let lhs = self.cached(2, 0, g, || apply_jacobi_operator(self.p, g));
                    let rhs = factorized_jacobi_operator(self.p, g);
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) => run(
                            label.into(),
                            self.compare(label, &self.mode(a), &self.mode(b)),
                        ),
                        (Err(e), _) | (_, Err(e)) => {
                            run(label.into(), Err(fail(format!("{label}: {e}"))))
                        }
                    }
                }
            }
            IdentityId::Commutator => {
                for i in 0..d {
                    let basis = self.basis(Some(i), &self.k);
                    let mut mono = PhiPoly::phi(d, i);
                    for (l, &kl) in self.k.iter().enumerate() {
                        mono = mono.shift_x(l, kl);
                    }
                    for (label, g) in [("basis", &basis), ("monomial", &mono)] {
                        let label = format!("i={} {label}", i + 1);
                        let a = self.cached(3, i, g, || apply_modified_operator(i, self.p, g));
                        let b = apply_modified_operator_commutator(i, self.p, g);
                        match (a, b) {
                            (Ok(a), Ok(b)) => run(
                                label.clone(),
                                self.compare(&label, &self.mode(a), &self.mode(b)),
                            ),
                            (Err(e), _) | (_, Err(e)) => {
                                run(label.clone(), Err(fail(format!("{label}: {e}"))))
                            }
                        }
                    }
                }
            }
            IdentityId::EigenJ => {
                let lhs = step_once(self.cached(2, 0, &pk, || apply_jacobi_operator(self.p, &pk)));
                match lhs {
                    Ok(a) => run(
                        "J".into(),
                        self.compare("J", &self.mode(a), &self.mode(pk.scale(&self.lambda))),
                    ),
                    Err(e) => run("J".into(), Err(fail(e))),
                }
            }
            IdentityId::EigenM => {
                for i in 0..d {
                    let g = self.basis(Some(i), &self.k);
                    let mut up = self.k.clone();
                    up[i] += 1;
                    let mu = self.p.eigenvalue(&up);
                    let label = format!("i={}", i + 1);
                    let lhs = step!(
                        label.clone(),
                        self.cached(3, i, &g, || apply_modified_operator(i, self.p, &g))
                            .map_err(|e| format!("{e}"))
                    );
                    run(
                        label.clone(),
                        self.compare(&label, &self.mode(lhs), &self.mode(g.scale(&mu))),
                    );
                }
            }
            IdentityId::Cr1 => {
                for i in 0..d {
                    for j in (i + 1)..d {
                        let label = format!("i={} j={}", i + 1, j + 1);
                        let ui = step!(label.clone(), self.conj(i, &f));
                        let uj = step!(label.clone(), self.conj(j, &f));
                        let lhs = step!(label.clone(), self.delta(j, &ui));
                        let rhs = step!(label.clone(), self.delta(i, &uj));
                        run(label.clone(), self.compare(&label, &lhs, &rhs));
                    }
                }
            }
            IdentityId::Cr2 => {
                for j in 0..d {
                    let label = format!("j={}", j + 1);
                    let pt = step!(label.clone(), self.poisson(&f, 1));
                    let lhs = step!(label.clone(), self.delta(j, &pt));
                    let uj = step!(label.clone(), self.conj(j, &f));
                    run(label.clone(), self.compare(&label, &lhs, &uj.dt().neg()));
                }
            }
            IdentityId::Cr3 => {
                let mut parts = Vec::new();
                for j in 0..d {
                    let label = format!("j={}", j + 1);
                    let uj = step!(label.clone(), self.conj(j, &f));
                    parts.push(step!(label, self.delta_star(j, &uj)));
                }
                if parts.len() == d {
                    match (self.sum(&parts), self.poisson(&f, 1)) {
                        (Ok(lhs), Ok(pt)) => {
                            run("sum".into(), self.compare("sum", &lhs, &pt.dt().neg()))
                        }
                        (Err(e), _) | (_, Err(e)) => run("sum".into(), Err(fail(e))),
                    }
                }
            }
            IdentityId::Cr5 => {
                for j in 0..d {
                    let label = format!("j={}", j + 1);
                    let uj = step!(label.clone(), self.conj(j, &f));
                    let mj = step!(label.clone(), self.modified(j, &uj));
                    run(label.clone(), self.compare(&label, &uj.dt().dt(), &mj));
                }
            }
            IdentityId::Hh1 | IdentityId::Hh2 | IdentityId::Hh3 => {
                for j in 0..d {
                    let Some(g) = self.shifted_below(j) else {
                        continue;
                    };
                    let g = self.mode(g);
                    let label = format!("j={}", j + 1);
                    let ubar = step!(label.clone(), self.conj_bar(j, &g));
                    match id {
                        IdentityId::Hh1 => {
                            let pt = step!(label.clone(), self.poisson_modified(j, &g));
                            let lhs = step!(label.clone(), self.delta_star(j, &pt));
                            run(label.clone(), self.compare(&label, &lhs, &ubar.dt().neg()));
                        }
                        IdentityId::Hh2 => {
                            let lhs = step!(label.clone(), self.delta(j, &ubar));
                            let pt = step!(label.clone(), self.poisson_modified(j, &g));
                            run(label.clone(), self.compare(&label, &lhs, &pt.dt().neg()));
                        }
                        _ => {
                            let jf = step!(label.clone(), self.jac(&ubar));
                            run(label.clone(), self.compare(&label, &ubar.dt().dt(), &jf));
                        }
                    }
                }
            }
            IdentityId::SumRbarR => {
                let mut parts = Vec::new();
                for j in 0..d {
                    let label = format!("j={}", j + 1);
                    let r = step!(label.clone(), self.riesz(j, &f));
                    parts.push(step!(label, self.riesz_bar(j, &r)));
                }
                if parts.len() == d {
                    match (self.sum(&parts), self.pi0(&f)) {
                        (Ok(lhs), Ok(rhs)) => run("sum".into(), self.compare("sum", &lhs, &rhs)),
                        (Err(e), _) | (_, Err(e)) => run("sum".into(), Err(fail(e))),
                    }
                }
            }
            IdentityId::Hh4 => {
                let mut parts = Vec::new();
                for j in 0..d {
                    let label = format!("j={}", j + 1);
                    let u = step!(label.clone(), self.conj(j, &f));
                    parts.push(step!(label, self.conj_bar(j, &u)));
                }
                if parts.len() == d {
                    let rhs = self.pi0(&f).and_then(|g| self.poisson(&g, 2));
                    match (self.sum(&parts), rhs) {
                        (Ok(lhs), Ok(rhs)) => run("sum".into(), self.compare("sum", &lhs, &rhs)),
                        (Err(e), _) | (_, Err(e)) => run("sum".into(), Err(fail(e))),
                    }
                }
            }
            IdentityId::Spf2 => {
                for j in 0..d {
                    let label = format!("j={}", j + 1);
                    let lhs = step!(label.clone(), self.conj(j, &f));
                    let pt = step!(label.clone(), self.poisson(&f, 1));
                    let rhs = step!(label.clone(), self.riesz(j, &pt));
                    run(label.clone(), self.compare(&label, &lhs, &rhs));
                }
            }
            IdentityId::Potential => {
                let built = self
                    .pi0(&f)
                    .and_then(|g| self.poisson(&g, 1).map(|pt| (g, pt)))
                    .and_then(|(g, pt)| self.jac_inv_sqrt_pi0(&pt).map(|big_f| (g, pt, big_f)));
                match built {
                    Err(e) => run("F".into(), Err(fail(e))),
                    Ok((_, pt_pi0, big_f)) => {
                        for j in 0..d {
                            let label = format!("j={}", j + 1);
                            let lhs = step!(label.clone(), self.delta(j, &big_f));
                            let uj = step!(label.clone(), self.conj(j, &f));
                            run(label.clone(), self.compare(&label, &lhs, &uj));
                        }
                        run("dt".into(), self.compare("dt", &big_f.dt(), &pt_pi0.neg()));
                        match self.jac(&big_f) {
                            Ok(jf) => run(
                                "harmonic".into(),
                                self.compare("harmonic", &big_f.dt().dt(), &jf),
                            ),
                            Err(e) => run("harmonic".into(), Err(fail(e))),
                        }
                    }
                }
            }
        }
        if residual.is_empty() {
            Ok(())
        } else {
            Err(residual)
        }
    }
}

fn step_once(r: Result<PhiPoly>) -> Step<PhiPoly> {
    r.map_err(|e| format!("{e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: &[(i64, i64)], b: &[(i64, i64)]) -> RationalParamVector {
        RationalParamVector::from_ratios(a, b).unwrap()
    }

    #[test]
    fn names_round_trip() {
        assert_eq!(IdentityId::ALL.len(), 17);
        for id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
        }
        assert!(matches!(
            "cr4".parse::<IdentityId>(),
            Err(Error::UnknownIdentity(_))
        ));
        assert!(verify_identity("nope", &params(&[(0, 1)], &[(0, 1)]), 1).is_err());
    }

    #[test]
    fn modes_enumeration() {
        assert_eq!(modes_up_to(1, 3).len(), 4);
        assert_eq!(modes_up_to(2, 4).len(), 15);
        assert_eq!(modes_up_to(3, 4).len(), 35);
    }

    #[test]
    fn sum_rbar_r_at_one_one() {
        let p = params(&[(0, 1), (0, 1)], &[(0, 1), (0, 1)]);
        let r = verify_identity_at(IdentityId::SumRbarR, &p, &[1, 1]);
        assert_eq!(r.status, Status::Pass, "{:?}", r.residual_terms);
    }

    #[test]
    fn everything_passes_in_one_dimension() {
        let vals = [(-1, 2), (0, 1), (1, 2), (1, 1), (3, 2)];
        for &a in &vals {
            for &b in &vals {
                let p = params(&[a], &[b]);
                for id in IdentityId::ALL {
                    for r in verify_identity(id.name(), &p, 4).unwrap() {
                        assert_eq!(
                            r.status,
                            Status::Pass,
                            "{id} {a:?} {b:?} {:?} {:?}",
                            r.mode,
                            r.residual_terms
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hh2_not_claimed_in_two_dimensions() {
        let p = params(&[(0, 1), (1, 2)], &[(0, 1), (0, 1)]);
        let r = verify_identity_at(IdentityId::Hh2, &p, &[1, 1]);
        assert_eq!(r.status, Status::NotApplicable);
    }

    #[test]
    fn mutated_identity_fails() {
        // A wrong eigenvalue must be caught: check J P_k against a perturbed λ.
        let p = params(&[(1, 2)], &[(0, 1)]);
        let memo = Memo::default();
        let ctx = Ctx::new(&p, &[2], &memo);
        let pk = ctx.standard();
        let wrong = pk.scale(&(&ctx.lambda + rat(1)));
        assert!(ctx
            .compare(
                "J",
                &ctx.mode(apply_jacobi_operator(&p, &pk).unwrap()),
                &ctx.mode(wrong)
            )
            .is_err());
    }

    #[test]
    fn cr2_at_degree_one() {
        let p = params(&[(0, 1)], &[(0, 1)]);
        let r = verify_identity_at(IdentityId::Cr2, &p, &[1]);
        assert_eq!(r.status, Status::Pass);
        let r = verify_identity_at(IdentityId::Cr2, &p, &[0]);
        assert_eq!(r.status, Status::Pass);
    }
}
