use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::frac::Frac;
use super::poly::{rat, PhiPoly};
use super::Rational;
use crate::spectral::ParamVector;
use crate::{Error, Result};

/// Default degree cap for [`jacobi_exact`].
pub const DEFAULT_DEGREE_CAP: u32 = 8;

/// Exact mirror of a [`ParamVector`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalParamVector {
    alpha: Vec<Rational>,
    beta: Vec<Rational>,
}

impl RationalParamVector {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Rational>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha.len(),
                found: beta.len(),
            });
        }
        if alpha.is_empty() || alpha.len() > 32 {
            return Err(Error::InvalidArgument("dimension must be in 1..=32".into()));
        }
        let minus_one = -Rational::one();
        for (a, b) in alpha.iter().zip(&beta) {
            if *a <= minus_one || *b <= minus_one {
                use num_traits::ToPrimitive;
                return Err(Error::InvalidParameter {
                    alpha: a.to_f64().unwrap_or(f64::NAN),
                    beta: b.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { alpha, beta })
    }

    /// Rational parameters from `(numerator, denominator)` pairs.
    pub fn from_ratios(alpha: &[(i64, i64)], beta: &[(i64, i64)]) -> Result<Self> {
        let conv = |v: &[(i64, i64)]| -> Vec<Rational> {
            v.iter()
                .map(|&(n, d)| Rational::new(n.into(), d.into()))
                .collect()
        };
        Self::new(conv(alpha), conv(beta))
    }

    /// Exact conversion of float parameters (every finite double is a dyadic rational).
    pub fn from_params(p: &ParamVector) -> Result<Self> {
        let conv = |x: f64| {
            Rational::from_float(x).ok_or(Error::InvalidArgument("non-finite parameter".into()))
        };
        let mut alpha = Vec::with_capacity(p.dim());
        let mut beta = Vec::with_capacity(p.dim());
        for pair in p.pairs() {
            alpha.push(conv(pair.alpha())?);
            beta.push(conv(pair.beta())?);
        }
        Self::new(alpha, beta)
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self, i: usize) -> &Rational {
        &self.alpha[i]
    }

    pub fn beta(&self, i: usize) -> &Rational {
        &self.beta[i]
    }

    /// `(α + e_i, β + e_i)`.
    pub fn shifted(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.alpha[i] += Rational::one();
        s.beta[i] += Rational::one();
        s
    }

    /// `λ_k = Σ k_i (k_i + α_i + β_i + 1)`.
    pub fn eigenvalue(&self, k: &[u32]) -> Rational {
        k.iter()
            .enumerate()
            .map(|(i, &ki)| {
                let kr = rat(ki as i64);
                &kr * (&kr + &self.alpha[i] + &self.beta[i] + Rational::one())
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn to_strings(&self) -> (Vec<alloc::string::String>, Vec<alloc::string::String>) {
        use alloc::string::ToString;
        (
            self.alpha.iter().map(|a| a.to_string()).collect(),
            self.beta.iter().map(|b| b.to_string()).collect(),
        )
    }
}

/// Falling factorial `a (a-1) ... (a-n+1)`.
fn falling(a: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    for j in 0..n {
        acc *= a - rat(j as i64);
    }
    acc
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut acc = Rational::one();
    for j in 0..k {
        acc = acc * rat((n - j) as i64) / rat((j + 1) as i64);
    }
    acc
}

/// Coefficients (lowest degree first) of `P_k^{(α,β)}` from the Rodrigues formula,
/// expanded with Leibniz' rule:
/// `P_k = (-1)^k / (2^k k!) Σ_j C(k,j) (-1)^{k-j} (α+k)_{k-j}↓ (β+k)_j↓ (1-x)^j (1+x)^{k-j}`.
pub fn jacobi_coefficients(alpha: &Rational, beta: &Rational, k: u32) -> Vec<Rational> {
    let n = k as usize;
    let mut out = alloc::vec![Rational::zero(); n + 1];
    let ak = alpha + rat(k as i64);
    let bk = beta + rat(k as i64);
    for j in 0..=k {
        let mut c = binomial(k, j) * falling(&ak, k - j) * falling(&bk, j);
        if (k - j) % 2 == 1 {
            c = -c;
        }
        // (1-x)^j (1+x)^{k-j} expanded.
        let mut poly = alloc::vec![Rational::zero(); n + 1];
        for a in 0..=j {
            for b in 0..=(k - j) {
                let mut term = binomial(j, a) * binomial(k - j, b);
                if a % 2 == 1 {
                    term = -term;
                }
                poly[(a + b) as usize] += term;
            }
        }
        for (o, p) in out.iter_mut().zip(poly) {
            *o += &c * p;
        }
    }
    let mut norm = Rational::one();
    for j in 1..=k {
        norm *= rat(2 * j as i64);
    }
    if k % 2 == 1 {
        norm = -norm;
    }
    out.into_iter().map(|c| c / &norm).collect()
}

/// `P_k^{(α,β)}` as a one-dimensional [`PhiPoly`].
pub fn jacobi_exact(alpha: &Rational, beta: &Rational, k: u32, cap: u32) -> Result<PhiPoly> {
    if k > cap {
        return Err(Error::DegreeCap { degree: k, cap });
    }
    Ok(PhiPoly::univariate(
        1,
        0,
        &jacobi_coefficients(alpha, beta, k),
    ))
}

/// Tensor product `∏_i P_{k_i}^{(α_i,β_i)}(x_i)`.
pub fn jacobi_exact_multi(p: &RationalParamVector, k: &[u32]) -> PhiPoly {
    let d = p.dim();
    assert_eq!(k.len(), d);
    let mut acc = PhiPoly::one(d);
    for (i, &ki) in k.iter().enumerate() {
        let f = PhiPoly::univariate(d, i, &jacobi_coefficients(p.alpha(i), p.beta(i), ki));
        acc = &acc * &f;
    }
    acc
}

/// Shifted basis function `Φ_i P_k^{(α+e_i,β+e_i)}`.
pub fn shifted_basis_exact(p: &RationalParamVector, i: usize, k: &[u32]) -> PhiPoly {
    jacobi_exact_multi(&p.shifted(i), k).mul_phi(i)
}

/// `δ_i f = Φ_i ∂_i f`.
pub fn apply_delta(i: usize, f: &PhiPoly) -> PhiPoly {
    Frac::from_poly(f.clone())
        .partial(i)
        .mul_phi(i)
        .into_poly("delta")
        .expect("δ_i maps the Φ-algebra into itself")
}

/// `(α_i + 1/2)(1 + x_i) - (β_i + 1/2)(1 - x_i)`.
fn adjoint_weight(p: &RationalParamVector, d: usize, i: usize) -> PhiPoly {
    let half = Rational::new(1.into(), 2.into());
    let a = p.alpha(i) + &half;
    let b = p.beta(i) + &half;
    let mut c = PhiPoly::constant(d, &a - &b);
    c += &PhiPoly::x(d, i).scale(&(&a + &b));
    c
}

/// `[(α_i + 1/2)(1 + x_i) + (β_i + 1/2)(1 - x_i)]`, numerator of the commutator.
fn commutator_weight(p: &RationalParamVector, d: usize, i: usize) -> PhiPoly {
    let half = Rational::new(1.into(), 2.into());
    let a = p.alpha(i) + &half;
    let b = p.beta(i) + &half;
    let mut c = PhiPoly::constant(d, &a + &b);
    c += &PhiPoly::x(d, i).scale(&(&a - &b));
    c
}

fn check_dim(p: &RationalParamVector, f: &PhiPoly) -> Result<()> {
    if p.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: f.dim(),
        });
    }
    Ok(())
}

/// `δ*_i f = -Φ_i ∂_i f + [(α_i+1/2)(1+x_i) - (β_i+1/2)(1-x_i)] f / Φ_i`.
pub fn apply_delta_star(i: usize, p: &RationalParamVector, f: &PhiPoly) -> Result<PhiPoly> {
    check_dim(p, f)?;
    let d = f.dim();
    let first = Frac::from_poly(f.clone())
        .partial(i)
        .mul_phi(i)
        .scale(&-Rational::one());
    // 1/Φ_i = Φ_i / (1 - x_i²)
    let second = Frac::from_poly((&adjoint_weight(p, d, i) * f).mul_phi(i)).div_d(i);
    first.add(&second).into_poly("delta_star")
}

fn jacobi_operator_frac(p: &RationalParamVector, f: &PhiPoly) -> Frac {
    let d = f.dim();
    let mut acc = Frac::from_poly(PhiPoly::zero(d));
    for i in 0..d {
        let df = Frac::from_poly(f.clone()).partial(i);
        let ddf = df.partial(i);
        // -(1 - x²) f'' - (β - α - (α + β + 2) x) f'
        let mut drift = PhiPoly::constant(d, p.beta(i) - p.alpha(i));
        drift -= &PhiPoly::x(d, i).scale(&(p.alpha(i) + p.beta(i) + rat(2)));
        let term = ddf
            .mul_poly(&PhiPoly::one_minus_x2(d, i))
            .add(&df.mul_poly(&drift));
        acc = acc.add(&term.scale(&-Rational::one()));
    }
    acc
}

/// `J f = -Σ_i [(1 - x_i²) ∂_i² f + (β_i - α_i - (α_i + β_i + 2) x_i) ∂_i f]`.
pub fn apply_jacobi_operator(p: &RationalParamVector, f: &PhiPoly) -> Result<PhiPoly> {
    check_dim(p, f)?;
    jacobi_operator_frac(p, f).into_poly("jacobi_operator")
}

/// `Σ_i δ*_i δ_i f`.
pub fn factorized_jacobi_operator(p: &RationalParamVector, f: &PhiPoly) -> Result<PhiPoly> {
    check_dim(p, f)?;
    let mut acc = PhiPoly::zero(f.dim());
    for i in 0..f.dim() {
        acc += &apply_delta_star(i, p, &apply_delta(i, f))?;
    }
    Ok(acc)
}

/// `M_i f = δ_i δ*_i f + Σ_{j≠i} δ*_j δ_j f`.
pub fn apply_modified_operator(i: usize, p: &RationalParamVector, f: &PhiPoly) -> Result<PhiPoly> {
    check_dim(p, f)?;
    let mut acc = apply_delta(i, &apply_delta_star(i, p, f)?);
    for j in (0..f.dim()).filter(|&j| j != i) {
        acc += &apply_delta_star(j, p, &apply_delta(j, f))?;
    }
    Ok(acc)
}

/// `M_i f = J f + [(α_i+1/2)/(1-x_i) + (β_i+1/2)/(1+x_i)] f`, the commutator form.
pub fn apply_modified_operator_commutator(
    i: usize,
    p: &RationalParamVector,
    f: &PhiPoly,
) -> Result<PhiPoly> {
    check_dim(p, f)?;
    let j = jacobi_operator_frac(p, f);
    let extra = Frac::from_poly(&commutator_weight(p, f.dim(), i) * f).div_d(i);
    j.add(&extra).into_poly("modified_operator")
}

/// Rational `μ` with `image = μ·f`, or `None` if `image` is not a multiple of `f`.
/// The zero function is an eigenvector for every `μ`; `Some(None)` signals that.
pub(crate) fn eigen_ratio(f: &PhiPoly, image: &PhiPoly) -> Option<Option<Rational>> {
    let Some((m, c)) = f.terms().next() else {
        return image.is_zero().then_some(None);
    };
    let mu = image.coefficient(m) / c;
    (&f.scale(&mu) == image).then_some(Some(mu))
}
