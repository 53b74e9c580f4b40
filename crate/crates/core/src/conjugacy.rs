//! Riesz transforms, their adjoints and conjugate Poisson integrals.
//!
//! All operators are spectral maps: a mode is relabelled between the standard and
//! an `i`-shifted basis and multiplied by a scalar. Grids only enter through residual
//! checks of the Cauchy–Riemann system.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::polycore::ParamPair;
use crate::quadrature::gauss_jacobi;
use crate::spectral::{
    apply_modified, apply_poisson, evaluate, evaluate_axis_op, evaluate_jacobi, evaluate_modified,
    project_pi0, synthesize, AxisOp, Basis, Expansion, MultiIndex, ParamVector, SemigroupKind,
};
use crate::{math, Error, Result};

fn check_coordinate(f: &Expansion, i: usize) -> Result<()> {
    if i < f.dim() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "coordinate {} out of range for d = {}",
            i + 1,
            f.dim()
        )))
    }
}

/// `½ (k_i + α_i + β_i + 1)`, the factor in `δ_i P_k = c Φ_i P⁺_{k-e_i}`.
fn delta_factor(p: ParamPair, ki: u32) -> f64 {
    0.5 * (ki as f64 + p.alpha() + p.beta() + 1.0)
}

/// Relabel standard modes `k` (with `k_i > 0`) to shifted-`i` modes `k - e_i`.
fn lower_to_shifted(
    f: &Expansion,
    i: usize,
    factor: impl Fn(&MultiIndex) -> f64,
) -> Result<Expansion> {
    check_coordinate(f, i)?;
    f.require_basis(Basis::Standard)?;
    let mut out = BTreeMap::new();
    for (k, &v) in f.coefficients() {
        if let Some(m) = k.lowered(i) {
            let c = v * factor(k);
            if c != 0.0 {
                out.insert(m, c);
            }
        }
    }
    Ok(f.with_coefficients(Basis::Shifted(i), f.degree_cap(), out))
}

/// Relabel shifted-`i` modes `m` to standard modes `m + e_i`.
fn raise_to_standard(
    f: &Expansion,
    i: usize,
    factor: impl Fn(&MultiIndex) -> f64,
) -> Result<Expansion> {
    check_coordinate(f, i)?;
    f.require_basis(Basis::Shifted(i))?;
    let mut out = BTreeMap::new();
    for (m, &v) in f.coefficients() {
        let k = m.raised(i);
        let c = v * factor(&k);
        if c != 0.0 {
            out.insert(k, c);
        }
    }
    Ok(f.with_coefficients(Basis::Standard, f.degree_cap() + 1, out))
}

/// `R_i f = δ_i J^{-1/2} Π₀ f`: mode `k` with `k_i > 0` goes to shifted mode `k - e_i`
/// with factor `½ λ_k^{-1/2} (k_i + α_i + β_i + 1)`; modes with `k_i = 0` vanish.
pub fn riesz(i: usize, f: &Expansion) -> Result<Expansion> {
    let p = f.params().clone();
    lower_to_shifted(f, i, |k| {
        let lam = p.eigenvalue(k.as_slice());
        debug_assert!(lam > 0.0);
        delta_factor(p.pair(i), k.as_slice()[i]) / math::sqrt(lam)
    })
}

/// `R̄_i = δ*_i M_i^{-1/2}`: shifted mode `m` goes to standard mode `m + e_i` with
/// factor `2 (m_i + 1) λ_{m+e_i}^{-1/2}`.
pub fn riesz_adjoint(i: usize, f: &Expansion) -> Result<Expansion> {
    let p = f.params().clone();
    raise_to_standard(f, i, |k| {
        2.0 * k.as_slice()[i] as f64 / math::sqrt(p.eigenvalue(k.as_slice()))
    })
}

/// `U^i_t f = P̃^i_t R_i f`. At `t = 0` this is `R_i f`.
pub fn conjugate_poisson(i: usize, t: f64, f: &Expansion) -> Result<Expansion> {
    apply_modified(i, SemigroupKind::Poisson, t, &riesz(i, f)?)
}

/// `U^i_t f` from its series: coefficient `½ λ_k^{-1/2} (k_i+α_i+β_i+1) e^{-t√λ_k} a_k`.
pub fn conjugate_poisson_series(i: usize, t: f64, f: &Expansion) -> Result<Expansion> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "time",
            value: t,
        });
    }
    let p = f.params().clone();
    lower_to_shifted(f, i, |k| {
        let s = math::sqrt(p.eigenvalue(k.as_slice()));
        delta_factor(p.pair(i), k.as_slice()[i]) * math::exp(-t * s) / s
    })
}

/// `Ū^i_t g = P_t R̄_i g` for a shifted-`i` expansion `g`.
pub fn conjugate_poisson_adjoint(i: usize, t: f64, g: &Expansion) -> Result<Expansion> {
    apply_poisson(t, &riesz_adjoint(i, g)?)
}

/// `δ_j` or its adjoint `δ*_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaKind {
    Delta,
    DeltaStar,
}

/// Spectral action where it exists: `δ_j` from the standard basis to the shifted-`j`
/// basis and `δ*_j` back. Other combinations report a basis mismatch.
pub fn delta_spectral(j: usize, f: &Expansion, kind: DeltaKind) -> Result<Expansion> {
    check_coordinate(f, j)?;
    let pair = f.params().pair(j);
    match kind {
        DeltaKind::Delta => lower_to_shifted(f, j, |k| delta_factor(pair, k.as_slice()[j])),
        DeltaKind::DeltaStar => raise_to_standard(f, j, |k| 2.0 * k.as_slice()[j] as f64),
    }
}

/// `δ_j f` or `δ*_j f` on a tensor mesh, factor by factor (any basis).
pub fn delta_grid(j: usize, f: &Expansion, kind: DeltaKind, axes: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_coordinate(f, j)?;
    check_axes(f, axes)?;
    let op = match kind {
        DeltaKind::Delta => AxisOp::Delta,
        DeltaKind::DeltaStar => AxisOp::DeltaStar,
    };
    Ok(evaluate_axis_op(f, axes, j, op))
}

/// Output of [`delta_apply`].
#[derive(Clone, Debug, PartialEq)]
pub enum DeltaOutput {
    Spectral(Expansion),
    /// Values on the mesh; produced when no spectral map exists for the basis.
    Grid(Vec<f64>),
}

/// Spectral `δ_j` / `δ*_j` when the basis allows it, mesh values otherwise.
pub fn delta_apply(
    j: usize,
    f: &Expansion,
    kind: DeltaKind,
    axes: &[Vec<f64>],
) -> Result<DeltaOutput> {
    match delta_spectral(j, f, kind) {
        Ok(e) => Ok(DeltaOutput::Spectral(e)),
        Err(Error::BasisMismatch { .. }) => Ok(DeltaOutput::Grid(delta_grid(j, f, kind, axes)?)),
        Err(e) => Err(e),
    }
}

/// `(-P_t Π₀ f, U^1_t f, …, U^d_t f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateField {
    pub t: f64,
    pub scalar: Expansion,
    pub components: Vec<Expansion>,
}

pub fn conjugate_field(f: &Expansion, t: f64) -> Result<ConjugateField> {
    let scalar = apply_poisson(t, &project_pi0(f)?)?.scaled(-1.0);
    let components = (0..f.dim())
        .map(|i| conjugate_poisson(i, t, f))
        .collect::<Result<_>>()?;
    Ok(ConjugateField {
        t,
        scalar,
        components,
    })
}

/// `F(t, ·) = Σ_{k≠0} a_k λ_k^{-1/2} e^{-t√λ_k} P_k`, whose gradient is the conjugate field.
pub fn potential_expansion(f: &Expansion, t: f64) -> Result<Expansion> {
    let pi = project_pi0(f)?;
    let p = f.params().clone();
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "time",
            value: t,
        });
    }
    Ok(pi.map_coefficients(|k, v| {
        let s = math::sqrt(p.eigenvalue(k.as_slice()));
        v * math::exp(-t * s) / s
    }))
}

pub fn potential_function(f: &Expansion, t: f64, x: &[f64]) -> Result<f64> {
    synthesize(&potential_expansion(f, t)?, x)
}

/// `∂_t` of a spectral family `Σ c_k e^{-t√λ_k} B_k`, times `sign`.
fn dt_poisson_family(e: &Expansion, sign: f64) -> Expansion {
    e.map_coefficients(|k, v| -sign * v * math::sqrt(e.mode_eigenvalue(k)))
}

fn dt2_poisson_family(e: &Expansion) -> Expansion {
    e.map_coefficients(|k, v| v * e.mode_eigenvalue(k))
}

fn check_axes(f: &Expansion, axes: &[Vec<f64>]) -> Result<()> {
    if axes.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: axes.len(),
        });
    }
    if let Some(&v) = axes.iter().flatten().find(|v| !(math::abs(**v) < 1.0)) {
        return Err(Error::Domain {
            what: "mesh point",
            value: v,
        });
    }
    Ok(())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m: f64, (x, y)| m.max(math::abs(x - y)))
}

fn add_into(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

/// Largest residual of one equation of the Cauchy–Riemann system.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualReport {
    pub equation: String,
    pub t: f64,
    pub params: ParamVector,
    pub max_residual: f64,
    pub grid_spec: String,
}

fn grid_spec(axes: &[Vec<f64>]) -> String {
    let dims: Vec<String> = axes.iter().map(|a| format!("{}", a.len())).collect();
    format!("tensor mesh {}", dims.join("x"))
}

/// Residuals of `cr1`–`cr3`, `cr5` for `f` and of `hh1`–`hh3` for `g_j = R_j f` on the
/// mesh `axes`, plus `hh4` coefficient-wise. `hh2` is only reported when `d = 1`.
///
/// The `∂_t` sides are spectral (multiplication by `-√λ` or `λ`), the `δ`, `δ*`, `J`,
/// `M` sides are evaluated on the mesh from the analytic one-dimensional factors.
pub fn verify_cauchy_riemann(
    f: &Expansion,
    t: f64,
    axes: &[Vec<f64>],
) -> Result<Vec<ResidualReport>> {
    f.require_basis(Basis::Standard)?;
    check_axes(f, axes)?;
    let d = f.dim();
    let spec = grid_spec(axes);
    let report = |name: &str, r: f64| ResidualReport {
        equation: name.into(),
        t,
        params: f.params().clone(),
        max_residual: r,
        grid_spec: spec.clone(),
    };
    let pt = apply_poisson(t, f)?;
    let u: Vec<Expansion> = (0..d)
        .map(|j| conjugate_poisson(j, t, f))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();

    // cr1: δ_j U^i = δ_i U^j.
    let mut r: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let a = evaluate_axis_op(&u[i], axes, j, AxisOp::Delta);
            let b = evaluate_axis_op(&u[j], axes, i, AxisOp::Delta);
            r = r.max(max_diff(&a, &b));
        }
    }
    out.push(report("cr1", r));

    // cr2: δ_j P_t f = -∂_t U^j.
    let mut r: f64 = 0.0;
    for j in 0..d {
        let a = evaluate_axis_op(&pt, axes, j, AxisOp::Delta);
        let b = evaluate(&dt_poisson_family(&u[j], -1.0), axes);
        r = r.max(max_diff(&a, &b));
    }
    out.push(report("cr2", r));

    // cr3: Σ_j δ*_j U^j = -∂_t P_t f.
    let mut lhs = vec![0.0; axes.iter().map(Vec::len).product()];
    for j in 0..d {
        add_into(
            &mut lhs,
            &evaluate_axis_op(&u[j], axes, j, AxisOp::DeltaStar),
        );
    }
    let rhs = evaluate(&dt_poisson_family(&pt, -1.0), axes);
    out.push(report("cr3", max_diff(&lhs, &rhs)));

    // cr5: ∂²_t U^j = M_j U^j.
    let mut r: f64 = 0.0;
    for j in 0..d {
        r = r.max(max_diff(
            &evaluate(&dt2_poisson_family(&u[j]), axes),
            &evaluate_modified(&u[j], axes, j),
        ));
    }
    out.push(report("cr5", r));

    let g: Vec<Expansion> = (0..d).map(|j| riesz(j, f)).collect::<Result<_>>()?;
    let ubar: Vec<Expansion> = (0..d)
        .map(|j| conjugate_poisson_adjoint(j, t, &g[j]))
        .collect::<Result<_>>()?;
    let ptilde: Vec<Expansion> = (0..d)
        .map(|j| apply_modified(j, SemigroupKind::Poisson, t, &g[j]))
        .collect::<Result<_>>()?;

    // hh1: δ*_j P̃^j_t g = -∂_t Ū^j_t g.
    let mut r: f64 = 0.0;
    for j in 0..d {
        let a = evaluate_axis_op(&ptilde[j], axes, j, AxisOp::DeltaStar);
        let b = evaluate(&dt_poisson_family(&ubar[j], -1.0), axes);
        r = r.max(max_diff(&a, &b));
    }
    out.push(report("hh1", r));

    // hh2 (one dimension): δ Ū_t g = -∂_t P̃_t g.
    if d == 1 {
        let a = evaluate_axis_op(&ubar[0], axes, 0, AxisOp::Delta);
        let b = evaluate(&dt_poisson_family(&ptilde[0], -1.0), axes);
        out.push(report("hh2", max_diff(&a, &b)));
    }

    // hh3: ∂²_t Ū^j_t g = J Ū^j_t g.
    let mut r: f64 = 0.0;
    for j in 0..d {
        r = r.max(max_diff(
            &evaluate(&dt2_poisson_family(&ubar[j]), axes),
            &evaluate_jacobi(&ubar[j], axes),
        ));
    }
    out.push(report("hh3", r));

    out.push(report("hh4", hh4_residual(f, t)?));
    Ok(out)
}

/// `max_k |(Σ_j Ū^j_t U^j_t f - P_{2t} Π₀ f)_k|`.
pub fn hh4_residual(f: &Expansion, t: f64) -> Result<f64> {
    let mut acc = Expansion::new(f.params().clone(), Basis::Standard, f.degree_cap() + 1)?;
    for j in 0..f.dim() {
        acc = acc.add(&conjugate_poisson_adjoint(
            j,
            t,
            &conjugate_poisson(j, t, f)?,
        )?)?;
    }
    acc.max_coefficient_difference(&apply_poisson(2.0 * t, &project_pi0(f)?)?)
}

/// Truncated norms `∫_{|x| < 1-ε} |δ* J^{-1/2} P_1|² dμ` for each `ε`. They grow like
/// `ln(1/ε)`, showing that `δ*_i J^{-1/2} Π₀` does not map into `L²`.
pub fn adjoint_blowup_diagnostic(pair: ParamPair, eps: &[f64]) -> Result<Vec<(f64, f64)>> {
    let (a, b) = (pair.alpha(), pair.beta());
    let lam = crate::polycore::eigenvalue_value(pair, 1);
    // P_1 = ((a+b+2)x + a - b)/2, so P_1' = (a+b+2)/2.
    let c1 = 0.5 * (a + b + 2.0);
    let c0 = 0.5 * (a - b);
    // x = tanh s: with Φ² = sech² s the integrand (δ*P_1)² w dx becomes
    // (−(1-x²)c1 + c_adj P_1)² w ds, which is smooth in s.
    let integrand = |s: f64| {
        let x = libm::tanh(s);
        let om = 1.0 / (libm::cosh(s) * libm::cosh(s));
        let p1 = c1 * x + c0;
        let c_adj = (a + 0.5) * (1.0 + x) - (b + 0.5) * (1.0 - x);
        let num = -om * c1 + c_adj * p1;
        let w = math::powf(1.0 - x, a) * math::powf(1.0 + x, b);
        num * num * w / lam
    };
    let gl = gauss_jacobi(ParamPair::legendre(), 20)?;
    let mut out = Vec::with_capacity(eps.len());
    for &e in eps {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::Domain {
                what: "truncation epsilon",
                value: e,
            });
        }
        let smax = libm::atanh(1.0 - e);
        let panels = (4.0 * smax).max(8.0) as usize;
        let h = 2.0 * smax / panels as f64;
        let mut total = 0.0;
        for q in 0..panels {
            let lo = -smax + q as f64 * h;
            for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
                total += 0.5 * h * w * integrand(lo + 0.5 * h * (x + 1.0));
            }
        }
        out.push((e, total));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::interior_mesh;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mode(p: &ParamVector, k: &[u32]) -> Expansion {
        Expansion::single_mode(p.clone(), Basis::Standard, MultiIndex::new(k.to_vec())).unwrap()
    }

    #[test]
    fn riesz_examples() {
        let p = ParamVector::uniform(1, 0.0, 0.0).unwrap();
        let r = riesz(0, &mode(&p, &[1])).unwrap();
        assert_eq!(r.basis(), Basis::Shifted(0));
        assert!((r.get(&MultiIndex::new(vec![0])) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(riesz(0, &Expansion::constant(p.clone(), 3.0))
            .unwrap()
            .coefficients()
            .is_empty());
        let p2 = ParamVector::uniform(2, 0.5, 0.0).unwrap();
        assert!(riesz(0, &mode(&p2, &[0, 3]))
            .unwrap()
            .coefficients()
            .is_empty());
        assert!(riesz(0, &r).is_err());

        let s =
            Expansion::single_mode(p.clone(), Basis::Shifted(0), MultiIndex::new(vec![0])).unwrap();
        let rb = riesz_adjoint(0, &s).unwrap();
        assert!((rb.get(&MultiIndex::new(vec![1])) - 2.0 / 2f64.sqrt()).abs() < 1e-15);
        let back = riesz_adjoint(0, &r).unwrap();
        assert!((back.get(&MultiIndex::new(vec![1])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sum_rbar_r_is_projection() {
        let p = ParamVector::new(&[0.0, -0.75], &[1.5, 0.5]).unwrap();
        let f = mode(&p, &[1, 2]);
        let mut acc = Expansion::new(p.clone(), Basis::Standard, 3).unwrap();
        for j in 0..2 {
            acc = acc
                .add(&riesz_adjoint(j, &riesz(j, &f).unwrap()).unwrap())
                .unwrap();
        }
        assert!(acc.max_coefficient_difference(&f).unwrap() < 1e-14);
    }

    #[test]
    fn conjugate_poisson_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = ParamVector::new(&[0.5, -0.5], &[0.0, 1.0]).unwrap();
        let f = Expansion::random(p, Basis::Standard, 4, &mut rng).unwrap();
        for i in 0..2 {
            let a = conjugate_poisson(i, 0.6, &f).unwrap();
            let b = conjugate_poisson_series(i, 0.6, &f).unwrap();
            let c = riesz(i, &apply_poisson(0.6, &f).unwrap()).unwrap();
            assert!(a.max_coefficient_difference(&b).unwrap() < 1e-14);
            assert!(a.max_coefficient_difference(&c).unwrap() < 1e-14);
            assert_eq!(
                conjugate_poisson(i, 0.0, &f).unwrap(),
                riesz(i, &f).unwrap()
            );
        }
        let field = conjugate_field(&f, 0.0).unwrap();
        assert_eq!(field.components[1], riesz(1, &f).unwrap());
    }

    #[test]
    fn delta_relations() {
        let p = ParamVector::uniform(1, 0.5, -0.25).unwrap();
        // δ δ* on Φ P⁺_{k-1} is λ_k.
        let k = 3;
        let s = Expansion::single_mode(p.clone(), Basis::Shifted(0), MultiIndex::new(vec![k - 1]))
            .unwrap();
        let ds = delta_spectral(0, &s, DeltaKind::DeltaStar).unwrap();
        let dds = delta_spectral(0, &ds, DeltaKind::Delta).unwrap();
        let lam = p.eigenvalue(&[k]);
        assert!((dds.get(&MultiIndex::new(vec![k - 1])) - lam).abs() < 1e-12);
        let c = delta_spectral(0, &Expansion::constant(p.clone(), 1.0), DeltaKind::Delta).unwrap();
        assert!(c.coefficients().is_empty());
        // Σ δ*_j δ_j P_k = λ_k P_k.
        let p2 = ParamVector::new(&[0.0, 1.0], &[0.5, 0.0]).unwrap();
        let f = mode(&p2, &[2, 3]);
        let mut acc = Expansion::new(p2.clone(), Basis::Standard, 4).unwrap();
        for j in 0..2 {
            let d = delta_spectral(j, &f, DeltaKind::Delta).unwrap();
            acc = acc
                .add(&delta_spectral(j, &d, DeltaKind::DeltaStar).unwrap())
                .unwrap();
        }
        assert!((acc.get(&MultiIndex::new(vec![2, 3])) - p2.eigenvalue(&[2, 3])).abs() < 1e-12);
        // Mixed coordinates fall back to the mesh.
        let u = riesz(0, &f).unwrap();
        let mesh = vec![interior_mesh(3), interior_mesh(4)];
        assert!(matches!(
            delta_apply(1, &u, DeltaKind::Delta, &mesh).unwrap(),
            DeltaOutput::Grid(_)
        ));
    }

    #[test]
    fn cauchy_riemann_residuals_are_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..=2 {
            let p = ParamVector::uniform(d, 0.5, -0.5).unwrap();
            let f = Expansion::random(p, Basis::Standard, 5, &mut rng).unwrap();
            let mesh: Vec<Vec<f64>> = (0..d).map(|_| interior_mesh(13)).collect();
            let rep = verify_cauchy_riemann(&f, 0.25, &mesh).unwrap();
            assert_eq!(rep.len(), if d == 1 { 8 } else { 7 });
            for r in rep {
                assert!(r.max_residual < 1e-9, "{} {}", r.equation, r.max_residual);
            }
        }
    }

    #[test]
    fn potential_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = ParamVector::new(&[0.0, 1.0], &[-0.5, 0.5]).unwrap();
        let f = Expansion::random(p, Basis::Standard, 4, &mut rng).unwrap();
        let t = 0.4;
        let pot = potential_expansion(&f, t).unwrap();
        let dt = pot.map_coefficients(|k, v| -v * pot.mode_eigenvalue(k).sqrt());
        let want = apply_poisson(t, &project_pi0(&f).unwrap())
            .unwrap()
            .scaled(-1.0);
        assert!(dt.max_coefficient_difference(&want).unwrap() < 1e-14);
        for i in 0..2 {
            let di = delta_spectral(i, &pot, DeltaKind::Delta).unwrap();
            assert!(
                di.max_coefficient_difference(&conjugate_poisson(i, t, &f).unwrap())
                    .unwrap()
                    < 1e-14
            );
        }
        let c = Expansion::constant(f.params().clone(), 2.0);
        assert_eq!(potential_function(&c, t, &[0.1, 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn blowup_grows_logarithmically() {
        let eps = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
        let v = adjoint_blowup_diagnostic(ParamPair::legendre(), &eps).unwrap();
        for w in v.windows(2) {
            let inc = w[1].1 - w[0].1;
            assert!((inc - 0.5 * 10f64.ln()).abs() < 5e-3, "{inc}");
        }
    }
}
