//! Expansions and the semigroups acting on them.
//!
//! The heat and Poisson semigroups are the multipliers `e^{-tλ_k}` and `e^{-t√λ_k}`
//! on the standard basis; the modified semigroups of coordinate `i` act on the
//! `i`-shifted basis with `λ_{k+e_i}` (original parameters).

pub(crate) mod eval;
mod kernel;
mod types;

use alloc::vec;
use alloc::vec::Vec;

pub use eval::{
    evaluate, evaluate_axis_op, evaluate_jacobi, evaluate_modified, evaluate_with_ops,
    factor_values, AxisOp,
};
pub use kernel::{
    heat_kernel_table, heat_kernel_table_between, modified_kernel_table, KernelTable,
    KernelVariant, KERNEL_PATH_TOLERANCE, KERNEL_RESIDUAL_RATIO,
};
pub use types::{Basis, Expansion, MultiIndex, ParamVector};

use crate::polycore::{jacobi_values, squared_norm, ParamPair};
use crate::quadrature::{gauss_jacobi, HalfLineRule};
use crate::{math, Error, Result};

/// Which multiplier a semigroup uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SemigroupKind {
    Heat,
    Poisson,
}

impl SemigroupKind {
    /// `e^{-tλ}` or `e^{-t√λ}`.
    pub fn multiplier(self, t: f64, lambda: f64) -> f64 {
        match self {
            SemigroupKind::Heat => math::exp(-t * lambda),
            SemigroupKind::Poisson => math::exp(-t * math::sqrt(lambda)),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "time",
            value: t,
        })
    }
}

/// `T_t` or `P_t` on a standard-basis expansion.
pub fn apply_semigroup(kind: SemigroupKind, t: f64, f: &Expansion) -> Result<Expansion> {
    check_time(t)?;
    f.require_basis(Basis::Standard)?;
    Ok(f.map_coefficients(|k, v| v * kind.multiplier(t, f.mode_eigenvalue(k))))
}

pub fn apply_heat(t: f64, f: &Expansion) -> Result<Expansion> {
    apply_semigroup(SemigroupKind::Heat, t, f)
}

pub fn apply_poisson(t: f64, f: &Expansion) -> Result<Expansion> {
    apply_semigroup(SemigroupKind::Poisson, t, f)
}

/// Modified semigroup of coordinate `i` on an `i`-shifted expansion: mode `k` is
/// multiplied by `e^{-tλ_{k+e_i}}` or `e^{-t√λ_{k+e_i}}`.
pub fn apply_modified(i: usize, kind: SemigroupKind, t: f64, f: &Expansion) -> Result<Expansion> {
    check_time(t)?;
    f.require_basis(Basis::Shifted(i))?;
    Ok(f.map_coefficients(|k, v| v * kind.multiplier(t, f.mode_eigenvalue(k))))
}

/// `Π₀ f`: the expansion without its constant mode.
pub fn project_pi0(f: &Expansion) -> Result<Expansion> {
    f.require_basis(Basis::Standard)?;
    let zero = MultiIndex::zero(f.dim());
    let coeffs = f
        .coefficients()
        .iter()
        .filter(|(k, _)| **k != zero)
        .map(|(k, &v)| (k.clone(), v))
        .collect();
    Ok(f.with_coefficients(Basis::Standard, f.degree_cap(), coeffs))
}

fn check_point(f: &Expansion, x: &[f64]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.len(),
        });
    }
    if let Some(&v) = x.iter().find(|v| !(math::abs(**v) < 1.0)) {
        return Err(Error::Domain {
            what: "synthesis point",
            value: v,
        });
    }
    Ok(())
}

/// Basis values `B_k(x)` for every stored mode, in the expansion's iteration order.
pub(crate) fn basis_values_at(f: &Expansion, x: &[f64]) -> Vec<f64> {
    let cap = f
        .coefficients()
        .keys()
        .flat_map(|k| k.as_slice().iter().copied())
        .max()
        .unwrap_or(0);
    let per_axis: Vec<Vec<f64>> = (0..f.dim())
        .map(|j| {
            let shifted = f.basis() == Basis::Shifted(j);
            factor_values(
                f.params().pair(j),
                shifted,
                AxisOp::Value,
                cap as usize + 1,
                x[j],
            )
        })
        .collect();
    f.coefficients()
        .keys()
        .map(|k| {
            k.as_slice()
                .iter()
                .enumerate()
                .map(|(j, &kj)| per_axis[j][kj as usize])
                .product()
        })
        .collect()
}

/// `Σ_k c_k B_k(x)` at an interior point.
pub fn synthesize(f: &Expansion, x: &[f64]) -> Result<f64> {
    check_point(f, x)?;
    Ok(basis_values_at(f, x)
        .iter()
        .zip(f.coefficients().values())
        .map(|(b, c)| b * c)
        .sum())
}

/// Values on the tensor mesh `axes` (row-major, last axis fastest).
pub fn synthesize_grid(f: &Expansion, axes: &[Vec<f64>]) -> Result<Vec<f64>> {
    if axes.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: axes.len(),
        });
    }
    if let Some(&v) = axes.iter().flatten().find(|v| !(math::abs(**v) < 1.0)) {
        return Err(Error::Domain {
            what: "synthesis point",
            value: v,
        });
    }
    Ok(evaluate(f, axes))
}

/// `n` equispaced interior points `-1 + 2(j+1)/(n+1)`.
pub fn interior_mesh(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| -1.0 + 2.0 * (j + 1) as f64 / (n + 1) as f64)
        .collect()
}

/// Result of evaluating `P_t f(x)` through the subordination integral.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubordinationResult {
    pub value: f64,
    /// Difference to the same integral with half the step.
    pub check_difference: f64,
    pub under_resolved: bool,
}

/// Tolerance of the half-step self-check in [`subordinated_poisson`].
pub const SUBORDINATION_CHECK_TOLERANCE: f64 = 1e-10;

/// `P_t f(x) = π^{-1/2} ∫_0^∞ u^{-1/2} e^{-u} T_{t²/(4u)} f(x) du`.
pub fn subordinated_poisson(
    t: f64,
    f: &Expansion,
    x: &[f64],
    rule: &HalfLineRule,
) -> Result<SubordinationResult> {
    check_time(t)?;
    f.require_basis(Basis::Standard)?;
    check_point(f, x)?;
    let weighted: Vec<(f64, f64)> = basis_values_at(f, x)
        .iter()
        .zip(f.coefficients())
        .map(|(b, (k, c))| (b * c, f.mode_eigenvalue(k)))
        .collect();
    let heat_at = |u: f64| {
        let s = t * t / (4.0 * u);
        weighted
            .iter()
            .map(|(bc, lam)| bc * math::exp(-s * lam))
            .sum::<f64>()
    };
    let value = rule.integrate(heat_at);
    let fine = rule.refined().integrate(heat_at);
    let check_difference = math::abs(value - fine);
    Ok(SubordinationResult {
        value,
        check_difference,
        under_resolved: check_difference > SUBORDINATION_CHECK_TOLERANCE * (1.0 + math::abs(fine)),
    })
}

/// `n` log-spaced times from `t_min` to `t_max` inclusive.
pub fn log_t_grid(n: usize, t_min: f64, t_max: f64) -> Vec<f64> {
    if n == 1 {
        return vec![t_min];
    }
    let (a, b) = (math::ln(t_min), math::ln(t_max));
    (0..n)
        .map(|j| math::exp(a + (b - a) * j as f64 / (n - 1) as f64))
        .collect()
}

/// The default grid of 65 times in `[1e-3, 1e2]`.
pub fn default_t_grid() -> Vec<f64> {
    log_t_grid(65, 1e-3, 1e2)
}

/// `max_t |S_t f(x)|` over `t_grid`; a lower bound of the maximal function.
pub fn maximal_operator(
    kind: SemigroupKind,
    f: &Expansion,
    x: &[f64],
    t_grid: &[f64],
) -> Result<f64> {
    f.require_basis(Basis::Standard)?;
    check_point(f, x)?;
    for &t in t_grid {
        check_time(t)?;
    }
    let weighted: Vec<(f64, f64)> = basis_values_at(f, x)
        .iter()
        .zip(f.coefficients())
        .map(|(b, (k, c))| (b * c, f.mode_eigenvalue(k)))
        .collect();
    Ok(t_grid
        .iter()
        .map(|&t| {
            math::abs(
                weighted
                    .iter()
                    .map(|(bc, lam)| bc * kind.multiplier(t, *lam))
                    .sum::<f64>(),
            )
        })
        .fold(0.0, f64::max))
}

/// Modified semigroup of a coordinate applied to the constant `1`, which is not a
/// finite combination of the shifted basis. Since `1` is a product, only the factor
/// of that coordinate matters, so this works with one pair `(α, β)`.
///
/// The coefficients `⟨1, Φ P⁺_k⟩ / ‖P⁺_k‖²` are integrals of `P⁺_k` against the
/// weight `(1-x)^{α+½}(1+x)^{β+½}` and are computed exactly by Gauss quadrature; the
/// series is cut where the multiplier drops below `1e-17`.
pub fn modified_semigroup_on_one(
    kind: SemigroupKind,
    t: f64,
    pair: ParamPair,
    xs: &[f64],
) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "time",
            value: t,
        });
    }
    if let Some(&v) = xs.iter().find(|v| !(math::abs(**v) < 1.0)) {
        return Err(Error::Domain {
            what: "evaluation point",
            value: v,
        });
    }
    const CUTOFF: f64 = 1e-17;
    const MAX_MODES: usize = 4000;
    let lam = |k: usize| crate::polycore::eigenvalue_value(pair, k as u32 + 1);
    let mut modes = 1;
    while modes < MAX_MODES && kind.multiplier(t, lam(modes)) > CUTOFF {
        modes += 1;
    }
    let up = pair.raised();
    let half = ParamPair::new(pair.alpha() + 0.5, pair.beta() + 0.5)?;
    let rule = gauss_jacobi(half, modes / 2 + 2)?;
    let mut coeffs = vec![0.0; modes];
    for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
        for (c, p) in coeffs.iter_mut().zip(jacobi_values(up, y, modes)) {
            *c += w * p;
        }
    }
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c *= kind.multiplier(t, lam(k)) / squared_norm(up, k as u32);
    }
    Ok(xs
        .iter()
        .map(|&x| {
            let vals = jacobi_values(up, x, modes);
            crate::polycore::phi_unchecked(x)
                * vals.iter().zip(&coeffs).map(|(p, c)| p * c).sum::<f64>()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(d: usize, a: f64, b: f64) -> ParamVector {
        ParamVector::uniform(d, a, b).unwrap()
    }

    #[test]
    fn heat_examples() {
        let p = params(2, 0.5, -0.25);
        let one = Expansion::constant(p.clone(), 1.0);
        assert_eq!(apply_heat(3.0, &one).unwrap(), one);
        assert_eq!(apply_poisson(3.0, &one).unwrap(), one);
        let k = MultiIndex::new(vec![2, 1]);
        let e = Expansion::single_mode(p.clone(), Basis::Standard, k.clone()).unwrap();
        let lam = p.eigenvalue(k.as_slice());
        assert_eq!(apply_heat(0.7, &e).unwrap().get(&k), (-0.7 * lam).exp());
        assert_eq!(
            apply_poisson(0.7, &e).unwrap().get(&k),
            (-0.7 * lam.sqrt()).exp()
        );
        let sh = Expansion::single_mode(p, Basis::Shifted(0), MultiIndex::zero(2)).unwrap();
        assert!(matches!(
            apply_heat(1.0, &sh),
            Err(Error::BasisMismatch { .. })
        ));
        assert!(apply_heat(-1.0, &one).is_err());
    }

    #[test]
    fn semigroup_law_and_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = params(2, -0.75, 1.0);
        let f = Expansion::random(p, Basis::Standard, 5, &mut rng).unwrap();
        let a = apply_heat(0.3, &apply_heat(0.4, &f).unwrap()).unwrap();
        let b = apply_heat(0.7, &f).unwrap();
        for (k, v) in b.coefficients() {
            assert!((a.get(k) - v).abs() <= 1e-14 * v.abs());
        }
        assert!(apply_poisson(0.2, &f).unwrap().l2_norm() <= f.l2_norm());
        let pi = project_pi0(&f).unwrap();
        assert_eq!(
            apply_poisson(0.9, &pi).unwrap(),
            project_pi0(&apply_poisson(0.9, &f).unwrap()).unwrap()
        );
        assert_eq!(project_pi0(&pi).unwrap(), pi);
    }

    #[test]
    fn modified_examples() {
        let p = params(1, 0.0, 0.0);
        let e = Expansion::single_mode(p, Basis::Shifted(0), MultiIndex::zero(1)).unwrap();
        let h = apply_modified(0, SemigroupKind::Heat, 1.0, &e).unwrap();
        assert!((h.get(&MultiIndex::zero(1)) - (-2.0f64).exp()).abs() < 1e-16);
        let std = Expansion::constant(params(1, 0.0, 0.0), 1.0);
        assert!(apply_modified(0, SemigroupKind::Heat, 1.0, &std).is_err());
    }

    #[test]
    fn synthesis_examples() {
        let p = params(2, 0.0, 0.0);
        let e = Expansion::single_mode(p.clone(), Basis::Standard, MultiIndex::new(vec![1, 2]))
            .unwrap();
        let x = [0.3, -0.6];
        let want = 0.3 * 0.5 * (3.0 * 0.36 - 1.0);
        assert!((synthesize(&e, &x).unwrap() - want).abs() < 1e-15);
        assert!(synthesize(&e, &[1.0, 0.0]).is_err());
        let grid = synthesize_grid(&e, &[vec![0.3], vec![-0.6]]).unwrap();
        assert!((grid[0] - want).abs() < 1e-15);
        let sh = Expansion::single_mode(p, Basis::Shifted(1), MultiIndex::zero(2)).unwrap();
        assert!((synthesize(&sh, &[0.2, 0.6]).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn subordination_matches_spectral() {
        let rule = HalfLineRule::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = params(2, 0.5, -0.5);
        let f = Expansion::random(p, Basis::Standard, 6, &mut rng).unwrap();
        let x = [0.25, -0.7];
        for &t in &[0.3, 0.7, 3.0] {
            let r = subordinated_poisson(t, &f, &x, &rule).unwrap();
            let s = synthesize(&apply_poisson(t, &f).unwrap(), &x).unwrap();
            assert!((r.value - s).abs() < 1e-10, "t={t}");
            assert!(!r.under_resolved);
        }
        let one = Expansion::constant(params(1, 0.0, 0.0), 1.0);
        assert!(
            (subordinated_poisson(1.0, &one, &[0.0], &rule)
                .unwrap()
                .value
                - 1.0)
                .abs()
                < 1e-14
        );
    }

    #[test]
    fn maximal_operator_examples() {
        let grid = default_t_grid();
        assert_eq!(grid.len(), 65);
        assert!((grid[0] - 1e-3).abs() < 1e-18 && (grid[64] - 100.0).abs() < 1e-10);
        let one = Expansion::constant(params(1, 0.0, 0.0), 1.0);
        assert!(
            (maximal_operator(SemigroupKind::Heat, &one, &[0.4], &grid).unwrap() - 1.0).abs()
                < 1e-15
        );
        let e = Expansion::single_mode(
            params(1, 0.0, 0.0),
            Basis::Standard,
            MultiIndex::new(vec![1]),
        )
        .unwrap();
        let m = maximal_operator(SemigroupKind::Poisson, &e, &[0.4], &grid).unwrap();
        assert!((m - 0.4 * (-1e-3 * 2f64.sqrt()).exp()).abs() < 1e-15);
    }

    #[test]
    fn modified_semigroup_on_one_contracts_in_half_range() {
        let xs = interior_mesh(51);
        for &(a, b) in &[(0.0, 0.0), (1.0, 2.0), (0.5, -0.25)] {
            let pair = ParamPair::new(a, b).unwrap();
            for kind in [SemigroupKind::Heat, SemigroupKind::Poisson] {
                let v = modified_semigroup_on_one(kind, 0.1, pair, &xs).unwrap();
                assert!(
                    v.iter().all(|&y| y <= 1.0 + 1e-10 && y >= 0.0),
                    "{a} {b} {kind:?}"
                );
            }
        }
        let low = ParamPair::new(-0.9, -0.9).unwrap();
        for kind in [SemigroupKind::Heat, SemigroupKind::Poisson] {
            let v = modified_semigroup_on_one(kind, 0.1, low, &xs).unwrap();
            assert!(v.iter().cloned().fold(0.0, f64::max) > 1.01, "{kind:?}");
        }
    }
}
