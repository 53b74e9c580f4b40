//! Sum-factorised evaluation of expansions on tensor meshes.
//!
//! Every basis function is a product of one-dimensional factors, so an expansion is
//! evaluated by contracting its dense coefficient tensor with one small matrix per
//! axis. The same machinery applies first-order operators (`δ_j`, `δ*_j`) and the
//! one-dimensional pieces of `J` and `M_i` analytically, factor by factor.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::polycore::{jacobi_values, ParamPair};
use crate::spectral::{Basis, Expansion};

/// One-dimensional operator applied to the factor of a single coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisOp {
    Value,
    /// `δ = Φ d/dx`.
    Delta,
    /// `δ* = -Φ d/dx + [(α+½)(1+x) - (β+½)(1-x)]/Φ`.
    DeltaStar,
    /// One-dimensional Jacobi operator `-(1-x²) d²/dx² - (β-α-(α+β+2)x) d/dx`.
    Jacobi,
    /// Multiplication by `[(α+½)(1+x) + (β+½)(1-x)]/(1-x²)`, the commutator term of `M`.
    Potential,
}

/// Values of `op(F_k)(x)` for `k = 0..m`, where `F_k = P_k^{(α,β)}` or, for a
/// shifted axis, `F_k = Φ P_k^{(α+1,β+1)}`. `x` must lie in the open interval
/// unless `op` is `Value` or `Delta`.
pub fn factor_values(pair: ParamPair, shifted: bool, op: AxisOp, m: usize, x: f64) -> Vec<f64> {
    let (a, b) = (pair.alpha(), pair.beta());
    let fam = if shifted { pair.raised() } else { pair };
    let (fa, fb) = (fam.alpha(), fam.beta());
    let g = jacobi_values(fam, x, m);
    let need_d1 = op != AxisOp::Value && op != AxisOp::Potential;
    let need_d2 = op == AxisOp::Jacobi;
    let g1: Vec<f64> = if need_d1 {
        let up = jacobi_values(fam.raised(), x, m.saturating_sub(1));
        (0..m)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    0.5 * (k as f64 + fa + fb + 1.0) * up[k - 1]
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let g2: Vec<f64> = if need_d2 {
        let up2 = jacobi_values(fam.raised().raised(), x, m.saturating_sub(2));
        (0..m)
            .map(|k| {
                if k < 2 {
                    0.0
                } else {
                    let kf = k as f64;
                    0.25 * (kf + fa + fb + 1.0) * (kf + fa + fb + 2.0) * up2[k - 2]
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let phi = math::sqrt((1.0 - x) * (1.0 + x));
    let one_m = (1.0 - x) * (1.0 + x);
    let c_adj = (a + 0.5) * (1.0 + x) - (b + 0.5) * (1.0 - x);
    let c_com = (a + 0.5) * (1.0 + x) + (b + 0.5) * (1.0 - x);
    let drift = b - a - (a + b + 2.0) * x;
    (0..m)
        .map(|k| {
            let (v, d1) = (g[k], if need_d1 { g1[k] } else { 0.0 });
            match (shifted, op) {
                (false, AxisOp::Value) => v,
                (false, AxisOp::Delta) => phi * d1,
                (false, AxisOp::DeltaStar) => -phi * d1 + c_adj * v / phi,
                (false, AxisOp::Jacobi) => -(one_m * g2[k] + drift * d1),
                (false, AxisOp::Potential) => c_com * v / one_m,
                (true, AxisOp::Value) => phi * v,
                (true, AxisOp::Delta) => one_m * d1 - x * v,
                (true, AxisOp::DeltaStar) => -one_m * d1 + x * v + c_adj * v,
                (true, AxisOp::Jacobi) => {
                    // F = Φg: F' = Φg' - xg/Φ, (1-x²)F'' = Φ(1-x²)g'' - 2xΦg' - g/Φ.
                    let f1 = phi * d1 - x * v / phi;
                    let f2_scaled = phi * one_m * g2[k] - 2.0 * x * phi * d1 - v / phi;
                    -(f2_scaled + drift * f1)
                }
                (true, AxisOp::Potential) => c_com * v / phi,
            }
        })
        .collect()
}

/// Contract axis `axis` of a row-major tensor of shape `shape` with the matrix
/// `mat` (`rows × shape[axis]`, row-major), replacing that extent by `rows`.
pub(crate) fn contract_axis(
    t: &[f64],
    shape: &[usize],
    axis: usize,
    mat: &[f64],
    rows: usize,
) -> Vec<f64> {
    let m = shape[axis];
    debug_assert_eq!(mat.len(), rows * m);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![0.0; outer * rows * inner];
    for o in 0..outer {
        let src = &t[o * m * inner..(o + 1) * m * inner];
        let dst = &mut out[o * rows * inner..(o + 1) * rows * inner];
        for r in 0..rows {
            let row = &mat[r * m..(r + 1) * m];
            let d = &mut dst[r * inner..(r + 1) * inner];
            for (k, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let s = &src[k * inner..(k + 1) * inner];
                for (di, si) in d.iter_mut().zip(s) {
                    *di += c * si;
                }
            }
        }
    }
    out
}

/// Dense coefficient tensor of `f` with extent `max k_j + 1` per axis.
pub(crate) fn dense_coefficients(f: &Expansion) -> (Vec<f64>, Vec<usize>) {
    let d = f.dim();
    let mut shape = vec![1usize; d];
    for k in f.coefficients().keys() {
        for (s, &kj) in shape.iter_mut().zip(k.as_slice()) {
            *s = (*s).max(kj as usize + 1);
        }
    }
    let len: usize = shape.iter().product();
    let mut t = vec![0.0; len];
    for (k, &v) in f.coefficients() {
        let mut idx = 0;
        for (j, &kj) in k.as_slice().iter().enumerate() {
            idx = idx * shape[j] + kj as usize;
        }
        t[idx] += v;
    }
    (t, shape)
}

/// Evaluate `∏_j op_j` applied to `f` at every point of the tensor mesh `axes`
/// (row-major, last axis fastest).
pub fn evaluate_with_ops(f: &Expansion, axes: &[Vec<f64>], ops: &[AxisOp]) -> Vec<f64> {
    let d = f.dim();
    assert_eq!(axes.len(), d, "one axis per coordinate");
    assert_eq!(ops.len(), d, "one operator per coordinate");
    let (mut t, mut shape) = dense_coefficients(f);
    for j in 0..d {
        let m = shape[j];
        let shifted = f.basis() == Basis::Shifted(j);
        let pair = f.params().pair(j);
        let n = axes[j].len();
        let mut mat = vec![0.0; n * m];
        for (r, &x) in axes[j].iter().enumerate() {
            mat[r * m..(r + 1) * m].copy_from_slice(&factor_values(pair, shifted, ops[j], m, x));
        }
        t = contract_axis(&t, &shape, j, &mat, n);
        shape[j] = n;
    }
    t
}

/// Plain values of `f` on the mesh.
pub fn evaluate(f: &Expansion, axes: &[Vec<f64>]) -> Vec<f64> {
    let ops = vec![AxisOp::Value; f.dim()];
    evaluate_with_ops(f, axes, &ops)
}

/// `op` on coordinate `j`, identity elsewhere.
pub fn evaluate_axis_op(f: &Expansion, axes: &[Vec<f64>], j: usize, op: AxisOp) -> Vec<f64> {
    let mut ops = vec![AxisOp::Value; f.dim()];
    ops[j] = op;
    evaluate_with_ops(f, axes, &ops)
}

/// `J f` on the mesh, as the sum of the one-dimensional pieces.
pub fn evaluate_jacobi(f: &Expansion, axes: &[Vec<f64>]) -> Vec<f64> {
    let mut acc = vec![0.0; axes.iter().map(Vec::len).product()];
    for j in 0..f.dim() {
        for (a, v) in acc
            .iter_mut()
            .zip(evaluate_axis_op(f, axes, j, AxisOp::Jacobi))
        {
            *a += v;
        }
    }
    acc
}

/// `M_i f = J f + [(α_i+½)/(1-x_i) + (β_i+½)/(1+x_i)] f` on the mesh.
pub fn evaluate_modified(f: &Expansion, axes: &[Vec<f64>], i: usize) -> Vec<f64> {
    let mut acc = evaluate_jacobi(f, axes);
    for (a, v) in acc
        .iter_mut()
        .zip(evaluate_axis_op(f, axes, i, AxisOp::Potential))
    {
        *a += v;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_matches_naive() {
        // 2×3 tensor, contract axis 1 with a 2×3 matrix.
        let t = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let mat = [1.0, 0.0, -1.0, 0.5, 0.5, 0.5];
        let out = contract_axis(&t, &[2, 3], 1, &mat, 2);
        assert_eq!(out, vec![-2.0, 3.0, -2.0, 7.5]);
        let out0 = contract_axis(&t, &[2, 3], 0, &[1.0, 1.0], 1);
        assert_eq!(out0, vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn factor_identities_hold_pointwise() {
        // δ P_k = ½(k+α+β+1) Φ P^{(α+1,β+1)}_{k-1} and δ*(Φ P^+_{k-1}) = 2k P_k.
        let pair = ParamPair::new(0.5, -0.25).unwrap();
        let x = 0.3;
        let m = 8;
        let plain = factor_values(pair, false, AxisOp::Value, m + 1, x);
        let d = factor_values(pair, false, AxisOp::Delta, m + 1, x);
        let sh = factor_values(pair, true, AxisOp::Value, m, x);
        let ds = factor_values(pair, true, AxisOp::DeltaStar, m, x);
        for k in 1..=m {
            let c = 0.5 * (k as f64 + 0.5 - 0.25 + 1.0);
            assert!((d[k] - c * sh[k - 1]).abs() < 1e-13);
            assert!((ds[k - 1] - 2.0 * k as f64 * plain[k]).abs() < 1e-12);
        }
        // J P_k = λ_k P_k and M(Φ P^+_k) = λ_{k+1} Φ P^+_k.
        let j = factor_values(pair, false, AxisOp::Jacobi, m, x);
        let js = factor_values(pair, true, AxisOp::Jacobi, m, x);
        let pot = factor_values(pair, true, AxisOp::Potential, m, x);
        for k in 0..m {
            let lam = |k: f64| k * (k + 0.5 - 0.25 + 1.0);
            assert!((j[k] - lam(k as f64) * plain[k]).abs() < 1e-11);
            assert!((js[k] + pot[k] - lam(k as f64 + 1.0) * sh[k]).abs() < 1e-11);
        }
    }
}
