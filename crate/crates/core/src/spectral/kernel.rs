//! Heat kernels tabulated from their eigenfunction series.

use alloc::vec;
use alloc::vec::Vec;

use crate::polycore::{eigenvalue_value, jacobi_values, phi_unchecked, squared_norm, ParamPair};
use crate::spectral::{MultiIndex, ParamVector};
use crate::{math, Error, Result};

/// A shell whose largest contribution is below this fraction of the running maximum
/// counts as negligible; two in a row end the summation.
const SHELL_STOP_RATIO: f64 = 1e-12;
/// Tables whose last retained shell exceeds this fraction of `max |G|` are flagged.
pub const KERNEL_RESIDUAL_RATIO: f64 = 1e-10;
/// Allowed disagreement between the two constructions of the modified kernel.
pub const KERNEL_PATH_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum KernelVariant {
    Heat,
    /// Kernel of the modified heat semigroup of coordinate `i` (zero-based).
    Modified(usize),
}

/// `G(x_a, y_b)` for all pairs of mesh points, row-major in `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelTable {
    pub t: f64,
    pub params: ParamVector,
    pub variant: KernelVariant,
    pub x_points: Vec<Vec<f64>>,
    pub y_points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Largest total degree `|k|` that was summed.
    pub truncation_degree: u32,
    /// Largest magnitude contributed by the last summed shell.
    pub residual: f64,
    pub converged: bool,
    /// For modified kernels: largest difference between the two constructions.
    pub path_difference: Option<f64>,
}

impl KernelTable {
    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.y_points.len() + b]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }
}

/// Points of the tensor mesh `axes` in row-major order.
fn mesh_points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(pts.len() * axis.len());
        for p in &pts {
            for &x in axis {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Per-axis description of a product eigenbasis: family parameters of the polynomial
/// factor, whether the factor carries `Φ`, the eigenvalue offset and the norms.
struct AxisSeries {
    family: ParamPair,
    with_phi: bool,
    lambda: Vec<f64>,
    norm: Vec<f64>,
}

struct SeriesSum {
    values: Vec<f64>,
    degree: u32,
    residual: f64,
    converged: bool,
}

fn factor_table(ax: &AxisSeries, x: f64, m: usize) -> Vec<f64> {
    let mut v = jacobi_values(ax.family, x, m);
    if ax.with_phi {
        let ph = phi_unchecked(x);
        v.iter_mut().for_each(|y| *y *= ph);
    }
    v
}

/// `Σ_k e^{-tλ_k} B_k(x) B_k(y) / ‖B_k‖²` summed shell by shell in `|k|`.
fn sum_series(
    t: f64,
    axes: &[AxisSeries],
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    max_degree: u32,
) -> SeriesSum {
    let m = max_degree as usize + 1;
    let d = axes.len();
    let table = |pts: &[Vec<f64>]| -> Vec<Vec<Vec<f64>>> {
        pts.iter()
            .map(|p| (0..d).map(|j| factor_table(&axes[j], p[j], m)).collect())
            .collect()
    };
    let (tx, ty) = (table(xs), table(ys));
    let (nx, ny) = (xs.len(), ys.len());
    let mut values = vec![0.0; nx * ny];
    let mut running: f64 = 0.0;
    let mut quiet = 0;
    let mut last = 0.0;
    let mut degree = 0;
    let mut shell = vec![0.0; nx * ny];
    for s in 0..=max_degree {
        shell.iter_mut().for_each(|v| *v = 0.0);
        for k in MultiIndex::shell(d, s) {
            let ks = k.as_slice();
            let lam: f64 = ks
                .iter()
                .enumerate()
                .map(|(j, &kj)| axes[j].lambda[kj as usize])
                .sum();
            let h: f64 = ks
                .iter()
                .enumerate()
                .map(|(j, &kj)| axes[j].norm[kj as usize])
                .product();
            let c = math::exp(-t * lam) / h;
            if c == 0.0 {
                continue;
            }
            let prod = |tab: &Vec<Vec<f64>>| -> f64 {
                ks.iter()
                    .enumerate()
                    .map(|(j, &kj)| tab[j][kj as usize])
                    .product()
            };
            let vx: Vec<f64> = tx.iter().map(prod).collect();
            let vy: Vec<f64> = ty.iter().map(prod).collect();
            for (a, &va) in vx.iter().enumerate() {
                let cv = c * va;
                for (b, &vb) in vy.iter().enumerate() {
                    shell[a * ny + b] += cv * vb;
                }
            }
        }
        let shell_max = shell.iter().fold(0.0, |m: f64, v| m.max(math::abs(*v)));
        for (v, s) in values.iter_mut().zip(&shell) {
            *v += s;
        }
        running = values.iter().fold(running, |m, v| m.max(math::abs(*v)));
        last = shell_max;
        degree = s;
        if s > 0 && shell_max <= SHELL_STOP_RATIO * running {
            quiet += 1;
            if quiet == 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let converged = last <= KERNEL_RESIDUAL_RATIO * running;
    SeriesSum {
        values,
        degree,
        residual: last,
        converged,
    }
}

fn standard_axes(params: &ParamVector, max_degree: u32) -> Vec<AxisSeries> {
    params
        .pairs()
        .iter()
        .map(|&p| AxisSeries {
            family: p,
            with_phi: false,
            lambda: (0..=max_degree).map(|k| eigenvalue_value(p, k)).collect(),
            norm: (0..=max_degree).map(|k| squared_norm(p, k)).collect(),
        })
        .collect()
}

fn check_inputs(
    t: f64,
    params: &ParamVector,
    x_axes: &[Vec<f64>],
    y_axes: &[Vec<f64>],
) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "kernel time",
            value: t,
        });
    }
    for axes in [x_axes, y_axes] {
        if axes.len() != params.dim() {
            return Err(Error::DimensionMismatch {
                expected: params.dim(),
                found: axes.len(),
            });
        }
        if let Some(&v) = axes.iter().flatten().find(|v| !(math::abs(**v) < 1.0)) {
            return Err(Error::Domain {
                what: "kernel mesh point",
                value: v,
            });
        }
    }
    Ok(())
}

/// Heat kernel `G_t(x, y)` between two tensor meshes, summing shells `|k| ≤ max_degree`.
pub fn heat_kernel_table_between(
    t: f64,
    params: &ParamVector,
    x_axes: &[Vec<f64>],
    y_axes: &[Vec<f64>],
    max_degree: u32,
) -> Result<KernelTable> {
    check_inputs(t, params, x_axes, y_axes)?;
    let (xs, ys) = (mesh_points(x_axes), mesh_points(y_axes));
    let sum = sum_series(t, &standard_axes(params, max_degree), &xs, &ys, max_degree);
    Ok(KernelTable {
        t,
        params: params.clone(),
        variant: KernelVariant::Heat,
        x_points: xs,
        y_points: ys,
        values: sum.values,
        truncation_degree: sum.degree,
        residual: sum.residual,
        converged: sum.converged,
        path_difference: None,
    })
}

/// Heat kernel `G_t(x, y)` on the square of one tensor mesh.
pub fn heat_kernel_table(
    t: f64,
    params: &ParamVector,
    axes: &[Vec<f64>],
    max_degree: u32,
) -> Result<KernelTable> {
    heat_kernel_table_between(t, params, axes, axes, max_degree)
}

/// Modified kernel `G̃^i_t(x, y)`, built as
/// `e^{-t(α_i+β_i+2)} Φ_i(x) Φ_i(y) G_t^{(α+e_i, β+e_i)}(x, y)` and cross-checked
/// against the direct series over the `i`-shifted basis.
pub fn modified_kernel_table(
    i: usize,
    t: f64,
    params: &ParamVector,
    axes: &[Vec<f64>],
    max_degree: u32,
) -> Result<KernelTable> {
    if i >= params.dim() {
        return Err(Error::InvalidArgument(
            "modified coordinate out of range".into(),
        ));
    }
    let shifted = params.shifted(i);
    let mut table = heat_kernel_table(t, &shifted, axes, max_degree)?;
    let p = params.pair(i);
    let damp = math::exp(-t * (p.alpha() + p.beta() + 2.0));
    let ny = table.y_points.len();
    for (a, x) in table.x_points.iter().enumerate() {
        let fx = damp * phi_unchecked(x[i]);
        for (b, y) in table.y_points.iter().enumerate() {
            table.values[a * ny + b] *= fx * phi_unchecked(y[i]);
        }
    }

    let mut direct_axes = standard_axes(params, max_degree);
    direct_axes[i] = AxisSeries {
        family: p.raised(),
        with_phi: true,
        lambda: (0..=max_degree)
            .map(|k| eigenvalue_value(p, k + 1))
            .collect(),
        norm: (0..=max_degree)
            .map(|k| squared_norm(p.raised(), k))
            .collect(),
    };
    let direct = sum_series(
        t,
        &direct_axes,
        &table.x_points,
        &table.y_points,
        max_degree,
    );
    let diff = table
        .values
        .iter()
        .zip(&direct.values)
        .fold(0.0, |m: f64, (a, b)| m.max(math::abs(a - b)));

    table.params = params.clone();
    table.variant = KernelVariant::Modified(i);
    table.converged = table.converged && direct.converged && diff <= KERNEL_PATH_TOLERANCE;
    table.path_difference = Some(diff);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_jacobi;
    use crate::spectral::{apply_heat, interior_mesh, synthesize, Basis, Expansion};

    #[test]
    fn kernel_is_symmetric_positive_and_reproduces_one() {
        let p = ParamVector::uniform(1, 0.0, 0.0).unwrap();
        let mesh = vec![interior_mesh(21)];
        for &t in &[0.1, 0.5, 1.0] {
            let g = heat_kernel_table(t, &p, &mesh, 400).unwrap();
            assert!(g.converged, "t={t}");
            let n = g.x_points.len();
            for a in 0..n {
                for b in 0..n {
                    assert!((g.value(a, b) - g.value(b, a)).abs() <= 1e-12 * g.max_abs());
                    assert!(g.value(a, b) > 0.0);
                }
            }
        }
        // ∫ G_t(x, y) dμ(y) = 1.
        let rule = gauss_jacobi(p.pair(0), 60).unwrap();
        let g = heat_kernel_table_between(0.2, &p, &mesh, &[rule.nodes.clone()], 200).unwrap();
        for a in 0..g.x_points.len() {
            let s: f64 = (0..rule.len())
                .map(|b| rule.weights[b] * g.value(a, b))
                .sum();
            assert!((s - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn kernel_reproduces_semigroup() {
        let p = ParamVector::uniform(1, 0.5, -0.5).unwrap();
        let rule = gauss_jacobi(p.pair(0), 40).unwrap();
        let mut f = Expansion::new(p.clone(), Basis::Standard, 4).unwrap();
        for (k, v) in [(0u32, 0.5), (1, -1.0), (3, 0.25), (4, 2.0)] {
            f.set(MultiIndex::new(vec![k]), v).unwrap();
        }
        let xs = interior_mesh(9);
        let g =
            heat_kernel_table_between(0.3, &p, &[xs.clone()], &[rule.nodes.clone()], 200).unwrap();
        let tf = apply_heat(0.3, &f).unwrap();
        for (a, &x) in xs.iter().enumerate() {
            let s: f64 = (0..rule.len())
                .map(|b| {
                    rule.weights[b] * g.value(a, b) * synthesize(&f, &[rule.nodes[b]]).unwrap()
                })
                .sum();
            assert!((s - synthesize(&tf, &[x]).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn modified_paths_agree() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, -0.5), (1.0, 2.0), (-0.9, -0.9)] {
            let p = ParamVector::new(&[a, 0.5], &[b, 0.0]).unwrap();
            let mesh = vec![interior_mesh(5), interior_mesh(4)];
            let g = modified_kernel_table(0, 0.5, &p, &mesh, 120).unwrap();
            assert!(
                g.path_difference.unwrap() <= KERNEL_PATH_TOLERANCE,
                "{a} {b}"
            );
            assert!(g.converged);
        }
    }

    #[test]
    fn small_time_with_low_cap_is_flagged() {
        let p = ParamVector::uniform(1, 0.0, 0.0).unwrap();
        let g = heat_kernel_table(1e-3, &p, &[interior_mesh(11)], 10).unwrap();
        assert!(!g.converged);
        assert_eq!(g.truncation_degree, 10);
        assert!(heat_kernel_table(0.0, &p, &[interior_mesh(3)], 10).is_err());
    }
}
