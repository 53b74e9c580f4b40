//! Gauss–Jacobi rules, tensor grids, Fourier–Jacobi coefficients and `L^p(dμ)` norms.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::polycore::{jacobi_derivative_unchecked, jacobi_values, squared_norm, ParamPair};
use crate::spectral::eval::contract_axis;
use crate::spectral::{Basis, Expansion, MultiIndex, ParamVector};
use crate::{Error, Result};

const QL_MAX_SWEEPS: usize = 60;

/// `n`-point Gauss rule for `dμ_{(α,β)} = (1-x)^α (1+x)^β dx`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadRule1D {
    pub params: ParamPair,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Recurrence coefficients of the monic Jacobi polynomials: diagonal `a_n` and the
/// squared off-diagonal `b_n²` (`n ≥ 1`).
fn jacobi_recurrence(p: ParamPair, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (p.alpha(), p.beta());
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for (k, dk) in diag.iter_mut().enumerate() {
        *dk = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            let s = 2.0 * k as f64 + a + b;
            (b * b - a * a) / (s * (s + 2.0))
        };
    }
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let b2 = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off[k - 1] = math::sqrt(b2);
    }
    (diag, off)
}

/// Eigenvalues of the symmetric tridiagonal matrix `(d, e)` by implicit QL with
/// Wilkinson shifts; `e[i]` couples rows `i` and `i+1`. Sorted ascending.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    e.resize(n, 0.0);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(d[m]) + math::abs(d[m + 1]);
                if math::abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    what: "tridiagonal QL",
                    iterations: sweeps,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Gauss–Jacobi rule: nodes from the eigenvalues of the Jacobi matrix, refined by
/// Newton steps on `P_n`, weights from the Christoffel function
/// `w_j = 1 / Σ_{k<n} P_k(x_j)² / ‖P_k‖²`.
pub fn gauss_jacobi(p: ParamPair, n: usize) -> Result<QuadRule1D> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "a quadrature rule needs at least one node".into(),
        ));
    }
    let (diag, off) = jacobi_recurrence(p, n);
    let mut nodes = tridiagonal_eigenvalues(diag, off)?;
    let n32 = n as u32;
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let v = jacobi_values(p, *x, n + 1)[n];
            let dv = jacobi_derivative_unchecked(p, n32, *x);
            if dv == 0.0 {
                break;
            }
            let step = v / dv;
            let next = *x - step;
            if next > -1.0 && next < 1.0 {
                *x = next;
            }
            if math::abs(step) <= 1e-17 {
                break;
            }
        }
    }
    let norms: Vec<f64> = (0..n32).map(|k| squared_norm(p, k)).collect();
    let weights = nodes
        .iter()
        .map(|&x| {
            let vals = jacobi_values(p, x, n);
            1.0 / vals.iter().zip(&norms).map(|(v, h)| v * v / h).sum::<f64>()
        })
        .collect();
    Ok(QuadRule1D {
        params: p,
        nodes,
        weights,
    })
}

/// Default node count `max(2N + 8, 32)` for degree cap `N`.
pub fn default_node_count(degree_cap: u32) -> usize {
    (2 * degree_cap as usize + 8).max(32)
}

/// Tensor product of one-dimensional rules; points are ordered row-major (last
/// coordinate fastest) and a point's weight is the product of its 1D weights.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorGrid {
    rules: Vec<QuadRule1D>,
}

impl TensorGrid {
    pub fn new(rules: Vec<QuadRule1D>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::InvalidArgument(
                "tensor grid needs at least one axis".into(),
            ));
        }
        Ok(Self { rules })
    }

    /// `n` Gauss–Jacobi nodes per coordinate.
    pub fn gauss(params: &ParamVector, n: usize) -> Result<Self> {
        Self::new(
            params
                .pairs()
                .iter()
                .map(|&p| gauss_jacobi(p, n))
                .collect::<Result<_>>()?,
        )
    }

    pub fn rules(&self) -> &[QuadRule1D] {
        &self.rules
    }

    pub fn dim(&self) -> usize {
        self.rules.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.rules.iter().map(QuadRule1D::len).collect()
    }

    pub fn len(&self) -> usize {
        self.rules.iter().map(QuadRule1D::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node coordinates per axis.
    pub fn axes(&self) -> Vec<Vec<f64>> {
        self.rules.iter().map(|r| r.nodes.clone()).collect()
    }

    pub fn params(&self) -> ParamVector {
        ParamVector::from_pairs(self.rules.iter().map(|r| r.params).collect())
            .expect("grid has at least one axis")
    }

    /// Point `idx` (row-major) written into `out`.
    pub fn point_into(&self, mut idx: usize, out: &mut [f64]) {
        for j in (0..self.dim()).rev() {
            let n = self.rules[j].len();
            out[j] = self.rules[j].nodes[idx % n];
            idx /= n;
        }
    }

    /// Tensor weights, row-major.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![1.0];
        for r in &self.rules {
            let mut next = Vec::with_capacity(w.len() * r.len());
            for &a in &w {
                for &b in &r.weights {
                    next.push(a * b);
                }
            }
            w = next;
        }
        w
    }

    /// Evaluate `f` at every node.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> GridFunction {
        let mut x = vec![0.0; self.dim()];
        let values = (0..self.len())
            .map(|idx| {
                self.point_into(idx, &mut x);
                f(&x)
            })
            .collect();
        GridFunction {
            shape: self.shape(),
            values,
        }
    }

    /// `∫ f dμ` from node values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        self.weights().iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Copy of the grid with axis `i` rebuilt at `(α_i + 1, β_i + 1)`.
    pub fn shifted(&self, i: usize) -> Result<Self> {
        let mut rules = self.rules.clone();
        rules[i] = gauss_jacobi(rules[i].params.raised(), rules[i].len())?;
        Self::new(rules)
    }
}

/// Values on the nodes of a [`TensorGrid`], row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: &TensorGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            shape: grid.shape(),
            values,
        })
    }
}

/// `(Σ_j w_j |f_j|^p)^{1/p}`, or the node maximum for `p = ∞` (a lower bound of the
/// true sup-norm).
pub fn lp_norm(f: &GridFunction, p: f64, grid: &TensorGrid) -> Result<f64> {
    if f.shape != grid.shape() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: f.values.len(),
        });
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain {
            what: "Lp exponent",
            value: p,
        });
    }
    if p.is_infinite() {
        return Ok(f.values.iter().fold(0.0, |m, &v| m.max(math::abs(v))));
    }
    let s: f64 = grid
        .weights()
        .iter()
        .zip(&f.values)
        .map(|(w, v)| w * math::powf(math::abs(*v), p))
        .sum();
    Ok(math::powf(s, 1.0 / p))
}

/// Analysis matrices `A[k][j] = w_j P_k(x_j) / ‖P_k‖²` for each axis.
fn analysis_matrix(rule: &QuadRule1D, cap: usize) -> Vec<f64> {
    let n = rule.len();
    let m = cap + 1;
    let norms: Vec<f64> = (0..m as u32)
        .map(|k| squared_norm(rule.params, k))
        .collect();
    let mut mat = vec![0.0; m * n];
    for (j, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let vals = jacobi_values(rule.params, x, m);
        for k in 0..m {
            mat[k * n + j] = w * vals[k] / norms[k];
        }
    }
    mat
}

fn check_resolution(grid: &TensorGrid, params: &ParamVector, cap: u32) -> Result<()> {
    if grid.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: grid.dim(),
        });
    }
    let required = cap as usize + 1;
    if let Some(n) = grid.shape().into_iter().find(|&n| n < required) {
        return Err(Error::InsufficientResolution { nodes: n, required });
    }
    for (r, p) in grid.rules().iter().zip(params.pairs()) {
        if r.params != *p {
            return Err(Error::InvalidArgument(
                "grid rules must be built for the expansion parameters".into(),
            ));
        }
    }
    Ok(())
}

/// Contract node values into coefficients on modes `k ≤ cap` of `grid`'s own
/// (standard) basis.
fn analyse(values: &[f64], grid: &TensorGrid, cap: u32) -> Vec<f64> {
    let mut t = values.to_vec();
    let mut shape = grid.shape();
    for (j, rule) in grid.rules().iter().enumerate() {
        let mat = analysis_matrix(rule, cap as usize);
        t = contract_axis(&t, &shape, j, &mat, cap as usize + 1);
        shape[j] = cap as usize + 1;
    }
    t
}

fn fill_expansion(mut e: Expansion, dense: &[f64], cap: u32) -> Result<Expansion> {
    for (idx, k) in MultiIndex::box_modes(e.dim(), cap).into_iter().enumerate() {
        e.set(k, dense[idx])?;
    }
    Ok(e)
}

/// Standard-basis coefficients from node values on a grid built for `params`.
pub fn expand_grid_values(
    f: &GridFunction,
    params: &ParamVector,
    cap: u32,
    grid: &TensorGrid,
) -> Result<Expansion> {
    check_resolution(grid, params, cap)?;
    if f.shape != grid.shape() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: f.values.len(),
        });
    }
    let dense = analyse(&f.values, grid, cap);
    fill_expansion(
        Expansion::new(params.clone(), Basis::Standard, cap)?,
        &dense,
        cap,
    )
}

/// `a_k(f) = ⟨f, P_k⟩ / ‖P_k‖²` for `k ≤ N` componentwise.
pub fn fourier_coefficients(
    f: impl Fn(&[f64]) -> f64,
    params: &ParamVector,
    cap: u32,
    grid: &TensorGrid,
) -> Result<Expansion> {
    check_resolution(grid, params, cap)?;
    expand_grid_values(&grid.sample(f), params, cap, grid)
}

/// Coefficients against `Φ_i P_k^{(α+e_i,β+e_i)}`. One factor `Φ_i²` is folded into the
/// weight, so axis `i` is integrated with the rule for `(α_i + 1, β_i + 1)` (same node
/// count as `grid`) applied to `f / Φ_i`.
pub fn fourier_coefficients_shifted(
    i: usize,
    f: impl Fn(&[f64]) -> f64,
    params: &ParamVector,
    cap: u32,
    grid: &TensorGrid,
) -> Result<Expansion> {
    check_resolution(grid, params, cap)?;
    if i >= params.dim() {
        return Err(Error::InvalidArgument(
            "shifted coordinate out of range".into(),
        ));
    }
    let sg = grid.shifted(i)?;
    let g = sg.sample(|x| f(x) / crate::polycore::phi_unchecked(x[i]));
    let dense = analyse(&g.values, &sg, cap);
    fill_expansion(
        Expansion::new(params.clone(), Basis::Shifted(i), cap)?,
        &dense,
        cap,
    )
}

/// Quadrature on `(0, ∞)` for `π^{-1/2} u^{-1/2} e^{-u} du`: the trapezoid rule in
/// `s = ln u`, which converges geometrically for this doubly exponentially decaying
/// integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfLineRule {
    pub step: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HalfLineRule {
    const S_MIN: f64 = -75.0;
    const S_MAX: f64 = 4.5;

    pub fn log_trapezoid(step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::Domain {
                what: "half-line step",
                value: step,
            });
        }
        let n = math::floor((Self::S_MAX - Self::S_MIN) / step) as usize + 1;
        let inv_sqrt_pi = 1.0 / math::sqrt(core::f64::consts::PI);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            let s = Self::S_MIN + j as f64 * step;
            let u = math::exp(s);
            nodes.push(u);
            weights.push(step * inv_sqrt_pi * math::exp(0.5 * s - u));
        }
        Ok(Self {
            step,
            nodes,
            weights,
        })
    }

    /// Same rule with half the step (twice the nodes), for self-checks.
    pub fn refined(&self) -> Self {
        Self::log_trapezoid(0.5 * self.step).expect("halving a valid step stays valid")
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * g(u))
            .sum()
    }
}

impl Default for HalfLineRule {
    fn default() -> Self {
        Self::log_trapezoid(0.25).expect("default step is valid")
    }
}
