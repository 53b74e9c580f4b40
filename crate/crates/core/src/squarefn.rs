//! Littlewood–Paley square functions and operator-norm probes.
//!
//! For band-limited input the `t`-integrals defining the square functions are done
//! in closed form mode pair by mode pair, using `∫_0^∞ t e^{-ct} dt = c^{-2}`:
//!
//! `g(f)(x)² = Σ_{k,m≠0} a_k a_m [√λ_k √λ_m P_k P_m + Σ_j δ_j P_k δ_j P_m](x) / (√λ_k + √λ_m)²`.
//!
//! A Gauss–Legendre rule in `ln t` evaluates the same integrals directly and serves
//! as a cross-check.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conjugacy::{conjugate_poisson, riesz};
use crate::polycore::ParamPair;
use crate::quadrature::{gauss_jacobi, lp_norm, GridFunction, TensorGrid};
use crate::spectral::{
    apply_heat, apply_modified, apply_poisson, evaluate, factor_values, AxisOp, Basis, Expansion,
    ParamVector, SemigroupKind,
};
use crate::{math, Error, Result};

/// Slack allowed in `g̃_i(R_i f) ≤ g(f)`.
pub const DOMINATION_SLACK: f64 = 1e-10;
/// Largest accepted gap between the closed form and the `t`-quadrature.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-7;

const T_MIN: f64 = 1e-4;
const T_MAX: f64 = 50.0;
const T_NODES: usize = 65;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GVariant {
    /// `∇ = (∂_t, δ_1, …, δ_d)`.
    Full,
    /// `∂_t` only.
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SquareFunction {
    G(GVariant),
    /// `g̃_i` of coordinate `i` (zero-based), acting on `i`-shifted expansions.
    GTilde(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GMethod {
    ClosedForm,
    TQuadrature,
}

/// Per-mode data at one point: `a_k`, `√λ_k`, `B_k(x)` and `δ_j B_k(x)`.
struct ModeData {
    coeff: f64,
    sqrt_lambda: f64,
    value: f64,
    deltas: Vec<f64>,
}

/// Per-axis factor tables on the nodes of a mesh.
struct AxisTables {
    values: Vec<Vec<Vec<f64>>>,
    deltas: Vec<Vec<Vec<f64>>>,
}

fn axis_tables(f: &Expansion, axes: &[Vec<f64>], with_deltas: bool) -> AxisTables {
    let m = f
        .coefficients()
        .keys()
        .flat_map(|k| k.as_slice().iter().copied())
        .max()
        .unwrap_or(0) as usize
        + 1;
    let mut values = Vec::with_capacity(f.dim());
    let mut deltas = Vec::with_capacity(f.dim());
    for (j, axis) in axes.iter().enumerate() {
        let pair = f.params().pair(j);
        let shifted = f.basis() == Basis::Shifted(j);
        values.push(
            axis.iter()
                .map(|&x| factor_values(pair, shifted, AxisOp::Value, m, x))
                .collect(),
        );
        deltas.push(if with_deltas {
            axis.iter()
                .map(|&x| factor_values(pair, shifted, AxisOp::Delta, m, x))
                .collect()
        } else {
            Vec::new()
        });
    }
    AxisTables { values, deltas }
}

fn mode_data(
    f: &Expansion,
    tables: &AxisTables,
    node: &[usize],
    with_deltas: bool,
) -> Vec<ModeData> {
    let d = f.dim();
    f.coefficients()
        .iter()
        .filter_map(|(k, &c)| {
            let lam = f.mode_eigenvalue(k);
            if lam <= 0.0 {
                return None;
            }
            let ks = k.as_slice();
            let fac: Vec<f64> = (0..d)
                .map(|j| tables.values[j][node[j]][ks[j] as usize])
                .collect();
            let value = fac.iter().product();
            let deltas = if with_deltas {
                (0..d)
                    .map(|j| {
                        let other: f64 = (0..d).filter(|&l| l != j).map(|l| fac[l]).product();
                        tables.deltas[j][node[j]][ks[j] as usize] * other
                    })
                    .collect()
            } else {
                Vec::new()
            };
            Some(ModeData {
                coeff: c,
                sqrt_lambda: math::sqrt(lam),
                value,
                deltas,
            })
        })
        .collect()
}

fn closed_form_squared(modes: &[ModeData], with_deltas: bool) -> f64 {
    let mut s = 0.0;
    for a in modes {
        let ua = a.coeff * a.sqrt_lambda * a.value;
        for b in modes {
            let mut term = ua * b.coeff * b.sqrt_lambda * b.value;
            if with_deltas {
                let dd: f64 = a.deltas.iter().zip(&b.deltas).map(|(x, y)| x * y).sum();
                term += a.coeff * b.coeff * dd;
            }
            let den = a.sqrt_lambda + b.sqrt_lambda;
            s += term / (den * den);
        }
    }
    s.max(0.0)
}

/// `∫_0^∞ t |∇ S_t f(x)|² dt` with a Gauss–Legendre rule in `ln t` on
/// `[1e-4, 50]`; the piece below `1e-4` is `ε²/2 |∇f(x)|²` to leading order.
fn quadrature_squared(modes: &[ModeData], with_deltas: bool, rule: &[(f64, f64)]) -> f64 {
    let grad2 = |t: f64| {
        let mut dt = 0.0;
        let nd = modes.first().map_or(0, |m| m.deltas.len());
        let mut dj = vec![0.0; if with_deltas { nd } else { 0 }];
        for m in modes {
            let e = m.coeff * math::exp(-t * m.sqrt_lambda);
            dt -= e * m.sqrt_lambda * m.value;
            for (acc, v) in dj.iter_mut().zip(&m.deltas) {
                *acc += e * v;
            }
        }
        dt * dt + dj.iter().map(|v| v * v).sum::<f64>()
    };
    let body: f64 = rule.iter().map(|&(t, w)| w * t * t * grad2(t)).sum();
    body + 0.5 * T_MIN * T_MIN * grad2(0.0)
}

fn log_t_rule() -> Vec<(f64, f64)> {
    let gl = gauss_jacobi(ParamPair::legendre(), T_NODES).expect("Legendre rule");
    let (a, b) = (math::ln(T_MIN), math::ln(T_MAX));
    gl.nodes
        .iter()
        .zip(&gl.weights)
        .map(|(&x, &w)| {
            (
                math::exp(0.5 * (b - a) * x + 0.5 * (a + b)),
                0.5 * (b - a) * w,
            )
        })
        .collect()
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
            what: "square function point",
            value: v,
        });
    }
    Ok(())
}

fn point_modes(f: &Expansion, x: &[f64], with_deltas: bool) -> Vec<ModeData> {
    let axes: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
    let tables = axis_tables(f, &axes, with_deltas);
    mode_data(f, &tables, &vec![0; f.dim()], with_deltas)
}

/// `g(f)(x)` in closed form.
pub fn g_function(f: &Expansion, x: &[f64], variant: GVariant) -> Result<f64> {
    f.require_basis(Basis::Standard)?;
    check_point(f, x)?;
    let full = variant == GVariant::Full;
    Ok(math::sqrt(closed_form_squared(
        &point_modes(f, x, full),
        full,
    )))
}

/// `g(f)(x)` by quadrature in `t`.
pub fn g_function_quadrature(f: &Expansion, x: &[f64], variant: GVariant) -> Result<f64> {
    f.require_basis(Basis::Standard)?;
    check_point(f, x)?;
    let full = variant == GVariant::Full;
    Ok(math::sqrt(quadrature_squared(
        &point_modes(f, x, full),
        full,
        &log_t_rule(),
    )))
}

/// `g̃_i(g)(x)` for an `i`-shifted expansion, in closed form with the eigenvalues
/// `λ_{k+e_i}` (all positive).
pub fn g_tilde(i: usize, g: &Expansion, x: &[f64]) -> Result<f64> {
    g.require_basis(Basis::Shifted(i))?;
    check_point(g, x)?;
    Ok(math::sqrt(closed_form_squared(
        &point_modes(g, x, false),
        false,
    )))
}

pub fn g_tilde_quadrature(i: usize, g: &Expansion, x: &[f64]) -> Result<f64> {
    g.require_basis(Basis::Shifted(i))?;
    check_point(g, x)?;
    Ok(math::sqrt(quadrature_squared(
        &point_modes(g, x, false),
        false,
        &log_t_rule(),
    )))
}

/// Square function values on a tensor mesh.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GFunctionResult {
    pub function: SquareFunction,
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub method: GMethod,
    /// Largest difference between the closed form and the `t`-quadrature.
    pub residual: f64,
}

impl GFunctionResult {
    pub fn passes(&self) -> bool {
        self.residual <= CROSS_CHECK_TOLERANCE
    }
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
            what: "square function point",
            value: v,
        });
    }
    Ok(())
}

/// Row-major multi-index of point `idx` on a mesh of `shape`.
fn unravel(mut idx: usize, shape: &[usize], out: &mut [usize]) {
    for j in (0..shape.len()).rev() {
        out[j] = idx % shape[j];
        idx /= shape[j];
    }
}

/// Closed-form values of `g(f)²` (or `g̃_i(f)²`) and optionally the quadrature
/// counterpart at every mesh point.
fn grid_squares(
    f: &Expansion,
    axes: &[Vec<f64>],
    with_deltas: bool,
    quad: bool,
) -> (Vec<f64>, Vec<f64>) {
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let n: usize = shape.iter().product();
    let tables = axis_tables(f, axes, with_deltas);
    let rule = if quad { log_t_rule() } else { Vec::new() };
    let mut node = vec![0; f.dim()];
    let mut closed = Vec::with_capacity(n);
    let mut by_quad = Vec::with_capacity(if quad { n } else { 0 });
    for idx in 0..n {
        unravel(idx, &shape, &mut node);
        let modes = mode_data(f, &tables, &node, with_deltas);
        closed.push(closed_form_squared(&modes, with_deltas));
        if quad {
            by_quad.push(quadrature_squared(&modes, with_deltas, &rule));
        }
    }
    (closed, by_quad)
}

/// Closed-form square function on a mesh, cross-checked against the `t`-quadrature.
pub fn square_function_grid(
    function: SquareFunction,
    f: &Expansion,
    axes: &[Vec<f64>],
) -> Result<GFunctionResult> {
    let with_deltas = match function {
        SquareFunction::G(v) => {
            f.require_basis(Basis::Standard)?;
            v == GVariant::Full
        }
        SquareFunction::GTilde(i) => {
            f.require_basis(Basis::Shifted(i))?;
            false
        }
    };
    check_axes(f, axes)?;
    let (closed, quad) = grid_squares(f, axes, with_deltas, true);
    let values: Vec<f64> = closed.iter().map(|v| math::sqrt(*v)).collect();
    let residual = values
        .iter()
        .zip(&quad)
        .fold(0.0, |m: f64, (a, b)| m.max(math::abs(a - math::sqrt(*b))));
    Ok(GFunctionResult {
        function,
        axes: axes.to_vec(),
        values,
        method: GMethod::ClosedForm,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DominationViolation {
    pub coordinate: usize,
    pub point: Vec<f64>,
    pub g_tilde: f64,
    pub g: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DominationReport {
    pub points: usize,
    pub checks: usize,
    /// `max (g̃_i(R_i f) - g(f))` over points and coordinates.
    pub max_excess: f64,
    pub violations: Vec<DominationViolation>,
}

/// Checks `g̃_i(R_i f)(x) ≤ g(f)(x) + 1e-10` at every mesh point for every `i`.
pub fn verify_domination(f: &Expansion, axes: &[Vec<f64>]) -> Result<DominationReport> {
    f.require_basis(Basis::Standard)?;
    check_axes(f, axes)?;
    let (g2, _) = grid_squares(f, axes, true, false);
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let mut node = vec![0; f.dim()];
    let mut report = DominationReport {
        points: g2.len(),
        checks: 0,
        max_excess: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    for i in 0..f.dim() {
        let (gt2, _) = grid_squares(&riesz(i, f)?, axes, false, false);
        for (idx, (a, b)) in gt2.iter().zip(&g2).enumerate() {
            let (gt, g) = (math::sqrt(*a), math::sqrt(*b));
            report.checks += 1;
            report.max_excess = report.max_excess.max(gt - g);
            if gt > g + DOMINATION_SLACK {
                unravel(idx, &shape, &mut node);
                let point = node.iter().enumerate().map(|(j, &r)| axes[j][r]).collect();
                report.violations.push(DominationViolation {
                    coordinate: i,
                    point,
                    g_tilde: gt,
                    g,
                });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyReport {
    /// `2 ∫ g(f)² dμ`, i.e. `∫_0^∞ ∫ t 𝕁(P_t f)² dμ dt`.
    pub lhs: f64,
    /// `‖f‖² - (∫ f dμ)² / μ(Q)`.
    pub rhs: f64,
    /// `|lhs - rhs| / ‖f‖²`.
    pub relative_error: f64,
    pub nodes_per_axis: usize,
}

/// The `p = 2` energy identity `∫_0^∞ ∫ t 𝕁(P_t f)² dμ dt = ‖f‖² - ‖P_∞ f‖²`, where
/// `𝕁(F²) = 2|∇F|²` turns the left side into `2 ∫ g(f)² dμ`. Both sides are computed
/// by Gauss quadrature with `N + 4` nodes per coordinate, which is exact for the
/// polynomial integrands `g(f)²` and `f²`.
pub fn verify_energy_identity(f: &Expansion) -> Result<EnergyReport> {
    f.require_basis(Basis::Standard)?;
    let n = f.degree_cap() as usize + 4;
    let grid = TensorGrid::gauss(f.params(), n)?;
    let axes = grid.axes();
    let (g2, _) = grid_squares(f, &axes, true, false);
    let lhs = 2.0 * grid.integrate(&g2);
    let vals = evaluate(f, &axes);
    let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
    let norm2 = grid.integrate(&sq);
    let mean = grid.integrate(&vals);
    let rhs = norm2 - mean * mean / f.params().total_mass();
    let relative_error = if norm2 > 0.0 {
        math::abs(lhs - rhs) / norm2
    } else {
        math::abs(lhs - rhs)
    };
    Ok(EnergyReport {
        lhs,
        rhs,
        relative_error,
        nodes_per_axis: n,
    })
}

/// Operators whose `L^p` ratios can be probed. Coordinates are zero-based.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ProbeOperator {
    Riesz(usize),
    ConjugatePoisson(usize, f64),
    Heat(f64),
    Poisson(f64),
    /// Modified Poisson semigroup on random shifted expansions.
    ModifiedPoisson(usize, f64),
    /// `|(R_1 f, …, R_d f)|` pointwise.
    RieszVector,
}

impl ProbeOperator {
    pub fn time(&self) -> Option<f64> {
        match *self {
            ProbeOperator::ConjugatePoisson(_, t)
            | ProbeOperator::Heat(t)
            | ProbeOperator::Poisson(t)
            | ProbeOperator::ModifiedPoisson(_, t) => Some(t),
            ProbeOperator::Riesz(_) | ProbeOperator::RieszVector => None,
        }
    }

    fn coordinate(&self) -> Option<usize> {
        match *self {
            ProbeOperator::Riesz(i)
            | ProbeOperator::ConjugatePoisson(i, _)
            | ProbeOperator::ModifiedPoisson(i, _) => Some(i),
            _ => None,
        }
    }

    fn input_basis(&self) -> Basis {
        match *self {
            ProbeOperator::ModifiedPoisson(i, _) => Basis::Shifted(i),
            _ => Basis::Standard,
        }
    }
}

impl fmt::Display for ProbeOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeOperator::Riesz(i) => write!(f, "riesz-{}", i + 1),
            ProbeOperator::ConjugatePoisson(i, _) => write!(f, "conjugate-poisson-{}", i + 1),
            ProbeOperator::Heat(_) => f.write_str("heat"),
            ProbeOperator::Poisson(_) => f.write_str("poisson"),
            ProbeOperator::ModifiedPoisson(i, _) => write!(f, "modified-poisson-{}", i + 1),
            ProbeOperator::RieszVector => f.write_str("riesz-vector"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormProbeReport {
    pub operator: String,
    pub t: Option<f64>,
    pub p: f64,
    pub d: usize,
    pub degree_cap: u32,
    pub samples: usize,
    /// Largest `‖Tf‖_p / ‖f‖_p` seen: a lower bound of the norm on the truncated class.
    pub best_ratio: f64,
    pub seed: u64,
}

/// Random input number `index` of a probe: i.i.d. standard normal coefficients on
/// `k ≤ cap`, drawn from ChaCha8 seeded with `seed` on stream `index`, so samples can
/// be generated in any order.
pub fn probe_sample(
    op: ProbeOperator,
    params: &ParamVector,
    cap: u32,
    seed: u64,
    index: u64,
) -> Result<Expansion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    Expansion::random(params.clone(), op.input_basis(), cap, &mut rng)
}

/// Tensor Gauss grid used by the probes: `2N + 8` nodes per coordinate.
pub fn probe_grid(params: &ParamVector, cap: u32) -> Result<TensorGrid> {
    TensorGrid::gauss(params, 2 * cap as usize + 8)
}

fn apply_probe(op: ProbeOperator, f: &Expansion, axes: &[Vec<f64>]) -> Result<Vec<f64>> {
    let out = match op {
        ProbeOperator::Riesz(i) => riesz(i, f)?,
        ProbeOperator::ConjugatePoisson(i, t) => conjugate_poisson(i, t, f)?,
        ProbeOperator::Heat(t) => apply_heat(t, f)?,
        ProbeOperator::Poisson(t) => apply_poisson(t, f)?,
        ProbeOperator::ModifiedPoisson(i, t) => apply_modified(i, SemigroupKind::Poisson, t, f)?,
        ProbeOperator::RieszVector => {
            let mut acc = vec![0.0; axes.iter().map(Vec::len).product()];
            for i in 0..f.dim() {
                for (a, v) in acc.iter_mut().zip(evaluate(&riesz(i, f)?, axes)) {
                    *a += v * v;
                }
            }
            return Ok(acc.into_iter().map(math::sqrt).collect());
        }
    };
    Ok(evaluate(&out, axes))
}

fn check_probe(op: ProbeOperator, ps: &[f64], params: &ParamVector) -> Result<()> {
    for &p in ps {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Domain {
                what: "probe exponent",
                value: p,
            });
        }
    }
    if let Some(i) = op.coordinate() {
        if i >= params.dim() {
            return Err(Error::InvalidArgument(format!(
                "{op}: coordinate out of range for d = {}",
                params.dim()
            )));
        }
    }
    if let Some(t) = op.time() {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain {
                what: "time",
                value: t,
            });
        }
    }
    Ok(())
}

/// `‖T f‖_p / ‖f‖_p` for sample `index`, one ratio per exponent in `ps`.
pub fn probe_sample_ratios(
    op: ProbeOperator,
    ps: &[f64],
    params: &ParamVector,
    cap: u32,
    seed: u64,
    index: u64,
    grid: &TensorGrid,
) -> Result<Vec<f64>> {
    check_probe(op, ps, params)?;
    let f = probe_sample(op, params, cap, seed, index)?;
    let axes = grid.axes();
    let fin = GridFunction::new(grid, evaluate(&f, &axes))?;
    let fout = GridFunction::new(grid, apply_probe(op, &f, &axes)?)?;
    ps.iter()
        .map(|&p| {
            let den = lp_norm(&fin, p, grid)?;
            Ok(if den > 0.0 {
                lp_norm(&fout, p, grid)? / den
            } else {
                0.0
            })
        })
        .collect()
}

/// Best ratio over `samples` random inputs for each exponent in `ps`.
pub fn probe_operator_norms(
    op: ProbeOperator,
    ps: &[f64],
    params: &ParamVector,
    cap: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<NormProbeReport>> {
    check_probe(op, ps, params)?;
    let grid = probe_grid(params, cap)?;
    let mut best = vec![0.0f64; ps.len()];
    for index in 0..samples {
        for (b, r) in best.iter_mut().zip(probe_sample_ratios(
            op,
            ps,
            params,
            cap,
            seed,
            index as u64,
            &grid,
        )?) {
            *b = b.max(r);
        }
    }
    Ok(ps
        .iter()
        .zip(best)
        .map(|(&p, best_ratio)| NormProbeReport {
            operator: format!("{op}"),
            t: op.time(),
            p,
            d: params.dim(),
            degree_cap: cap,
            samples,
            best_ratio,
            seed,
        })
        .collect())
}

pub fn probe_operator_norm(
    op: ProbeOperator,
    p: f64,
    params: &ParamVector,
    cap: u32,
    samples: usize,
    seed: u64,
) -> Result<NormProbeReport> {
    Ok(probe_operator_norms(op, &[p], params, cap, samples, seed)?.remove(0))
}

/// Probe table over dimensions `ds` with uniform parameters `(α, β)`; rows ordered
/// by `d`, then `p`.
#[allow(clippy::too_many_arguments)]
pub fn dimension_sweep(
    op: ProbeOperator,
    ps: &[f64],
    ds: &[usize],
    alpha: f64,
    beta: f64,
    cap: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<NormProbeReport>> {
    let mut rows = Vec::new();
    for &d in ds {
        let params = ParamVector::uniform(d, alpha, beta)?;
        rows.extend(probe_operator_norms(op, ps, &params, cap, samples, seed)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::MultiIndex;

    fn mode(p: &ParamVector, k: &[u32]) -> Expansion {
        Expansion::single_mode(p.clone(), Basis::Standard, MultiIndex::new(k.to_vec())).unwrap()
    }

    #[test]
    fn g_of_constant_vanishes() {
        let p = ParamVector::uniform(2, 0.0, 0.0).unwrap();
        let c = Expansion::constant(p, 4.0);
        assert_eq!(g_function(&c, &[0.1, 0.2], GVariant::Full).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_closed_form() {
        let p = ParamVector::uniform(1, 0.5, 1.0).unwrap();
        let k = 3;
        let f = mode(&p, &[k]);
        let x = 0.35;
        let pair = p.pair(0);
        let lam = p.eigenvalue(&[k]);
        let v = factor_values(pair, false, AxisOp::Value, 4, x)[3];
        let dv = factor_values(pair, false, AxisOp::Delta, 4, x)[3];
        let want = ((lam * v * v + dv * dv) / (4.0 * lam)).sqrt();
        assert!((g_function(&f, &[x], GVariant::Full).unwrap() - want).abs() < 1e-14);
        let vert = (v * v / 4.0).sqrt();
        assert!((g_function(&f, &[x], GVariant::Vertical).unwrap() - vert).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ParamVector::new(&[0.0, 0.5], &[-0.5, 1.0]).unwrap();
        let f = Expansion::random(p.clone(), Basis::Standard, 5, &mut rng).unwrap();
        for x in [[0.1, -0.3], [0.9, 0.95], [-0.99, 0.0]] {
            for v in [GVariant::Full, GVariant::Vertical] {
                let a = g_function(&f, &x, v).unwrap();
                let b = g_function_quadrature(&f, &x, v).unwrap();
                assert!((a - b).abs() < 1e-8, "{a} {b}");
            }
            assert!(
                g_function(&f, &x, GVariant::Vertical).unwrap()
                    <= g_function(&f, &x, GVariant::Full).unwrap()
            );
        }
        let g = Expansion::random(p, Basis::Shifted(1), 4, &mut rng).unwrap();
        let x = [0.3, 0.4];
        assert!(
            (g_tilde(1, &g, &x).unwrap() - g_tilde_quadrature(1, &g, &x).unwrap()).abs() < 1e-8
        );
    }

    #[test]
    fn g_tilde_of_shifted_constant_is_positive() {
        let p = ParamVector::uniform(1, 0.0, 0.0).unwrap();
        let g = Expansion::single_mode(p, Basis::Shifted(0), MultiIndex::zero(1)).unwrap();
        // √λ Φ / (2√λ) with λ = 2 at x = 0.
        assert!((g_tilde(0, &g, &[0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn domination_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = ParamVector::new(&[0.5, -0.5], &[0.0, 1.5]).unwrap();
        let f = Expansion::random(p, Basis::Standard, 4, &mut rng).unwrap();
        let mesh = vec![
            crate::spectral::interior_mesh(9),
            crate::spectral::interior_mesh(7),
        ];
        let r = verify_domination(&f, &mesh).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.checks, 2 * 63);
    }

    #[test]
    fn energy_examples() {
        let p = ParamVector::uniform(1, 0.0, 0.0).unwrap();
        let r = verify_energy_identity(&mode(&p, &[1])).unwrap();
        assert!((r.lhs - 2.0 / 3.0).abs() < 1e-14 && (r.rhs - 2.0 / 3.0).abs() < 1e-14);
        let r = verify_energy_identity(&Expansion::constant(p, 1.0)).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.relative_error < 1e-14);
    }

    #[test]
    fn probes_are_deterministic_and_contractive() {
        let p = ParamVector::uniform(2, 0.0, 0.0).unwrap();
        let a = probe_operator_norms(ProbeOperator::Poisson(0.5), &[1.5, 2.0, 4.0], &p, 4, 10, 42)
            .unwrap();
        let b = probe_operator_norms(ProbeOperator::Poisson(0.5), &[1.5, 2.0, 4.0], &p, 4, 10, 42)
            .unwrap();
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|r| r.best_ratio <= 1.0 + 1e-10 && r.best_ratio > 0.0));
        let r = probe_operator_norm(ProbeOperator::Riesz(0), 2.0, &p, 4, 10, 42).unwrap();
        assert!(r.best_ratio <= 1.0 + 1e-10);
        assert!(probe_operator_norm(ProbeOperator::Riesz(0), 0.5, &p, 4, 1, 42).is_err());
        assert!(probe_operator_norm(ProbeOperator::Riesz(3), 2.0, &p, 4, 1, 42).is_err());
    }
}
