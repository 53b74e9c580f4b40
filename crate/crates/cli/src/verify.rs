//! `verify`: the exact identity suite and the numerical suites.
//!
//! Without `--alpha`/`--beta` each suite runs over a built-in corpus of parameter
//! vectors; with them, over that single vector. The JSON report is written before
//! the exit status is decided.

use jacobi_core::conjugacy::{riesz, riesz_adjoint, verify_cauchy_riemann};
use jacobi_core::exactalg::{
    verify_identities, IdentityId, IdentityReport, RationalParamVector, Status,
};
use jacobi_core::quadrature::{default_node_count, fourier_coefficients, TensorGrid};
use jacobi_core::spectral::{
    heat_kernel_table, modified_kernel_table, modified_semigroup_on_one, project_pi0, synthesize,
    SemigroupKind,
};
use jacobi_core::squarefn::{verify_domination, verify_energy_identity, DOMINATION_SLACK};
use jacobi_core::{Basis, Expansion, ParamVector};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{usage, CliError};
use crate::output::{emit, join, num, opt_num, Table};
use crate::params::{dimension, has_explicit_params, mesh, param_vector, rational_params, times};
use crate::tables::DEFAULT_KERNEL_DEGREE;
use crate::{Format, RunConfig, Suite};

/// Exact-suite parameter values; the default corpus is every vector in this set.
const HALVES: [(i64, i64); 5] = [(-1, 2), (0, 1), (1, 2), (1, 1), (3, 2)];
/// Numerical-suite corpus, applied uniformly in every coordinate. Includes pairs
/// outside `α, β ≥ -1/2`.
const CORPUS: [(f64, f64); 6] = [
    (-0.75, -0.75),
    (0.0, 0.0),
    (-0.5, 1.5),
    (1.0, 2.0),
    (-0.9, 0.3),
    (0.5, -0.5),
];
/// Kernel-suite corpus: inside the half-range, where the kernel bound is claimed.
const KERNEL_CORPUS: [(f64, f64); 4] = [(-0.5, -0.5), (0.0, 0.0), (1.0, 2.0), (0.5, -0.25)];

const EXACT_DEGREE: u32 = 4;
const NUMERIC_DEGREE: u32 = 4;

const CR_TOL: f64 = 1e-8;
const HH4_TOL: f64 = 1e-13;
const ISOMETRY_TOL: f64 = 1e-12;
const RBAR_R_TOL: f64 = 1e-14;
const ENERGY_TOL: f64 = 1e-8;
const KERNEL_SLACK: f64 = 1e-10;
const LINF_SLACK: f64 = 1e-10;

#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
enum CheckStatus {
    Pass,
    Fail,
    /// A bound that failed where a violation may be expected (kernel suite).
    Violated,
    /// The kernel series did not converge; nothing can be concluded.
    Unresolved,
}

impl CheckStatus {
    fn from_bound(value: f64, limit: f64) -> Self {
        if value <= limit {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    fn name(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Violated => "VIOLATED",
            CheckStatus::Unresolved => "UNRESOLVED",
        }
    }
}

#[derive(Serialize, Clone, Debug)]
struct Check {
    check: String,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    t: Option<f64>,
    value: f64,
    limit: f64,
    status: CheckStatus,
}

impl Check {
    fn new(
        check: impl Into<String>,
        p: &ParamVector,
        t: Option<f64>,
        value: f64,
        limit: f64,
    ) -> Self {
        Self {
            check: check.into(),
            alpha: p.alphas(),
            beta: p.betas(),
            t,
            value,
            limit,
            status: CheckStatus::from_bound(value, limit),
        }
    }

    fn label(&self) -> String {
        let t = self.t.map(|t| format!(" t={t}")).unwrap_or_default();
        format!(
            "{} at alpha=[{}] beta=[{}]{t}",
            self.check,
            join(&self.alpha),
            join(&self.beta)
        )
    }
}

#[derive(Serialize)]
struct Report<T> {
    suite: Suite,
    passed: bool,
    failing: Vec<String>,
    #[serde(flatten)]
    detail: T,
}

#[derive(Serialize)]
struct Checks {
    checks: Vec<Check>,
}

fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["check", "alpha", "beta", "t", "value", "limit", "status"]);
    for c in checks {
        t.rows.push(vec![
            c.check.clone(),
            join(&c.alpha),
            join(&c.beta),
            opt_num(c.t),
            num(c.value),
            num(c.limit),
            c.status.name().into(),
        ]);
    }
    t
}

fn finish(failing: &[String]) -> Result<(), CliError> {
    match failing {
        [] => Ok(()),
        [one] => Err(CliError::Failed(one.clone())),
        [first, rest @ ..] => Err(CliError::Failed(format!(
            "{first} (and {} more)",
            rest.len()
        ))),
    }
}

fn emit_checks(cfg: &RunConfig, suite: Suite, checks: Vec<Check>) -> Result<(), CliError> {
    let failing: Vec<String> = checks
        .iter()
        .filter(|c| c.status != CheckStatus::Pass)
        .map(Check::label)
        .collect();
    let report = Report {
        suite,
        passed: failing.is_empty(),
        failing: failing.clone(),
        detail: Checks { checks },
    };
    emit(cfg, Format::Json, &report, || {
        let mut t = checks_table(&report.detail.checks);
        t.note("passed", report.passed);
        t
    })?;
    finish(&failing)
}

/// Parameter vectors for the numerical suites.
fn corpus(
    cfg: &RunConfig,
    pairs: &[(f64, f64)],
    default_dims: &[usize],
) -> Result<Vec<ParamVector>, CliError> {
    if has_explicit_params(cfg) {
        return Ok(vec![param_vector(cfg, dimension(cfg, None)?)?]);
    }
    let dims = if cfg.dim.is_empty() {
        default_dims.to_vec()
    } else {
        cfg.dim.clone()
    };
    let mut out = Vec::new();
    for d in dims {
        if d == 0 || d > 4 {
            return Err(usage(format!(
                "corpus dimensions must be in 1..=4, got {d}"
            )));
        }
        for &(a, b) in pairs {
            out.push(ParamVector::uniform(d, a, b)?);
        }
    }
    Ok(out)
}

/// Random standard expansions for corpus entry `index`, reproducible from the seed.
fn samples(
    cfg: &RunConfig,
    p: &ParamVector,
    index: usize,
    cap: u32,
    default: usize,
) -> Result<Vec<Expansion>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    (0..cfg.samples.unwrap_or(default))
        .map(|_| {
            Ok(Expansion::random(
                p.clone(),
                Basis::Standard,
                cap,
                &mut rng,
            )?)
        })
        .collect()
}

fn degree(cfg: &RunConfig, default: u32, max: u32) -> Result<u32, CliError> {
    let n = cfg.degree.unwrap_or(default);
    if n > max {
        return Err(usage(format!(
            "--degree {n} is above the limit {max} for this suite"
        )));
    }
    Ok(n)
}

fn numeric(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let vectors = corpus(cfg, &CORPUS, &[1, 2])?;
    let cap = degree(cfg, NUMERIC_DEGREE, 12)?;
    let ts = times(cfg, &[0.25, 1.0])?;
    let per_vector = vectors
        .par_iter()
        .enumerate()
        .map(|(index, p)| -> Result<Vec<Check>, CliError> {
            let d = p.dim();
            let axes = mesh(cfg, d, [51, 21, 7, 5][d - 1])?;
            let fs = samples(cfg, p, index, cap, 3)?;
            let mut out = Vec::new();
            for &t in &ts {
                let mut worst: Vec<(String, f64)> = Vec::new();
                for f in &fs {
                    for rep in verify_cauchy_riemann(f, t, &axes)? {
                        match worst.iter_mut().find(|(e, _)| *e == rep.equation) {
                            Some((_, w)) => *w = w.max(rep.max_residual),
                            None => worst.push((rep.equation, rep.max_residual)),
                        }
                    }
                }
                for (eq, w) in worst {
                    let tol = if eq == "hh4" { HH4_TOL } else { CR_TOL };
                    out.push(Check::new(eq, p, Some(t), w, tol));
                }
            }
            let (mut iso, mut rbar): (f64, f64) = (0.0, 0.0);
            for f in &fs {
                let pi0 = project_pi0(f)?;
                let rhs = pi0.l2_norm_squared();
                let mut lhs = 0.0;
                let mut acc = Expansion::new(p.clone(), Basis::Standard, cap)?;
                for i in 0..d {
                    let r = riesz(i, f)?;
                    lhs += r.l2_norm_squared();
                    acc = acc.add(&riesz_adjoint(i, &r)?)?;
                }
                if rhs > 0.0 {
                    iso = iso.max((lhs - rhs).abs() / rhs);
                }
                rbar = rbar.max(acc.max_coefficient_difference(&pi0)?);
            }
            out.push(Check::new("l2_isometry", p, None, iso, ISOMETRY_TOL));
            out.push(Check::new("sum_RbarR", p, None, rbar, RBAR_R_TOL));
            Ok(out)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_vector.into_iter().flatten().collect())
}

/// `h²` re-expanded on `k ≤ 2·half_cap`: a nonnegative band-limited function.
fn nonnegative(h: &Expansion, half_cap: u32) -> Result<Expansion, CliError> {
    let cap = 2 * half_cap;
    let grid = TensorGrid::gauss(h.params(), default_node_count(cap))?;
    Ok(fourier_coefficients(
        |x| synthesize(h, x).map_or(f64::NAN, |v| v * v),
        h.params(),
        cap,
        &grid,
    )?)
}

fn energy(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let vectors = corpus(cfg, &CORPUS, &[1, 2])?;
    let cap = degree(cfg, NUMERIC_DEGREE, 12)?;
    vectors
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let mut worst: f64 = 0.0;
            for h in samples(cfg, p, index, cap / 2, 5)? {
                worst =
                    worst.max(verify_energy_identity(&nonnegative(&h, cap / 2)?)?.relative_error);
            }
            Ok(Check::new("energy", p, None, worst, ENERGY_TOL))
        })
        .collect()
}

fn domination(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let vectors = corpus(cfg, &CORPUS, &[1, 2])?;
    let cap = degree(cfg, NUMERIC_DEGREE, 12)?;
    vectors
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let axes = mesh(cfg, p.dim(), [41, 15, 5, 3][p.dim() - 1])?;
            let (mut worst, mut violations) = (f64::NEG_INFINITY, 0);
            for f in samples(cfg, p, index, cap, 3)? {
                let rep = verify_domination(&f, &axes)?;
                worst = worst.max(rep.max_excess);
                violations += rep.violations.len();
            }
            let mut c = Check::new("domination", p, None, worst, DOMINATION_SLACK);
            if violations > 0 {
                c.status = CheckStatus::Fail;
            }
            Ok(c)
        })
        .collect()
}

/// `G̃^i_t ≤ G_t` pointwise and `T̃^i_t 1 ≤ 1`, `P̃^i_t 1 ≤ 1` for every coordinate `i`.
fn kernels(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let vectors = corpus(cfg, &KERNEL_CORPUS, &[1])?;
    let ts = times(cfg, &[0.01, 0.1, 0.5, 1.0])?;
    if ts.contains(&0.0) {
        return Err(usage("kernel checks need t > 0"));
    }
    let max_degree = cfg.degree.unwrap_or(DEFAULT_KERNEL_DEGREE);
    let mut out = Vec::new();
    for p in &vectors {
        let d = p.dim();
        if d > 2 {
            return Err(usage("the kernel suite supports d <= 2"));
        }
        let axes = mesh(cfg, d, [51, 11][d - 1])?;
        for &t in &ts {
            let g = heat_kernel_table(t, p, &axes, max_degree)?;
            for i in 0..d {
                let gt = modified_kernel_table(i, t, p, &axes, max_degree)?;
                let excess = gt
                    .values
                    .iter()
                    .zip(&g.values)
                    .fold(f64::NEG_INFINITY, |m, (a, b)| m.max(a - b));
                let mut c = Check::new(
                    format!("kernel_{}", i + 1),
                    p,
                    Some(t),
                    excess,
                    KERNEL_SLACK,
                );
                c.status = if !(g.converged && gt.converged) {
                    CheckStatus::Unresolved
                } else if excess > KERNEL_SLACK {
                    CheckStatus::Violated
                } else {
                    CheckStatus::Pass
                };
                out.push(c);
                for (kind, name) in [
                    (SemigroupKind::Heat, "heat"),
                    (SemigroupKind::Poisson, "poisson"),
                ] {
                    let one = modified_semigroup_on_one(kind, t, p.pair(i), &axes[i])?;
                    let peak = one.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
                    let mut c = Check::new(
                        format!("linf_{name}_{}", i + 1),
                        p,
                        Some(t),
                        peak,
                        1.0 + LINF_SLACK,
                    );
                    if c.status == CheckStatus::Fail {
                        c.status = CheckStatus::Violated;
                    }
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

fn emit_kernels(cfg: &RunConfig, checks: Vec<Check>) -> Result<(), CliError> {
    let violated = checks
        .iter()
        .filter(|c| c.status == CheckStatus::Violated)
        .count();
    let failing: Vec<String> = if cfg.expect_violation {
        if violated > 0 {
            Vec::new()
        } else {
            vec!["expected kernel violation not observed".into()]
        }
    } else {
        checks
            .iter()
            .filter(|c| c.status != CheckStatus::Pass)
            .map(Check::label)
            .collect()
    };
    #[derive(Serialize)]
    struct KernelDetail {
        expect_violation: bool,
        violations: usize,
        checks: Vec<Check>,
    }
    let report = Report {
        suite: Suite::Kernels,
        passed: failing.is_empty(),
        failing: failing.clone(),
        detail: KernelDetail {
            expect_violation: cfg.expect_violation,
            violations: violated,
            checks,
        },
    };
    emit(cfg, Format::Json, &report, || {
        let mut t = checks_table(&report.detail.checks);
        t.note("expect_violation", cfg.expect_violation);
        t.note("violations", violated);
        t.note("passed", report.passed);
        t
    })?;
    finish(&failing)
}

#[derive(Serialize)]
struct IdentitySummary {
    d: usize,
    identity: IdentityId,
    vectors: usize,
    checks: usize,
    passed: usize,
    not_applicable: usize,
    failed: usize,
}

#[derive(Serialize)]
struct ExactDetail {
    degree_cap: u32,
    summary: Vec<IdentitySummary>,
    failures: Vec<IdentityReport>,
}

fn exact_vectors(cfg: &RunConfig) -> Result<Vec<RationalParamVector>, CliError> {
    if has_explicit_params(cfg) {
        let d = dimension(cfg, None)?;
        if d > 4 {
            return Err(usage("the exact suite supports d <= 4"));
        }
        return Ok(vec![rational_params(cfg, d)?]);
    }
    let dims = if cfg.dim.is_empty() {
        vec![1, 2]
    } else {
        cfg.dim.clone()
    };
    let mut out = Vec::new();
    for d in dims {
        if d == 0 || d > 3 {
            return Err(usage(format!(
                "the exact corpus covers d in 1..=3, got {d}"
            )));
        }
        for mut code in 0..25usize.pow(d as u32) {
            let (mut alpha, mut beta) = (Vec::with_capacity(d), Vec::with_capacity(d));
            for _ in 0..d {
                alpha.push(HALVES[code % 5]);
                beta.push(HALVES[(code / 5) % 5]);
                code /= 25;
            }
            out.push(RationalParamVector::from_ratios(&alpha, &beta)?);
        }
    }
    Ok(out)
}

fn exact(cfg: &RunConfig) -> Result<(), CliError> {
    let cap = degree(cfg, EXACT_DEGREE, 8)?;
    let vectors = exact_vectors(cfg)?;
    let reports: Vec<(usize, Vec<IdentityReport>)> = vectors
        .par_iter()
        .map(|p| (p.dim(), verify_identities(&IdentityId::ALL, p, cap)))
        .collect();

    let mut summary: Vec<IdentitySummary> = Vec::new();
    let mut failures = Vec::new();
    let mut last_vector: Vec<Option<usize>> = Vec::new();
    for (v, (d, reps)) in reports.into_iter().enumerate() {
        for r in reps {
            let pos = match summary
                .iter()
                .position(|s| s.d == d && s.identity == r.identity)
            {
                Some(pos) => pos,
                None => {
                    summary.push(IdentitySummary {
                        d,
                        identity: r.identity,
                        vectors: 0,
                        checks: 0,
                        passed: 0,
                        not_applicable: 0,
                        failed: 0,
                    });
                    last_vector.push(None);
                    summary.len() - 1
                }
            };
            let s = &mut summary[pos];
            if last_vector[pos] != Some(v) {
                last_vector[pos] = Some(v);
                s.vectors += 1;
            }
            s.checks += 1;
            match r.status {
                Status::Pass => s.passed += 1,
                Status::NotApplicable if r.identity == IdentityId::Hh2 && d > 1 => {
                    s.not_applicable += 1
                }
                _ => {
                    s.failed += 1;
                    failures.push(r);
                }
            }
        }
    }
    summary.sort_by_key(|s| (s.d, s.identity));
    let failing: Vec<String> = failures
        .iter()
        .map(|r| {
            format!(
                "{} at alpha=[{}] beta=[{}] k={:?}",
                r.identity,
                r.params.alpha.join(" "),
                r.params.beta.join(" "),
                r.mode
            )
        })
        .collect();
    let report = Report {
        suite: Suite::Exact,
        passed: failing.is_empty(),
        failing: failing.clone(),
        detail: ExactDetail {
            degree_cap: cap,
            summary,
            failures,
        },
    };
    emit(cfg, Format::Json, &report, || {
        let mut t = Table::new(&[
            "d",
            "identity",
            "vectors",
            "checks",
            "passed",
            "not_applicable",
            "failed",
        ]);
        t.note("degree_cap", cap);
        t.note("passed", report.passed);
        for s in &report.detail.summary {
            t.rows.push(vec![
                s.d.to_string(),
                s.identity.to_string(),
                s.vectors.to_string(),
                s.checks.to_string(),
                s.passed.to_string(),
                s.not_applicable.to_string(),
                s.failed.to_string(),
            ]);
        }
        t
    })?;
    finish(&failing)
}

pub fn cmd_verify(cfg: &RunConfig, suite: Suite) -> Result<(), CliError> {
    if cfg.expect_violation && suite != Suite::Kernels {
        return Err(usage(
            "--expect-violation only applies to the kernels suite",
        ));
    }
    match suite {
        Suite::Exact => exact(cfg),
        Suite::Numeric => emit_checks(cfg, suite, numeric(cfg)?),
        Suite::Energy => emit_checks(cfg, suite, energy(cfg)?),
        Suite::Domination => emit_checks(cfg, suite, domination(cfg)?),
        Suite::Kernels => emit_kernels(cfg, kernels(cfg)?),
    }
}
