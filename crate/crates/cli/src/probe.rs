//! `normprobe`: best `‖Tf‖_p / ‖f‖_p` over seeded random inputs.

use jacobi_core::squarefn::{probe_grid, probe_sample_ratios, NormProbeReport, ProbeOperator};
use jacobi_core::ParamVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{usage, CliError};
use crate::output::{emit, num, opt_num, Table};
use crate::params::{coordinate_suffix, param_vector, single_t};
use crate::{Format, RunConfig};

pub const DEFAULT_PROBE_DEGREE: u32 = 6;
pub const DEFAULT_PROBE_SAMPLES: usize = 200;

fn operator(cfg: &RunConfig, op: &str) -> Result<ProbeOperator, CliError> {
    let t = || single_t(cfg, None);
    Ok(match op {
        "heat" => ProbeOperator::Heat(t()?),
        "poisson" => ProbeOperator::Poisson(t()?),
        "riesz-vector" => ProbeOperator::RieszVector,
        _ => {
            if let Some(i) = coordinate_suffix(op, "conjugate-poisson") {
                ProbeOperator::ConjugatePoisson(i?, t()?)
            } else if let Some(i) = coordinate_suffix(op, "modified-poisson") {
                ProbeOperator::ModifiedPoisson(i?, t()?)
            } else if let Some(i) = coordinate_suffix(op, "riesz") {
                ProbeOperator::Riesz(i?)
            } else {
                return Err(usage(format!(
                    "unknown probe operator `{op}` (riesz-i, riesz-vector, conjugate-poisson-i, heat, poisson, modified-poisson-i)"
                )));
            }
        }
    })
}

/// One report per exponent. Samples run in parallel; the maximum is taken in
/// sample order, so the result does not depend on the schedule.
fn probe(
    op: ProbeOperator,
    ps: &[f64],
    params: &ParamVector,
    cap: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<NormProbeReport>, CliError> {
    let grid = probe_grid(params, cap)?;
    let ratios = (0..samples as u64)
        .into_par_iter()
        .map(|index| probe_sample_ratios(op, ps, params, cap, seed, index, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = vec![0.0f64; ps.len()];
    for r in ratios {
        for (b, v) in best.iter_mut().zip(r) {
            *b = b.max(v);
        }
    }
    Ok(ps
        .iter()
        .zip(best)
        .map(|(&p, best_ratio)| NormProbeReport {
            operator: op.to_string(),
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

#[derive(Serialize)]
struct ProbeOutput {
    /// The ratios are lower bounds for the operator norm on the truncated class.
    rows: Vec<NormProbeReport>,
}

pub fn cmd_normprobe(cfg: &RunConfig, op: &str) -> Result<(), CliError> {
    let op = operator(cfg, op)?;
    let ps = if cfg.p.is_empty() {
        vec![2.0]
    } else {
        cfg.p.clone()
    };
    if let Some(p) = ps.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
        return Err(usage(format!("--p must be finite and at least 1, got {p}")));
    }
    let dims = if cfg.dim.is_empty() {
        vec![cfg.alpha.len().max(cfg.beta.len()).max(1)]
    } else {
        cfg.dim.clone()
    };
    let cap = cfg.degree.unwrap_or(DEFAULT_PROBE_DEGREE);
    let samples = cfg.samples.unwrap_or(DEFAULT_PROBE_SAMPLES);
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let mut rows = Vec::new();
    for &d in &dims {
        if d == 0 || d > 8 {
            return Err(usage(format!(
                "normprobe dimensions must be in 1..=8, got {d}"
            )));
        }
        let nodes = (2 * cap as usize + 8).checked_pow(d as u32);
        if nodes.map_or(true, |n| n > 4_000_000) {
            return Err(usage(format!(
                "probe grid for d = {d}, N = {cap} is too large"
            )));
        }
        let params = param_vector(cfg, d)?;
        rows.extend(probe(op, &ps, &params, cap, samples, cfg.seed)?);
    }
    let body = ProbeOutput { rows };
    emit(cfg, Format::Csv, &body, || {
        let mut t = Table::new(&[
            "operator",
            "t",
            "p",
            "d",
            "N",
            "samples",
            "seed",
            "best_ratio",
        ]);
        for r in &body.rows {
            t.rows.push(vec![
                r.operator.clone(),
                opt_num(r.t),
                num(r.p),
                r.d.to_string(),
                r.degree_cap.to_string(),
                r.samples.to_string(),
                r.seed.to_string(),
                num(r.best_ratio),
            ]);
        }
        t
    })
}
