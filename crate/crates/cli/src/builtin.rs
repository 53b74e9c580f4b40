//! `expand`: builtin function specs. There is no expression parser.
//!
//! * `mode k=(1,0) [shifted=i] [v=c]`: one basis function.
//! * `constant [v=c]`.
//! * `poly c@e1,..,ed ...`: `Σ c x^e`, expanded by Gauss quadrature (exact for polynomials).
//! * `bump [c=(..)] [r=R]`: `exp(1 - 1/(1 - |x-c|²/R²))` inside the ball, `0` outside,
//!   projected onto `k ≤ --degree` (default 8) by Gauss quadrature.
//! * `file PATH`: re-read an expansion file.

use std::path::Path;

use jacobi_core::quadrature::{default_node_count, fourier_coefficients, TensorGrid};
use jacobi_core::{Basis, Expansion, MultiIndex, ParamVector};

use crate::error::{usage, CliError};
use crate::expfile::{read_expansion, ExpansionFile};
use crate::output::emit;
use crate::params::{dimension, param_vector};
use crate::{Format, RunConfig};

const DEFAULT_BUMP_DEGREE: u32 = 8;
const MAX_QUADRATURE_POINTS: usize = 4_000_000;

fn tuple<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(s);
    let v = inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| usage(format!("{what}: cannot read `{x}`")))
        })
        .collect::<Result<Vec<T>, _>>()?;
    Ok(v)
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| usage(format!("{what}: `{s}` is not a finite number")))
}

/// `key=value` arguments, each key at most once and from `allowed`.
fn keyed<'a>(args: &[&'a str], allowed: &[&str]) -> Result<Vec<(&'a str, &'a str)>, CliError> {
    let mut out: Vec<(&str, &str)> = Vec::new();
    for a in args {
        let (k, v) = a
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value, got `{a}`")))?;
        if !allowed.contains(&k) {
            return Err(usage(format!(
                "unknown key `{k}` (allowed: {})",
                allowed.join(", ")
            )));
        }
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(usage(format!("key `{k}` given twice")));
        }
        out.push((k, v));
    }
    Ok(out)
}

fn grid_for(params: &ParamVector, cap: u32) -> Result<TensorGrid, CliError> {
    let n = default_node_count(cap);
    let total = (0..params.dim()).try_fold(1usize, |acc, _| {
        acc.checked_mul(n).filter(|&m| m <= MAX_QUADRATURE_POINTS)
    });
    if total.is_none() {
        return Err(usage(format!(
            "{n}^{} quadrature points exceed the limit of {MAX_QUADRATURE_POINTS}",
            params.dim()
        )));
    }
    Ok(TensorGrid::gauss(params, n)?)
}

fn mode(cfg: &RunConfig, args: &[&str]) -> Result<Expansion, CliError> {
    let mut k = None;
    let mut shifted = None;
    let mut value = 1.0;
    for (key, v) in keyed(args, &["k", "shifted", "v"])? {
        match key {
            "k" => k = Some(tuple::<u32>(v, "k")?),
            "shifted" => {
                shifted = Some(
                    v.parse::<usize>()
                        .map_err(|_| usage(format!("shifted: `{v}`")))?,
                )
            }
            _ => value = number(v, "v")?,
        }
    }
    let k = k.ok_or_else(|| usage("mode needs k=(k1,..,kd)"))?;
    let params = param_vector(cfg, dimension(cfg, Some(k.len()))?)?;
    let basis = match shifted {
        None => Basis::Standard,
        Some(i) if (1..=k.len()).contains(&i) => Basis::Shifted(i - 1),
        Some(i) => {
            return Err(usage(format!(
                "shifted={i} out of range for d = {}",
                k.len()
            )))
        }
    };
    let mut f = Expansion::single_mode(params, basis, MultiIndex::new(k.clone()))?;
    f.set(MultiIndex::new(k), value)?;
    Ok(f)
}

fn constant(cfg: &RunConfig, args: &[&str]) -> Result<Expansion, CliError> {
    let mut value = 1.0;
    for (_, v) in keyed(args, &["v"])? {
        value = number(v, "v")?;
    }
    Ok(Expansion::constant(
        param_vector(cfg, dimension(cfg, None)?)?,
        value,
    ))
}

fn poly(cfg: &RunConfig, args: &[&str]) -> Result<Expansion, CliError> {
    if args.is_empty() {
        return Err(usage("poly needs at least one term c@e1,..,ed"));
    }
    let mut terms: Vec<(f64, Vec<i32>)> = Vec::new();
    for a in args {
        let (c, e) = a
            .split_once('@')
            .ok_or_else(|| usage(format!("poly term `{a}` is not c@e1,..,ed")))?;
        let e: Vec<u32> = tuple(e, "exponent")?;
        if e.iter().any(|&x| x > 200) {
            return Err(usage(format!(
                "poly term `{a}`: exponents are limited to 200"
            )));
        }
        terms.push((
            number(c, "coefficient")?,
            e.into_iter().map(|x| x as i32).collect(),
        ));
    }
    let d = terms[0].1.len();
    if terms.iter().any(|(_, e)| e.len() != d) {
        return Err(usage("poly terms have different numbers of exponents"));
    }
    let needed = terms
        .iter()
        .flat_map(|(_, e)| e.iter().copied())
        .max()
        .unwrap_or(0) as u32;
    let cap = cfg.degree.unwrap_or(needed).max(needed);
    let params = param_vector(cfg, dimension(cfg, Some(d))?)?;
    let grid = grid_for(&params, cap)?;
    let f = |x: &[f64]| {
        terms
            .iter()
            .map(|(c, e)| {
                c * x
                    .iter()
                    .zip(e)
                    .map(|(xi, &ei)| xi.powi(ei))
                    .product::<f64>()
            })
            .sum()
    };
    Ok(fourier_coefficients(f, &params, cap, &grid)?)
}

fn bump(cfg: &RunConfig, args: &[&str]) -> Result<Expansion, CliError> {
    let mut center: Option<Vec<f64>> = None;
    let mut radius = 0.5;
    for (key, v) in keyed(args, &["c", "r"])? {
        match key {
            "c" => center = Some(tuple::<f64>(v, "c")?),
            _ => radius = number(v, "r")?,
        }
    }
    if radius <= 0.0 {
        return Err(usage("bump radius must be positive"));
    }
    let d = dimension(cfg, center.as_ref().map(Vec::len))?;
    let center = center.unwrap_or_else(|| vec![0.0; d]);
    if center.iter().any(|c| !c.is_finite()) {
        return Err(usage("bump center must be finite"));
    }
    let params = param_vector(cfg, d)?;
    let cap = cfg.degree.unwrap_or(DEFAULT_BUMP_DEGREE);
    let grid = grid_for(&params, cap)?;
    let f = |x: &[f64]| {
        let s2 = x
            .iter()
            .zip(&center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / (radius * radius);
        if s2 < 1.0 {
            (1.0 - 1.0 / (1.0 - s2)).exp()
        } else {
            0.0
        }
    };
    Ok(fourier_coefficients(f, &params, cap, &grid)?)
}

pub fn build(cfg: &RunConfig, spec: &[String]) -> Result<Expansion, CliError> {
    let joined = spec.join(" ");
    let words: Vec<&str> = joined.split_whitespace().collect();
    let Some((&kind, args)) = words.split_first() else {
        return Err(usage("empty function spec"));
    };
    match kind {
        "mode" => mode(cfg, args),
        "constant" => constant(cfg, args),
        "poly" => poly(cfg, args),
        "bump" => bump(cfg, args),
        "file" => match args {
            [path] => read_expansion(Path::new(path)),
            _ => Err(usage("file takes exactly one path")),
        },
        other => Err(usage(format!(
            "unknown builtin `{other}` (mode, constant, poly, bump, file)"
        ))),
    }
}

pub fn cmd_expand(cfg: &RunConfig, spec: &[String]) -> Result<(), CliError> {
    let file = ExpansionFile::from_expansion(&build(cfg, spec)?);
    emit(cfg, Format::Json, &file, || file.table())
}
