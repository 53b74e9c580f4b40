//! Turning raw flag values into library inputs.

use jacobi_core::exactalg::RationalParamVector;
use jacobi_core::spectral::interior_mesh;
use jacobi_core::ParamVector;

use crate::error::{usage, CliError};
use crate::RunConfig;

const MAX_DIM: usize = 32;

fn floats(list: &[String], flag: &str) -> Result<Vec<f64>, CliError> {
    list.iter()
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| usage(format!("--{flag}: `{s}` is not a finite number")))
        })
        .collect()
}

/// Repeat a one-element list `d` times; otherwise the length must be `d`.
fn broadcast<T: Clone>(v: Vec<T>, d: usize, default: T, flag: &str) -> Result<Vec<T>, CliError> {
    match v.len() {
        0 => Ok(vec![default; d]),
        1 => Ok(vec![v[0].clone(); d]),
        n if n == d => Ok(v),
        n => Err(usage(format!("--{flag} has {n} values, expected 1 or {d}"))),
    }
}

pub fn has_explicit_params(cfg: &RunConfig) -> bool {
    !cfg.alpha.is_empty() || !cfg.beta.is_empty()
}

/// Dimension implied by the flags: `--dim` (a single value) or the longer of the
/// parameter lists. `fixed` is a dimension forced by the input itself.
pub fn dimension(cfg: &RunConfig, fixed: Option<usize>) -> Result<usize, CliError> {
    let from_dim = match cfg.dim.as_slice() {
        [] => None,
        [d] => Some(*d),
        _ => return Err(usage("--dim takes a single value for this command")),
    };
    let from_lists = cfg.alpha.len().max(cfg.beta.len());
    let d = match (fixed, from_dim) {
        (Some(a), Some(b)) if a != b => {
            return Err(usage(format!(
                "--dim {b} conflicts with the input dimension {a}"
            )));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => from_lists.max(1),
    };
    if d == 0 || d > MAX_DIM {
        return Err(usage(format!(
            "dimension must be in 1..={MAX_DIM}, got {d}"
        )));
    }
    Ok(d)
}

pub fn param_vector(cfg: &RunConfig, d: usize) -> Result<ParamVector, CliError> {
    let alpha = broadcast(floats(&cfg.alpha, "alpha")?, d, 0.0, "alpha")?;
    let beta = broadcast(floats(&cfg.beta, "beta")?, d, 0.0, "beta")?;
    Ok(ParamVector::new(&alpha, &beta)?)
}

/// `p/q` or a plain decimal such as `-0.75`, read exactly.
pub fn parse_rational(s: &str) -> Option<(i64, i64)> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
        return (d != 0).then_some((n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !(int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()))
    {
        return None;
    }
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let mut num: i64 = 0;
    for b in int.bytes().chain(frac.bytes()) {
        num = num.checked_mul(10)?.checked_add(i64::from(b - b'0'))?;
    }
    Some((if neg { -num } else { num }, den))
}

pub fn rational_params(cfg: &RunConfig, d: usize) -> Result<RationalParamVector, CliError> {
    let exact = |list: &[String], flag: &str| -> Result<Vec<(i64, i64)>, CliError> {
        let v = list
            .iter()
            .map(|s| {
                parse_rational(s)
                    .ok_or_else(|| usage(format!("--{flag}: `{s}` is not an exact rational")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        broadcast(v, d, (0, 1), flag)
    };
    Ok(RationalParamVector::from_ratios(
        &exact(&cfg.alpha, "alpha")?,
        &exact(&cfg.beta, "beta")?,
    )?)
}

/// The only `--t` value, or `default` when none was given.
pub fn single_t(cfg: &RunConfig, default: Option<f64>) -> Result<f64, CliError> {
    let t = match (cfg.t.as_slice(), default) {
        ([t], _) => *t,
        ([], Some(t)) => t,
        ([], None) => return Err(usage("this operation needs --t")),
        _ => return Err(usage("this operation takes a single --t value")),
    };
    check_time(t)?;
    Ok(t)
}

pub fn times(cfg: &RunConfig, default: &[f64]) -> Result<Vec<f64>, CliError> {
    let ts = if cfg.t.is_empty() {
        default.to_vec()
    } else {
        cfg.t.clone()
    };
    ts.iter().try_for_each(|&t| check_time(t))?;
    Ok(ts)
}

fn check_time(t: f64) -> Result<(), CliError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(usage(format!(
            "--t must be finite and nonnegative, got {t}"
        )))
    }
}

/// Equispaced interior mesh with `--grid` points per coordinate.
pub fn mesh(cfg: &RunConfig, d: usize, default: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let sizes = broadcast(cfg.grid.clone(), d, default, "grid")?;
    if let Some(&n) = sizes.iter().find(|&&n| n == 0 || n > 100_000) {
        return Err(usage(format!("--grid must be in 1..=100000, got {n}")));
    }
    Ok(sizes.into_iter().map(interior_mesh).collect())
}

/// `name-i` with a one-based coordinate `i`; returns the zero-based coordinate.
pub fn coordinate_suffix(op: &str, name: &str) -> Option<Result<usize, CliError>> {
    let rest = op.strip_prefix(name)?.strip_prefix('-')?;
    Some(match rest.parse::<usize>() {
        Ok(i) if i >= 1 => Ok(i - 1),
        _ => Err(usage(format!(
            "`{op}`: coordinate must be a positive integer"
        ))),
    })
}

pub fn check_coordinate(i: usize, d: usize) -> Result<(), CliError> {
    if i < d {
        Ok(())
    } else {
        Err(usage(format!(
            "coordinate {} out of range for d = {d}",
            i + 1
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-0.75"), Some((-75, 100)));
        assert_eq!(parse_rational("3/2"), Some((3, 2)));
        assert_eq!(parse_rational("2"), Some((2, 1)));
        assert_eq!(parse_rational(".5"), Some((5, 10)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1e3"), None);
        assert_eq!(parse_rational("-"), None);
        assert_eq!(parse_rational("99999999999999999999"), None);
    }
}
