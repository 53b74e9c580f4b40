//! `apply`: one spectral operator on an expansion file.

use std::path::Path;

use jacobi_core::conjugacy::{
    conjugate_poisson, conjugate_poisson_adjoint, delta_spectral, potential_expansion, riesz,
    riesz_adjoint, DeltaKind,
};
use jacobi_core::spectral::{
    apply_heat, apply_modified, apply_poisson, project_pi0, SemigroupKind,
};
use jacobi_core::Expansion;

use crate::error::{usage, CliError};
use crate::expfile::{read_expansion, ExpansionFile};
use crate::output::emit;
use crate::params::{check_coordinate, coordinate_suffix, single_t};
use crate::{Format, RunConfig};

/// Operators taking a coordinate suffix `-i`. Longest names first so that
/// `riesz-adjoint-1` is not read as `riesz` with suffix `adjoint-1`.
const INDEXED: [&str; 8] = [
    "conjugate-poisson-adjoint",
    "conjugate-poisson",
    "riesz-adjoint",
    "riesz",
    "modified-poisson",
    "modified-heat",
    "delta-star",
    "delta",
];

pub const OPERATORS: &str =
    "heat, poisson, pi0, potential, riesz-i, riesz-adjoint-i, conjugate-poisson-i, \
conjugate-poisson-adjoint-i, modified-heat-i, modified-poisson-i, delta-i, delta-star-i";

pub fn apply_op(cfg: &RunConfig, op: &str, f: &Expansion) -> Result<Expansion, CliError> {
    let out = match op {
        "heat" => apply_heat(single_t(cfg, None)?, f)?,
        "poisson" => apply_poisson(single_t(cfg, None)?, f)?,
        "pi0" => project_pi0(f)?,
        "potential" => potential_expansion(f, single_t(cfg, None)?)?,
        _ => {
            let (name, i) = INDEXED
                .iter()
                .find_map(|name| coordinate_suffix(op, name).map(|i| (*name, i)))
                .ok_or_else(|| usage(format!("unknown operator `{op}` (known: {OPERATORS})")))?;
            let i = i?;
            check_coordinate(i, f.dim())?;
            match name {
                "riesz" => riesz(i, f)?,
                "riesz-adjoint" => riesz_adjoint(i, f)?,
                "conjugate-poisson" => conjugate_poisson(i, single_t(cfg, None)?, f)?,
                "conjugate-poisson-adjoint" => {
                    conjugate_poisson_adjoint(i, single_t(cfg, None)?, f)?
                }
                "modified-heat" => apply_modified(i, SemigroupKind::Heat, single_t(cfg, None)?, f)?,
                "modified-poisson" => {
                    apply_modified(i, SemigroupKind::Poisson, single_t(cfg, None)?, f)?
                }
                "delta" => delta_spectral(i, f, DeltaKind::Delta)?,
                _ => delta_spectral(i, f, DeltaKind::DeltaStar)?,
            }
        }
    };
    Ok(out)
}

pub fn cmd_apply(cfg: &RunConfig, op: &str, input: &Path) -> Result<(), CliError> {
    let f = read_expansion(input)?;
    let file = ExpansionFile::from_expansion(&apply_op(cfg, op, &f)?);
    emit(cfg, Format::Json, &file, || file.table())
}
