//! `kernels` and `gfun`: values on tensor meshes.

use std::path::Path;

use jacobi_core::spectral::{heat_kernel_table, modified_kernel_table, KERNEL_PATH_TOLERANCE};
use jacobi_core::squarefn::{
    square_function_grid, GVariant, SquareFunction, CROSS_CHECK_TOLERANCE,
};
use serde::Serialize;

use crate::error::{usage, CliError};
use crate::expfile::read_expansion;
use crate::output::{emit, num, opt_num, Table};
use crate::params::{check_coordinate, coordinate_suffix, dimension, mesh, param_vector, single_t};
use crate::{Format, RunConfig};

pub const DEFAULT_KERNEL_DEGREE: u32 = 400;
const MAX_MESH_POINTS: usize = 10_000;

fn default_mesh(d: usize, one: usize, two: usize, more: usize) -> usize {
    match d {
        1 => one,
        2 => two,
        _ => more,
    }
}

fn point_columns(prefix: &str, d: usize) -> Vec<String> {
    if d == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=d).map(|i| format!("{prefix}{i}")).collect()
    }
}

/// Mesh points in row-major order (last coordinate fastest).
fn points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|p| {
                axis.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect()
    })
}

fn check_mesh_size(axes: &[Vec<f64>]) -> Result<(), CliError> {
    let n = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()));
    match n {
        Some(n) if n <= MAX_MESH_POINTS => Ok(()),
        _ => Err(usage(format!(
            "mesh has more than {MAX_MESH_POINTS} points"
        ))),
    }
}

#[derive(Serialize)]
struct KernelOutput {
    variant: String,
    t: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    truncation_degree: u32,
    residual: f64,
    converged: bool,
    path_difference: Option<f64>,
    /// Set when the series did not converge or the two constructions disagree.
    residual_flag: bool,
    x_points: Vec<Vec<f64>>,
    y_points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

pub fn cmd_kernels(cfg: &RunConfig, variant: &str) -> Result<(), CliError> {
    let d = dimension(cfg, None)?;
    let params = param_vector(cfg, d)?;
    let t = single_t(cfg, Some(0.5))?;
    if t == 0.0 {
        return Err(usage("kernels need t > 0"));
    }
    let axes = mesh(cfg, d, default_mesh(d, 21, 7, 3))?;
    check_mesh_size(&axes)?;
    let max_degree = cfg.degree.unwrap_or(DEFAULT_KERNEL_DEGREE);
    let table = match variant {
        "heat" => heat_kernel_table(t, &params, &axes, max_degree)?,
        _ => match coordinate_suffix(variant, "modified") {
            Some(i) => {
                let i = i?;
                check_coordinate(i, d)?;
                modified_kernel_table(i, t, &params, &axes, max_degree)?
            }
            None => {
                return Err(usage(format!(
                    "unknown kernel `{variant}` (heat, modified-i)"
                )))
            }
        },
    };
    let flag = !table.converged
        || table
            .path_difference
            .is_some_and(|p| p.is_nan() || p > KERNEL_PATH_TOLERANCE);
    if flag {
        eprintln!(
            "jacobi: warning: kernel table is flagged (truncated at |k| = {})",
            table.truncation_degree
        );
    }
    let body = KernelOutput {
        variant: variant.to_string(),
        t,
        alpha: params.alphas(),
        beta: params.betas(),
        truncation_degree: table.truncation_degree,
        residual: table.residual,
        converged: table.converged,
        path_difference: table.path_difference,
        residual_flag: flag,
        x_points: table.x_points.clone(),
        y_points: table.y_points.clone(),
        values: table.values.clone(),
    };
    emit(cfg, Format::Csv, &body, || {
        let mut cols = point_columns("x", d);
        cols.extend(point_columns("y", d));
        cols.extend(["value".to_string(), "residual_flag".to_string()]);
        let mut out = Table {
            columns: cols,
            ..Table::default()
        };
        out.note("variant", variant);
        out.note("truncation_degree", table.truncation_degree);
        out.note("residual", num(table.residual));
        out.note("converged", table.converged);
        out.note("path_difference", opt_num(table.path_difference));
        let ny = table.y_points.len();
        for (a, x) in table.x_points.iter().enumerate() {
            for (b, y) in table.y_points.iter().enumerate() {
                let mut row: Vec<String> = x.iter().chain(y).map(|v| num(*v)).collect();
                row.push(num(table.values[a * ny + b]));
                row.push(u8::from(flag).to_string());
                out.rows.push(row);
            }
        }
        out
    })
}

#[derive(Serialize)]
struct GOutput {
    function: String,
    /// Largest difference between the closed form and the t-quadrature.
    residual: f64,
    cross_check_tolerance: f64,
    passed: bool,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

pub fn cmd_gfun(cfg: &RunConfig, input: &Path, variant: &str) -> Result<(), CliError> {
    let f = read_expansion(input)?;
    let d = f.dim();
    let function = match variant {
        "g" => SquareFunction::G(GVariant::Full),
        "g-vertical" => SquareFunction::G(GVariant::Vertical),
        _ => match coordinate_suffix(variant, "g-tilde") {
            Some(i) => {
                let i = i?;
                check_coordinate(i, d)?;
                SquareFunction::GTilde(i)
            }
            None => {
                return Err(usage(format!(
                    "unknown square function `{variant}` (g, g-vertical, g-tilde-i)"
                )))
            }
        },
    };
    let axes = mesh(cfg, d, default_mesh(d, 21, 11, 5))?;
    check_mesh_size(&axes)?;
    let res = square_function_grid(function, &f, &axes)?;
    let body = GOutput {
        function: variant.to_string(),
        residual: res.residual,
        cross_check_tolerance: CROSS_CHECK_TOLERANCE,
        passed: res.passes(),
        points: points(&axes),
        values: res.values.clone(),
    };
    emit(cfg, Format::Csv, &body, || {
        let mut cols = point_columns("x", d);
        cols.push("value".into());
        let mut out = Table {
            columns: cols,
            ..Table::default()
        };
        out.note("function", variant);
        out.note("residual", num(body.residual));
        out.note("passed", body.passed);
        for (x, v) in body.points.iter().zip(&body.values) {
            let mut row: Vec<String> = x.iter().map(|v| num(*v)).collect();
            row.push(num(*v));
            out.rows.push(row);
        }
        out
    })?;
    if body.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{variant}: closed form and t-quadrature differ by {:e} (tolerance {CROSS_CHECK_TOLERANCE:e})",
            body.residual
        )))
    }
}
