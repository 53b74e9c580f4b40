//! JSON and CSV rendering, and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{usage, CliError};
use crate::{Format, RunConfig};

/// Rows of a CSV file plus `# key: value` lines printed after the config echo.
#[derive(Default)]
pub struct Table {
    pub notes: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }
}

/// Full round-trip decimal: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn join<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct Document<'a, T> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: &'a T,
}

fn render_csv(cfg: &RunConfig, table: &Table) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let config = serde_json::to_string(cfg).map_err(|e| usage(e.to_string()))?;
    writeln!(buf, "# config: {config}").expect("writing to memory");
    for (k, v) in &table.notes {
        writeln!(buf, "# {k}: {v}").expect("writing to memory");
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf);
    let fail = |e: csv::Error| usage(format!("csv: {e}"));
    w.write_record(&table.columns).map_err(fail)?;
    for row in &table.rows {
        w.write_record(row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| usage(format!("csv: {e}")))
}

/// Render `body` (JSON) or `table` (CSV) and write it to `--out` or standard output.
pub fn emit<T: Serialize>(
    cfg: &RunConfig,
    default: Format,
    body: &T,
    table: impl FnOnce() -> Table,
) -> Result<(), CliError> {
    let bytes = match cfg.format.unwrap_or(default) {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&Document { config: cfg, body })
                .map_err(|e| usage(format!("json: {e}")))?;
            s.push(b'\n');
            s
        }
        Format::Csv => render_csv(cfg, &table())?,
    };
    match &cfg.out {
        Some(path) => write_atomic(path, &bytes),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| usage(format!("stdout: {e}"))),
    }
}

/// Write to a temporary file next to `path`, then rename over it. Existing
/// non-regular targets (`/dev/null`, pipes) are written in place instead.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let err = |e: std::io::Error| usage(format!("{}: {e}", path.display()));
    if std::fs::metadata(path).is_ok_and(|m| !m.is_file()) {
        return std::fs::OpenOptions::new()
            .write(true)
            .open(path)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(err);
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
