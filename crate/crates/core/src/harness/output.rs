//! CSV and JSON writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::NodalField;
use crate::grid::PeriodicGrid;

use super::config::OutputFormat;
use super::diagnostics::DiagnosticsRecord;
use super::study::{compute_eoc, ConvergenceTable, RefinementRow};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut s = String::from("m,t,energy,length,ratio,identity_residual\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.m,
            r.t,
            r.energy,
            r.length,
            r.ratio,
            opt(r.identity_residual)
        );
    }
    s
}

/// Error table with experimental orders; the EOC cells of the first row are empty.
pub fn convergence_csv(table: &ConvergenceTable) -> Result<String> {
    let with_y = table.has_y();
    let mut s = String::from("J,l2_x,eoc_l2_x,h1_x,eoc_h1_x");
    if with_y {
        s.push_str(",l2_y,eoc_l2_y,h1_y,eoc_h1_y");
    }
    s.push('\n');
    let mut cols = vec![table.l2_x(), table.h1_x()];
    if with_y {
        cols.push(table.l2_y().unwrap_or_default());
        cols.push(table.h1_y().unwrap_or_default());
    }
    let eocs = cols
        .iter()
        .map(|c| compute_eoc(c))
        .collect::<Result<Vec<_>>>()?;
    for (i, row) in table.rows.iter().enumerate() {
        s.push_str(&row.num_elements.to_string());
        for (c, e) in cols.iter().zip(&eocs) {
            let _ = write!(
                s,
                ",{},{}",
                c[i],
                e[i].map(|v| v.to_string()).unwrap_or_default()
            );
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn refinement_csv(rows: &[RefinementRow]) -> String {
    let mut s = String::from("dt,l2_x,wall_seconds\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.dt, r.l2_x, r.wall_seconds);
    }
    s
}

/// Curve snapshot `rho,x1..xd` with rows `j = 0..=J`; row 0 repeats node `J`.
pub fn frame_csv(grid: &PeriodicGrid, x: &NodalField) -> String {
    let mut s = String::from("rho");
    for k in 1..=x.dim() {
        let _ = write!(s, ",x{k}");
    }
    s.push('\n');
    let j = grid.len();
    for row in 0..=j {
        let (rho, node) = if row == 0 {
            (0.0, j - 1)
        } else {
            (grid.nodes()[row - 1], row - 1)
        };
        let _ = write!(s, "{rho}");
        for v in x.node(node) {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))
}

/// Writes `content` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

/// Renders in the requested format: CSV through `csv`, JSON via serde.
pub fn render<T: Serialize + ?Sized>(
    format: OutputFormat,
    value: &T,
    csv: impl FnOnce() -> Result<String>,
) -> Result<String> {
    match format {
        OutputFormat::Csv => csv(),
        OutputFormat::Json => to_json(value),
    }
}
