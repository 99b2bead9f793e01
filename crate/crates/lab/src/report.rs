use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use wentzell_core::probes::Verdict;

use crate::config::Format;
use crate::LabError;

pub const TOOL: &str = "wentzell-lab";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits round-trip any binary64.
            Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

/// One CSV file's worth of tabular payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let rows = std::iter::once(self.columns.iter().map(|c| c.to_string()).collect::<Vec<_>>())
            .chain(self.rows.iter().map(|r| r.iter().map(Cell::render).collect()));
        for row in rows {
            w.write_record(&row).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("cells are UTF-8")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Parsed configuration with command-line overrides applied.
    pub config: Value,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub verdict: Verdict,
    pub payload: Value,
}

/// Writes `<command>.json` and one CSV per table; returns the paths written.
pub fn emit_report(
    envelope: &ReportEnvelope,
    tables: &[Table],
    formats: &[Format],
    directory: &Path,
) -> Result<Vec<PathBuf>, LabError> {
    std::fs::create_dir_all(directory).map_err(|e| LabError::Io(format!("{}: {e}", directory.display())))?;
    let mut written = Vec::new();
    let write = |path: PathBuf, body: String, written: &mut Vec<PathBuf>| -> Result<(), LabError> {
        std::fs::write(&path, body).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
        Ok(())
    };
    if formats.contains(&Format::Json) {
        let mut body = serde_json::to_string_pretty(envelope).map_err(|e| LabError::Io(e.to_string()))?;
        body.push('\n');
        write(directory.join(format!("{}.json", envelope.command)), body, &mut written)?;
    }
    if formats.contains(&Format::Csv) {
        for t in tables {
            write(directory.join(format!("{}.csv", t.name)), t.to_csv(), &mut written)?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_cells_round_trip() {
        let x = 0.1f64 + 0.2;
        let s = Cell::Num(x).render();
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(Cell::Num(f64::INFINITY).render(), "inf");
        let mut t = Table::new("t", vec!["label"]);
        t.push(vec![Cell::Text("a,b".into())]);
        assert_eq!(t.to_csv(), "label\n\"a,b\"\n");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("ray_table", vec!["theta_rad", "sup_norm", "bounded_flag"]);
        t.push(vec![1.5.into(), 2.0.into(), true.into()]);
        assert_eq!(
            t.to_csv(),
            "theta_rad,sup_norm,bounded_flag\n1.5000000000000000e0,2.0000000000000000e0,true\n"
        );
    }
}
