//! CSV input and tabular output.
//!
//! Input: comma separated, optional single header row (recognized when none
//! of its cells parses as a number), optional `label` column with 0/1 values.
//! Floats are written in shortest round-trip form, so re-reading is lossless.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use datadepth::DataMatrix;

use crate::error::{CliError, CliResult};

pub const LABEL_COLUMN: &str = "label";

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<bool>>,
    pub dim: usize,
}

impl Table {
    /// `None` when there are no rows.
    pub fn matrix(&self) -> CliResult<Option<DataMatrix>> {
        if self.rows.is_empty() {
            return Ok(None);
        }
        let values = self.rows.iter().flatten().copied().collect();
        Ok(Some(DataMatrix::new(self.rows.len(), self.dim, values)?))
    }

    pub fn require_matrix(&self, path: &Path) -> CliResult<DataMatrix> {
        self.matrix()?
            .ok_or_else(|| CliError::Parse { path: path.to_path_buf(), line: 1, msg: "no data rows".into() })
    }
}

fn parse_cell(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let perr = |line: u64, msg: String| CliError::Parse { path: path.to_path_buf(), line, msg };

    let mut columns: Option<Vec<String>> = None;
    let mut label_col: Option<usize> = None;
    let mut width: Option<usize> = None;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| match e.position() {
            Some(p) => perr(p.line(), e.to_string()),
            None => perr(k as u64 + 1, e.to_string()),
        })?;
        let line = rec.position().map_or(k as u64 + 1, |p| p.line());
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        if k == 0 && rec.iter().all(|c| parse_cell(c).is_none()) {
            let names: Vec<String> = rec.iter().map(str::to_string).collect();
            label_col = names.iter().position(|n| n.eq_ignore_ascii_case(LABEL_COLUMN));
            width = Some(names.len());
            columns = Some(names);
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(perr(line, format!("expected {w} fields, found {}", rec.len())));
        }
        let mut row = Vec::with_capacity(w);
        for (j, cell) in rec.iter().enumerate() {
            if Some(j) == label_col {
                labels.push(match cell {
                    "0" => false,
                    "1" => true,
                    _ => return Err(perr(line, format!("label must be 0 or 1, found '{cell}'"))),
                });
                continue;
            }
            row.push(parse_cell(cell).ok_or_else(|| perr(line, format!("field {} is not a number: '{cell}'", j + 1)))?);
        }
        rows.push(row);
    }
    let dim = width.map_or(0, |w| w - usize::from(label_col.is_some()));
    Ok(Table { columns, rows, labels: label_col.map(|_| labels), dim })
}

/// Writer on a file, or stdout when `path` is `None`.
pub struct Output {
    path: Option<PathBuf>,
    inner: Box<dyn Write>,
}

impl Output {
    pub fn create(path: Option<&Path>) -> CliResult<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { path: path.map(Path::to_path_buf), inner })
    }

    fn err(&self, e: io::Error) -> CliError {
        CliError::io(self.path.clone().unwrap_or_else(|| PathBuf::from("<stdout>")), e)
    }

    pub fn line(&mut self, fields: &[String]) -> CliResult<()> {
        self.raw(&fields.join(","))
    }

    pub fn tabbed(&mut self, fields: &[String]) -> CliResult<()> {
        self.raw(&fields.join("\t"))
    }

    pub fn raw(&mut self, text: &str) -> CliResult<()> {
        writeln!(self.inner, "{text}").map_err(|e| self.err(e))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.inner.flush().map_err(|e| self.err(e))
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn direction_columns(d: usize) -> impl Iterator<Item = String> {
    (1..=d).map(|k| format!("u{k}"))
}

pub fn coordinate_columns(d: usize) -> impl Iterator<Item = String> {
    (1..=d).map(|k| format!("x{k}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> CliResult<Table> {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        read_table(f.path())
    }

    #[test]
    fn header_detection() {
        let t = table("x1,x2\n1,2\n3,4\n").unwrap();
        assert_eq!(t.columns.as_deref(), Some(&["x1".to_string(), "x2".to_string()][..]));
        assert_eq!(t.rows, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let t = table("1,2\n3,4\n").unwrap();
        assert!(t.columns.is_none());
        assert_eq!(t.rows.len(), 2);
    }

    #[test]
    fn label_column() {
        let t = table("a,label,b\n1,0,2\n3,1,4\n").unwrap();
        assert_eq!(t.dim, 2);
        assert_eq!(t.rows, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(t.labels, Some(vec![false, true]));
        assert!(matches!(table("a,label\n1,2\n"), Err(CliError::Parse { line: 2, .. })));
    }

    #[test]
    fn errors_name_the_line() {
        match table("1,2\n3,abc\n") {
            Err(CliError::Parse { line, msg, .. }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("abc"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(table("1,2\n3\n"), Err(CliError::Parse { line: 2, .. })));
    }

    #[test]
    fn empty_input() {
        let t = table("").unwrap();
        assert!(t.rows.is_empty());
        assert!(t.matrix().unwrap().is_none());
    }

    #[test]
    fn floats_round_trip() {
        let v = [0.1 + 0.2, 1e-300, -2.5e17, std::f64::consts::PI];
        let text = v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",");
        let t = table(&format!("{text}\n")).unwrap();
        assert_eq!(t.rows[0], v);
    }
}
