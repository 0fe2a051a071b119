//! Matrix and signal files.
//!
//! CSV files start with a `# rows,cols,kind` line followed by one matrix row
//! per line. Entries are written in Rust's shortest round-trip decimal form,
//! so reading a file back reproduces every `f64` bit for bit (negative zero
//! is written as `0`). Signals are single-column matrices. JSON files carry
//! the same data plus a name and free-form provenance.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, StpError};
use crate::matrix::{DenseMatrix, Signal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Boolean,
    Sign,
    #[default]
    Real,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Boolean => "boolean",
            MatrixKind::Sign => "sign",
            MatrixKind::Real => "real",
        }
    }

    pub fn validate(self, m: &DenseMatrix) -> Result<()> {
        let ok = |v: f64| match self {
            MatrixKind::Boolean => v == 0.0 || v == 1.0,
            MatrixKind::Sign => v == 1.0 || v == -1.0,
            MatrixKind::Real => true,
        };
        match m.as_slice().iter().position(|&v| !ok(v)) {
            Some(index) => Err(StpError::BadEntry {
                kind: self.as_str(),
                index,
                value: m.as_slice()[index],
            }),
            None => Ok(()),
        }
    }

    /// The most specific kind whose constraint `m` satisfies.
    pub fn infer(m: &DenseMatrix) -> Self {
        [MatrixKind::Boolean, MatrixKind::Sign]
            .into_iter()
            .find(|k| k.validate(m).is_ok())
            .unwrap_or(MatrixKind::Real)
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatrixKind {
    type Err = StpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "boolean" => Ok(MatrixKind::Boolean),
            "sign" => Ok(MatrixKind::Sign),
            "real" => Ok(MatrixKind::Real),
            other => Err(StpError::Parse(format!("unknown matrix kind '{other}'"))),
        }
    }
}

fn render(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        v.to_string()
    }
}

pub fn to_csv(m: &DenseMatrix, kind: MatrixKind) -> Result<String> {
    kind.validate(m)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|&v| render(v)))
            .map_err(|e| StpError::Io(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| StpError::Io(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| StpError::Io(e.to_string()))?;
    Ok(format!("# {},{},{}\n{}", m.rows(), m.cols(), kind, body))
}

fn parse_header(line: &str) -> Result<(usize, usize, MatrixKind)> {
    let rest = line
        .strip_prefix('#')
        .ok_or_else(|| StpError::Parse("missing '# rows,cols,kind' header".into()))?;
    let fields: Vec<&str> = rest.split(',').map(str::trim).collect();
    let [rows, cols, kind] = fields[..] else {
        return Err(StpError::Parse(format!("header needs three fields, got '{line}'")));
    };
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| StpError::Parse(format!("bad dimension '{s}' in header")))
    };
    Ok((dim(rows)?, dim(cols)?, kind.parse()?))
}

pub fn from_csv(text: &str) -> Result<(DenseMatrix, MatrixKind)> {
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    let (rows, cols, kind) = parse_header(header.trim_end_matches('\r'))?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| StpError::Parse(e.to_string()))?;
        if rec.len() != cols {
            return Err(StpError::Parse(format!(
                "row {line} has {} entries, header says {cols}",
                rec.len()
            )));
        }
        for field in rec.iter() {
            data.push(
                field
                    .parse::<f64>()
                    .map_err(|_| StpError::Parse(format!("bad number '{field}' in row {line}")))?,
            );
        }
        seen += 1;
    }
    if seen != rows {
        return Err(StpError::Parse(format!("found {seen} rows, header says {rows}")));
    }
    let m = DenseMatrix::new(rows, cols, data)?;
    kind.validate(&m)?;
    Ok((m, kind))
}

/// JSON matrix file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub kind: MatrixKind,
    #[serde(default)]
    pub provenance: serde_json::Value,
    pub data: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn new(name: &str, m: &DenseMatrix, kind: MatrixKind, provenance: serde_json::Value) -> Result<Self> {
        kind.validate(m)?;
        Ok(Self {
            name: name.to_string(),
            rows: m.rows(),
            cols: m.cols(),
            kind,
            provenance,
            data: m.to_rows(),
        })
    }

    pub fn matrix(&self) -> Result<DenseMatrix> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(StpError::Parse(format!(
                "data does not match the declared {}x{} shape",
                self.rows, self.cols
            )));
        }
        let m = DenseMatrix::new(self.rows, self.cols, self.data.concat())?;
        self.kind.validate(&m)?;
        Ok(m)
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a CSV or (by `.json` extension) JSON matrix file.
pub fn load_matrix(path: &Path) -> Result<(DenseMatrix, MatrixKind)> {
    let text = fs::read_to_string(path).map_err(|e| StpError::Io(format!("{}: {e}", path.display())))?;
    if is_json(path) {
        let file: MatrixFile = serde_json::from_str(&text).map_err(|e| StpError::Parse(e.to_string()))?;
        Ok((file.matrix()?, file.kind))
    } else {
        from_csv(&text)
    }
}

/// Writes `m` as CSV, or as a [`MatrixFile`] when the path ends in `.json`.
pub fn save_matrix(
    path: &Path,
    m: &DenseMatrix,
    kind: MatrixKind,
    name: &str,
    provenance: serde_json::Value,
) -> Result<()> {
    let text = if is_json(path) {
        let file = MatrixFile::new(name, m, kind, provenance)?;
        serde_json::to_string_pretty(&file).map_err(|e| StpError::Io(e.to_string()))? + "\n"
    } else {
        to_csv(m, kind)?
    };
    fs::write(path, text).map_err(|e| StpError::Io(format!("{}: {e}", path.display())))
}

pub fn load_signal(path: &Path) -> Result<Signal> {
    let (m, _) = load_matrix(path)?;
    if m.cols() != 1 {
        return Err(StpError::BadShape(format!(
            "a signal file has one column, found {}",
            m.cols()
        )));
    }
    Signal::new(m.into_vec())
}

pub fn signal_csv(x: &Signal) -> Result<String> {
    to_csv(&x.as_column(), MatrixKind::Real)
}
