//! Matrix file format and report serialization.
//!
//! Matrices (unitaries, density operators, MASA diagonalizers, bistochastic
//! matrices) share one JSON document shape:
//!
//! ```json
//! { "n": 2, "entries": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]] }
//! ```
//!
//! `entries` is row-major and holds `[re, im]` pairs; its length must be `n^2`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::matrix::ComplexMatrix;
use crate::relent::VariationalReport;
use crate::stochastic::BistochasticMatrix;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_complex(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self { n, entries }
    }

    pub fn from_bistochastic(b: &BistochasticMatrix) -> Self {
        let n = b.dim();
        let entries = (0..n * n).map(|k| [b.get(k / n, k % n), 0.0]).collect();
        Self { n, entries }
    }

    pub fn to_complex(&self) -> Result<ComplexMatrix> {
        if self.n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        if self.entries.len() != self.n * self.n {
            return Err(Error::Parse(format!(
                "expected {} entries for n = {}, found {}",
                self.n * self.n,
                self.n,
                self.entries.len()
            )));
        }
        let data: Vec<C64> = self.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::from_row_slice(self.n, &data).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Real parts, rejecting nonzero imaginary components.
    pub fn to_bistochastic(&self) -> Result<BistochasticMatrix> {
        let m = self.to_complex()?;
        if m.iter().any(|z| z.im != 0.0) {
            return Err(Error::Parse("bistochastic entries must be real".into()));
        }
        BistochasticMatrix::new(DMatrix::from_fn(self.n, self.n, |i, j| m[(i, j)].re))
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_complex()
}

pub fn matrix_to_string(m: &ComplexMatrix) -> String {
    let mut s = serde_json::to_string_pretty(&MatrixFile::from_complex(m)).expect("serializable");
    s.push('\n');
    s
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

/// Formats with 9 significant digits; scientific notation outside
/// `[1e-4, 1e9)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs();
    if !(1e-4..1e9).contains(&mag) {
        return format!("{x:.8e}");
    }
    let exp = mag.log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `key = value` lines for a variational report.
pub fn report_to_string(r: &VariationalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "value = {}", fmt_num(r.best_value));
    let _ = writeln!(s, "closed_form = {}", fmt_num(r.closed_form));
    let _ = writeln!(s, "gap = {}", fmt_num(r.gap));
    let _ = writeln!(s, "iterations = {}", r.iterations);
    let _ = writeln!(s, "seed = {}", r.seed);
    s
}

/// Parses `key = value` lines back into pairs, skipping blank lines.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("not a key = value line: {l}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}
