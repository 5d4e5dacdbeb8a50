//! Real symmetric matrices and their plain-text / JSON file formats.
//!
//! Text format: the first line holds the dimension `d`, followed by `d` rows of
//! `d` whitespace-separated decimals. JSON format: `{"dim": d, "rows": [[..], ..]}`.
//! Both writers emit enough digits that reading back is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Mat};

/// Relative tolerance used by [`SymmetricMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    data: Mat,
    asymmetry: f64,
}

impl SymmetricMatrix {
    /// Accepts `a` if `max|a - aᵀ| <= 1e-12 * max|a|`, then stores `(a + aᵀ)/2`.
    pub fn new(a: Mat) -> Result<Self> {
        let s = Self::symmetrize(a)?;
        let scale = max_abs(&s.data);
        if s.asymmetry > SYMMETRY_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not symmetric (residual {:e}, scale {:e})",
                s.asymmetry, scale
            )));
        }
        Ok(s)
    }

    /// Stores `(a + aᵀ)/2` unconditionally and records the residual `max|a - aᵀ|`.
    pub fn symmetrize(a: Mat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected square",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.nrows() == 0 {
            return Err(Error::InvalidInput("matrix is empty".into()));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let at = a.transpose();
        let asymmetry = max_abs(&(&a - &at));
        let data = (a + at) * 0.5;
        Ok(Self { data, asymmetry })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput("rows have inconsistent lengths".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(Mat::from_row_slice(d, d, &flat))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        let mut m = Mat::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        Self::new(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: Mat::zeros(dim, dim),
            asymmetry: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &Mat {
        &self.data
    }

    pub fn into_matrix(self) -> Mat {
        self.data
    }

    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            data: &self.data * t,
            asymmetry: self.asymmetry * t.abs(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.dim());
        for row in self.data.row_iter() {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let d: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension: {e}")))?;
        let mut flat = Vec::with_capacity(d * d);
        for tok in tokens.by_ref().take(d * d) {
            let v: f64 = tok
                .parse()
                .map_err(|e| Error::Parse(format!("bad entry {tok:?}: {e}")))?;
            flat.push(v);
        }
        if flat.len() != d * d {
            return Err(Error::Parse(format!(
                "expected {} entries, found {}",
                d * d,
                flat.len()
            )));
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("trailing data after matrix".into()));
        }
        Self::new(Mat::from_row_slice(d, d, &flat))
    }

    pub fn to_json(&self) -> String {
        let doc = MatrixDoc {
            dim: self.dim(),
            rows: self.rows(),
        };
        serde_json::to_string(&doc).expect("matrix serializes")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let doc: MatrixDoc = serde_json::from_str(text)?;
        if doc.rows.len() != doc.dim {
            return Err(Error::Parse(format!(
                "dim is {} but {} rows given",
                doc.dim,
                doc.rows.len()
            )));
        }
        Self::from_rows(&doc.rows)
    }

    /// Reads either format; JSON is recognised by a leading `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixDoc {
    dim: usize,
    rows: Vec<Vec<f64>>,
}
