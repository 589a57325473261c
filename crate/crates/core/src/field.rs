//! Solution samples on a rectangular `(t, x)` grid.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::QuadratureSpec;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid {0} must be non-empty and strictly increasing")]
    BadGrid(&'static str),
    #[error("expected {expected} values for a {nt}x{nx} grid, got {found}")]
    Shape {
        nt: usize,
        nx: usize,
        expected: usize,
        found: usize,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv: {0}")]
    Format(String),
}

/// Provenance of a field, carried into the run report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default)]
    pub warnings: Vec<String>,
    /// Per time row, estimated magnitude of the omitted series tail.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tail_estimate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub t_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// Row-major in `t`: `values[i * nx + j]` is the sample at `(t_i, x_j)`.
    pub values: Vec<f64>,
    pub truncation_n: Option<usize>,
    pub meta: FieldMeta,
}

fn increasing(v: &[f64]) -> bool {
    !v.is_empty() && v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // avoid "-0"
        return "0".to_string();
    }
    format!("{v}")
}

/// `k τ/per_tau` from `-τ` up to the last sample not beyond `horizon`,
/// exact at every multiple of `τ`.
pub fn delay_time_grid(tau: f64, per_tau: usize, horizon: f64) -> Vec<f64> {
    let h = tau / per_tau as f64;
    let last = ((horizon / h) + 1e-9).floor() as i64;
    let per = per_tau as i64;
    (-per..=last)
        .map(|k| k.div_euclid(per) as f64 * tau + k.rem_euclid(per) as f64 * h)
        .collect()
}

/// `x_i = i l/(nx+1)` for `i = 0..=nx+1`, ending exactly at `l`.
pub fn interior_x_grid(l: f64, nx: usize) -> Vec<f64> {
    let h = l / (nx + 1) as f64;
    (0..=nx + 1)
        .map(|i| if i == nx + 1 { l } else { i as f64 * h })
        .collect()
}

impl SolutionField {
    pub fn new(t_grid: Vec<f64>, x_grid: Vec<f64>, values: Vec<f64>) -> Result<Self, FieldError> {
        if !increasing(&t_grid) {
            return Err(FieldError::BadGrid("t"));
        }
        if !increasing(&x_grid) {
            return Err(FieldError::BadGrid("x"));
        }
        let expected = t_grid.len() * x_grid.len();
        if values.len() != expected {
            return Err(FieldError::Shape {
                nt: t_grid.len(),
                nx: x_grid.len(),
                expected,
                found: values.len(),
            });
        }
        Ok(Self {
            t_grid,
            x_grid,
            values,
            truncation_n: None,
            meta: FieldMeta::default(),
        })
    }

    pub fn nt(&self) -> usize {
        self.t_grid.len()
    }

    pub fn nx(&self) -> usize {
        self.x_grid.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nx() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let nx = self.nx();
        &self.values[i * nx..(i + 1) * nx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index of the grid time within `tol` of `t`.
    pub fn t_index(&self, t: f64, tol: f64) -> Option<usize> {
        let i = self.t_grid.partition_point(|&s| s < t - tol);
        (i < self.nt() && (self.t_grid[i] - t).abs() <= tol).then_some(i)
    }

    /// Keep only the rows whose times satisfy `keep`.
    pub fn select_rows(&self, mut keep: impl FnMut(f64) -> bool) -> Self {
        let mut t_grid = Vec::new();
        let mut values = Vec::new();
        for (i, &t) in self.t_grid.iter().enumerate() {
            if keep(t) {
                t_grid.push(t);
                values.extend_from_slice(self.row(i));
            }
        }
        let mut meta = self.meta.clone();
        if meta.tail_estimate.len() == self.nt() {
            meta.tail_estimate = self
                .t_grid
                .iter()
                .zip(&self.meta.tail_estimate)
                .filter(|(t, _)| t_grid.contains(t))
                .map(|(_, e)| *e)
                .collect();
        }
        Self {
            t_grid,
            x_grid: self.x_grid.clone(),
            values,
            truncation_n: self.truncation_n,
            meta,
        }
    }

    /// CSV with header `t,x,eta`, one row per grid point, `t` outermost.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FieldError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["t", "x", "eta"])?;
        for (i, &t) in self.t_grid.iter().enumerate() {
            let ts = fmt_f64(t);
            for (j, &x) in self.x_grid.iter().enumerate() {
                w.write_record([ts.as_str(), &fmt_f64(x), &fmt_f64(self.get(i, j))])?;
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv). Rows must form a full
    /// grid in `t`-major order.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, FieldError> {
        let mut r = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(FieldError::Format(format!(
                    "expected 3 columns, got {}",
                    rec.len()
                )));
            }
            let mut v = [0.0; 3];
            for (k, cell) in rec.iter().enumerate() {
                v[k] = cell
                    .trim()
                    .parse()
                    .map_err(|_| FieldError::Format(format!("bad number '{cell}'")))?;
            }
            rows.push(v);
        }
        let mut x_grid = Vec::new();
        for row in &rows {
            if !x_grid.is_empty() && row[1] <= *x_grid.last().unwrap() {
                break;
            }
            x_grid.push(row[1]);
        }
        let nx = x_grid.len();
        if nx == 0 || rows.len() % nx != 0 {
            return Err(FieldError::Format("rows do not form a rectangular grid".into()));
        }
        let mut t_grid = Vec::with_capacity(rows.len() / nx);
        for (k, row) in rows.iter().enumerate() {
            let j = k % nx;
            if row[1] != x_grid[j] {
                return Err(FieldError::Format(format!("row {}: x grid mismatch", k + 2)));
            }
            if j == 0 {
                t_grid.push(row[0]);
            } else if row[0] != *t_grid.last().unwrap() {
                return Err(FieldError::Format(format!("row {}: t changes mid-row", k + 2)));
            }
        }
        let values = rows.iter().map(|r| r[2]).collect();
        Self::new(t_grid, x_grid, values)
    }
}
