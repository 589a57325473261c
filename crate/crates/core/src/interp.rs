//! Chebyshev-Lobatto interpolation, one polynomial per panel.

use crate::funcs::{FuncError, ScalarFn};

/// Chebyshev-Lobatto nodes of the given degree on `[a, b]`, ascending.
pub fn lobatto_nodes(a: f64, b: f64, degree: usize) -> Vec<f64> {
    let n = degree.max(1);
    (0..=n)
        .map(|j| {
            if j == 0 {
                a
            } else if j == n {
                b
            } else {
                let c = -(std::f64::consts::PI * j as f64 / n as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * c
            }
        })
        .collect()
}

/// Interpolant of samples at [`lobatto_nodes`] on one panel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebPanel {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl ChebPanel {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Self {
        let nodes = lobatto_nodes(a, b, values.len().saturating_sub(1));
        Self {
            a,
            b,
            nodes,
            values,
        }
    }

    /// Barycentric formula with weights `(-1)^j`, halved at the ends.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.values.len() - 1;
        if n == 0 {
            return self.values[0];
        }
        let (mut num, mut den) = (0.0, 0.0);
        for (j, (&x, &v)) in self.nodes.iter().zip(&self.values).enumerate() {
            let diff = t - x;
            if diff == 0.0 {
                return v;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            let r = w / diff;
            num += r * v;
            den += r;
        }
        num / den
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Piecewise interpolant over consecutive panels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewiseCheb {
    pub panels: Vec<ChebPanel>,
}

impl PiecewiseCheb {
    pub fn eval(&self, t: f64) -> f64 {
        if self.panels.is_empty() {
            return 0.0;
        }
        let i = self
            .panels
            .iter()
            .position(|p| t < p.b)
            .unwrap_or(self.panels.len() - 1);
        self.panels[i].eval(t)
    }

    /// Interior panel ends.
    pub fn breaks(&self) -> Vec<f64> {
        self.panels.iter().skip(1).map(|p| p.a).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.panels.iter().fold(0.0, |m, p| m.max(p.max_abs()))
    }

    /// Largest sample magnitude among panels overlapping `[lo, hi]`.
    pub fn max_abs_on(&self, lo: f64, hi: f64) -> f64 {
        let mut m = 0.0_f64;
        for p in &self.panels {
            for (&x, &v) in p.nodes.iter().zip(&p.values) {
                if x >= lo && x <= hi {
                    m = m.max(v.abs());
                }
            }
        }
        m
    }

    /// All `(t, value)` samples in order; shared panel ends appear once.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (k, p) in self.panels.iter().enumerate() {
            let skip = usize::from(k > 0);
            out.extend(p.nodes.iter().copied().zip(p.values.iter().copied()).skip(skip));
        }
        out
    }
}

impl ScalarFn for PiecewiseCheb {
    fn eval(&self, order: u8, t: f64) -> Result<f64, FuncError> {
        if order != 0 {
            return Err(FuncError::Order(order));
        }
        Ok(PiecewiseCheb::eval(self, t))
    }
}
