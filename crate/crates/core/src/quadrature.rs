//! Panel quadrature on piecewise-smooth integrands.
//!
//! Every integral in this crate has an integrand that is smooth only between
//! known break points (delay-trig segment nodes, interpolation joins), so
//! the integration interval is first split into pieces and panels are
//! distributed over the pieces in proportion to their length.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compensated::CompensatedSum;

pub const MIN_PANELS: usize = 4;

/// Nodes per Gauss-Legendre panel.
pub const GAUSS_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature needs at least {MIN_PANELS} panels, got {0}")]
    TooFewPanels(usize),
    #[error("invalid integration interval [{0}, {1}]")]
    BadInterval(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    CompositeSimpson,
    GaussLegendrePanels,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub panels: usize,
    /// When set, integrals are re-evaluated at half the panel count and a
    /// warning is raised if the two disagree by more than this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: QuadratureRule::GaussLegendrePanels,
            panels: 32,
            tolerance: None,
        }
    }
}

/// A sub-interval on which the integrand is smooth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
}

impl Piece {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.b <= self.a
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureOutcome {
    pub value: f64,
    pub error_estimate: Option<f64>,
    pub warning: Option<String>,
}

impl QuadratureSpec {
    pub fn new(rule: QuadratureRule, panels: usize) -> Result<Self, QuadratureError> {
        let spec = Self {
            rule,
            panels,
            tolerance: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn simpson(panels: usize) -> Result<Self, QuadratureError> {
        Self::new(QuadratureRule::CompositeSimpson, panels)
    }

    pub fn gauss(panels: usize) -> Result<Self, QuadratureError> {
        Self::new(QuadratureRule::GaussLegendrePanels, panels)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.panels < MIN_PANELS {
            return Err(QuadratureError::TooFewPanels(self.panels));
        }
        Ok(())
    }

    /// Nodes and weights of the composite rule with `panels` panels on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        match self.rule {
            QuadratureRule::CompositeSimpson => {
                // Shared endpoints are merged so each node appears once.
                let mut out = Vec::with_capacity(2 * panels + 1);
                for i in 0..=2 * panels {
                    let x = if i == 2 * panels {
                        b
                    } else {
                        a + 0.5 * h * i as f64
                    };
                    let w = if i == 0 || i == 2 * panels {
                        h / 6.0
                    } else if i % 2 == 1 {
                        4.0 * h / 6.0
                    } else {
                        2.0 * h / 6.0
                    };
                    out.push((x, w));
                }
                out
            }
            QuadratureRule::GaussLegendrePanels => {
                let (xs, ws) = gauss_legendre_8();
                let mut out = Vec::with_capacity(panels * GAUSS_POINTS);
                for p in 0..panels {
                    let lo = a + h * p as f64;
                    let c = lo + 0.5 * h;
                    for (x, w) in xs.iter().zip(ws) {
                        out.push((c + 0.5 * h * x, 0.5 * h * w));
                    }
                }
                out
            }
        }
    }

    /// Integrate over pieces, distributing `panels` by piece length.
    ///
    /// The callback receives the piece being integrated and the abscissa.
    pub fn integrate_pieces<E, F>(&self, pieces: &[Piece], mut f: F) -> Result<f64, E>
    where
        F: FnMut(&Piece, f64) -> Result<f64, E>,
    {
        self.integrate_pieces_with(self.panels, pieces, &mut f)
    }

    fn integrate_pieces_with<E, F>(
        &self,
        panels: usize,
        pieces: &[Piece],
        f: &mut F,
    ) -> Result<f64, E>
    where
        F: FnMut(&Piece, f64) -> Result<f64, E>,
    {
        let total: f64 = pieces.iter().map(Piece::len).sum();
        if total <= 0.0 {
            return Ok(0.0);
        }
        let mut acc = CompensatedSum::new();
        for piece in pieces {
            let share = (panels as f64 * piece.len() / total).round() as usize;
            for (x, w) in self.nodes(piece.a, piece.b, share.max(1)) {
                acc += w * f(piece, x)?;
            }
        }
        Ok(acc.value())
    }

    /// Like [`integrate_pieces`](Self::integrate_pieces), but also estimates
    /// the error from a half-resolution rerun when a tolerance is configured.
    pub fn integrate_pieces_checked<E, F>(
        &self,
        pieces: &[Piece],
        mut f: F,
    ) -> Result<QuadratureOutcome, E>
    where
        F: FnMut(&Piece, f64) -> Result<f64, E>,
    {
        let value = self.integrate_pieces_with(self.panels, pieces, &mut f)?;
        let Some(tol) = self.tolerance else {
            return Ok(QuadratureOutcome {
                value,
                error_estimate: None,
                warning: None,
            });
        };
        let coarse = self.integrate_pieces_with((self.panels / 2).max(1), pieces, &mut f)?;
        let est = (value - coarse).abs();
        let warning = (est > tol).then(|| {
            format!(
                "quadrature with {} panels misses tolerance {tol:e} (estimated error {est:e}); increase panels",
                self.panels
            )
        });
        Ok(QuadratureOutcome {
            value,
            error_estimate: Some(est),
            warning,
        })
    }

    /// Integrate `f` over `[a, b]` with interior break points.
    pub fn integrate<E, F>(&self, a: f64, b: f64, breaks: &[f64], mut f: F) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let pieces = split_interval(a, b, breaks);
        self.integrate_pieces(&pieces, |_, x| f(x))
    }
}

/// Split `[a, b]` at the given break points, dropping breaks outside the
/// open interval and slivers shorter than a rounding-level length.
pub fn split_interval(a: f64, b: f64, breaks: &[f64]) -> Vec<Piece> {
    if b <= a {
        return Vec::new();
    }
    let eps = 1e-13 * (b - a).max(a.abs().max(b.abs()));
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > a + eps && x < b - eps)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= eps);
    let mut out = Vec::with_capacity(pts.len() + 1);
    let mut lo = a;
    for p in pts {
        out.push(Piece { a: lo, b: p });
        lo = p;
    }
    out.push(Piece { a: lo, b });
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gauss_legendre_8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_POINTS))
}
