//! Delay cosine and delay sine.
//!
//! Both functions are piecewise polynomials in `t`. On the segment
//! `[(k-1)τ, kτ)` (segment index `k ≥ 0`) they read
//!
//! ```text
//! cos_τ(ω, t) = Σ_{j=0..k} (-1)^j ω^{2j}   (t-(j-1)τ)^{2j}   / (2j)!
//! sin_τ(ω, t) = Σ_{j=0..k} (-1)^j ω^{2j+1} (t-(j-1)τ)^{2j+1} / (2j+1)!
//! ```
//!
//! and both vanish for `t < -τ`. On `[-τ, 0)` this gives `cos_τ = 1` and
//! `sin_τ = ω(t+τ)`, the canonical histories of `ẍ(t) + ω² x(t-τ) = 0`.
//!
//! Terms are formed as running products `Π (ω u / i)` rather than powers
//! over factorials, and accumulated with compensated summation. Individual
//! terms grow like `(ωτ)^{2k}/(2k)!` before they cancel; a term above
//! [`OVERFLOW_GUARD`] aborts the evaluation with [`DelayTrigError::Overflow`].

use thiserror::Error;

use crate::compensated::CompensatedSum;

/// Largest admissible magnitude of a single series term.
pub const OVERFLOW_GUARD: f64 = 1e290;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelayTrigError {
    #[error("delay must be positive and finite, got {0}")]
    InvalidDelay(f64),
    #[error("frequency must be finite and non-negative, got {0}")]
    InvalidFrequency(f64),
    #[error("non-finite time argument {0}")]
    NonFiniteTime(f64),
    #[error("series term overflow on segment {segment} (|term| > 1e290)")]
    Overflow { segment: i64 },
    #[error("derivative of order {order} is discontinuous at the node t = {node}")]
    DiscontinuousDerivative { node: f64, order: u8 },
    #[error("derivative order {0} not supported (expected 0, 1 or 2)")]
    UnsupportedOrder(u8),
}

/// The `(ω, τ)` pair of a delay trig function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayKernelParams {
    omega: f64,
    tau: f64,
}

impl DelayKernelParams {
    pub fn new(omega: f64, tau: f64) -> Result<Self, DelayTrigError> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(DelayTrigError::InvalidDelay(tau));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(DelayTrigError::InvalidFrequency(omega));
        }
        Ok(Self { omega, tau })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Index `k` of the segment `[(k-1)τ, kτ)` containing `t`; `-1` before the
/// history interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegmentIndex(i64);

impl SegmentIndex {
    pub fn get(self) -> i64 {
        self.0
    }

    /// Left end of the segment (`-∞` for index `-1`).
    pub fn start(self, tau: f64) -> f64 {
        if self.0 < 0 {
            f64::NEG_INFINITY
        } else {
            (self.0 - 1) as f64 * tau
        }
    }
}

impl From<i64> for SegmentIndex {
    fn from(k: i64) -> Self {
        Self(k.max(-1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DelayTrigFn {
    Cos,
    Sin,
}

/// Segment of `t`. A node `t = kτ` belongs to the segment starting there.
pub fn segment_index(t: f64, tau: f64) -> Result<SegmentIndex, DelayTrigError> {
    if !t.is_finite() {
        return Err(DelayTrigError::NonFiniteTime(t));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(DelayTrigError::InvalidDelay(tau));
    }
    if t < -tau {
        return Ok(SegmentIndex(-1));
    }
    Ok(SegmentIndex((t / tau).floor() as i64 + 1))
}

pub fn delay_cos(p: DelayKernelParams, t: f64) -> Result<f64, DelayTrigError> {
    let k = segment_index(t, p.tau)?;
    eval_segment(p, DelayTrigFn::Cos, k, t, 0)
}

pub fn delay_sin(p: DelayKernelParams, t: f64) -> Result<f64, DelayTrigError> {
    let k = segment_index(t, p.tau)?;
    eval_segment(p, DelayTrigFn::Sin, k, t, 0)
}

/// Evaluate `which` or its derivative of the given order (0, 1 or 2).
///
/// Derivatives are taken term-wise on the segment containing `t`. Exactly at
/// a node where the requested derivative jumps (`cos_τ''` at `t = 0`,
/// `sin_τ'` at `t = -τ`) there is no single value and an error is returned.
pub fn delay_trig_derivative(
    p: DelayKernelParams,
    t: f64,
    which: DelayTrigFn,
    order: u8,
) -> Result<f64, DelayTrigError> {
    if order > 2 {
        return Err(DelayTrigError::UnsupportedOrder(order));
    }
    let k = segment_index(t, p.tau)?;
    if p.omega != 0.0 {
        let jump = match which {
            DelayTrigFn::Cos => order == 2 && t == 0.0,
            DelayTrigFn::Sin => order == 1 && t == -p.tau,
        };
        if jump {
            return Err(DelayTrigError::DiscontinuousDerivative { node: t, order });
        }
    }
    eval_segment(p, which, k, t, order)
}

/// Evaluate the polynomial that represents `which` on segment `k`, at any
/// `t` (not only inside the segment). Used for one-sided limits at nodes and
/// by quadratures that already know which segment they are on.
pub fn eval_segment(
    p: DelayKernelParams,
    which: DelayTrigFn,
    k: SegmentIndex,
    t: f64,
    order: u8,
) -> Result<f64, DelayTrigError> {
    if !t.is_finite() {
        return Err(DelayTrigError::NonFiniteTime(t));
    }
    if order > 2 {
        return Err(DelayTrigError::UnsupportedOrder(order));
    }
    if k.0 < 0 {
        return Ok(0.0);
    }
    let (omega, tau) = (p.omega, p.tau);
    let r = order as u32;
    let base = match which {
        DelayTrigFn::Cos => 0,
        DelayTrigFn::Sin => 1,
    };
    let omega_r = omega.powi(order as i32);
    let mut sum = CompensatedSum::new();
    for j in 0..=k.0 {
        let power = 2 * j as u32 + base;
        if power < r {
            continue;
        }
        let q = power - r;
        let z = omega * (t - (j - 1) as f64 * tau);
        let mut term = omega_r;
        for i in 1..=q {
            term *= z / i as f64;
        }
        if !term.is_finite() || term.abs() > OVERFLOW_GUARD {
            return Err(DelayTrigError::Overflow { segment: k.0 });
        }
        if j % 2 == 1 {
            term = -term;
        }
        sum += term;
    }
    Ok(sum.value())
}

/// Rows `(t, cos_τ, sin_τ)` on a uniform grid, for plotting.
pub fn table(
    p: DelayKernelParams,
    t_start: f64,
    t_end: f64,
    samples: usize,
) -> Result<Vec<(f64, f64, f64)>, DelayTrigError> {
    let samples = samples.max(2);
    let h = (t_end - t_start) / (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            let t = t_start + h * i as f64;
            Ok((t, delay_cos(p, t)?, delay_sin(p, t)?))
        })
        .collect()
}

/// Write the plotting table as CSV with header `t,cos_tau,sin_tau`.
pub fn write_table_csv<W: std::io::Write>(
    rows: &[(f64, f64, f64)],
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "cos_tau", "sin_tau"])?;
    for (t, c, s) in rows {
        w.serialize((t, c, s))?;
    }
    w.flush()?;
    Ok(())
}
