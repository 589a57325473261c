//! Norm of the extrapolated space, energy monitor, and the modal
//! amplification probe.

use serde::Serialize;
use thiserror::Error;

use crate::delay_trig::{delay_cos, DelayKernelParams, DelayTrigError};
use crate::field::SolutionField;
use crate::funcs::{FuncError, SharedField, SharedScalar};
use crate::problem::{ProblemError, ProblemSpec, TransformedProblem};

pub const MIN_NORM_MODES: usize = 16;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("X-norm needs at least {MIN_NORM_MODES} modes, got {0}")]
    TooFewModes(usize),
    #[error("missing history states: {0}")]
    MissingHistory(String),
    #[error("t_star must lie in (0, 2τ], got {0}")]
    BadTime(f64),
    #[error(transparent)]
    Data(#[from] FuncError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Trig(#[from] DelayTrigError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XNorm {
    pub l: f64,
    pub modes: usize,
    pub lambda: Vec<f64>,
}

impl XNorm {
    pub fn new(l: f64, modes: usize) -> Result<Self, StabilityError> {
        if modes < MIN_NORM_MODES {
            return Err(StabilityError::TooFewModes(modes));
        }
        let lambda = (1..=modes)
            .map(|n| std::f64::consts::PI * n as f64 / l)
            .collect();
        Ok(Self { l, modes, lambda })
    }

    /// `(1+λ²)/λ²`, the sum of `(1+λ²)^{-k}` over `k ≥ 0`.
    pub fn weight(&self, n: usize) -> f64 {
        let lam2 = self.lambda[n - 1].powi(2);
        (1.0 + lam2) / lam2
    }

    pub fn norm_sq(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .take(self.modes)
            .enumerate()
            .map(|(k, u)| u * u * self.weight(k + 1))
            .sum()
    }

    pub fn norm(&self, coeffs: &[f64]) -> f64 {
        self.norm_sq(coeffs).sqrt()
    }

    /// Sine coefficients of samples on `xs` (covering `[0, l]`), trapezoid rule.
    pub fn coefficients(&self, xs: &[f64], values: &[f64]) -> Vec<f64> {
        (1..=self.modes)
            .map(|n| {
                let lam = self.lambda[n - 1];
                let mut s = 0.0;
                for i in 1..xs.len() {
                    let h = xs[i] - xs[i - 1];
                    let f0 = values[i - 1] * (lam * xs[i - 1]).sin();
                    let f1 = values[i] * (lam * xs[i]).sin();
                    s += 0.5 * h * (f0 + f1);
                }
                2.0 / self.l * s
            })
            .collect()
    }
}

/// Bound for the operator norm of `a²∂ₓ² + b∂ₓ + d`.
pub fn operator_norm_surrogate(a: f64, b: f64, d: f64) -> f64 {
    a * a + b.abs() + d.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTrace {
    pub t: Vec<f64>,
    pub energy: Vec<f64>,
    pub bound: Vec<f64>,
    pub c_a: f64,
    pub pass: bool,
    /// Smallest `bound - energy` after `t = 0`, where the two coincide.
    pub margin: f64,
}

impl EnergyTrace {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["t", "energy", "bound"])?;
        for i in 0..self.t.len() {
            w.write_record([
                crate::field::fmt_f64(self.t[i]),
                crate::field::fmt_f64(self.energy[i]),
                crate::field::fmt_f64(self.bound[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Energy `E(t) = ‖w‖²_X + ‖w_t‖²_X + ∫_{t-τ}^{t} ‖w‖²_X` of the
/// boundary-homogenized part of `field` and the Gronwall bound
/// `e^{(2+C_A)t}(E(0) + ∫₀ᵗ ‖f‖²_X)`.
///
/// `field` must be sampled on a uniform time grid starting at `-τ` with
/// `τ/dt` integral; `w_t` uses centered differences (one-sided at the ends).
pub fn energy_trace(
    spec: &ProblemSpec,
    field: &SolutionField,
    norm: &XNorm,
) -> Result<EnergyTrace, StabilityError> {
    let ts = &field.t_grid;
    let tau = spec.tau;
    if ts.len() < 3 || (ts[0] + tau).abs() > 1e-9 * tau.max(1.0) {
        return Err(StabilityError::MissingHistory(format!(
            "field starts at t = {} instead of -τ = {}",
            ts.first().copied().unwrap_or(f64::NAN),
            -tau
        )));
    }
    let dt = ts[1] - ts[0];
    if ts.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(StabilityError::MissingHistory("time grid is not uniform".into()));
    }
    let per_tau = (tau / dt).round() as usize;
    if per_tau == 0 || ((tau / dt) - per_tau as f64).abs() > 1e-6 {
        return Err(StabilityError::MissingHistory(format!(
            "time step {dt} does not divide τ"
        )));
    }
    let xs = &field.x_grid;
    let l = spec.l;
    let lift = |th1: &SharedScalar, th2: &SharedScalar, order: u8, t: f64, x: f64| {
        Ok::<f64, FuncError>(
            th1.eval(order, t)? * (1.0 - x / l) + th2.eval(order, t)? * x / l,
        )
    };
    let (th1, th2) = (&spec.theta1, &spec.theta2);
    let nt = ts.len();
    let mut w_coeffs = Vec::with_capacity(nt);
    for (i, &t) in ts.iter().enumerate() {
        let row: Vec<f64> = xs
            .iter()
            .zip(field.row(i))
            .map(|(&x, &v)| Ok(v - lift(th1, th2, 0, t, x)?))
            .collect::<Result<_, FuncError>>()?;
        w_coeffs.push(norm.coefficients(xs, &row));
    }
    let w_sq: Vec<f64> = w_coeffs.iter().map(|c| norm.norm_sq(c)).collect();
    let wt_sq: Vec<f64> = (0..nt)
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(nt - 1));
            let span = ts[hi] - ts[lo];
            let d: Vec<f64> = w_coeffs[hi]
                .iter()
                .zip(&w_coeffs[lo])
                .map(|(a, b)| (a - b) / span)
                .collect();
            norm.norm_sq(&d)
        })
        .collect();
    let forcing_sq = |t: f64| -> Result<f64, FuncError> {
        let row: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let slope = (th2.eval(0, t - tau)? - th1.eval(0, t - tau)?) / l;
                Ok(spec.g.eval(0, t, x)?
                    + spec.b * slope
                    + spec.d * lift(th1, th2, 0, t - tau, x)?
                    - lift(th1, th2, 2, t, x)?)
            })
            .collect::<Result<_, FuncError>>()?;
        Ok(norm.norm_sq(&norm.coefficients(xs, &row)))
    };
    let c_a = operator_norm_surrogate(spec.a, spec.b, spec.d);
    let mut out = EnergyTrace {
        t: Vec::new(),
        energy: Vec::new(),
        bound: Vec::new(),
        c_a,
        pass: true,
        margin: f64::INFINITY,
    };
    let mut f_int = 0.0;
    let mut f_prev = 0.0;
    let mut e0 = 0.0;
    for i in per_tau..nt {
        let t = ts[i];
        let hist: f64 = (i - per_tau..i)
            .map(|k| 0.5 * (ts[k + 1] - ts[k]) * (w_sq[k] + w_sq[k + 1]))
            .sum();
        let e = w_sq[i] + wt_sq[i] + hist;
        let f_now = forcing_sq(t)?;
        if i == per_tau {
            e0 = e;
        } else {
            f_int += 0.5 * dt * (f_prev + f_now);
        }
        f_prev = f_now;
        let bound = ((2.0 + c_a) * t).exp() * (e0 + f_int);
        out.pass &= e <= bound;
        if i > per_tau {
            out.margin = out.margin.min(bound - e);
        }
        out.t.push(t);
        out.energy.push(e);
        out.bound.push(bound);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: usize,
    pub omega: f64,
    pub lambda: f64,
    pub amplification: f64,
    pub classical: f64,
    pub x_weighted: f64,
    pub damped: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTable {
    pub t_star: f64,
    pub rows: Vec<ProbeRow>,
    /// First `n` from which the amplification is non-decreasing.
    pub monotone_from: Option<usize>,
    /// Table ended early on overflow.
    pub truncated: bool,
    /// `Σ classical / Σ x_weighted` for the reference datum `u_n = 1/n`.
    pub contrast_ratio: f64,
}

impl ProbeTable {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        use crate::field::fmt_f64;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record([
            "n",
            "omega",
            "lambda",
            "amplification",
            "classical",
            "x_weighted",
            "damped",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                fmt_f64(r.omega),
                fmt_f64(r.lambda),
                fmt_f64(r.amplification),
                fmt_f64(r.classical),
                fmt_f64(r.x_weighted),
                fmt_f64(r.damped),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Response `|cos_τ(ω_n, t*)|` of each mode to unit history data.
pub fn illposedness_probe(
    tp: &TransformedProblem,
    t_star: f64,
    n_max: usize,
) -> Result<ProbeTable, StabilityError> {
    if !(t_star > 0.0 && t_star <= 2.0 * tp.tau) {
        return Err(StabilityError::BadTime(t_star));
    }
    let m = crate::problem::intervals(t_star, tp.tau) as i32;
    let mut rows = Vec::new();
    let mut truncated = false;
    for n in 1..=n_max {
        let omega = tp.mode_frequency(n)?;
        let amp = match delay_cos(DelayKernelParams::new(omega, tp.tau)?, t_star) {
            Ok(v) => v.abs(),
            Err(DelayTrigError::Overflow { .. }) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let lambda = std::f64::consts::PI * n as f64 / tp.l;
        let u2 = 1.0 / (n * n) as f64;
        let x_weighted = (1.0 + lambda * lambda) / (lambda * lambda) * amp * amp * u2;
        rows.push(ProbeRow {
            n,
            omega,
            lambda,
            amplification: amp,
            classical: lambda * lambda * amp * amp * u2,
            x_weighted,
            damped: x_weighted * lambda.powi(-2 * m - 4),
        });
    }
    let mut monotone_from = rows.last().map(|r| r.n);
    for k in (1..rows.len()).rev() {
        if rows[k].amplification >= rows[k - 1].amplification {
            monotone_from = Some(rows[k - 1].n);
        } else {
            break;
        }
    }
    let classical: f64 = rows.iter().map(|r| r.classical).sum();
    let xw: f64 = rows.iter().map(|r| r.x_weighted).sum();
    Ok(ProbeTable {
        t_star,
        rows,
        monotone_from,
        truncated,
        contrast_ratio: if xw > 0.0 { classical / xw } else { 0.0 },
    })
}

/// Convenience for fields built from closures in tests and examples.
pub fn field_samples(
    f: &SharedField,
    t_grid: &[f64],
    x_grid: &[f64],
) -> Result<SolutionField, StabilityError> {
    let mut values = Vec::with_capacity(t_grid.len() * x_grid.len());
    for &t in t_grid {
        for &x in x_grid {
            values.push(f.eval(0, t, x)?);
        }
    }
    SolutionField::new(t_grid.to_vec(), x_grid.to_vec(), values)
        .map_err(|e| StabilityError::MissingHistory(e.to_string()))
}
