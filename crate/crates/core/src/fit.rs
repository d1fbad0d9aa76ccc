//! Damped-cosine fitting by variable projection: the nonlinear parameters
//! (frequency, decay time) are searched, the linear ones solved exactly.
//!
//! Model: `y(t) = c + exp(−t/T)·(a·cos 2πft + b·sin 2πft)`.

use crate::error::{Error, Result};
use crate::optimize::NelderMead;
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampedCosineFit {
    pub freq_hz: f64,
    /// Envelope decay time; infinite when the fit was run without decay.
    pub decay_s: f64,
    pub offset: f64,
    pub amplitude: f64,
    pub phase_rad: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub decay: bool,
    /// Frequency search band; defaults to (1/span, Nyquist) when `None`.
    pub freq_band_hz: Option<(f64, f64)>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { decay: true, freq_band_hz: None }
    }
}

fn linear_part(t: &[f64], y: &[f64], f: f64, decay_s: f64) -> Option<(Vector3<f64>, f64)> {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let env = (-ti / decay_s).exp();
        let (s, c) = (TAU * f * ti).sin_cos();
        let row = Vector3::new(1.0, env * c, env * s);
        ata += row * row.transpose();
        aty += row * yi;
    }
    let coef = ata.cholesky()?.solve(&aty);
    let sse = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let env = (-ti / decay_s).exp();
            let (s, c) = (TAU * f * ti).sin_cos();
            let r = yi - coef[0] - env * (coef[1] * c + coef[2] * s);
            r * r
        })
        .sum();
    Some((coef, sse))
}

pub fn fit_damped_cosine(t: &[f64], y: &[f64], opts: &FitOptions) -> Result<DampedCosineFit> {
    if t.len() != y.len() {
        return Err(Error::Fit(format!("length mismatch: {} times, {} values", t.len(), y.len())));
    }
    if t.len() < 6 {
        return Err(Error::Fit(format!("need at least 6 points, got {}", t.len())));
    }
    if t.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite data".into()));
    }
    let span = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - t.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(span > 0.0) {
        return Err(Error::Fit("time points span zero width".into()));
    }
    let mut sorted = t.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min_dt = sorted.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    let (f_lo, f_hi) = opts.freq_band_hz.unwrap_or((0.5 / span, 0.5 / min_dt));

    let sse_at = |f: f64, decay: f64| linear_part(t, y, f, decay).map_or(f64::INFINITY, |(_, s)| s);

    // coarse grid, step a quarter of the spectral resolution
    let n_grid = (((f_hi - f_lo) * span * 4.0).ceil() as usize).clamp(50, 200_000);
    let decays: Vec<f64> = if opts.decay { vec![span / 4.0, span / 2.0, span, 3.0 * span] } else { vec![f64::INFINITY] };
    let mut best = (f_lo, decays[0], f64::INFINITY);
    for i in 0..=n_grid {
        let f = f_lo + (f_hi - f_lo) * i as f64 / n_grid as f64;
        for &d in &decays {
            let s = sse_at(f, d);
            if s < best.2 {
                best = (f, d, s);
            }
        }
    }

    let df = (f_hi - f_lo) / n_grid as f64;
    let nm = NelderMead { max_evals: 4000, f_tol: 0.0, ..Default::default() };
    let (f, decay) = if opts.decay {
        let m = nm.minimize(|p| sse_at(p[0], p[1].exp()), &[best.0, best.1.ln()], &[df, 0.3]);
        (m.x[0], m.x[1].exp())
    } else {
        let m = nm.minimize(|p| sse_at(p[0], f64::INFINITY), &[best.0], &[df]);
        (m.x[0], f64::INFINITY)
    };
    let (coef, sse) = linear_part(t, y, f, decay).ok_or_else(|| Error::Fit("singular design matrix".into()))?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(DampedCosineFit {
        freq_hz: f,
        decay_s: decay,
        offset: coef[0],
        amplitude: coef[1].hypot(coef[2]),
        phase_rad: (-coef[2]).atan2(coef[1]),
        r_squared: if sst > 0.0 { 1.0 - sse / sst } else { 1.0 },
    })
}
