//! Landau–Zener passage through a two-level avoided crossing.
//!
//! With `H/h = ½[[v·t, Δ], [Δ, −v·t]]` (Hz), the diabatic survival probability
//! is `exp(−π²Δ²/v)`; the spin flips on adiabatic passage.

use crate::error::{Error, Result};
use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use std::f64::consts::{PI, TAU};

/// Adiabatic-passage probability `1 − exp(−π²Δν²/v)`, `v = slope_diff·rate`.
pub fn landau_zener_flip_probability(gap_hz: f64, slope_diff_hz_per_t: f64, rate_t_per_s: f64) -> f64 {
    let v = slope_diff_hz_per_t * rate_t_per_s;
    if gap_hz == 0.0 {
        return 0.0;
    }
    if v == 0.0 {
        return 1.0;
    }
    -(-(PI * gap_hz).powi(2) / v).exp_m1()
}

#[derive(Debug, Clone, Copy)]
pub struct SweepIntegration {
    /// Integrate over `t ∈ [−half_window, +half_window]`, seconds.
    pub half_window_s: f64,
    /// Fraction of the local level-splitting period per step.
    pub cycles_per_step: f64,
}

impl Default for SweepIntegration {
    fn default() -> Self {
        Self { half_window_s: 1e-3, cycles_per_step: 0.01 }
    }
}

fn hamiltonian(gap_hz: f64, v: f64, t: f64) -> Matrix2<C64> {
    let z = C64::new(0.5 * v * t, 0.0);
    let x = C64::new(0.5 * gap_hz, 0.0);
    Matrix2::new(z, x, x, -z)
}

fn expm_hermitian2(h: &Matrix2<C64>, t: f64) -> Matrix2<C64> {
    // H = a·1 + n·σ, exp(−i2πHt) = e^{−i2πat}(cos θ − i sin θ n̂·σ), θ = 2π|n|t
    let a = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let nz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let nx = h[(0, 1)].re;
    let ny = -h[(0, 1)].im;
    let norm = (nx * nx + ny * ny + nz * nz).sqrt();
    let theta = TAU * norm * t;
    let (s, c) = theta.sin_cos();
    let k = if norm > 0.0 { s / norm } else { 0.0 };
    let i = C64::new(0.0, 1.0);
    let m = Matrix2::new(
        C64::new(c, 0.0) - i * k * nz,
        -i * k * C64::new(nx, -ny),
        -i * k * C64::new(nx, ny),
        C64::new(c, 0.0) + i * k * nz,
    );
    m * C64::from_polar(1.0, -TAU * a * t)
}

fn lower_eigvec(h: &Matrix2<C64>) -> nalgebra::Vector2<C64> {
    let eig = h.symmetric_eigen();
    let k = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    eig.eigenvectors.column(k).into_owned()
}

/// Flip probability obtained by integrating the time-dependent two-level
/// Schrödinger equation (4th-order commutator-free Magnus steps), starting in
/// the lower adiabatic state and projecting onto the final upper diabatic
/// level, i.e. the one the spin occupies if it tunnelled.
pub fn landau_zener_numeric(gap_hz: f64, slope_diff_hz_per_t: f64, rate_t_per_s: f64, opts: &SweepIntegration) -> Result<f64> {
    let v = slope_diff_hz_per_t * rate_t_per_s;
    if !(v > 0.0) || !(gap_hz >= 0.0) || !(opts.half_window_s > 0.0) || !(opts.cycles_per_step > 0.0) {
        return Err(Error::InvalidInput(format!("need v > 0, gap >= 0 and positive integration settings (v = {v})")));
    }
    let t_end = opts.half_window_s;
    let mut t = -t_end;
    let mut psi = lower_eigvec(&hamiltonian(gap_hz, v, t));
    let g = 0.5 / 3f64.sqrt();
    let i = C64::new(0.0, 1.0);
    while t < t_end {
        let local = (v * t.abs()).hypot(gap_hz).max(1.0);
        let h = (opts.cycles_per_step / local).min(t_end - t);
        let h1 = hamiltonian(gap_hz, v, t + (0.5 - g) * h);
        let h2 = hamiltonian(gap_hz, v, t + (0.5 + g) * h);
        // Ω₄ = h/2 (H₁+H₂) + (√3 h²/12)(−i2π)[H₂, H₁]
        let comm = h2 * h1 - h1 * h2;
        let k = (h1 + h2) * C64::new(0.5, 0.0) + comm * (-i * TAU * 3f64.sqrt() * h / 12.0);
        let k = (k + k.adjoint()) * C64::new(0.5, 0.0);
        psi = expm_hermitian2(&k, h) * psi;
        t += h;
    }
    // lower adiabatic state at +t_end is the other diabatic level; staying
    // in it is the adiabatic passage (spin reversal)
    let lower_end = lower_eigvec(&hamiltonian(gap_hz, v, t_end));
    Ok(lower_end.dotc(&psi).norm_sqr())
}
