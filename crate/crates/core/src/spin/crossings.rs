//! Nuclear-spin-conserving avoided crossings of the `|±J, m_I⟩` ground branches.

use super::hamiltonian::build_hamiltonian;
use super::hyperfine::NuclearLabel;
use super::params::{HyperfineParams, SpinSystemParams};
use crate::error::{Error, Result};
use crate::units::{GHZ, MU_B_GHZ_PER_T};
use serde::{Deserialize, Serialize};

pub const DEFAULT_WINDOW_T: (f64, f64) = (-0.060, 0.060);

/// Bracket width at which bisection stops, tesla.
const FIELD_TOL_T: f64 = 1e-12;
const SLOPE_STEP_T: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingInfo {
    pub field_t: f64,
    pub m_i: NuclearLabel,
    pub gap_hz: f64,
    /// Diabatic slopes of the `|+J, m_I⟩` and `|−J, m_I⟩` branches.
    pub branch_slopes_hz_per_t: [f64; 2],
}

impl CrossingInfo {
    pub fn slope_difference_hz_per_t(&self) -> f64 {
        (self.branch_slopes_hz_per_t[0] - self.branch_slopes_hz_per_t[1]).abs()
    }
}

/// `E(+J, m) = E(−J, m)` for the Ising hyperfine model: `B = −A·m/(g_J μ_B/h)`.
pub fn analytic_crossing_field(hf: &HyperfineParams, m_i: NuclearLabel) -> f64 {
    -hf.a_hf * m_i.value() / (hf.g_j * MU_B_GHZ_PER_T)
}

struct Pair {
    plus: usize,
    minus: usize,
}

struct PairState {
    /// `w(+J) − w(−J)` of the lower state of the pair.
    order: f64,
    separation_ghz: f64,
}

fn pair_state(params: &SpinSystemParams, pair: &Pair, b: f64) -> Result<PairState> {
    let (vals, vecs) = build_hamiltonian(params, b, true)?.eigh();
    let weight = |k: usize| vecs[(pair.plus, k)].norm_sqr() + vecs[(pair.minus, k)].norm_sqr();
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| weight(b).total_cmp(&weight(a)));
    let (mut lo, mut hi) = (idx[0], idx[1]);
    if vals[lo] > vals[hi] {
        std::mem::swap(&mut lo, &mut hi);
    }
    Ok(PairState {
        order: vecs[(pair.plus, lo)].norm_sqr() - vecs[(pair.minus, lo)].norm_sqr(),
        separation_ghz: vals[hi] - vals[lo],
    })
}

fn diabatic_energy(params: &SpinSystemParams, index: usize, b: f64) -> Result<f64> {
    Ok(build_hamiltonian(params, b, true)?.get(index, index).re)
}

/// One [`CrossingInfo`] per `m_I` whose crossing lies inside `window` (tesla),
/// sorted by field. The field is where the lower eigenstate of the pair is an
/// equal mixture of `|+J, m⟩` and `|−J, m⟩`, which is also where the pair
/// separation (the reported gap) is smallest.
pub fn find_avoided_crossings(params: &SpinSystemParams, window: (f64, f64)) -> Result<Vec<CrossingInfo>> {
    let (b_min, b_max) = window;
    if !(b_min.is_finite() && b_max.is_finite() && b_min < b_max) {
        return Err(Error::InvalidInput(format!("invalid field window [{b_min}, {b_max}]")));
    }
    let n_i = params.hyperfine.nuclear_spin.dim();
    if n_i != 4 {
        return Err(Error::InvalidInput("crossing search assumes I = 3/2".into()));
    }
    let last_j = params.j.dim() - 1;

    let mut out = Vec::new();
    for m_i in NuclearLabel::ALL {
        let pair = Pair { plus: m_i.index(), minus: last_j * n_i + m_i.index() };
        let f_lo = pair_state(params, &pair, b_min)?.order;
        let f_hi = pair_state(params, &pair, b_max)?.order;
        if f_lo * f_hi >= 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (b_min, b_max);
        let mut sign_lo = f_lo.signum();
        for _ in 0..200 {
            if hi - lo <= FIELD_TOL_T {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f = pair_state(params, &pair, mid)?.order;
            if f == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f.signum() == sign_lo {
                lo = mid;
                sign_lo = f.signum();
            } else {
                hi = mid;
            }
        }
        let field_t = 0.5 * (lo + hi);
        let gap_ghz = pair_state(params, &pair, field_t)?.separation_ghz;

        let slope = |index: usize| -> Result<f64> {
            let up = diabatic_energy(params, index, field_t + SLOPE_STEP_T)?;
            let down = diabatic_energy(params, index, field_t - SLOPE_STEP_T)?;
            Ok((up - down) / (2.0 * SLOPE_STEP_T) * GHZ)
        };
        out.push(CrossingInfo {
            field_t,
            m_i,
            gap_hz: gap_ghz * GHZ,
            branch_slopes_hz_per_t: [slope(pair.plus)?, slope(pair.minus)?],
        });
    }
    out.sort_by(|a, b| a.field_t.total_cmp(&b.field_t));
    Ok(out)
}

/// Crossings of the Ising model without diagonalization: analytic fields,
/// `gap = tunnel_splitting`, slopes `±J·g_J·μ_B/h`.
pub fn analytic_crossings(params: &SpinSystemParams) -> Vec<CrossingInfo> {
    let hf = &params.hyperfine;
    let slope = params.j.value() * hf.g_j * MU_B_GHZ_PER_T * GHZ;
    let mut out: Vec<CrossingInfo> = NuclearLabel::ALL
        .into_iter()
        .map(|m_i| CrossingInfo {
            field_t: analytic_crossing_field(hf, m_i),
            m_i,
            gap_hz: hf.tunnel_splitting_hz,
            branch_slopes_hz_per_t: [slope, -slope],
        })
        .collect();
    out.sort_by(|a, b| a.field_t.total_cmp(&b.field_t));
    out
}
