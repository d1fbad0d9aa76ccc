//! Field sweeps across the four avoided crossings, with QTM flips and
//! jump-event generation.
//!
//! An up-sweep can flip `J_z = +6 → −6` and a down-sweep `−6 → +6`; in each
//! case only at the crossing whose label equals the current `m_I`. When the
//! spin reaches the far end of the window without tunnelling it reverses by
//! direct relaxation (no jump is detected), so every sweep starts in the
//! state that can tunnel.

use super::landau_zener::landau_zener_flip_probability;
use super::telegraph::advance_nuclear;
use crate::spin::{CrossingInfo, NuclearLabel};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepDirection {
    Up,
    Down,
}

impl SweepDirection {
    pub fn reversed(self) -> Self {
        match self {
            Self::Up => Self::Down,
            Self::Down => Self::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElectronicState {
    #[serde(rename = "+6")]
    Plus,
    #[serde(rename = "-6")]
    Minus,
}

impl ElectronicState {
    pub fn jz(self) -> f64 {
        match self {
            Self::Plus => 6.0,
            Self::Minus => -6.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }

    /// Sweep direction in which this state moves up in energy through its crossing.
    pub fn tunnelling_direction(self) -> SweepDirection {
        match self {
            Self::Plus => SweepDirection::Up,
            Self::Minus => SweepDirection::Down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub b_min_t: f64,
    pub b_max_t: f64,
    pub rate_t_per_s: f64,
    /// Gaussian σ of detected jump positions, mT.
    pub jump_noise_mt: f64,
    /// Fixed flip probability overriding Landau–Zener, for idealized runs.
    pub flip_probability: Option<f64>,
    /// Reverse the spin at the window edge when it did not tunnel.
    pub edge_relaxation: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            b_min_t: -0.060,
            b_max_t: 0.060,
            rate_t_per_s: 0.1,
            jump_noise_mt: 3.0,
            flip_probability: None,
            edge_relaxation: true,
        }
    }
}

impl SweepConfig {
    pub fn sweep_duration_s(&self) -> f64 {
        (self.b_max_t - self.b_min_t) / self.rate_t_per_s
    }

    pub fn diagnostics(&self, prefix: &str) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if !(self.b_min_t.is_finite() && self.b_max_t.is_finite() && self.b_min_t < self.b_max_t) {
            out.push((format!("{prefix}.b_min_t"), format!("need finite b_min_t < b_max_t, got {} and {}", self.b_min_t, self.b_max_t)));
        }
        if !(self.rate_t_per_s > 0.0 && self.rate_t_per_s.is_finite()) {
            out.push((format!("{prefix}.rate_t_per_s"), format!("must be > 0, got {}", self.rate_t_per_s)));
        }
        if !(self.jump_noise_mt >= 0.0 && self.jump_noise_mt.is_finite()) {
            out.push((format!("{prefix}.jump_noise_mt"), format!("must be >= 0, got {}", self.jump_noise_mt)));
        }
        if let Some(p) = self.flip_probability {
            if !(0.0..=1.0).contains(&p) {
                out.push((format!("{prefix}.flip_probability"), format!("must lie in [0, 1], got {p}")));
            }
        }
        out
    }

    pub fn flip_probability_at(&self, c: &CrossingInfo) -> f64 {
        self.flip_probability
            .unwrap_or_else(|| landau_zener_flip_probability(c.gap_hz, c.slope_difference_hz_per_t(), self.rate_t_per_s))
    }

    fn start_field(&self, dir: SweepDirection) -> f64 {
        match dir {
            SweepDirection::Up => self.b_min_t,
            SweepDirection::Down => self.b_max_t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpEvent {
    pub field_t: f64,
    pub sweep_index: u64,
    pub direction: SweepDirection,
    pub true_m_i: NuclearLabel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOutcome {
    pub electronic: ElectronicState,
    pub m_i: NuclearLabel,
    pub event: Option<JumpEvent>,
}

/// Sweep between `from_t` and `to_t`, tunnelling at most once. Nuclear
/// relaxation runs throughout. `edge_relaxation` is applied only if the leg
/// ends at the window edge it is heading for.
#[allow(clippy::too_many_arguments)]
pub fn sweep_leg<R: Rng + ?Sized>(
    electronic: ElectronicState,
    m_i: NuclearLabel,
    from_t: f64,
    to_t: f64,
    sweep_index: u64,
    crossings: &[CrossingInfo],
    cfg: &SweepConfig,
    t1_s: &[f64; 4],
    rng: &mut R,
) -> SweepOutcome {
    let dir = if to_t >= from_t { SweepDirection::Up } else { SweepDirection::Down };
    let (lo, hi) = (from_t.min(to_t), from_t.max(to_t));
    let mut passed: Vec<&CrossingInfo> = crossings.iter().filter(|c| c.field_t > lo && c.field_t <= hi).collect();
    passed.sort_by(|a, b| a.field_t.total_cmp(&b.field_t));
    if dir == SweepDirection::Down {
        passed.reverse();
    }
    let can_tunnel = electronic.tunnelling_direction() == dir;

    let mut t = 0.0;
    let mut m = m_i;
    let mut event = None;
    for c in passed {
        let tc = (c.field_t - from_t).abs() / cfg.rate_t_per_s;
        m = advance_nuclear(m, t1_s, tc - t, rng);
        t = tc;
        if can_tunnel && event.is_none() && c.m_i == m && rng.random::<f64>() < cfg.flip_probability_at(c) {
            let noise = if cfg.jump_noise_mt > 0.0 {
                Normal::new(0.0, cfg.jump_noise_mt * 1e-3).expect("finite sigma").sample(rng)
            } else {
                0.0
            };
            let field_t = (c.field_t + noise).clamp(cfg.b_min_t, cfg.b_max_t);
            event = Some(JumpEvent { field_t, sweep_index, direction: dir, true_m_i: m });
        }
    }
    m = advance_nuclear(m, t1_s, (to_t - from_t).abs() / cfg.rate_t_per_s - t, rng);
    let at_edge = match dir {
        SweepDirection::Up => to_t >= cfg.b_max_t,
        SweepDirection::Down => to_t <= cfg.b_min_t,
    };
    let electronic = if event.is_some() || (can_tunnel && at_edge && cfg.edge_relaxation) {
        electronic.flipped()
    } else {
        electronic
    };
    SweepOutcome { electronic, m_i: m, event }
}

/// One full sweep across the window in `direction`.
#[allow(clippy::too_many_arguments)]
pub fn sweep_once<R: Rng + ?Sized>(
    electronic: ElectronicState,
    m_i: NuclearLabel,
    direction: SweepDirection,
    sweep_index: u64,
    crossings: &[CrossingInfo],
    cfg: &SweepConfig,
    t1_s: &[f64; 4],
    rng: &mut R,
) -> SweepOutcome {
    let from = cfg.start_field(direction);
    let to = cfg.start_field(direction.reversed());
    sweep_leg(electronic, m_i, from, to, sweep_index, crossings, cfg, t1_s, rng)
}

/// Alternate up and down sweeps (starting in the tunnelling direction of
/// `electronic`) and collect every detected jump.
#[allow(clippy::too_many_arguments)]
pub fn sweep_series<R: Rng + ?Sized>(
    electronic: ElectronicState,
    m_i: NuclearLabel,
    n_sweeps: u64,
    crossings: &[CrossingInfo],
    cfg: &SweepConfig,
    t1_s: &[f64; 4],
    rng: &mut R,
) -> Vec<JumpEvent> {
    let mut e = electronic;
    let mut m = m_i;
    let mut dir = e.tunnelling_direction();
    let mut events = Vec::new();
    for k in 0..n_sweeps {
        let out = sweep_once(e, m, dir, k, crossings, cfg, t1_s, rng);
        events.extend(out.event);
        e = out.electronic;
        m = out.m_i;
        dir = dir.reversed();
    }
    events
}

/// Label of the crossing nearest to `field_t`.
pub fn classify_jump(field_t: f64, crossings: &[CrossingInfo]) -> Option<NuclearLabel> {
    crossings
        .iter()
        .min_by(|a, b| (a.field_t - field_t).abs().total_cmp(&(b.field_t - field_t).abs()))
        .map(|c| c.m_i)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitOutcome {
    pub success: bool,
    pub sweeps: u64,
    pub electronic: ElectronicState,
    pub m_i: NuclearLabel,
    /// Field at which the sweeping stopped (the detected target jump on success).
    pub field_t: f64,
    pub elapsed_s: f64,
}

/// Sweep back and forth until a jump is detected at the `target` crossing
/// (and, if `branch` is given, the jump leaves the spin on that branch).
/// On success the field is held at the crossing that tunnelled.
#[allow(clippy::too_many_arguments)]
pub fn initialize_state<R: Rng + ?Sized>(
    target: NuclearLabel,
    electronic: ElectronicState,
    m_i: NuclearLabel,
    branch: Option<ElectronicState>,
    crossings: &[CrossingInfo],
    cfg: &SweepConfig,
    t1_s: &[f64; 4],
    max_sweeps: u64,
    rng: &mut R,
) -> InitOutcome {
    let mut e = electronic;
    let mut m = m_i;
    let mut dir = e.tunnelling_direction();
    let mut elapsed = 0.0;
    let target_crossing = crossings.iter().find(|c| c.m_i == target);
    for k in 0..max_sweeps {
        let from = cfg.start_field(dir);
        let out = sweep_once(e, m, dir, k, crossings, cfg, t1_s, rng);
        if let (Some(ev), Some(tc)) = (out.event, target_crossing) {
            if classify_jump(ev.field_t, crossings) == Some(target) && branch.is_none_or(|b| b == out.electronic) {
                let partial = (tc.field_t - from).abs() / cfg.rate_t_per_s;
                return InitOutcome {
                    success: true,
                    sweeps: k + 1,
                    electronic: out.electronic,
                    // the state at the crossing is what tunnelled
                    m_i: ev.true_m_i,
                    field_t: tc.field_t,
                    elapsed_s: elapsed + partial,
                };
            }
        }
        elapsed += cfg.sweep_duration_s();
        e = out.electronic;
        m = out.m_i;
        dir = dir.reversed();
    }
    InitOutcome { success: false, sweeps: max_sweeps, electronic: e, m_i: m, field_t: cfg.start_field(dir), elapsed_s: elapsed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::spin::{analytic_crossings, SpinSystemParams};

    fn crossings() -> Vec<CrossingInfo> {
        analytic_crossings(&SpinSystemParams::default())
    }

    fn ideal() -> SweepConfig {
        SweepConfig { flip_probability: Some(1.0), jump_noise_mt: 0.0, ..Default::default() }
    }

    const NO_T1: [f64; 4] = [f64::INFINITY; 4];

    #[test]
    fn certain_flip_jumps_at_the_label_crossing() {
        let c = crossings();
        let mut rng = seeded(1);
        let out = sweep_once(ElectronicState::Plus, NuclearLabel::PLUS_3_2, SweepDirection::Up, 0, &c, &ideal(), &NO_T1, &mut rng);
        let ev = out.event.unwrap();
        assert!((ev.field_t * 1e3 + 37.3).abs() < 0.1, "{}", ev.field_t);
        assert_eq!(out.electronic, ElectronicState::Minus);
        let out = sweep_once(ElectronicState::Minus, NuclearLabel::PLUS_3_2, SweepDirection::Down, 1, &c, &ideal(), &NO_T1, &mut rng);
        assert!((out.event.unwrap().field_t * 1e3 + 37.3).abs() < 0.1);
        assert_eq!(out.electronic, ElectronicState::Plus);
    }

    #[test]
    fn wrong_direction_never_tunnels() {
        let c = crossings();
        let out = sweep_once(ElectronicState::Minus, NuclearLabel::PLUS_1_2, SweepDirection::Up, 0, &c, &ideal(), &NO_T1, &mut seeded(1));
        assert!(out.event.is_none());
        assert_eq!(out.electronic, ElectronicState::Minus);
    }

    #[test]
    fn no_tunnelling_means_edge_reversal_without_event() {
        let c = crossings();
        let cfg = SweepConfig { flip_probability: Some(0.0), ..ideal() };
        let out = sweep_once(ElectronicState::Plus, NuclearLabel::PLUS_1_2, SweepDirection::Up, 0, &c, &cfg, &NO_T1, &mut seeded(1));
        assert!(out.event.is_none());
        assert_eq!(out.electronic, ElectronicState::Minus);
        let cfg = SweepConfig { edge_relaxation: false, ..cfg };
        let out = sweep_once(ElectronicState::Plus, NuclearLabel::PLUS_1_2, SweepDirection::Up, 0, &c, &cfg, &NO_T1, &mut seeded(1));
        assert_eq!(out.electronic, ElectronicState::Plus);
    }

    #[test]
    fn empirical_flip_rate_matches_probability() {
        let c = crossings();
        let cfg = SweepConfig { flip_probability: Some(0.3), ..ideal() };
        let mut rng = seeded(4);
        let n = 100_000;
        let hits = (0..n)
            .filter(|&k| sweep_once(ElectronicState::Plus, NuclearLabel::MINUS_1_2, SweepDirection::Up, k, &c, &cfg, &NO_T1, &mut rng).event.is_some())
            .count();
        let se = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - 0.3).abs() < 3.0 * se);
    }

    #[test]
    fn initialization_with_target_already_set() {
        let c = crossings();
        let out = initialize_state(NuclearLabel::MINUS_3_2, ElectronicState::Plus, NuclearLabel::MINUS_3_2, None, &c, &ideal(), &NO_T1, 10, &mut seeded(1));
        assert!(out.success && out.sweeps <= 2);
        assert_eq!(out.m_i, NuclearLabel::MINUS_3_2);
        assert_eq!(out.electronic, ElectronicState::Minus);
    }

    #[test]
    fn branch_requirement_skips_down_sweep_jumps() {
        let c = crossings();
        let out = initialize_state(
            NuclearLabel::PLUS_1_2,
            ElectronicState::Minus,
            NuclearLabel::PLUS_1_2,
            Some(ElectronicState::Minus),
            &c,
            &ideal(),
            &NO_T1,
            10,
            &mut seeded(1),
        );
        assert!(out.success);
        assert_eq!(out.sweeps, 2);
        assert_eq!(out.electronic, ElectronicState::Minus);
    }

    #[test]
    fn unreachable_target_fails() {
        let c = crossings();
        let out = initialize_state(NuclearLabel::PLUS_3_2, ElectronicState::Plus, NuclearLabel::MINUS_1_2, None, &c, &ideal(), &NO_T1, 50, &mut seeded(1));
        assert!(!out.success);
        assert_eq!(out.sweeps, 50);
    }

    #[test]
    fn classification_picks_nearest() {
        let c = crossings();
        assert_eq!(classify_jump(-0.036, &c), Some(NuclearLabel::PLUS_3_2));
        assert_eq!(classify_jump(0.011, &c), Some(NuclearLabel::MINUS_1_2));
    }
}
