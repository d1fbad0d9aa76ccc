//! Continuous-time Markov dynamics of the nuclear spin: adjacent-only
//! `Δm_I = ±1` jumps, exit rate `1/T₁(i)` split evenly between neighbours.

use crate::spin::NuclearLabel;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

fn neighbours(i: usize) -> &'static [usize] {
    match i {
        0 => &[1],
        1 => &[0, 2],
        2 => &[1, 3],
        _ => &[2],
    }
}

fn dwell<R: Rng + ?Sized>(t1_s: f64, rng: &mut R) -> f64 {
    if t1_s.is_finite() {
        Exp::new(1.0 / t1_s).expect("positive rate").sample(rng)
    } else {
        f64::INFINITY
    }
}

fn hop<R: Rng + ?Sized>(i: usize, rng: &mut R) -> usize {
    let n = neighbours(i);
    n[rng.random_range(0..n.len())]
}

/// Propagate the nuclear state over `dt` seconds.
pub fn advance_nuclear<R: Rng + ?Sized>(m_i: NuclearLabel, t1_s: &[f64; 4], dt: f64, rng: &mut R) -> NuclearLabel {
    let mut i = m_i.index();
    let mut left = dt;
    loop {
        let d = dwell(t1_s[i], rng);
        if d >= left {
            return NuclearLabel::from_index(i);
        }
        left -= d;
        i = hop(i, rng);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelegraphTrace {
    /// Start time of each dwell; strictly increasing, first entry 0.
    pub times: Vec<f64>,
    pub states: Vec<NuclearLabel>,
    pub duration_s: f64,
}

impl TelegraphTrace {
    /// Length of every dwell; the last one is cut off by the trace end.
    pub fn dwell_times(&self) -> Vec<f64> {
        let mut ends: Vec<f64> = self.times[1..].to_vec();
        ends.push(self.duration_s);
        ends.iter().zip(&self.times).map(|(e, s)| e - s).collect()
    }

    /// Completed (uncensored) dwells in `label`.
    pub fn completed_dwells(&self, label: NuclearLabel) -> Vec<f64> {
        let d = self.dwell_times();
        let n = d.len().saturating_sub(1);
        d[..n].iter().zip(&self.states).filter(|(_, s)| **s == label).map(|(d, _)| *d).collect()
    }

    pub fn state_at(&self, t: f64) -> NuclearLabel {
        let k = self.times.partition_point(|s| *s <= t).max(1);
        self.states[k - 1]
    }
}

pub fn telegraph_trajectory<R: Rng + ?Sized>(
    t1_s: &[f64; 4],
    initial: NuclearLabel,
    duration_s: f64,
    rng: &mut R,
) -> TelegraphTrace {
    let mut times = vec![0.0];
    let mut states = vec![initial];
    let mut t = 0.0;
    let mut i = initial.index();
    loop {
        t += dwell(t1_s[i], rng);
        if t >= duration_s {
            break;
        }
        i = hop(i, rng);
        times.push(t);
        states.push(NuclearLabel::from_index(i));
    }
    TelegraphTrace { times, states, duration_s }
}
