//! Zeeman diagrams with eigenvector-overlap label tracking.

use super::hamiltonian::build_hamiltonian;
use super::params::SpinSystemParams;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Eigenvalues closer than this (GHz) are treated as one degenerate cluster.
const DEGENERACY_TOL_GHZ: f64 = 1e-7;
const MIN_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct ZeemanDiagram {
    pub fields_t: Vec<f64>,
    /// `energies[i][label]`: energy (GHz) of trace `label` at field `i`.
    pub energies: Vec<Vec<f64>>,
}

impl ZeemanDiagram {
    pub fn n_traces(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }

    pub fn trace(&self, label: usize) -> Vec<f64> {
        self.energies.iter().map(|row| row[label]).collect()
    }
}

fn clusters(vals: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=vals.len() {
        if k == vals.len() || vals[k] - vals[k - 1] > DEGENERACY_TOL_GHZ {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Continue labels from `prev` to `next` eigenbases by greedy maximum
/// overlap, tie-broken by energy proximity. Overlaps are summed over
/// degenerate clusters so arbitrary rotations inside a degenerate
/// subspace do not break tracking.
///
/// Returns `map[p] = n`: previous eigen-index `p` continues as new index `n`.
/// On failure returns the offending overlap.
#[allow(clippy::needless_range_loop)]
pub fn track_labels(
    prev_vals: &[f64],
    prev_vecs: &DMatrix<C64>,
    next_vals: &[f64],
    next_vecs: &DMatrix<C64>,
) -> std::result::Result<Vec<usize>, f64> {
    let n = prev_vals.len();
    let overlap = prev_vecs.adjoint() * next_vecs;
    let w = |p: usize, q: usize| overlap[(p, q)].norm_sqr();

    let prev_cl = clusters(prev_vals);
    let next_cl = clusters(next_vals);
    let cluster_of = |cl: &[std::ops::Range<usize>], k: usize| {
        cl.iter().find(|r| r.contains(&k)).cloned().expect("index in some cluster")
    };

    let mut scores = Vec::with_capacity(n * n);
    for p in 0..n {
        let pc = cluster_of(&prev_cl, p);
        for q in 0..n {
            let qc = cluster_of(&next_cl, q);
            let into_next: f64 = qc.clone().map(|q2| w(p, q2)).sum();
            let from_prev: f64 = pc.clone().map(|p2| w(p2, q)).sum();
            let score = into_next.max(from_prev);
            scores.push((score, (prev_vals[p] - next_vals[q]).abs(), p, q));
        }
    }
    scores.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));

    let mut map = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    let mut worst = f64::INFINITY;
    for (score, _, p, q) in scores {
        if map[p] == usize::MAX && !taken[q] {
            map[p] = q;
            taken[q] = true;
            worst = worst.min(score);
        }
    }
    if worst < MIN_OVERLAP {
        Err(worst)
    } else {
        Ok(map)
    }
}

/// Eigenvalue traces over a strictly monotone field grid (tesla).
pub fn zeeman_diagram(
    params: &SpinSystemParams,
    fields_t: &[f64],
    include_nuclear: bool,
) -> Result<ZeemanDiagram> {
    if fields_t.is_empty() {
        return Err(Error::InvalidInput("field grid is empty".into()));
    }
    let increasing = fields_t.windows(2).all(|w| w[1] > w[0]);
    let decreasing = fields_t.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidInput("field grid must be strictly monotone".into()));
    }

    let mut energies = Vec::with_capacity(fields_t.len());
    // label_at[k] = label carried by sorted eigen-index k at the current field
    let mut prev: Option<(Vec<f64>, DMatrix<C64>, Vec<usize>)> = None;
    for (step, &b) in fields_t.iter().enumerate() {
        let (vals, vecs) = build_hamiltonian(params, b, include_nuclear)?.eigh();
        let n = vals.len();
        let labels = match &prev {
            None => (0..n).collect::<Vec<_>>(),
            Some((pv, pvec, plabels)) => {
                let map = track_labels(pv, pvec, &vals, &vecs).map_err(|overlap| {
                    Error::LabelTracking { step: step - 1, next: step, field_t: b, overlap }
                })?;
                let mut labels = vec![0; n];
                for (p, q) in map.into_iter().enumerate() {
                    labels[q] = plabels[p];
                }
                labels
            }
        };
        let mut row = vec![0.0; n];
        for (k, &label) in labels.iter().enumerate() {
            row[label] = vals[k];
        }
        energies.push(row);
        prev = Some((vals, vecs, labels));
    }
    Ok(ZeemanDiagram { fields_t: fields_t.to_vec(), energies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::params::{HyperfineParams, LigandFieldParams};
    use crate::units::MU_B_GHZ_PER_T;

    fn axial() -> SpinSystemParams {
        SpinSystemParams {
            ligand: LigandFieldParams::default().axial(),
            hyperfine: HyperfineParams { tunnel_splitting_hz: 0.0, ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn axial_traces_are_linear_with_jz_slopes() {
        let p = axial();
        let d = zeeman_diagram(&p, &[0.1, 0.5], false).unwrap();
        let gmu = p.hyperfine.g_j * MU_B_GHZ_PER_T;
        let mut slopes: Vec<f64> = (0..13)
            .map(|l| {
                let t = d.trace(l);
                (t[1] - t[0]) / 0.4 / gmu
            })
            .collect();
        slopes.sort_by(f64::total_cmp);
        for (s, m) in slopes.iter().zip(-6..=6) {
            assert!((s - m as f64).abs() < 1e-6, "slope {s} vs m = {m}");
        }
    }

    #[test]
    fn ground_doublet_slope_difference() {
        let p = axial();
        let d = zeeman_diagram(&p, &[0.2, 0.3], false).unwrap();
        let ground = (0..13).min_by(|&a, &b| d.energies[0][a].total_cmp(&d.energies[0][b])).unwrap();
        let slope = |l: usize| (d.energies[1][l] - d.energies[0][l]) / 0.1;
        // the ground trace at positive field is J_z = −6; its partner +6 is the highest-slope trace
        let steepest = (0..13).max_by(|&a, &b| slope(a).total_cmp(&slope(b))).unwrap();
        let diff = slope(steepest) - slope(ground);
        assert!((diff - 12.0 * 1.5 * MU_B_GHZ_PER_T).abs() < 1e-6);
        assert!((diff - 251.93).abs() < 0.01);
    }

    #[test]
    fn refining_grid_keeps_values() {
        let p = SpinSystemParams::default();
        let coarse: Vec<f64> = (0..=10).map(|k| -0.05 + 0.01 * k as f64).collect();
        let fine: Vec<f64> = (0..=20).map(|k| -0.05 + 0.005 * k as f64).collect();
        let dc = zeeman_diagram(&p, &coarse, true).unwrap();
        let df = zeeman_diagram(&p, &fine, true).unwrap();
        for (i, _) in coarse.iter().enumerate() {
            let mut a = dc.energies[i].clone();
            let mut b = df.energies[2 * i].clone();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_non_monotone_grid() {
        assert!(zeeman_diagram(&axial(), &[0.0, 0.1, 0.05], false).is_err());
        assert!(zeeman_diagram(&axial(), &[], false).is_err());
    }

    #[test]
    fn tracking_fails_on_scrambled_basis() {
        // new basis is the 3-point Fourier basis: every overlap is 1/3
        let vals = [0.0, 1.0, 2.0];
        let id = DMatrix::<C64>::identity(3, 3);
        let f = DMatrix::from_fn(3, 3, |r, c| {
            C64::from_polar(1.0 / 3f64.sqrt(), std::f64::consts::TAU * (r * c) as f64 / 3.0)
        });
        let err = track_labels(&vals, &id, &vals, &f).unwrap_err();
        assert!((err - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tracking_follows_swapped_states() {
        let vals = [0.0, 1.0];
        let id = DMatrix::<C64>::identity(2, 2);
        let swap = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert_eq!(track_labels(&vals, &id, &vals, &swap).unwrap(), vec![1, 0]);
    }
}
