//! Estimators on simulated readout data: exponential lifetimes, jump-field
//! histograms with Gaussian-mixture clustering, and storage fidelity.

use super::sweep::JumpEvent;
use crate::error::{Error, Result};
use crate::table::Table;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifetimeFit {
    pub t1_s: f64,
    /// Exact 95% interval from `2·Σt/T₁ ~ χ²(2n)`.
    pub ci_low_s: f64,
    pub ci_high_s: f64,
    pub n: usize,
}

impl LifetimeFit {
    pub fn contains(&self, t: f64) -> bool {
        self.ci_low_s <= t && t <= self.ci_high_s
    }

    /// Half-width of the interval relative to the estimate.
    pub fn relative_half_width(&self) -> f64 {
        0.5 * (self.ci_high_s - self.ci_low_s) / self.t1_s
    }
}

/// Maximum-likelihood exponential lifetime (the sample mean) with its 95% CI.
pub fn fit_exponential_lifetime(dwells: &[f64]) -> Result<LifetimeFit> {
    if dwells.is_empty() {
        return Err(Error::Fit("no dwell times".into()));
    }
    if let Some(d) = dwells.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(Error::Fit(format!("dwell times must be finite and > 0, got {d}")));
    }
    let n = dwells.len();
    let sum: f64 = dwells.iter().sum();
    let chi = ChiSquared::new(2.0 * n as f64).map_err(|e| Error::Fit(e.to_string()))?;
    Ok(LifetimeFit {
        t1_s: sum / n as f64,
        ci_low_s: 2.0 * sum / chi.inverse_cdf(0.975),
        ci_high_s: 2.0 * sum / chi.inverse_cdf(0.025),
        n,
    })
}

/// `F = exp(−t/T₁)`: probability the state survives a sequence of length `t`.
pub fn readout_fidelity(t1_s: f64, t_sequence_s: f64) -> f64 {
    (-t_sequence_s / t1_s).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianCluster {
    pub mean_mt: f64,
    pub sigma_mt: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpHistogram {
    /// Columns `field_mt` (bin centre) and `count`.
    pub bins: Table,
    /// Mixture components sorted by mean.
    pub clusters: Vec<GaussianCluster>,
}

impl JumpHistogram {
    /// Index of the nearest cluster mean.
    pub fn classify(&self, field_mt: f64) -> usize {
        let mut best = 0;
        for (k, c) in self.clusters.iter().enumerate() {
            if (c.mean_mt - field_mt).abs() < (self.clusters[best].mean_mt - field_mt).abs() {
                best = k;
            }
        }
        best
    }
}

const MIXTURE_COMPONENTS: usize = 4;
const EM_MAX_ITER: usize = 1000;
const EM_TOL: f64 = 1e-10;
/// Variance floor (mT²) so noiseless data give delta-like components.
const VAR_FLOOR_MT2: f64 = 1e-12;

/// Bin jump fields and fit a four-component Gaussian mixture by EM,
/// initialized from the 1/8, 3/8, 5/8, 7/8 quantiles.
pub fn jump_histogram(events: &[JumpEvent], bin_mt: f64) -> Result<JumpHistogram> {
    if !(bin_mt > 0.0) {
        return Err(Error::InvalidInput(format!("bin width must be > 0, got {bin_mt}")));
    }
    let mut x: Vec<f64> = events.iter().map(|e| e.field_t * 1e3).collect();
    if x.len() < MIXTURE_COMPONENTS {
        return Err(Error::Fit(format!("need at least {MIXTURE_COMPONENTS} events, got {}", x.len())));
    }
    x.sort_by(f64::total_cmp);

    let lo = (x[0] / bin_mt).floor() as i64;
    let hi = (x[x.len() - 1] / bin_mt).floor() as i64;
    let mut counts = vec![0u64; (hi - lo + 1) as usize];
    for v in &x {
        counts[((v / bin_mt).floor() as i64 - lo) as usize] += 1;
    }
    let mut bins = Table::new(["field_mt", "count"]);
    for (k, c) in counts.iter().enumerate() {
        bins.push(vec![(lo + k as i64) as f64 * bin_mt + 0.5 * bin_mt, *c as f64]);
    }

    Ok(JumpHistogram { bins, clusters: gaussian_mixture(&x) })
}

fn gaussian_mixture(x: &[f64]) -> Vec<GaussianCluster> {
    let n = x.len();
    let k = MIXTURE_COMPONENTS;
    let total_var = {
        let m = x.iter().sum::<f64>() / n as f64;
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64
    };
    let mut mean: Vec<f64> = (0..k).map(|j| x[((2 * j + 1) * n / (2 * k)).min(n - 1)]).collect();
    let mut var = vec![(total_var / (k * k) as f64).max(VAR_FLOOR_MT2); k];
    let mut weight = vec![1.0 / k as f64; k];
    let mut resp = vec![0.0; n * k];
    let mut last_ll = f64::NEG_INFINITY;
    for _ in 0..EM_MAX_ITER {
        let mut ll = 0.0;
        for (i, v) in x.iter().enumerate() {
            let logs: Vec<f64> = (0..k)
                .map(|j| weight[j].ln() - 0.5 * ((v - mean[j]).powi(2) / var[j] + (std::f64::consts::TAU * var[j]).ln()))
                .collect();
            let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let s: f64 = logs.iter().map(|l| (l - mx).exp()).sum();
            for j in 0..k {
                resp[i * k + j] = (logs[j] - mx).exp() / s;
            }
            ll += mx + s.ln();
        }
        for j in 0..k {
            let nj: f64 = (0..n).map(|i| resp[i * k + j]).sum();
            if nj <= 0.0 {
                continue;
            }
            mean[j] = (0..n).map(|i| resp[i * k + j] * x[i]).sum::<f64>() / nj;
            var[j] = ((0..n).map(|i| resp[i * k + j] * (x[i] - mean[j]).powi(2)).sum::<f64>() / nj).max(VAR_FLOOR_MT2);
            weight[j] = nj / n as f64;
        }
        if (ll - last_ll).abs() <= EM_TOL * ll.abs().max(1.0) {
            break;
        }
        last_ll = ll;
    }
    let mut out: Vec<GaussianCluster> =
        (0..k).map(|j| GaussianCluster { mean_mt: mean[j], sigma_mt: var[j].sqrt(), weight: weight[j] }).collect();
    out.sort_by(|a, b| a.mean_mt.total_cmp(&b.mean_mt));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::readout::SweepDirection;
    use crate::rng::seeded;
    use crate::spin::NuclearLabel;
    use rand_distr::{Distribution, Exp, Normal};

    #[test]
    fn fidelity_values() {
        assert!((readout_fidelity(34.0, 2.4) - 0.931_845_514).abs() < 1e-9);
        assert!((readout_fidelity(17.0, 2.4) - 0.868_336_062).abs() < 1e-9);
        assert_eq!(readout_fidelity(17.0, 0.0), 1.0);
        assert!((readout_fidelity(34.0, 5.0) - 0.863_243_197).abs() < 1e-9);
    }

    #[test]
    fn single_dwell_gives_wide_interval() {
        let f = fit_exponential_lifetime(&[3.0]).unwrap();
        assert_eq!(f.t1_s, 3.0);
        assert!(f.ci_low_s < 1.0 && f.ci_high_s > 100.0);
    }

    #[test]
    fn estimator_is_scale_equivariant() {
        let d = [1.0, 2.5, 0.3, 7.0];
        let a = fit_exponential_lifetime(&d).unwrap();
        let b = fit_exponential_lifetime(&d.map(|v| v * 4.0)).unwrap();
        assert!((b.t1_s - 4.0 * a.t1_s).abs() < 1e-12);
        assert!((b.ci_high_s - 4.0 * a.ci_high_s).abs() < 1e-9);
    }

    #[test]
    fn interval_matches_tabulated_quantiles() {
        // χ²(2) quantiles: 0.0506356, 7.377759
        let f = fit_exponential_lifetime(&[1.0]).unwrap();
        assert!((f.ci_low_s - 2.0 / 7.377759).abs() < 1e-6);
        assert!((f.ci_high_s - 2.0 / 0.0506356).abs() < 1e-3);
    }

    #[test]
    fn recovers_lifetime() {
        let exp = Exp::new(1.0 / 17.0).unwrap();
        let mut rng = seeded(11);
        let d: Vec<f64> = (0..2000).map(|_| exp.sample(&mut rng)).collect();
        let f = fit_exponential_lifetime(&d).unwrap();
        assert!(f.contains(17.0));
        assert!(f.relative_half_width() < 0.05);
    }

    fn events(fields_mt: &[f64], sigma: f64, per: usize) -> Vec<JumpEvent> {
        let mut rng = seeded(5);
        let mut out = Vec::new();
        for (k, f) in fields_mt.iter().enumerate() {
            for _ in 0..per {
                let noise = if sigma > 0.0 { Normal::new(0.0, sigma).unwrap().sample(&mut rng) } else { 0.0 };
                out.push(JumpEvent {
                    field_t: (f + noise) * 1e-3,
                    sweep_index: 0,
                    direction: SweepDirection::Up,
                    true_m_i: NuclearLabel::from_index(k),
                });
            }
        }
        out
    }

    #[test]
    fn noiseless_events_fall_in_single_bins() {
        let fields = [-37.3, -12.4, 12.4, 37.3];
        let h = jump_histogram(&events(&fields, 0.0, 50), 0.5).unwrap();
        let occupied: Vec<&Vec<f64>> = h.bins.rows.iter().filter(|r| r[1] > 0.0).collect();
        assert_eq!(occupied.len(), 4);
        for (c, f) in h.clusters.iter().zip(fields) {
            assert!((c.mean_mt - f).abs() < 1e-9);
        }
    }

    #[test]
    fn mixture_recovers_cluster_means() {
        let fields = [-37.3, -12.4, 12.4, 37.3];
        let ev = events(&fields, 3.0, 2000);
        let h = jump_histogram(&ev, 0.5).unwrap();
        for (c, f) in h.clusters.iter().zip(fields) {
            assert!((c.mean_mt - f).abs() < 4.0 * 3.0 / 2000f64.sqrt(), "{c:?}");
            assert!((c.sigma_mt - 3.0).abs() < 0.2);
        }
        let correct = ev.iter().filter(|e| h.classify(e.field_t * 1e3) == e.true_m_i.index()).count();
        assert!(correct as f64 / ev.len() as f64 > 0.99);
        let total: f64 = h.bins.column("count").unwrap().iter().sum();
        assert_eq!(total as usize, ev.len());
    }
}
