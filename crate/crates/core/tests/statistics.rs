use tbqudit::readout::{
    fit_exponential_lifetime, initialize_state, jump_histogram, sweep_series, telegraph_trajectory, ElectronicState,
};
use tbqudit::rng::substream;
use tbqudit::spin::{analytic_crossing_field, analytic_crossings};
use tbqudit::{NuclearLabel, SpinSystemParams, SweepConfig};

const NO_RELAXATION: [f64; 4] = [f64::INFINITY; 4];

/// Kolmogorov–Smirnov distance between a sample and Exp(mean).
fn ks_exponential(sample: &[f64], mean: f64) -> f64 {
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, v)| {
            let cdf = 1.0 - (-v / mean).exp();
            (cdf - i as f64 / n).abs().max((cdf - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn dwell_times_pass_ks_test() {
    let t1 = [34.0, 17.0, 17.0, 34.0];
    let n = 10_000;
    let trace = telegraph_trajectory(&t1, NuclearLabel::PLUS_1_2, 2e6, &mut substream(3, 0));
    for (label, mean) in [(NuclearLabel::PLUS_3_2, 34.0), (NuclearLabel::PLUS_1_2, 17.0), (NuclearLabel::MINUS_3_2, 34.0)] {
        let dwells = trace.completed_dwells(label);
        assert!(dwells.len() >= n, "{label}: {} dwells", dwells.len());
        let d = ks_exponential(&dwells[..n], mean);
        // asymptotic critical value for p = 0.01
        let critical = 1.628 / (n as f64).sqrt();
        assert!(d < critical, "{label}: D = {d:.4} >= {critical:.4}");
    }
}

#[test]
fn lifetime_interval_has_nominal_coverage() {
    let t1 = [10.0, 10.0, 10.0, 10.0];
    let replications = 200;
    let mut covered = 0;
    for r in 0..replications {
        let trace = telegraph_trajectory(&t1, NuclearLabel::PLUS_1_2, 4e3, &mut substream(17, r));
        let dwells = trace.completed_dwells(NuclearLabel::PLUS_1_2);
        if fit_exponential_lifetime(&dwells).unwrap().contains(10.0) {
            covered += 1;
        }
    }
    let coverage = covered as f64 / replications as f64;
    assert!((coverage - 0.95).abs() <= 0.04, "coverage {coverage}");
}

#[test]
fn initialization_sweeps_are_geometric() {
    let crossings = analytic_crossings(&SpinSystemParams::default());
    let n = 10_000u64;
    for p in [0.1, 0.3, 0.7] {
        let cfg = SweepConfig { flip_probability: Some(p), jump_noise_mt: 0.0, ..SweepConfig::default() };
        let total: u64 = (0..n)
            .map(|k| {
                let out = initialize_state(
                    NuclearLabel::PLUS_3_2,
                    ElectronicState::Plus,
                    NuclearLabel::PLUS_3_2,
                    None,
                    &crossings,
                    &cfg,
                    &NO_RELAXATION,
                    100_000,
                    &mut substream(23, k),
                );
                assert!(out.success);
                out.sweeps
            })
            .sum();
        let mean = total as f64 / n as f64;
        assert!((mean * p - 1.0).abs() < 0.1, "p = {p}: mean {mean} vs {}", 1.0 / p);
    }
}

#[test]
fn histogram_means_converge_at_sigma_over_root_n() {
    let params = SpinSystemParams::default();
    let crossings = analytic_crossings(&params);
    let sigma = 3.0;
    let cfg = SweepConfig { flip_probability: Some(0.5), jump_noise_mt: sigma, ..SweepConfig::default() };
    let t1 = [2.0; 4];
    for sweeps in [4_000u64, 400_000] {
        let events = sweep_series(ElectronicState::Plus, NuclearLabel::PLUS_3_2, sweeps, &crossings, &cfg, &t1, &mut substream(31, sweeps));
        let h = jump_histogram(&events, 0.5).unwrap();
        for (c, x) in h.clusters.iter().zip(&crossings) {
            let n_k = c.weight * events.len() as f64;
            let offset = (c.mean_mt - analytic_crossing_field(&params.hyperfine, x.m_i) * 1e3).abs();
            let bound = 4.0 * sigma / n_k.sqrt();
            assert!(offset < bound, "{sweeps} sweeps, {}: offset {offset:.4} mT, bound {bound:.4} mT", x.m_i);
        }
    }
}
