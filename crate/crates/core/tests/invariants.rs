use nalgebra::Matrix4;
use proptest::prelude::*;
use tbqudit::dynamics::{
    evolve_labframe_with, evolve_open, evolve_unitary, evolve_unitary_at, rwa_propagator, LabFrameOptions,
};
use tbqudit::readout::{sweep_series, telegraph_trajectory, ElectronicState};
use tbqudit::rng::seeded;
use tbqudit::spin::{build_hamiltonian, find_avoided_crossings, DEFAULT_WINDOW_T};
use tbqudit::{
    DecoherenceParams, EvolutionMethod, HyperfineParams, NuclearLabel, PulseSegment, PulseSequence, PulseTone,
    QuditLevels, QuditState, SpinSystemParams, SweepConfig, Transition, C64,
};

fn tone_strategy() -> impl Strategy<Value = Option<(f64, f64, f64)>> {
    prop::option::of((-2e-3..2e-3f64, 0.0..10.0f64, -3.2..3.2f64))
}

fn segment_strategy() -> impl Strategy<Value = PulseSegment> {
    (prop::array::uniform3(tone_strategy()), 0.0..1e-6f64).prop_map(|(tones, duration)| {
        let l = QuditLevels::default();
        let tones = Transition::ALL
            .iter()
            .zip(tones)
            .filter_map(|(&t, params)| {
                params.map(|(df, rabi, phase)| PulseTone { freq_ghz: l.resonance_ghz(t) + df, rabi_mhz: rabi, phase_rad: phase, target: t })
            })
            .collect();
        PulseSegment::new(tones, duration)
    })
}

fn sequence_strategy() -> impl Strategy<Value = PulseSequence> {
    prop::collection::vec(segment_strategy(), 1..4).prop_map(PulseSequence::new)
}

/// Frame phases at absolute times up to 1 ms span ~1e7 GHz cycles, so
/// entries carry ~1e-8 of floating-point phase error.
const PHASE_TOL: f64 = 1e-7;

fn max_diff(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spin_hamiltonian_is_hermitian(b in -0.1..0.1f64, tunnel in 0.0..2e5f64, nuclear in any::<bool>()) {
        let params = SpinSystemParams {
            hyperfine: HyperfineParams { tunnel_splitting_hz: tunnel, ..Default::default() },
            ..Default::default()
        };
        let h = build_hamiltonian(&params, b, nuclear).unwrap();
        prop_assert!(h.hermitian_error() < 1e-12);
    }

    #[test]
    fn rwa_propagator_is_unitary(seq in sequence_strategy(), t0 in 0.0..1e-3f64) {
        let u = rwa_propagator(&seq, &QuditLevels::default(), t0).unwrap();
        prop_assert!(max_diff(&(u.adjoint() * u), &Matrix4::identity()) < 1e-10);
    }

    #[test]
    fn propagators_compose(a in sequence_strategy(), b in sequence_strategy(), t0 in 0.0..1e-6f64, start in 0usize..4) {
        let l = QuditLevels::default();
        let s = QuditState::basis(start);
        let whole = evolve_unitary_at(&s, &a.clone().then(&b), &l, EvolutionMethod::Rwa, t0).unwrap();
        let mid = evolve_unitary_at(&s, &a, &l, EvolutionMethod::Rwa, t0).unwrap();
        let split = evolve_unitary_at(&mid, &b, &l, EvolutionMethod::Rwa, t0 + a.duration_s()).unwrap();
        prop_assert!(whole.distance(&split) < 1e-10);
    }

    #[test]
    fn propagators_compose_late(a in sequence_strategy(), b in sequence_strategy(), t0 in 0.0..1e-3f64) {
        let l = QuditLevels::default();
        let whole = rwa_propagator(&a.clone().then(&b), &l, t0).unwrap();
        let ua = rwa_propagator(&a, &l, t0).unwrap();
        let ub = rwa_propagator(&b, &l, t0 + a.duration_s()).unwrap();
        prop_assert!(max_diff(&whole, &(ub * ua)) < PHASE_TOL);
    }

    /// A resonant segment followed by its φ → φ+π mirror leaves only free
    /// precession, so the rotating-frame state returns to the start.
    #[test]
    fn phase_inverted_resonant_pulse_undoes_drive(
        rabi in prop::array::uniform3(0.0..10.0f64),
        phase in prop::array::uniform3(-3.2..3.2f64),
        duration in 0.0..1e-6f64,
        t0 in 0.0..1e-3f64,
        start in 0usize..4,
    ) {
        let l = QuditLevels::default();
        let tones = Transition::ALL.iter().map(|&t| PulseTone::resonant(&l, t, rabi[t.index()], phase[t.index()])).collect();
        let seg = PulseSegment::new(tones, duration);
        let there_and_back = PulseSequence::new(vec![seg.clone(), seg.phase_inverted()]);
        let u = rwa_propagator(&there_and_back, &l, t0).unwrap();
        let free = rwa_propagator(&PulseSequence::single(PulseSegment::delay(2.0 * duration)), &l, t0).unwrap();
        prop_assert!(max_diff(&u, &free) < PHASE_TOL);
        let s = QuditState::basis(start);
        let back = evolve_unitary_at(&s, &there_and_back, &l, EvolutionMethod::Rwa, 0.0).unwrap();
        prop_assert!((back.overlap(&s) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lindblad_preserves_trace_and_positivity(
        seq in sequence_strategy(),
        t2 in prop::array::uniform3(1e-7..1e-3f64),
        t1 in prop::array::uniform4(1e-6..1.0f64),
        start in 0usize..4,
    ) {
        let dec = DecoherenceParams { t2star_s: t2, t1_s: t1 };
        let out = evolve_open(&QuditState::basis(start), &seq, &QuditLevels::default(), &dec).unwrap();
        let rho = out.density();
        prop_assert!((out.trace() - 1.0).abs() < 1e-10);
        prop_assert!(max_diff(&rho, &rho.adjoint()) < 1e-12);
        let min_eig = rho.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min_eig > -1e-10, "min eigenvalue {min_eig}");
    }

    #[test]
    fn unitary_evolution_keeps_norm(seq in sequence_strategy(), start in 0usize..4) {
        let out = evolve_unitary(&QuditState::basis(start), &seq, &QuditLevels::default(), EvolutionMethod::Rwa).unwrap();
        let total: f64 = out.populations().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweeps_are_deterministic_by_seed(seed in any::<u64>(), flip in 0.05..1.0f64) {
        let crossings = tbqudit::spin::analytic_crossings(&SpinSystemParams::default());
        let cfg = SweepConfig { flip_probability: Some(flip), ..SweepConfig::default() };
        let t1 = DecoherenceParams::measured().t1_s;
        let run = || sweep_series(ElectronicState::Plus, NuclearLabel::PLUS_3_2, 200, &crossings, &cfg, &t1, &mut seeded(seed));
        prop_assert_eq!(run(), run());
        let trace = || telegraph_trajectory(&t1, NuclearLabel::MINUS_1_2, 1e3, &mut seeded(seed));
        prop_assert_eq!(trace(), trace());
    }
}

fn rwa_and_lab(target: usize, rabi: f64, fraction: f64, phase: f64, start: usize) -> ([f64; 4], [f64; 4]) {
    let l = QuditLevels::default();
    let t = Transition::from_index(target);
    let seg = PulseSegment::new(vec![PulseTone::resonant(&l, t, rabi, phase)], fraction / (rabi * 1e6));
    let seq = PulseSequence::single(seg);
    let s = QuditState::basis(start);
    let a = evolve_unitary(&s, &seq, &l, EvolutionMethod::Rwa).unwrap().populations();
    let b = evolve_labframe_with(&s, &seq, &l, 0.0, &LabFrameOptions::default()).unwrap().populations();
    (a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Counter-rotating micro-motion shifts populations by at most about
    /// Ω/(2ν) at a generic pulse end; Bloch–Siegert terms add O((Ω/ν)²).
    #[test]
    fn rwa_matches_lab_frame_to_micromotion_bound(
        target in 0usize..3,
        rabi in 1.0..49.0f64,
        fraction in 0.05..1.0f64,
        phase in -3.2..3.2f64,
        start in 0usize..4,
    ) {
        let (a, b) = rwa_and_lab(target, rabi, fraction, phase, start);
        let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let nu_min = QuditLevels::default().resonance_ghz(Transition::T01) * 1e3;
        prop_assert!(d <= 0.5 * rabi / nu_min + 1e-4, "Ω = {rabi} MHz: RWA {a:?} vs lab {b:?}");
    }

    #[test]
    fn rwa_matches_lab_frame_to_1e3_for_weak_drive(
        target in 0usize..3,
        rabi in 0.5..2.45f64,
        fraction in 0.05..1.0f64,
        phase in -3.2..3.2f64,
        start in 0usize..4,
    ) {
        let (a, b) = rwa_and_lab(target, rabi, fraction, phase, start);
        let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(d < 1e-3, "RWA {a:?} vs lab {b:?}");
    }

    #[test]
    fn crossings_track_the_hyperfine_constant(scale in 0.8..1.2f64) {
        let params = SpinSystemParams {
            hyperfine: HyperfineParams { a_hf: HyperfineParams::default().a_hf * scale, ..Default::default() },
            ..Default::default()
        };
        let found = find_avoided_crossings(&params, DEFAULT_WINDOW_T).unwrap();
        prop_assert_eq!(found.len(), 4);
        for c in found {
            let analytic = tbqudit::spin::analytic_crossing_field(&params.hyperfine, c.m_i);
            prop_assert!((c.field_t - analytic).abs() < 1e-4);
        }
    }
}
