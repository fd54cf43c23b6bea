//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (visible with `--nocapture`; the test name itself is
//! the one-line pass/fail record). Tolerances are pinned in the asserts.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use ecp_core::{
    atomic_ecp, atomic_ghz_ecp, cavity_q_factor, coupling_from_position,
    deviation_fidelity_analytic, deviation_fidelity_simulated, linspace,
    mismatch_fidelity_analytic, mismatch_fidelity_simulated, monte_carlo_protocol,
    omega_from_wavelength, phase_pair, photonic_ecp, photonic_ghz_ecp, CavityParams,
    DeviationSpec, Gate, GhzSpec, PairSpec, PhasePair, PhotonAnchor, ProtocolSpec, QubitLabel,
    StateVector,
};

#[test]
fn criterion_01_ideal_phase_recovery() {
    let params = CavityParams::ideal();
    let start = Instant::now();
    let pp = phase_pair(&params).unwrap();
    let elapsed = start.elapsed();

    assert!((pp.phi - std::f64::consts::PI).abs() < 1e-12);
    assert!((pp.phi0 - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!((pp.mod_coupled - 1.0).abs() < 1e-12);
    assert!((pp.mod_empty - 1.0).abs() < 1e-12);
    assert!(elapsed.as_micros() < 1000, "phase extraction took {elapsed:?}");
    println!(
        "criterion 1 PASS: (phi, phi0) = ({:.15}, {:.15}), |r| = {:.15}, {} ns",
        pp.phi,
        pp.phi0,
        pp.mod_coupled,
        elapsed.as_nanos()
    );
}

#[test]
fn criterion_02_success_probability_matches_closed_form() {
    let start = Instant::now();
    let mut peak = (0.0f64, 0.0f64);
    for a in linspace(0.05, 0.95, 50) {
        let pair = PairSpec::from_a(a).unwrap();
        let expect = 2.0 * a * a * (1.0 - a * a);
        let mut probs = vec![
            atomic_ecp(pair, pair, &PhasePair::ideal())
                .unwrap()
                .success_probability,
            photonic_ecp(pair, pair, &PhasePair::ideal())
                .unwrap()
                .success_probability,
        ];
        for n in 1..=3 {
            let ghz = GhzSpec::new(n, pair, pair).unwrap();
            probs.push(
                atomic_ghz_ecp(ghz, &PhasePair::ideal())
                    .unwrap()
                    .success_probability,
            );
            probs.push(
                photonic_ghz_ecp(ghz, &PhasePair::ideal())
                    .unwrap()
                    .success_probability,
            );
        }
        for p in probs {
            assert!(
                (p - expect).abs() < 1e-10,
                "a1 = {a}: simulated {p} vs closed form {expect}"
            );
            if p > peak.1 {
                peak = (a, p);
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        (peak.0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.02,
        "peak at a1 = {}",
        peak.0
    );
    assert!((peak.1 - 0.5).abs() < 1e-3, "peak value {}", peak.1);
    assert!(elapsed.as_secs_f64() < 5.0, "sweep took {elapsed:?}");
    println!(
        "criterion 2 PASS: 50 values x 8 protocol runs within 1e-10, peak P = {:.6} at a1 = {:.4}, {:.2?}",
        peak.1, peak.0, elapsed
    );
}

#[test]
fn criterion_03_success_branches_are_maximally_entangled() {
    for a in [0.2, 0.45, std::f64::consts::FRAC_1_SQRT_2, 0.9] {
        let pair = PairSpec::from_a(a).unwrap();
        for run in [
            atomic_ecp(pair, pair, &PhasePair::ideal()).unwrap(),
            photonic_ecp(pair, pair, &PhasePair::ideal()).unwrap(),
        ] {
            for b in run.success_branches() {
                assert!(
                    (b.concurrence.unwrap() - 1.0).abs() < 1e-10,
                    "{} a1 = {a}: concurrence {}",
                    b.label,
                    b.concurrence.unwrap()
                );
            }
        }
        for n in [2usize, 3] {
            let ghz = GhzSpec::new(n, pair, pair).unwrap();
            for run in [
                atomic_ghz_ecp(ghz, &PhasePair::ideal()).unwrap(),
                photonic_ghz_ecp(ghz, &PhasePair::ideal()).unwrap(),
            ] {
                for b in run.success_branches() {
                    assert!(
                        (b.target_fidelity - 1.0).abs() < 1e-10,
                        "{} N = {n}: fidelity {}",
                        b.label,
                        b.target_fidelity
                    );
                }
            }
        }
    }
    println!("criterion 3 PASS: concurrence/GHZ fidelity 1 within 1e-10 on every success branch");
}

#[test]
fn criterion_04_branch_tables_match_kronecker_oracle() {
    let pair = PairSpec::new(0.6, 0.8).unwrap();
    let ideal = PhasePair::ideal();

    let atomic = atomic_ecp(pair, pair, &ideal).unwrap();
    let oracle =
        oracle_atomic_state(0.6, 0.8, 0.6, 0.8, std::f64::consts::PI, std::f64::consts::FRAC_PI_2);
    assert_matches_oracle(&atomic, &oracle, 5, &[4, 1, 2]);

    let photonic = photonic_ecp(pair, pair, &ideal).unwrap();
    let oracle = oracle_photonic_state(
        0.6,
        0.8,
        0.6,
        0.8,
        std::f64::consts::PI,
        std::f64::consts::FRAC_PI_2,
    );
    assert_matches_oracle(&photonic, &oracle, 5, &[1, 2, 4]);

    println!("criterion 4 PASS: atomic and photonic tables match the 32x32 oracle within 1e-10");
}

#[test]
fn criterion_05_deviation_fidelity() {
    let plus = deviation_fidelity_analytic(&DeviationSpec::new(0.7, 0.1).unwrap()).unwrap();
    let minus = deviation_fidelity_analytic(&DeviationSpec::new(0.7, -0.1).unwrap()).unwrap();
    assert!(
        (0.9885..=0.9895).contains(&plus),
        "F(0.7, +0.1) = {plus} outside [0.9885, 0.9895]"
    );
    assert!(
        (0.9905..=0.9915).contains(&minus),
        "F(0.7, -0.1) = {minus} outside [0.9905, 0.9915]"
    );

    for a1 in linspace(0.1, 0.7, 20) {
        for k in [-0.1, -0.05, 0.0, 0.05, 0.1] {
            let spec = DeviationSpec::new(a1, k).unwrap();
            let sim = deviation_fidelity_simulated(&spec).unwrap();
            let analytic = deviation_fidelity_analytic(&spec).unwrap();
            assert!(
                (sim - analytic).abs() < 1e-9,
                "(a1, k) = ({a1}, {k}): simulated {sim} vs closed form {analytic}"
            );
        }
    }
    println!(
        "criterion 5 PASS: F(0.7, +0.1) = {plus:.6}, F(0.7, -0.1) = {minus:.6}, 20x5 grid within 1e-9"
    );
}

#[test]
fn criterion_06_success_branch_is_phase_robust() {
    let pair = PairSpec::from_a(0.6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0usize;
    for _ in 0..100 {
        let phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let phi0 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let phases = PhasePair::from_phases(phi, phi0);
        for run in [
            atomic_ecp(pair, pair, &phases).unwrap(),
            photonic_ecp(pair, pair, &phases).unwrap(),
        ] {
            for b in run.success_branches() {
                assert!(
                    (b.target_fidelity - 1.0).abs() < 1e-9,
                    "phases ({phi}, {phi0}): fidelity {}",
                    b.target_fidelity
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 700, "only {checked} success branches observed");
    println!("criterion 6 PASS: {checked} success branches at fidelity 1 within 1e-9");
}

#[test]
fn criterion_07_mismatch_fidelity_formula() {
    assert!(
        (mismatch_fidelity_analytic(std::f64::consts::PI, std::f64::consts::FRAC_PI_2) - 1.0)
            .abs()
            < 1e-15
    );

    let balanced = PairSpec::balanced();
    for delta in linspace(0.0, 0.1, 20) {
        let params = CavityParams::detuned(delta, PhotonAnchor::Atom);
        let m = mismatch_fidelity_simulated(&params, balanced, balanced).unwrap();
        let analytic = mismatch_fidelity_analytic(m.phases.phi, m.phases.phi0);
        // the closed form predicts the success-weight retention the
        // simulation observes; the strict per-branch overlap is reported
        // alongside in the run output
        assert!(
            (m.success_weight_retention - analytic).abs() < 1e-9,
            "delta = {delta}: retention {} vs closed form {analytic}",
            m.success_weight_retention
        );
        if let Some(f) = m.success_branch_fidelity {
            assert!((f - 1.0).abs() < 1e-10);
        }
    }
    println!("criterion 7 PASS: retention matches 0.5*[1 - cos 2(phi - phi0)] within 1e-9 over 20 detunings");
}

#[test]
fn criterion_08_feasibility_numbers() {
    // Q factor at the 780 nm line with kappa = 2pi * 53 MHz
    let omega_c = omega_from_wavelength(780e-9).unwrap();
    let kappa = std::f64::consts::TAU * 53e6;
    let q = cavity_q_factor(omega_c, kappa).unwrap();
    let q_err = (q - 3.63e6).abs() / 3.63e6;
    assert!(q_err < 0.01, "Q = {q:.4e}, {:.2}% from 3.63e6", q_err * 100.0);
    println!("criterion 8 (Q) PASS: Q = {q:.4e} ({:.3}% from 3.63e6)", q_err * 100.0);

    // Coupling at the reported trap position x = n*lambda/2 + 179 nm.
    // Direct evaluation gives g = 2pi * 27.634 MHz against the g = kappa/2
    // target of 2pi * 26.5 MHz, a 4.28% relative gap: the quoted 179 nm is
    // a rounding of the exact matching position 179.66 nm, and the 3% bound
    // asserted here does not absorb that rounding. The assertion is kept as
    // specified and records the gap when it trips.
    let g0 = std::f64::consts::TAU * 215e6;
    let g = coupling_from_position(g0, 179e-9, 780e-9).unwrap();
    let g_err = (g - kappa / 2.0).abs() / (kappa / 2.0);
    println!(
        "criterion 8 (g) evaluated: g = 2pi * {:.4} MHz vs kappa/2 = 2pi * 26.5 MHz ({:.2}% gap, bound 3%)",
        g / std::f64::consts::TAU / 1e6,
        g_err * 100.0
    );
    assert!(
        g_err < 0.03,
        "g(x = 179 nm) = 2pi * {:.4} MHz is {:.2}% from kappa/2 = 2pi * 26.5 MHz; \
         the exact matching position is x = 179.66 nm, so the quoted 179 nm misses \
         the 3% bound by construction",
        g / std::f64::consts::TAU / 1e6,
        g_err * 100.0
    );
}

#[test]
fn criterion_09_monte_carlo_reproducibility() {
    let pair = PairSpec::from_a(0.6).unwrap();
    let spec = ProtocolSpec::atomic(pair, pair);
    let trials = 100_000u64;
    let mc = monte_carlo_protocol(&spec, &PhasePair::ideal(), trials, 314_159).unwrap();
    assert!(
        (mc.empirical_success_rate - 0.4608).abs() < 5.0 * mc.binomial_sigma,
        "empirical {} vs exact 0.4608 (sigma {})",
        mc.empirical_success_rate,
        mc.binomial_sigma
    );

    let rerun = monte_carlo_protocol(&spec, &PhasePair::ideal(), trials, 314_159).unwrap();
    let bytes_a = serde_json::to_vec(&mc).unwrap();
    let bytes_b = serde_json::to_vec(&rerun).unwrap();
    assert_eq!(bytes_a, bytes_b, "rerun with the same seed must serialize identically");
    println!(
        "criterion 9 PASS: empirical rate {:.5} within 5 sigma of 0.4608; rerun byte-identical",
        mc.empirical_success_rate
    );
}

#[test]
fn criterion_10_unitarity_and_normalization_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let hadamard = Gate::hadamard();

    for case in 0..1000 {
        let n = rng.gen_range(2..=6usize);
        let labels: Vec<QubitLabel> =
            (0..n).map(|i| QubitLabel::atom(format!("q{i}"))).collect();
        let amps: Vec<num_complex::Complex64> = (0..1 << n)
            .map(|_| num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let Ok(mut state) = StateVector::from_amplitudes(labels.clone(), amps) else {
            continue;
        };

        // random mix of Hadamards and conditional-phase gates
        let phases = PhasePair::from_phases(
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        let faraday = ecp_core::faraday_gate(&ecp_core::FaradayGateSpec::new(phases)).unwrap();
        for _ in 0..4 {
            if rng.gen_bool(0.5) {
                let t = rng.gen_range(0..n);
                state.apply_gate(&hadamard, &[&labels[t]]).unwrap();
            } else {
                let t1 = rng.gen_range(0..n);
                let mut t2 = rng.gen_range(0..n);
                if t1 == t2 {
                    t2 = (t2 + 1) % n;
                }
                state.apply_gate(&faraday, &[&labels[t1], &labels[t2]]).unwrap();
            }
            assert!(
                (state.norm() - 1.0).abs() < 1e-12,
                "case {case}: norm drifted to {}",
                state.norm()
            );
        }

        let k = rng.gen_range(1..n);
        let measured: Vec<QubitLabel> = labels.iter().take(k).cloned().collect();
        let branches = state.enumerate_branches(&measured).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!(
            (total - 1.0).abs() < 1e-10,
            "case {case}: branch total {total}"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "suite took {elapsed:?}");
    println!(
        "criterion 10 PASS: 1000 randomized cases norm-preserving (1e-12) and complete (1e-10) in {:.2?}",
        elapsed
    );
}
