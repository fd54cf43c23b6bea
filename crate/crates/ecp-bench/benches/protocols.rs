use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ecp_core::{
    atomic_ecp, atomic_ghz_ecp, faraday_gate, phase_pair, photonic_ecp, CavityParams,
    FaradayGateSpec, Gate, GhzSpec, PairSpec, PhasePair, QubitLabel, StateVector,
};

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<QubitLabel> = (0..n).map(|i| QubitLabel::atom(format!("q{i}"))).collect();
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(labels, amps).unwrap()
}

fn bench_phase_extraction(c: &mut Criterion) {
    let params = CavityParams::detuned(0.07, ecp_core::PhotonAnchor::Atom);
    c.bench_function("phase_pair_detuned", |b| {
        b.iter(|| phase_pair(black_box(&params)).unwrap())
    });
}

fn bench_gate_application(c: &mut Criterion) {
    let gate = faraday_gate(&FaradayGateSpec::new(PhasePair::ideal())).unwrap();
    let hadamard = Gate::hadamard();
    let base = random_state(10, 7);
    let labels = base.labels().to_vec();

    c.bench_function("faraday_gate_10_qubits", |b| {
        b.iter_batched(
            || base.clone(),
            |mut s| s.apply_gate(&gate, &[&labels[0], &labels[9]]).unwrap(),
            criterion::BatchSize::SmallInput,
        )
    });
    c.bench_function("hadamard_10_qubits", |b| {
        b.iter_batched(
            || base.clone(),
            |mut s| s.apply_gate(&hadamard, &[&labels[4]]).unwrap(),
            criterion::BatchSize::SmallInput,
        )
    });
}

fn bench_branch_enumeration(c: &mut Criterion) {
    let state = random_state(10, 11);
    let measured: Vec<QubitLabel> = state.labels().iter().take(3).cloned().collect();
    c.bench_function("enumerate_branches_10_qubits_3_measured", |b| {
        b.iter(|| state.enumerate_branches(black_box(&measured)).unwrap())
    });
}

fn bench_protocols(c: &mut Criterion) {
    let pair = PairSpec::from_a(0.6).unwrap();
    let ideal = PhasePair::ideal();

    c.bench_function("atomic_ecp", |b| {
        b.iter(|| atomic_ecp(black_box(pair), black_box(pair), &ideal).unwrap())
    });
    c.bench_function("photonic_ecp", |b| {
        b.iter(|| photonic_ecp(black_box(pair), black_box(pair), &ideal).unwrap())
    });
    let ghz = GhzSpec::new(3, pair, pair).unwrap();
    c.bench_function("atomic_ghz_ecp_n3", |b| {
        b.iter(|| atomic_ghz_ecp(black_box(ghz), &ideal).unwrap())
    });
}

criterion_group!(
    benches,
    bench_phase_extraction,
    bench_gate_application,
    bench_branch_enumeration,
    bench_protocols
);
criterion_main!(benches);
