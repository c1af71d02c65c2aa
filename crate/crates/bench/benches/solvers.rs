use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use magqrm_bench::{ground_with_one_boson, three_qubits};
use magqrm_core::linalg::eigh;
use magqrm_core::spectrum::{linspace, sweep_with, three_excitation_window};
use magqrm_core::{
    build_hamiltonian, evolve_with, find_gap_with, geff3_general, geff5_diagrams, Convergence,
    EvolveOptions, FifthOrderMode, GapOptions, LevelSelector, PertInputs,
};

fn hamiltonian(c: &mut Criterion) {
    let p = three_qubits(3.0, 0.1, 10);
    c.bench_function("build_hamiltonian n_max=10", |b| {
        b.iter(|| build_hamiltonian(black_box(&p)))
    });
    let h = build_hamiltonian(&p).unwrap();
    c.bench_function("eigh dim=80", |b| b.iter(|| eigh(black_box(&h))));
}

fn spectra(c: &mut Criterion) {
    let p = three_qubits(3.0, 0.1, 10);
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    group.bench_function("sweep 101 points", |b| {
        b.iter(|| sweep_with(&p, (0.5, 3.5), 101, 16, &Convergence::disabled()))
    });
    let opts = GapOptions {
        convergence: Convergence::disabled(),
        ..GapOptions::default()
    };
    let sel = LevelSelector::all_qubits(&p.space);
    group.bench_function("find_gap three-excitation", |b| {
        b.iter(|| find_gap_with(&p, three_excitation_window(&p), &sel, &opts))
    });
    group.finish();
}

fn dynamics(c: &mut Criterion) {
    let p = three_qubits(2.985, 0.1, 10);
    let times = linspace(0.0, 4e5, 2048);
    let opts = EvolveOptions {
        target: None,
        convergence: Convergence::disabled(),
    };
    let init = ground_with_one_boson();
    let mut group = c.benchmark_group("dynamics");
    group.sample_size(10);
    group.bench_function("evolve 2048 times", |b| {
        b.iter(|| evolve_with(&p, &init, &times, &opts))
    });
    group.finish();
}

fn perturbation(c: &mut Criterion) {
    let inp = PertInputs {
        omega0: 3.0,
        omega_q: [0.9, 1.0, 1.1],
        g_r: [0.1, 0.11, 0.09],
        g_cr: [0.05, 0.1, 0.07],
    };
    c.bench_function("geff3_general", |b| {
        b.iter(|| geff3_general(black_box(&inp)))
    });
    let res = PertInputs::resonant(0.1, 0.1, 1.0);
    c.bench_function("geff5_diagrams", |b| {
        b.iter(|| geff5_diagrams(black_box(&res), FifthOrderMode::Anchored))
    });
}

criterion_group!(benches, hamiltonian, spectra, dynamics, perturbation);
criterion_main!(benches);
