//! Criterion benchmarks for the simulator's hot paths.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, Throughput};
use tdiqkd_core::game::{alice_basis, bob_basis, run_montecarlo};
use tdiqkd_core::gates::{circuit_fidelities, phi0};
use tdiqkd_core::ks::{builtin_rayset, colouring_search, ortho_structure};
use tdiqkd_core::linalg::joint_distribution;
use tdiqkd_core::protocol::{privacy_amplify, random_seed, reconcile, run_session, seed_len};
use tdiqkd_core::rng::{substream, Stream};
use tdiqkd_core::security::{bell_twirl, entropies, key_rate_root, spectrum_from_noise};
use tdiqkd_core::{NoiseSpec, SessionConfig};

pub fn linalg(c: &mut Criterion) {
    let set = builtin_rayset("peres33").unwrap();
    let (i, j) = ortho_structure(&set).pairs[0];
    let (v1, v2) = (set.rays()[i], set.rays()[j]);
    let (ba, bb) = (alice_basis(v1, v2).unwrap(), bob_basis(v1));
    let state = NoiseSpec::depolarizing(0.3).unwrap().source_state();
    c.bench_function("joint_distribution", |b| {
        b.iter(|| joint_distribution(black_box(&state), &ba, &bb))
    });
    c.bench_function("bell_twirl", |b| b.iter(|| bell_twirl(black_box(&state))));
    c.bench_function("circuit_fidelities", |b| b.iter(circuit_fidelities));
    let pure = phi0().projector();
    c.bench_function("eigenvalues", |b| b.iter(|| black_box(&pure).eigenvalues()));
}

pub fn game(c: &mut Criterion) {
    let set = builtin_rayset("peres33").unwrap();
    let mut g = c.benchmark_group("montecarlo");
    for rounds in [1_000u64, 10_000] {
        g.throughput(Throughput::Elements(rounds));
        g.bench_with_input(BenchmarkId::from_parameter(rounds), &rounds, |b, &n| {
            b.iter(|| run_montecarlo(&set, NoiseSpec::NONE, n, 1).unwrap())
        });
    }
    g.finish();
    c.bench_function("colouring_search/peres33", |b| {
        b.iter(|| colouring_search(black_box(&set)))
    });
}

pub fn protocol(c: &mut Criterion) {
    let mut g = c.benchmark_group("session");
    g.sample_size(10);
    for rounds in [900u64, 9000] {
        g.throughput(Throughput::Elements(rounds));
        g.bench_with_input(BenchmarkId::from_parameter(rounds), &rounds, |b, &n| {
            b.iter(|| run_session(&SessionConfig::new(n, 7)).unwrap())
        });
    }
    g.finish();

    let mut rng = substream(3, Stream::Alice);
    let alice = random_seed(2400, &mut rng);
    let mut bob = alice.clone();
    for i in (0..2400).step_by(97) {
        bob.flip(i);
    }
    c.bench_function("reconcile/2400", |b| {
        b.iter(|| reconcile(black_box(&alice), &bob, 4).unwrap())
    });
    let seed = random_seed(seed_len(1000, 2400), &mut rng);
    c.bench_function("toeplitz/2400->1000", |b| {
        b.iter(|| privacy_amplify(black_box(&alice), 1000, &seed).unwrap())
    });
}

pub fn security(c: &mut Criterion) {
    let spec = spectrum_from_noise(0.2, 1.5).unwrap();
    c.bench_function("entropies", |b| b.iter(|| entropies(black_box(&spec))));
    c.bench_function("key_rate_root", |b| b.iter(key_rate_root));
}
