use std::hint::black_box;

use bellsym_core::random::{haar_unitary, random_density_matrix, random_hermitian, stream_rng};
use bellsym_core::symmetry::{symmetric_probability, ConstraintPattern, SYMMETRY_TOL};
use bellsym_core::{
    apply_kraus, canonical_kraus, decoherence_factor, maximize_symmetric_probability,
    monte_carlo_dephasing, random_bath, BellState, ChannelParams, NoiseTrajectoryConfig,
    OptimizerConfig, UnitaryMixer,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn linalg(c: &mut Criterion) {
    let mut g = c.benchmark_group("hermitian_eig");
    for dim in [4usize, 16] {
        let h = random_hermitian(&mut stream_rng(1, 0), dim, 1.0);
        g.bench_with_input(BenchmarkId::from_parameter(dim), &h, |b, h| {
            b.iter(|| black_box(h).hermitian_eig().unwrap())
        });
    }
    g.finish();

    c.bench_function("haar_unitary_4", |b| {
        let mut rng = stream_rng(2, 0);
        b.iter(|| haar_unitary(&mut rng, 4))
    });
}

fn channel(c: &mut Criterion) {
    let set = canonical_kraus(0.37).unwrap();
    let rho = random_density_matrix(&mut stream_rng(3, 0));
    c.bench_function("apply_kraus_canonical", |b| {
        b.iter(|| apply_kraus(black_box(&set), black_box(&rho)).unwrap())
    });

    let params = ChannelParams::identical(1.0, 1.0).unwrap();
    let cfg = NoiseTrajectoryConfig {
        n_trajectories: 4096,
        dt: 0.01,
        ..Default::default()
    };
    c.bench_function("monte_carlo_4096_trajectories", |b| {
        b.iter(|| monte_carlo_dephasing(&rho, &params, &cfg).unwrap())
    });
}

fn symmetry(c: &mut Criterion) {
    let mixer = UnitaryMixer::new(haar_unitary(&mut stream_rng(4, 0), 4)).unwrap();
    c.bench_function("symmetric_probability_b3", |b| {
        b.iter(|| {
            symmetric_probability(BellState::B3, 0.0, black_box(&mixer), SYMMETRY_TOL).unwrap()
        })
    });

    let pattern = ConstraintPattern::leading(1).unwrap();
    let cfg = OptimizerConfig {
        budget: 2_000,
        restarts: 2,
        ..Default::default()
    };
    let mut g = c.benchmark_group("optimizer");
    g.sample_size(10);
    g.bench_function("single_row_budget_2000", |b| {
        b.iter(|| maximize_symmetric_probability(BellState::B3, 0.0, &pattern, &cfg).unwrap())
    });
    g.finish();
}

fn spinbath(c: &mut Criterion) {
    let mut g = c.benchmark_group("decoherence_factor");
    for n in [20usize, 1000] {
        let bath = random_bath(n, 5, false).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &bath, |b, bath| {
            b.iter(|| decoherence_factor(bath, black_box(3.7)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, linalg, channel, symmetry, spinbath);
criterion_main!(benches);
