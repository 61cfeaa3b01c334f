use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qubo_linsolve::anneal::sample_with;
use qubo_linsolve::fixtures;
use qubo_linsolve::landscape::gray_projection_with;
use qubo_linsolve::linear::invert_matrix_with;
use qubo_linsolve::qubo::{brute_force_solve_with, ground_states};
use qubo_linsolve::{build_linear_qubo, BinaryEncoding, Execution, ProblemFile, SamplerConfig, Solver};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn fixture_model(name: &str) -> qubo_linsolve::QuboModel {
    let problem = ProblemFile::parse(fixtures::get(name).unwrap()).unwrap().into_problem(2.0, 1.0).unwrap();
    build_linear_qubo(&problem).scale_by_max_coupling().0
}

fn enumeration(c: &mut Criterion) {
    let model = fixture_model("2f");
    let mut group = c.benchmark_group("brute_force_4096_states");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| brute_force_solve_with(black_box(&model), 24, exec).unwrap()));
    }
    group.finish();

    let mut group = c.benchmark_group("gray_projection_4096_states");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| gray_projection_with(black_box(&model), exec).unwrap()));
    }
    group.finish();
}

fn ground_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("ground_states");
    group.sample_size(10);
    for n in [16usize, 20] {
        let mut model = qubo_linsolve::QuboModel::with_weights((0..n).map(|i| (i as f64 * 0.37).sin()).collect());
        for r in 0..n {
            for s in r + 1..n {
                model.set_coupling(r, s, ((r * n + s) as f64 * 0.11).cos() * 0.5).unwrap();
            }
        }
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &model, |b, m| {
                b.iter(|| ground_states(m, 24, 0.0, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn annealing(c: &mut Criterion) {
    let model = fixture_model("1a");
    let config = SamplerConfig { sweeps: 200, ..SamplerConfig::with_reads(256, 1) };
    let mut group = c.benchmark_group("anneal_256_reads");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| sample_with(black_box(&model), &config, exec).unwrap()));
    }
    group.finish();
}

fn inversion(c: &mut Criterion) {
    let m = ProblemFile::parse(fixtures::get("2d").unwrap()).unwrap().matrix;
    let mut group = c.benchmark_group("invert_3x3");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| invert_matrix_with(black_box(&m), BinaryEncoding::default(), &Solver::BruteForce, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, ground_search, annealing, inversion);
criterion_main!(benches);
