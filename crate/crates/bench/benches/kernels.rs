use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tamp_core::amp::onsager_b;
use tamp_core::ensembles::{generate, EnsembleKind, EnsembleSpec};
use tamp_core::freeprob::CumulantTable;
use tamp_core::gaussian::Polynomial;
use tamp_core::graphpoly::{eval_w_uniform, eval_z_uniform};
use tamp_core::state_evolution::se_orthogonal;
use tamp_core::Diagram;

fn goe(n: usize) -> tamp_core::Matrix {
    generate(&EnsembleSpec::new(EnsembleKind::Goe, n, 1)).unwrap().values
}

fn graph_polynomials(c: &mut Criterion) {
    let a = goe(256);
    let mut g = c.benchmark_group("eval_w");
    for name in ["cycle4", "theta", "bowtie", "star3"] {
        let d = Diagram::parse(name).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(name), &d, |b, d| b.iter(|| eval_w_uniform(black_box(d), &a).unwrap()));
    }
    g.finish();
    let theta = Diagram::theta();
    c.bench_function("eval_z/theta", |b| b.iter(|| eval_z_uniform(black_box(&theta), &a).unwrap()));
}

fn onsager(c: &mut Criterion) {
    let a = goe(128);
    let fps: Vec<Vec<f64>> = (0..4).map(|t| (0..128).map(|i| ((i * 7 + t) % 5) as f64 - 2.0).collect()).collect();
    let mut g = c.benchmark_group("onsager_b");
    for window in 1..=3 {
        g.bench_with_input(BenchmarkId::from_parameter(window), &window, |b, &w| {
            b.iter(|| onsager_b(&a, black_box(&fps), 3 - w, 3).unwrap())
        });
    }
    g.finish();
}

fn ensembles(c: &mut Criterion) {
    let mut g = c.benchmark_group("generate");
    g.sample_size(10);
    for (kind, n) in [(EnsembleKind::Goe, 512), (EnsembleKind::Rom, 512), (EnsembleKind::Hadamard, 1024), (EnsembleKind::Dst, 1024)] {
        let spec = EnsembleSpec::new(kind, n, 3);
        g.bench_function(format!("{}/{n}", spec.kind.name()), |b| b.iter(|| generate(black_box(&spec)).unwrap()));
    }
    g.finish();
}

fn state_evolution(c: &mut Criterion) {
    let fs = vec![Polynomial::identity(), Polynomial::cube_hermite(), Polynomial::relu_poly3(), Polynomial::cube_hermite(), Polynomial::relu_poly3()];
    let kappa = CumulantTable::preset("rom", 10).unwrap();
    c.bench_function("se_orthogonal/T5", |b| b.iter(|| se_orthogonal(black_box(&fs), &kappa, 5).unwrap()));
}

criterion_group!(benches, graph_polynomials, onsager, ensembles, state_evolution);
criterion_main!(benches);
