use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use neckflow::diagnostics::{
    entropy_lower_bound, noncollapse_alpha, EntropySearch, GeneratingCurve, Surface,
};
use neckflow::flow::PolarProfile;
use neckflow::{CylinderParams, Execution};

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn noncollapse(c: &mut Criterion) {
    let curve = GeneratingCurve::from_polar(
        &PolarProfile::from_fn(3, 800, 0.0, |phi| 1.0 + 0.2 * phi.cos().powi(2)).unwrap(),
    );
    let mut g = c.benchmark_group("noncollapse_alpha");
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, exec| {
            b.iter(|| noncollapse_alpha(black_box(&curve), *exec).unwrap())
        });
    }
    g.finish();
}

fn entropy(c: &mut Criterion) {
    let params = CylinderParams::new(2, 1).unwrap();
    let surface = Surface::Cylinder {
        params,
        radius: params.rho(),
    };
    let search = EntropySearch {
        rounds: 3,
        ..EntropySearch::default()
    };
    let mut g = c.benchmark_group("entropy_lower_bound");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, exec| {
            b.iter(|| entropy_lower_bound(black_box(surface), &search, *exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, noncollapse, entropy);
criterion_main!(benches);
