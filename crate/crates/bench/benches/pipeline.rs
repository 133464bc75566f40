use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lonely_core::bounds::{self, BoundSpec};
use lonely_core::{exact, lpcore, trigpoly, LinearProgram, Relation, SpeedVector};

fn sv(s: &[u64]) -> SpeedVector {
    SpeedVector::new(s.to_vec()).unwrap()
}

fn gap(c: &mut Criterion) {
    let mut g = c.benchmark_group("gap");
    for s in [&[1u64, 2, 3, 5][..], &[3, 11, 17, 29, 41], &[7, 19, 23, 31, 44, 50]] {
        let v = sv(s);
        g.bench_with_input(BenchmarkId::from_parameter(&v), &v, |b, v| b.iter(|| exact::gap(v)));
    }
    g.finish();
}

fn rigorous_min(c: &mut Criterion) {
    let mut g = c.benchmark_group("rigorous_min");
    for m in [8usize, 32, 100] {
        let f = trigpoly::fejer(m).unwrap();
        g.bench_with_input(BenchmarkId::new("fejer", m), &f, |b, f| b.iter(|| trigpoly::rigorous_min(f, 0.0, 0.5)));
    }
    g.finish();
}

/// Dense packing program: maximize the sum of x subject to random-looking rows.
fn packing(n: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(vec![-1.0; n]);
    for i in 0..2 * n {
        let row = (0..n).map(|j| 1.0 + ((i * 31 + j * 17) % 13) as f64).collect();
        lp.add_constraint(row, Relation::Le, 100.0);
    }
    lp
}

fn simplex(c: &mut Criterion) {
    let mut g = c.benchmark_group("simplex");
    for n in [20usize, 60] {
        let lp = packing(n);
        g.bench_with_input(BenchmarkId::new("packing", n), &lp, |b, lp| b.iter(|| lpcore::solve(lp)));
    }
    g.finish();
}

fn bound(c: &mut Criterion) {
    let mut g = c.benchmark_group("bound");
    g.sample_size(10);
    let v = sv(&[3, 11, 17, 29, 41]);
    g.bench_function("upper", |b| b.iter(|| bounds::compute(&BoundSpec::upper(v.clone()))));
    g.bench_function("lower", |b| b.iter(|| bounds::compute(&BoundSpec::lower(v.clone()))));
    let q = exact::gap(&v).q;
    g.bench_function("lower_q", |b| b.iter(|| bounds::compute(&BoundSpec::lower_q(v.clone(), q))));
    g.finish();
}

criterion_group!(benches, gap, rigorous_min, simplex, bound);
criterion_main!(benches);
