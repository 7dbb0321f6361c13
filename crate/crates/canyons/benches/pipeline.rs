//! Criterion benches comparing the data-parallel pipeline against the
//! sequential path. With the default `parallel` feature the two series
//! differ by the thread count (`threads = None` vs `threads = Some(1)`);
//! without the feature both fall back to sequential iteration.

use canyons::equivalence::inv2_equivalent;
use canyons::invariant::inv2;
use canyons::oracle::template_corpus;
use canyons::par::par_map;
use canyons::polar::polar_arcs;
use canyons::poly::{parse_poly, BivarPoly};
use canyons::scalar::Scalar;
use canyons::Options;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn sequential_opts() -> Options {
    let mut o = Options::default();
    o.threads = Some(1);
    o
}

fn parallel_opts() -> Options {
    Options::default()
}

fn corpus() -> Vec<BivarPoly> {
    let mut germs = template_corpus(24, 0xBE9C4);
    germs.push(parse_poly("x^3 - 3*x*y^10 + y^12", &Default::default()).unwrap());
    germs.push(parse_poly("x^3 + x^2*y^3 + y^9 + x*y^7", &Default::default()).unwrap());
    germs
}

fn bench_polar_stage(c: &mut Criterion) {
    let f = parse_poly("x^3 + x^2*y^3 + y^9 + x*y^7", &Default::default()).unwrap();
    c.bench_function("polar_arcs/two_parameter", |b| {
        b.iter(|| polar_arcs(black_box(&f), &sequential_opts()).unwrap())
    });
}

fn bench_corpus_invariants(c: &mut Criterion) {
    let germs = corpus();
    let mut group = c.benchmark_group("corpus_inv2");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        let opts = sequential_opts();
        b.iter(|| {
            par_map(germs.clone(), &opts, |f| inv2(&f, &opts).map(|i| i.packets.len()))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .unwrap()
        })
    });
    group.bench_function("parallel", |b| {
        let opts = parallel_opts();
        b.iter(|| {
            par_map(germs.clone(), &opts, |f| inv2(&f, &opts).map(|i| i.packets.len()))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .unwrap()
        })
    });
    group.finish();
}

fn bench_equivalence(c: &mut Criterion) {
    let f1 = parse_poly("x^3 + x^2*y^3 + y^9 + x*y^7", &Default::default()).unwrap();
    let f2 = f1.scale(&Scalar::from_int(2)).unwrap();
    let opts = sequential_opts();
    let i1 = inv2(&f1, &opts).unwrap();
    let i2 = inv2(&f2, &opts).unwrap();
    c.bench_function("inv2_equivalent/scaled_pair", |b| {
        b.iter(|| inv2_equivalent(black_box(&i1), black_box(&i2), &opts.tol(), &opts).unwrap())
    });
}

criterion_group!(benches, bench_polar_stage, bench_corpus_invariants, bench_equivalence);
criterion_main!(benches);
