//! End-to-end timings: the full analysis per catalog class, the reading
//! construction and forest realization on the largest class, and diagram
//! comparison.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use wildrep_cli::catalog;
use wildrep_cli::pipeline::analyze_source;
use wildrep_core::{diagram, diagram_eq, readings, realize};

fn analyze(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    for entry in &catalog::CATALOG {
        group.bench_function(entry.name, |b| {
            b.iter(|| analyze_source(black_box(entry.source), false).unwrap())
        });
    }
    group.finish();
}

fn readings_of_the_largest_class(c: &mut Criterion) {
    let pvi = catalog::class(catalog::get("PVI").unwrap());
    c.bench_function("readings PVI", |b| {
        b.iter(|| readings(black_box(&pvi)).unwrap())
    });
}

fn realize_a_reading(c: &mut Criterion) {
    let pvi = catalog::class(catalog::get("PVI").unwrap());
    let r = readings(&pvi).unwrap();
    c.bench_function("realize PVI generic", |b| {
        b.iter(|| realize(black_box(&r.generic.forest)).unwrap())
    });
}

fn compare_diagrams(c: &mut Criterion) {
    let piii2 = catalog::class(catalog::get("PIII2").unwrap());
    let standard = diagram(&piii2).unwrap();
    let r = readings(&piii2).unwrap();
    let realized = diagram(&realize(&r.generic.forest).unwrap()).unwrap();
    assert!(diagram_eq(&standard, &realized));
    c.bench_function("diagram_eq PIII2", |b| {
        b.iter(|| diagram_eq(black_box(&standard), black_box(&realized)))
    });
}

criterion_group!(
    benches,
    analyze,
    readings_of_the_largest_class,
    realize_a_reading,
    compare_diagrams
);
criterion_main!(benches);
