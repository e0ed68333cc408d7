use std::sync::Arc;

use chaingeo_core::{blocking, build_algebra, chains, Geometry, ProjectiveLine};
use criterion::{criterion_group, criterion_main, Criterion};

fn projective_line(c: &mut Criterion) {
    let alg = Arc::new(build_algebra("gf(4)[t]/(t^2) over gf(2)").unwrap());
    c.bench_function("projective line gf(4)[t]/(t^2)", |b| {
        b.iter(|| ProjectiveLine::new(alg.clone()).unwrap())
    });
}

fn chain_enumeration(c: &mut Criterion) {
    let alg = Arc::new(build_algebra("gf(3) x gf(3)").unwrap());
    let line = ProjectiveLine::new(alg.clone()).unwrap();
    let templates = chains::conjugate_templates(&alg);
    c.bench_function("chains gf(3) x gf(3)", |b| {
        b.iter(|| chains::enumerate_chains(&line, &templates).unwrap())
    });
}

fn minimum_blocking(c: &mut Criterion) {
    let geom = Geometry::from_spec("gf(9)/gf(3)").unwrap();
    c.bench_function("min blocking gf(9)/gf(3)", |b| {
        b.iter(|| blocking::min_blocking(&geom, None).unwrap())
    });
}

criterion_group!(benches, projective_line, chain_enumeration, minimum_blocking);
criterion_main!(benches);
