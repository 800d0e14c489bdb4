use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use tracelab_core::spectral::{beta_grid, CheckOptions};
use tracelab_core::{build_group, center, character_table, gns, norm_pi, GroupAlgebraElement, Trace};

fn tables(c: &mut Criterion) {
    for name in ["sl(2,5)", "sl(2,7)", "aff(2,3)"] {
        let g = build_group(&name.parse().unwrap()).unwrap();
        c.bench_function(&format!("character table {name}"), |b| {
            b.iter(|| character_table(&g, g.classes()).unwrap())
        });
    }
}

fn gns_models(c: &mut Criterion) {
    let g = Arc::new(build_group(&"sl(2,3)".parse().unwrap()).unwrap());
    let delta = Trace::delta(g.clone());
    c.bench_function("gns regular sl(2,3)", |b| b.iter(|| gns(&delta).unwrap()));
    let model = gns(&delta).unwrap();
    let mut slow = c.benchmark_group("dense commutant");
    slow.sample_size(10);
    slow.bench_function("center regular sl(2,3)", |b| b.iter(|| center(&model).unwrap()));
    slow.finish();
    let a = GroupAlgebraElement::symmetric_uniform(g.as_ref(), g.generators()).unwrap();
    let betas = beta_grid(0.5, 20);
    let opts = CheckOptions { random_vectors: 100, ..CheckOptions::default() };
    c.bench_function("norm_pi regular sl(2,3)", |b| b.iter(|| norm_pi(&model, &a, &betas, &opts).unwrap()));
}

criterion_group!(benches, tables, gns_models);
criterion_main!(benches);
