use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pluot_bench::uniform_values;
use pluot_core::{ComputeBackend, CpuBackend, WorkgroupBackend};

fn histogram(c: &mut Criterion) {
    let values = uniform_values(1_000_000, 1);
    let backends: [(&str, Box<dyn ComputeBackend>); 2] = [
        ("cpu", Box::new(CpuBackend)),
        ("workgroup", Box::new(WorkgroupBackend::default())),
    ];
    let mut g = c.benchmark_group("histogram 1M");
    for (name, backend) in &backends {
        g.bench_function(format!("{name} extent"), |b| {
            b.iter(|| backend.extent(black_box(&values)))
        });
        g.bench_function(format!("{name} bin_counts 64"), |b| {
            b.iter(|| backend.bin_counts(black_box(&values), 0.0, 1.0, 64))
        });
    }
    g.finish();
}

criterion_group!(benches, histogram);
criterion_main!(benches);
