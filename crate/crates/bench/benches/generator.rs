use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use eprb_core::{generate_pair, ModelParams, Simulator, StreamKey, UnitVector3};

fn pair_generation(c: &mut Criterion) {
    let params = ModelParams::same_bin(2.5e-4).unwrap();
    let (a1, a2) = (UnitVector3::X, UnitVector3::in_plane_deg(45.0));
    let key = StreamKey::new(1);
    c.bench_function("generate_pair", |b| {
        b.iter_batched_ref(|| key.pair_rng(0), |rng| generate_pair(rng, &a1, &a2, &params), BatchSize::SmallInput)
    });

    let n = 1u64 << 18;
    let mut group = c.benchmark_group("simulator");
    group.throughput(Throughput::Elements(n));
    for workers in [1usize, 4] {
        let sim = Simulator::new(workers).unwrap();
        group.bench_function(format!("tally/{workers}-workers"), |b| b.iter(|| sim.tally(key, a1, a2, &params, n)));
    }
    group.finish();
}

criterion_group!(benches, pair_generation);
criterion_main!(benches);
