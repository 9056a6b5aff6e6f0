use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use zcz_core::qscdma::FamilySource;
use zcz_core::{
    build_multiple_zcz, certify_family, example1, pccf, simulate_ber, verify_zcz, ConstructionParams, SimulationConfig,
    SnrAxis,
};

fn psi(c: &mut Criterion) {
    let mut group = c.benchmark_group("psi");
    for (m, k) in [(4, 2), (6, 3), (8, 4)] {
        let p = ConstructionParams::with_defaults(2, m, k, 1).unwrap();
        let f = p.sequence_function(0, 0).unwrap();
        group.throughput(Throughput::Elements(p.sequence_len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(p.sequence_len()), &f, |b, f| {
            b.iter(|| f.psi())
        });
    }
    group.finish();
}

fn correlation(c: &mut Criterion) {
    let fam = build_multiple_zcz(&example1()).unwrap();
    let (a, b) = (fam.sequence(0, 1), fam.sequence(1, 3));
    c.bench_function("pccf/256", |bench| {
        bench.iter(|| pccf(black_box(a), black_box(b), 5).unwrap())
    });
    c.bench_function("verify_zcz/example1_set", |bench| {
        bench.iter(|| verify_zcz(black_box(&fam.sets[0]), 16).unwrap())
    });
    c.bench_function("certify_family/example1", |bench| {
        bench.iter(|| certify_family(black_box(&fam.sets), 16, 7).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let family = FamilySource::Params { q: 2, m: 4, k: 2, s: 2 }.resolve().unwrap();
    let config = SimulationConfig {
        family: FamilySource::Params { q: 2, m: 4, k: 2, s: 2 },
        clusters: 4,
        users_per_cluster: 8,
        observed: None,
        max_delay_chips: 3,
        snr_db: vec![0.0, 2.0, 4.0],
        snr_axis: SnrAxis::PerBit,
        noiseless: false,
        bits_per_user: 1_000,
        iterations: 4,
        seed: 1,
    };
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    group.throughput(Throughput::Elements(config.bits_per_user * config.iterations));
    group.bench_function("4x8_users_bit_windows", |b| {
        b.iter(|| simulate_ber(&family, &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, psi, correlation, simulation);
criterion_main!(benches);
