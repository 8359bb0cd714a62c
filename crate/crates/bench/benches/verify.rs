use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use num_rational::BigRational;

use ultrametric::verify::{verify_endpoint, verify_morrey, EndpointConfig, MorreyConfig};
use ultrametric::{PAdicParams, Precision};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn bench_verify_cells(c: &mut Criterion) {
    let prec = Precision::default();
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);

    let endpoint = EndpointConfig::new(
        PAdicParams::new(2, 1).unwrap(),
        rat(1, 2),
        rat(1, 1),
        100,
        42,
    )
    .unwrap();
    group.bench_function("endpoint_cell_100_trials", |b| {
        b.iter(|| verify_endpoint(black_box(&endpoint), prec).unwrap())
    });

    let morrey = MorreyConfig::new(
        PAdicParams::new(2, 1).unwrap(),
        rat(2, 1),
        rat(-1, 4),
        100,
        42,
    )
    .unwrap();
    group.bench_function("morrey_cell_100_trials", |b| {
        b.iter(|| verify_morrey(black_box(&morrey), prec).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_verify_cells);
criterion_main!(benches);
