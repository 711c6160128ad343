use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncharm::axb::{axb_plancherel, AxbFunction, AxbOptions};
use ncharm::heisenberg::{h_plancherel, FourierOptions, HFunction, LambdaGrid};
use ncharm::spherical::{spherical_phi, spherical_transform, radial_bump, RadialFunction};
use std::hint::black_box;

fn heisenberg(c: &mut Criterion) {
    let mut g = c.benchmark_group("heisenberg_plancherel");
    g.sample_size(10);
    for (n, nodes) in [(32, 65), (64, 129)] {
        let k = HFunction::gaussian(1.0, 4.0, n).unwrap();
        let lg = LambdaGrid::new(6.0, nodes).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| h_plancherel(black_box(&k), &lg, &FourierOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn axb(c: &mut Criterion) {
    let f = AxbFunction::product_bump(1.0, 1.0, 1.25, 64, 1.25, 64).unwrap();
    let mut g = c.benchmark_group("axb_plancherel");
    g.sample_size(10);
    g.bench_function("64x64", |b| b.iter(|| axb_plancherel(black_box(&f), &AxbOptions::default()).unwrap()));
    g.finish();
}

fn spherical(c: &mut Criterion) {
    c.bench_function("spherical_phi", |b| b.iter(|| spherical_phi(black_box(1.3), black_box(2.5)).unwrap()));
    let f = RadialFunction::from_fn(1.0, 201, radial_bump(1.0)).unwrap();
    let lambdas: Vec<f64> = (0..32).map(|i| i as f64 * 0.25).collect();
    c.bench_function("spherical_transform_32", |b| b.iter(|| spherical_transform(black_box(&f), &lambdas).unwrap()));
}

criterion_group!(benches, heisenberg, axb, spherical);
criterion_main!(benches);
