use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use toda_core::lie::{build_cartan, spectral_radius, symmetric_decomposition, uniqueness_thresholds, SpectrumMethod};
use toda_core::{Family, LieFamily};

fn cartan(c: &mut Criterion) {
    let mut g = c.benchmark_group("cartan_exact");
    for n in [10, 25, 50] {
        let a = LieFamily::new(Family::B, n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| {
                let m = build_cartan(*a).unwrap();
                black_box(symmetric_decomposition(&m).recompose())
            })
        });
    }
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral_radius");
    for n in [8, 20, 50] {
        let s = symmetric_decomposition(&build_cartan(LieFamily::new(Family::C, n).unwrap()).unwrap());
        for method in [SpectrumMethod::DenseEig, SpectrumMethod::RecursionBound] {
            g.bench_with_input(BenchmarkId::new(format!("{method:?}"), n), &s, |b, s| {
                b.iter(|| black_box(spectral_radius(s, method).unwrap().rho))
            });
        }
    }
    g.finish();
    c.bench_function("thresholds_E8", |b| {
        let a = LieFamily::new(Family::E, 8).unwrap();
        b.iter(|| black_box(uniqueness_thresholds(a).unwrap().lambda_s_max))
    });
}

criterion_group!(benches, cartan, spectrum);
criterion_main!(benches);
