use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use toda_bench::{fixture, solved};
use toda_core::solver::newton_solve;
use toda_core::spectra::{nondegeneracy_certificate, CertificateOptions};
use toda_core::{Family, NewtonOptions};

fn newton(c: &mut Criterion) {
    let mut g = c.benchmark_group("newton");
    g.sample_size(10);
    for (family, rank) in [(Family::A, 2), (Family::G, 2), (Family::A, 3)] {
        let (problem, lambda) = fixture(family, rank, 63, 0.7);
        g.bench_function(BenchmarkId::new(format!("{family}{rank}"), 63), |b| {
            b.iter(|| black_box(newton_solve(&problem, &lambda, None, &NewtonOptions::default()).unwrap()))
        });
    }
    g.finish();
}

fn certificate(c: &mut Criterion) {
    let mut g = c.benchmark_group("certificate");
    g.sample_size(10);
    for n in [31, 63] {
        let (problem, state) = solved(Family::A, 2, n, 0.9);
        g.bench_function(BenchmarkId::new("A2", n), |b| {
            b.iter(|| black_box(nondegeneracy_certificate(&problem, &state, &CertificateOptions::default()).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, newton, certificate);
criterion_main!(benches);
