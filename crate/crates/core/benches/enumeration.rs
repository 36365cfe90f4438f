use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lp_equiv::linalg::{columns_dependent, equilibrate_rows};
use lp_equiv::matgen::{
    build_augmented_t, build_vandermonde, sample_instance, AugmentedSpec, NodeRange,
};
use lp_equiv::subsets::{extremes, find_first, Exec};

fn bench(c: &mut Criterion) {
    let spec = sample_instance(3, 9, 1, &NodeRange::default()).unwrap();
    let aug = build_augmented_t(&AugmentedSpec::new(spec.clone(), 0.1, 0.1).unwrap()).unwrap();
    let eq = equilibrate_rows(&aug);
    let a = build_vandermonde(&sample_instance(5, 16, 2, &NodeRange::default()).unwrap()).unwrap();

    let mut g = c.benchmark_group("spark_search");
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(
            BenchmarkId::new(format!("{exec:?}"), "m3_n9_aug"),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    (1..=eq.cols())
                        .find_map(|k| {
                            find_first(exec, eq.cols(), k, |s| columns_dependent(&eq, s, 1e-12))
                        })
                        .unwrap()
                })
            },
        );
    }
    g.finish();

    let mut g = c.benchmark_group("restricted_extremes");
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(
            BenchmarkId::new(format!("{exec:?}"), "m5_n16_k5"),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    extremes(exec, a.cols(), 5, |s| {
                        let sub = a.select_columns(s).to_nalgebra();
                        let ev = (sub.transpose() * sub).symmetric_eigenvalues();
                        Ok((ev.min(), ev.max()))
                    })
                    .unwrap()
                })
            },
        );
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
