use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tightsurg::floer::{lspace_propagate, SlopeKnowledge};
use tightsurg::kirby::plumbing_presentation;
use tightsurg::lattice::{embed_bound, lambda_gram, search_diagonal, short_vectors};
use tightsurg::{KnotInfo, Rational};

fn diagonal_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("lambda_no_embedding");
    for (a1, n) in [(2, 1), (3, 1), (2, 3), (4, 2)] {
        let g = lambda_gram(a1, n).unwrap();
        let m = embed_bound(&g).unwrap() as usize;
        group.bench_with_input(BenchmarkId::from_parameter(format!("{a1},{n}")), &m, |b, &m| {
            b.iter(|| search_diagonal(black_box(&g), m).unwrap())
        });
    }
    group.finish();
}

fn fincke_pohst(c: &mut Criterion) {
    let g = lambda_gram(3, 2).unwrap().negated();
    c.bench_function("short_vectors_lambda_norm_4", |b| b.iter(|| short_vectors(black_box(&g), 4).unwrap()));
}

fn plumbing(c: &mut Criterion) {
    let r: Rational = "23/2".parse().unwrap();
    c.bench_function("plumbing_n3_23_2", |b| b.iter(|| plumbing_presentation(3, black_box(&r)).unwrap()));
}

fn lspace(c: &mut Criterion) {
    let kb = SlopeKnowledge::from_knot(&KnotInfo::torus(7, 2).unwrap());
    let r: Rational = "37/7".parse().unwrap();
    c.bench_function("lspace_t72_37_7", |b| b.iter(|| lspace_propagate(&kb, black_box(&r)).unwrap()));
}

criterion_group!(benches, diagonal_search, fincke_pohst, plumbing, lspace);
criterion_main!(benches);
