use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use prodsynth::bench::{load_corpus, run_suite, Tier};
use prodsynth::census::{CensusMode, CensusSpace};
use prodsynth::parallel::{par_map, Parallelism};
use prodsynth::syntax::Type;
use prodsynth::synthesis::SearchLimits;
use prodsynth::typecheck::ConstructorContext;

fn suite(c: &mut Criterion) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let cases: Vec<_> = load_corpus(&dir)
        .unwrap()
        .into_iter()
        .filter(|c| c.tier == Tier::Acceptance)
        .collect();
    let limits = SearchLimits::default();
    let mut g = c.benchmark_group("acceptance_suite");
    g.sample_size(10);
    for mode in [Parallelism::Sequential, Parallelism::Parallel] {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{mode:?}")),
            &mode,
            |b, &mode| b.iter(|| run_suite(&cases, &limits, mode)),
        );
    }
    g.finish();
}

fn census(c: &mut Criterion) {
    let sigma = ConstructorContext::from_decls(&prodsynth::census::nat_decls()).unwrap();
    let space = CensusSpace::new(sigma);
    let ty = Type::arrow(Type::base("nat"), Type::base("nat"));
    let ns: Vec<usize> = (1..=12).collect();
    let mut g = c.benchmark_group("census_rows");
    g.sample_size(10);
    for mode in [Parallelism::Sequential, Parallelism::Parallel] {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{mode:?}")),
            &mode,
            |b, &mode| {
                b.iter(|| {
                    par_map(&ns, mode, |&n| {
                        [CensusMode::All, CensusMode::Typed, CensusMode::Normal]
                            .map(|m| space.count(&ty, n, m).unwrap())
                    })
                })
            },
        );
    }
    g.finish();
}

criterion_group!(benches, suite, census);
criterion_main!(benches);
