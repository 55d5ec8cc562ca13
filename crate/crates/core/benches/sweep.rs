use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tdspec::gen::Gen;
use tdspec::par;
use tdspec::semantics::{sat_prefixes, Word};

// Oracle sweep: every random formula against every word of a fixed length,
// fanned out over formulas.
fn sweep(c: &mut Criterion) {
    let vars = vec!["p".to_string(), "q".to_string()];
    let mut g = Gen::new(0x5eed);
    let formulas: Vec<_> = (0..64).map(|_| g.formula(&vars, 3, 2)).collect();
    let words: Vec<Word> = Word::all_of_len(&vars, 5).collect();
    let check = |i: usize| words.iter().filter(|w| sat_prefixes(w, &formulas[i]).iter().all(|&b| b)).count();

    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", formulas.len()), |b| {
        b.iter(|| black_box(par::map_range(formulas.len(), check)))
    });
    group.bench_function(BenchmarkId::new("sequential", formulas.len()), |b| {
        b.iter(|| black_box(par::map_range_seq(formulas.len(), check)))
    });
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
