//! The data-parallel kernels on a one-thread pool and on the default pool.
//! Built without the `parallel` feature, both arms run the sequential loops.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use extcat::classes::ClassTable;
use extcat::corpus::{corpus, CorpusSpec};
use extcat::digraph::{hall_condition, BipartiteDigraph, HallMode};
use extcat::endo::analyze;
use extcat::ext::ExtObject;
use extcat::{par, Caps};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("one_thread", one), ("pool", all)]
}

fn objects(bound: u64) -> Vec<ExtObject> {
    let spec = CorpusSpec::new(bound, &[2, 3]);
    corpus(&spec, &Caps::default()).unwrap().into_iter().map(|e| e.object).collect()
}

fn bench(c: &mut Criterion) {
    let caps = Caps::default();
    let objs = objects(72);
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("analyze", name), |b| {
            b.iter(|| pool.install(|| par::try_map(&objs, |x| analyze(x, &caps)).unwrap()))
        });
        group.bench_function(BenchmarkId::new("class_table", name), |b| {
            b.iter(|| pool.install(|| ClassTable::build(&objs, &caps).unwrap()))
        });
        group.bench_function(BenchmarkId::new("hall_exhaustion_n2", name), |b| {
            b.iter(|| {
                pool.install(|| {
                    par::map_range(1 << 8, |mask| {
                        let slots = [(0, 2), (2, 0), (0, 3), (3, 0), (1, 2), (2, 1), (1, 3), (3, 1)];
                        let edges: Vec<(usize, usize)> =
                            (0..8).filter(|&k| mask >> k & 1 == 1).map(|k| slots[k]).collect();
                        let d = BipartiteDigraph::from_ids(2, 2, &edges).unwrap();
                        hall_condition(&d, HallMode::BruteForce, &caps).unwrap().holds
                    })
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
