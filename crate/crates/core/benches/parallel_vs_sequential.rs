use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use opcalc::bar::{bar, BarOptions, Tower};
use opcalc::chain::{homology, ChainComplex};
use opcalc::exactlin::Field;
use opcalc::operad::{free_algebra, Bimodule, Operad};
use opcalc::par;

fn bar_of_free(o: &Arc<Operad>, gens: &[i32], cap: i32) -> usize {
    let v = ChainComplex::from_flat(Field::Q, gens, &vec![Vec::new(); gens.len()]).unwrap();
    let a = free_algebra(o, &v, cap + 1).unwrap();
    let tower = Tower::new(o, &a, BarOptions::exact(cap)).unwrap();
    let b = bar(&tower, &Bimodule::of_operad(o)).unwrap();
    homology(b.total()).iter().map(|(_, r)| r).sum()
}

fn bench(c: &mut Criterion) {
    let cases = [
        ("com", Arc::new(Operad::com(Field::Q)), vec![1, 2], 9),
        ("ass", Arc::new(Operad::ass(Field::Q)), vec![2], 10),
    ];
    let mut g = c.benchmark_group("bar_of_free_algebra");
    g.sample_size(10);
    for (name, o, gens, cap) in &cases {
        for parallel in [false, true] {
            let label = if parallel { "parallel" } else { "sequential" };
            g.bench_with_input(BenchmarkId::new(label, name), &(), |b, _| {
                par::set_parallel(parallel);
                b.iter(|| bar_of_free(o, gens, *cap));
            });
        }
    }
    par::set_parallel(true);
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
