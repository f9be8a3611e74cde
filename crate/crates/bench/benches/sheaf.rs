use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use toposkit::category::fixtures::c2;
use toposkit::giraud::{AuditScope, AuditTarget, Auditor};
use toposkit::materialize::{materialize, Bounds};
use toposkit::modules::FinRing;
use toposkit::presheaf::{colimit_of_representables_set, set_nat_transformations};
use toposkit::sheaf::{is_sheaf, sheafify};
use toposkit_bench::site;

fn sheaves(c: &mut Criterion) {
    let mut g = c.benchmark_group("sheaf");
    for seed in [1, 2, 3] {
        let s = site(seed, 3);
        g.bench_with_input(BenchmarkId::new("is_sheaf", seed), &s, |b, s| {
            b.iter(|| is_sheaf(black_box(&s.set), &s.topology))
        });
        g.bench_with_input(BenchmarkId::new("sheafify_set", seed), &s, |b, s| {
            b.iter(|| sheafify(black_box(&s.set), &s.topology).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sheafify_mod", seed), &s, |b, s| {
            b.iter(|| sheafify(black_box(&s.module), &s.topology).unwrap())
        });
    }
    g.finish();
}

fn presheaves(c: &mut Criterion) {
    let s = site(5, 3);
    c.bench_function("nat_transformations", |b| b.iter(|| set_nat_transformations(black_box(&s.set), &s.set)));
    c.bench_function("colimit_of_representables", |b| {
        b.iter(|| colimit_of_representables_set(black_box(&s.set)).unwrap())
    });
    let base = Arc::new(c2());
    c.bench_function("materialize_psh_c2", |b| {
        b.iter(|| materialize(&base, Bounds::values(2), None, &AtomicBool::new(false)).unwrap())
    });
}

fn giraud(c: &mut Criterion) {
    let mut g = c.benchmark_group("giraud");
    g.sample_size(10);
    for n in [2, 3] {
        let ring = FinRing::cyclic(n).unwrap();
        let scope = AuditScope::new(AuditTarget::FinMod { ring, max_elements: 9 });
        g.bench_with_input(BenchmarkId::new("rmod", n), &scope, |b, scope| {
            b.iter(|| Auditor::new(scope.clone()).unwrap().run().unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sheaves, presheaves, giraud);
criterion_main!(benches);
