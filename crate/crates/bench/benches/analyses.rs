use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lancet_bench::synthetic_module;
use lancet_core::callgraph::analyze_source;
use lancet_core::cfg::build_from_module;
use lancet_core::frontend::parse_module;
use lancet_core::rewriter::simplify_module;
use lancet_core::ssa::analyze;
use lancet_core::typeinfer::{infer_source, HeuristicTable};

fn bench(c: &mut Criterion) {
    let table = HeuristicTable::builtin();
    for n in [10, 100] {
        let text = synthetic_module(n);
        let module = parse_module(&text, "m").unwrap();
        let simple = simplify_module(&module).unwrap();

        let mut g = c.benchmark_group("pipeline");
        g.bench_with_input(BenchmarkId::new("parse", n), &text, |b, t| {
            b.iter(|| parse_module(t, "m").unwrap())
        });
        g.bench_with_input(BenchmarkId::new("simplify", n), &module, |b, m| {
            b.iter(|| simplify_module(m).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("cfg_ssa", n), &simple, |b, m| {
            b.iter(|| {
                let cfg = build_from_module("m", m);
                for (_, sub) in cfg.all_nested() {
                    analyze(sub);
                }
                analyze(&cfg)
            })
        });
        g.bench_with_input(BenchmarkId::new("callgraph", n), &text, |b, t| {
            b.iter(|| analyze_source("m", t).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("typeinfer", n), &text, |b, t| {
            b.iter(|| infer_source("m.py", t, &table, true).unwrap())
        });
        g.finish();
    }
}

criterion_group!(benches, bench);
criterion_main!(benches);
