use std::time::Duration;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use l1cwc::code::verify_code_with;
use l1cwc::construct::build_t3_w4_d6;
use l1cwc::designs::brute_force_packing_number_with;
use l1cwc::search::{max_code_exact, SearchConfig};
use l1cwc::{CodeParams, Strategy};

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn bench_verify(c: &mut Criterion) {
    let code = build_t3_w4_d6(144).expect("length 144 recipe");
    let mut g = c.benchmark_group("verify_n144");
    for (name, s) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, &s| {
            b.iter(|| verify_code_with(black_box(&code), s))
        });
    }
    g.finish();
}

fn bench_search(c: &mut Criterion) {
    let p = CodeParams::ternary(8, 4, 6);
    let mut g = c.benchmark_group("exact_search_n8");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, s) in STRATEGIES {
        let cfg = SearchConfig { strategy: s, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| max_code_exact(black_box(&p), cfg).unwrap().code.len())
        });
    }
    g.finish();
}

fn bench_packing(c: &mut Criterion) {
    let mut g = c.benchmark_group("packing_number_8_4_3");
    g.sample_size(10);
    for (name, s) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, &s| {
            b.iter(|| brute_force_packing_number_with(black_box(8), 4, 3, s).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_verify, bench_search, bench_packing);
criterion_main!(benches);
