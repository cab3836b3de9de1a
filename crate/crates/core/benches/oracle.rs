use std::hint::black_box;

use abduce::batch::{explain_all, Job};
use abduce::oracle::{enumerate_explanations_with, Execution, OracleLimits};
use abduce::testkit::{random_kb, GenConfig};
use abduce::{parse_atoms, parse_kb};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

/// 16 hypotheses, pairs of which explain `g`, with a few exclusions.
fn wide_kb() -> String {
    let mut text = String::new();
    for i in 0..16 {
        text.push_str(&format!("hypothesis h{i} : 0.{}.\n", 10 + 5 * i));
    }
    for i in 0..16 {
        text.push_str(&format!("fact m{i} <- h{i}, h{}.\n", (i + 5) % 16));
        text.push_str(&format!("fact g <- m{i}, h{}.\n", (i + 11) % 16));
    }
    for i in 0..4 {
        text.push_str(&format!("false <- h{}, h{}.\n", i, i + 8));
    }
    text
}

fn oracle(c: &mut Criterion) {
    let kb = parse_kb(&wide_kb()).unwrap();
    let goal = parse_atoms("g").unwrap();
    let mut group = c.benchmark_group("oracle_16_hypotheses");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| enumerate_explanations_with(black_box(&kb), &goal, 16, &OracleLimits::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let jobs: Vec<Job> = (0..300)
        .map(|seed| {
            let g = random_kb(seed, &GenConfig::default());
            Job { top_k: 3, ..Job::new(g.kb, g.goal) }
        })
        .collect();
    let mut group = c.benchmark_group("explain_300_kbs");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| explain_all(black_box(&jobs), exec))
        });
    }
    group.finish();
}

criterion_group!(benches, oracle, batch);
criterion_main!(benches);
