use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qpv_core::analysis::{ip_function, random_function, smp_cc_bruteforce};
use qpv_core::attacks::strategy::standard_start;
use qpv_core::attacks::{seesaw_optimize, SeesawConfig, StartMode};
use qpv_core::qcore::{haar_random_unitary, random_pure_state};
use qpv_core::{apply, partial_trace, AttackKind, RegisterLayout, SeedStream, Shape, Unitary};

fn layout(qubits: usize) -> RegisterLayout {
    RegisterLayout::new((0..qubits).map(|i| (format!("q{i}"), 1))).unwrap()
}

fn bench_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_two_qubit");
    for qubits in [4, 8, 12, 16] {
        let state = random_pure_state(&layout(qubits), 1);
        let u = Unitary::new(haar_random_unitary(4, 2).unwrap(), &["q1", "q3"]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(qubits), &state, |b, s| {
            b.iter(|| apply(black_box(s), &u).unwrap())
        });
    }
    group.finish();
}

fn bench_partial_trace(c: &mut Criterion) {
    let mut group = c.benchmark_group("partial_trace_half");
    for qubits in [4, 8, 12] {
        let state = random_pure_state(&layout(qubits), 3);
        let names: Vec<String> = (0..qubits / 2).map(|i| format!("q{i}")).collect();
        let keep: Vec<&str> = names.iter().map(String::as_str).collect();
        group.bench_with_input(BenchmarkId::from_parameter(qubits), &state, |b, s| {
            b.iter(|| partial_trace(black_box(s), &keep).unwrap())
        });
    }
    group.finish();
}

fn bench_seesaw(c: &mut Criterion) {
    let mut group = c.benchmark_group("seesaw_and");
    group.sample_size(10);
    let and = ip_function(1).unwrap();
    for (kept, sent) in [(0, 1), (1, 1)] {
        let shape = Shape::symmetric(1, kept, sent).unwrap();
        let cfg = SeesawConfig {
            restarts: 2,
            iters: 100,
            ..SeesawConfig::new(AttackKind::Meas, shape, StartMode::Fixed(standard_start(&shape).unwrap()))
        };
        group.bench_function(format!("kept{kept}_sent{sent}"), |b| {
            b.iter(|| seesaw_optimize(&and, &cfg, SeedStream::new(5)).unwrap())
        });
    }
    group.finish();
}

fn bench_smp(c: &mut Criterion) {
    let mut group = c.benchmark_group("smp_bruteforce");
    group.sample_size(10);
    for (n, k) in [(1, 1), (2, 1), (2, 2)] {
        let f = random_function(n, 11).unwrap();
        group.bench_function(format!("n{n}_k{k}"), |b| b.iter(|| smp_cc_bruteforce(black_box(&f), k).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_apply, bench_partial_trace, bench_seesaw, bench_smp);
criterion_main!(benches);
