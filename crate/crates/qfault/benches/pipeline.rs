//! Criterion benches for the heavy pipeline stages, comparing the rayon
//! data-parallel kernels against a single-thread pool (or, with
//! `--no-default-features`, the plain sequential build).
//!
//! Run with `cargo bench -p qfault` and
//! `cargo bench -p qfault --no-default-features`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qfault::{
    enumerate_faults, estimate_detection, generate_test_set, Circuit, FaultEnumConfig, FaultSpec,
    Gate, GateKind, TrialPlan,
};

/// Deterministic NCT circuit: cycles X / CX / CCX over the lines.
fn nct_circuit(width: usize, gates: usize) -> Circuit {
    let mut c = Circuit::new(width).unwrap();
    for i in 0..gates {
        let a = i % width;
        let b = (i + 1) % width;
        let d = (i + 2) % width;
        let gate = match i % 3 {
            0 => Gate::new(GateKind::X, [], vec![a]),
            1 => Gate::new(GateKind::Cx, [a], vec![b]),
            _ if width >= 3 => Gate::new(GateKind::Ccx, [a, b], vec![d]),
            _ => Gate::new(GateKind::Cx, [b], vec![a]),
        };
        c.push(gate.unwrap()).unwrap();
    }
    c
}

/// Runs `f` on the current (default, multi-threaded) rayon pool and on a
/// one-thread pool, giving both variants a bench id; without the
/// `parallel` feature there is a single sequential variant.
fn bench_both<F: Fn() + Sync>(c: &mut Criterion, group: &str, param: &str, f: F) {
    let mut g = c.benchmark_group(group);
    #[cfg(feature = "parallel")]
    {
        g.bench_with_input(BenchmarkId::new("rayon", param), &(), |b, ()| b.iter(&f));
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        g.bench_with_input(BenchmarkId::new("single-thread", param), &(), |b, ()| {
            pool.install(|| b.iter(&f))
        });
    }
    #[cfg(not(feature = "parallel"))]
    g.bench_with_input(BenchmarkId::new("sequential", param), &(), |b, ()| {
        b.iter(&f)
    });
    g.finish();
}

fn bench_total_matrix(c: &mut Criterion) {
    for width in [6usize, 8] {
        let circuit = nct_circuit(width, 8);
        bench_both(c, "total_matrix", &format!("n{width}m8"), || {
            black_box(circuit.total_matrix());
        });
    }
}

fn bench_test_set(c: &mut Criterion) {
    let circuit = nct_circuit(5, 6);
    let faults = enumerate_faults(&circuit, &FaultEnumConfig::default());
    bench_both(c, "generate_test_set", "n5m6", || {
        black_box(generate_test_set(&circuit, &faults, 0.99).unwrap());
    });
}

fn bench_monte_carlo(c: &mut Criterion) {
    let plan = TrialPlan {
        circuit: nct_circuit(4, 6),
        fault: FaultSpec::Smgf { gate: 1 },
        input_index: 1,
        trials: 100_000,
        seed: 42,
    };
    bench_both(c, "estimate_detection", "n4trials1e5", || {
        black_box(estimate_detection(&plan).unwrap());
    });
}

criterion_group!(
    benches,
    bench_total_matrix,
    bench_test_set,
    bench_monte_carlo
);
criterion_main!(benches);
