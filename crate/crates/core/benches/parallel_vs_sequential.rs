//! `par_map` against `seq_map` on two embarrassingly parallel workloads:
//! the window screen over seeds and independent split-step trajectories.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dnls_core::algebra::{LatticeBox, State};
use dnls_core::disorder::{scan_j0, ConstraintLimits, DisorderRealization};
use dnls_core::dynamics::SplitStepper;
use dnls_core::harness::sech_packet;
use dnls_core::exec::{par_map, seq_map};
use dnls_core::normal_form::ScheduleConstants;

fn screen(seed: &u64) -> Option<i64> {
    let v = DisorderRealization::sample(*seed, LatticeBox::new(256).unwrap());
    scan_j0(&v, 64, 32, 0.05, 2.0, ScheduleConstants::desk(), ConstraintLimits::screen()).unwrap()
}

fn trajectory(seed: &u64) -> f64 {
    let lattice = LatticeBox::new(32).unwrap();
    let v = DisorderRealization::sample(*seed, lattice).values().to_vec();
    let mut q: State = sech_packet(lattice, 4.0);
    let mut st = SplitStepper::new(v, 0.025, 0.025, 0.05);
    for _ in 0..2000 {
        st.step(&mut q);
    }
    q.tail_mass(8)
}

fn bench(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..256).collect();
    let mut g = c.benchmark_group("window_screen");
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new("parallel", seeds.len()), &seeds, |b, s| b.iter(|| black_box(par_map(s, screen))));
    g.bench_with_input(BenchmarkId::new("sequential", seeds.len()), &seeds, |b, s| b.iter(|| black_box(seq_map(s, screen))));
    g.finish();

    let seeds: Vec<u64> = (0..16).collect();
    let mut g = c.benchmark_group("trajectories");
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new("parallel", seeds.len()), &seeds, |b, s| b.iter(|| black_box(par_map(s, trajectory))));
    g.bench_with_input(BenchmarkId::new("sequential", seeds.len()), &seeds, |b, s| b.iter(|| black_box(seq_map(s, trajectory))));
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
