//! Per-particle kernel benchmarks: field gathering in both paths, the
//! pusher, and current deposition.

use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};

use pic_bench::{random_positions, randomized_grid};
use pic_core::kernels::{
    boris_push, deposit_current_vb, gather_fields, gather_fields_chunked_into, split_trajectory,
    ChunkBuffers,
};
use pic_core::Vec3;

const DIMS: [usize; 3] = [16, 16, 16];
const N_PARTICLES: usize = 4096;
const CHUNK: usize = 16;

fn bench_gather(c: &mut Criterion) {
    let grid = randomized_grid(DIMS, 1);
    let positions = random_positions(DIMS, N_PARTICLES, 2);

    let mut group = c.benchmark_group("gather");
    group.throughput(Throughput::Elements(N_PARTICLES as u64));

    group.bench_function("scalar", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &p in &positions {
                let g = gather_fields(&grid, p);
                acc += g.e.x + g.b.z;
            }
            black_box(acc)
        })
    });

    group.bench_function("chunked", |b| {
        let mut bufs = ChunkBuffers::new();
        b.iter(|| {
            let mut acc = 0.0;
            for chunk in positions.chunks(CHUNK) {
                gather_fields_chunked_into(&grid, chunk, &mut bufs);
                for lane in 0..chunk.len() {
                    acc += bufs.ex[lane] + bufs.bz[lane];
                }
            }
            black_box(acc)
        })
    });

    group.finish();
}

fn bench_push(c: &mut Criterion) {
    let grid = randomized_grid(DIMS, 3);
    let positions = random_positions(DIMS, N_PARTICLES, 4);
    let dt = 0.2;

    let mut group = c.benchmark_group("push");
    group.throughput(Throughput::Elements(N_PARTICLES as u64));
    group.bench_function("boris", |b| {
        b.iter(|| {
            let mut p = Vec3::new(0.1, -0.2, 0.3);
            for &x in &positions {
                let g = gather_fields(&grid, x);
                p = boris_push(p, g.e, g.b, -1.0, 1.0, 1.0, dt);
            }
            black_box(p)
        })
    });
    group.finish();
}

fn bench_deposit(c: &mut Criterion) {
    let mut grid = randomized_grid(DIMS, 5);
    let starts = random_positions(DIMS, N_PARTICLES, 6);
    let moves = random_positions(DIMS, N_PARTICLES, 7);
    let ends: Vec<Vec3> = starts
        .iter()
        .zip(&moves)
        .map(|(s, m)| {
            Vec3::new(
                s.x + (m.x / DIMS[0] as f64 - 0.5) * 0.8,
                s.y + (m.y / DIMS[1] as f64 - 0.5) * 0.8,
                s.z + (m.z / DIMS[2] as f64 - 0.5) * 0.8,
            )
        })
        .collect();
    let dt = 0.2;

    let mut group = c.benchmark_group("deposit");
    group.throughput(Throughput::Elements(N_PARTICLES as u64));

    group.bench_function("split_trajectory", |b| {
        b.iter(|| {
            let mut segments = 0usize;
            for (&s, &e) in starts.iter().zip(&ends) {
                segments += split_trajectory(&grid, s, e).unwrap().len();
            }
            black_box(segments)
        })
    });

    group.bench_function("split_and_deposit", |b| {
        b.iter(|| {
            for (&s, &e) in starts.iter().zip(&ends) {
                deposit_current_vb(&mut grid, s, e, -1.0, 0.01, dt).unwrap();
            }
        })
    });

    group.finish();
}

criterion_group!(benches, bench_gather, bench_push, bench_deposit);
criterion_main!(benches);
