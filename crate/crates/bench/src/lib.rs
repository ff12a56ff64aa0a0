//! Shared fixtures for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pic_core::{setup_thermal_plasma, Layout, SimulationConfig, Vec3, YeeGrid};

/// A grid with every field filled from a seeded RNG, so interpolation
/// benches read realistic, non-constant data.
pub fn randomized_grid(dims: [usize; 3], seed: u64) -> YeeGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = YeeGrid::with_unit_cells(dims);
    for field in grid.field_arrays_mut() {
        for v in field.data.iter_mut() {
            *v = rng.random::<f64>() * 2.0 - 1.0;
        }
    }
    grid
}

/// Random positions inside the grid's domain box.
pub fn random_positions(dims: [usize; 3], n: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.random::<f64>() * dims[0] as f64,
                rng.random::<f64>() * dims[1] as f64,
                rng.random::<f64>() * dims[2] as f64,
            )
        })
        .collect()
}

/// A ready-to-step thermal plasma in the requested layout.
pub fn thermal_sim(
    dims: [usize; 3],
    ppc: usize,
    layout: Layout,
    workers: usize,
) -> pic_core::sim::Simulation {
    let mut config = SimulationConfig::benchmark_default();
    config.dims = dims;
    config.particles_per_cell = ppc;
    config.steps = 1;
    config.c = 1.0;
    config.dt = 0.5 * config.cfl_limit();
    config.layout = layout;
    config.workers = workers;
    setup_thermal_plasma(&config, 0.2).expect("benchmark setup must be valid")
}
