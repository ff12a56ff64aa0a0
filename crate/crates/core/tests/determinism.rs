//! Bit-level reproducibility of the parallel engine: results must not
//! depend on worker count, subdomain count, chunk size, interpolation
//! path, or how many times the run is repeated.

use pic_core::sim::Simulation;
use pic_core::{
    setup_thermal_plasma, Interpolation, Layout, Particle, SimulationConfig, Species, Vec3,
    YeeGrid,
};

fn thermal_config() -> SimulationConfig {
    let mut config = SimulationConfig::benchmark_default();
    config.dims = [8, 8, 8];
    config.particles_per_cell = 4;
    config.steps = 12;
    config.c = 1.0;
    config.dt = 0.5 * config.cfl_limit();
    config.supercell_size = 2;
    config.seed = 99;
    config
}

fn run_checksum(config: &SimulationConfig) -> u64 {
    let mut sim = setup_thermal_plasma(config, 0.2).unwrap();
    sim.run(0).unwrap().checksum
}

#[test]
fn worker_and_subdomain_shapes_do_not_change_the_physics() {
    let base = thermal_config();
    let reference = run_checksum(&base);
    assert_ne!(reference, 0);
    for (subdomains, workers) in [(1, 4), (2, 2), (4, 1), (2, 4), (4, 2)] {
        let mut config = base.clone();
        config.subdomains = subdomains;
        config.workers = workers;
        assert_eq!(
            run_checksum(&config),
            reference,
            "shape {subdomains}x{workers} diverged from the serial run"
        );
    }
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let config = thermal_config();
    assert_eq!(run_checksum(&config), run_checksum(&config));
}

#[test]
fn interpolation_paths_agree_bitwise() {
    let mut scalar = thermal_config();
    scalar.interpolation = Interpolation::Scalar;
    let mut chunked = thermal_config();
    chunked.interpolation = Interpolation::Chunked;
    assert_eq!(run_checksum(&scalar), run_checksum(&chunked));
}

#[test]
fn chunk_size_does_not_change_the_physics() {
    let mut config = thermal_config();
    config.interpolation = Interpolation::Chunked;
    let reference = run_checksum(&config);
    for chunk in [1, 3, 16, 1024] {
        config.chunk_size = chunk;
        assert_eq!(run_checksum(&config), reference, "chunk {chunk} diverged");
    }
}

/// With a single particle there is no summation-order ambiguity at all, so
/// the blocked parallel engine must track the sequential flat-array engine
/// bit for bit, including the fields its own current creates.
#[test]
fn single_hot_particle_matches_the_naive_run_bitwise() {
    let mut config = thermal_config();
    config.particles_per_cell = 0;
    config.steps = 60;
    let grid = YeeGrid::with_unit_cells(config.dims);
    let species = vec![Species::new(-1.0, 1.0)];
    let hot = Particle::new(
        Vec3::new(3.2, 4.7, 1.9),
        Vec3::new(0.8, -1.3, 0.4),
        1.0,
        0,
    );

    let mut naive_cfg = config.clone();
    naive_cfg.layout = Layout::Naive;
    let mut naive = Simulation::new(&naive_cfg, grid, species.clone(), vec![hot]).unwrap();
    naive.run(0).unwrap();

    let mut blocked_cfg = config.clone();
    blocked_cfg.layout = Layout::Supercell;
    blocked_cfg.workers = 4;
    blocked_cfg.subdomains = 2;
    let grid = YeeGrid::with_unit_cells(config.dims);
    let mut blocked = Simulation::new(&blocked_cfg, grid, species, vec![hot]).unwrap();
    blocked.run(0).unwrap();

    assert_eq!(naive.state_checksum(), blocked.state_checksum());
    let a = naive.particles_snapshot()[0];
    let b = blocked.particles_snapshot()[0];
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_ne!(a.to_bytes(), hot.to_bytes(), "particle never moved");
}

#[test]
fn migration_keeps_every_particle_exactly_once() {
    let config = thermal_config();
    let mut sim = setup_thermal_plasma(&config, 0.4).unwrap();
    let before = sim.n_particles();
    let report = sim.run(0).unwrap();
    assert_eq!(sim.n_particles(), before);
    assert!(report.migrations > 0, "thermal particles should change cells");
    let grid = &sim.grid;
    for p in sim.iter_particles() {
        assert!(grid.contains(p.position));
    }
}
