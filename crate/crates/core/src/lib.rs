//! Electromagnetic particle-in-cell simulation core.
//!
//! The crate provides a staggered-grid field solver, charge-conserving
//! particle kernels, a cache-aware blocked particle store with a race-free
//! parallel schedule, and the diagnostics and reporting used by the
//! benchmark driver.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod maxwell;
pub mod particle;
pub mod report;
pub mod sim;
pub mod snapshot;
pub mod supercell;
pub mod timings;
pub mod vec3;

pub use config::{Interpolation, Layout, SimulationConfig, SPEED_OF_LIGHT};
pub use diagnostics::DiagnosticsRecord;
pub use error::{Error, Result};
pub use grid::{ScalarField3, YeeGrid};
pub use particle::{Particle, Species};
pub use sim::{
    setup_frozen_plasma, setup_thermal_plasma, sweep_supercell, sweep_workers, RunReport,
    Simulation, SupercellSweep, SupercellSweepRow, WorkerSweepRow,
};
pub use timings::StageTimings;
pub use vec3::Vec3;
