//! Simulation configuration and validation.

use crate::error::{Error, Result};
use crate::maxwell::cfl_max_dt;
use crate::vec3::Vec3;

/// Speed of light in cm/s (Gaussian units).
pub const SPEED_OF_LIGHT: f64 = 2.99792458e10;

/// How particles are stored and iterated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Single flat particle list, processed sequentially.
    Naive,
    /// Particles grouped by cell inside cubic supercells, processed with the
    /// parallel chessboard schedule.
    Supercell,
}

impl Layout {
    pub fn parse(s: &str) -> Option<Layout> {
        match s {
            "naive" => Some(Layout::Naive),
            "supercell" => Some(Layout::Supercell),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Layout::Naive => "naive",
            Layout::Supercell => "supercell",
        }
    }
}

/// Field interpolation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// One particle at a time.
    Scalar,
    /// Fixed-size particle chunks staged through structure-of-arrays
    /// scratch buffers; bitwise-identical results to `Scalar`.
    Chunked,
}

impl Interpolation {
    pub fn parse(s: &str) -> Option<Interpolation> {
        match s {
            "scalar" => Some(Interpolation::Scalar),
            "chunked" => Some(Interpolation::Chunked),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Interpolation::Scalar => "scalar",
            Interpolation::Chunked => "chunked",
        }
    }
}

/// Complete description of one run. Benchmark grids use unit (1 cm) cells
/// with the origin at zero; tests may build a [`crate::grid::YeeGrid`] with
/// arbitrary geometry directly.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Grid cells per axis.
    pub dims: [usize; 3],
    pub particles_per_cell: usize,
    pub steps: usize,
    /// Time step in seconds.
    pub dt: f64,
    /// Speed of light in cm/s; tests may use 1.
    pub c: f64,
    /// Cubic supercell edge length in cells.
    pub supercell_size: usize,
    /// Worker threads per subdomain.
    pub workers: usize,
    /// Shared-memory subdomains (stand-in for a process count).
    pub subdomains: usize,
    pub layout: Layout,
    pub interpolation: Interpolation,
    /// Particles per interpolation chunk.
    pub chunk_size: usize,
    pub seed: u64,
}

impl SimulationConfig {
    /// The frozen-plasma benchmark configuration: 40^3 cells, 50 particles
    /// per cell, 1000 steps, dt at half the Courant limit.
    pub fn benchmark_default() -> Self {
        let dims = [40, 40, 40];
        let c = SPEED_OF_LIGHT;
        let dt = 0.5 * cfl_max_dt(Vec3::new(1.0, 1.0, 1.0), c);
        SimulationConfig {
            dims,
            particles_per_cell: 50,
            steps: 1000,
            dt,
            c,
            supercell_size: 2,
            workers: 1,
            subdomains: 1,
            layout: Layout::Supercell,
            interpolation: Interpolation::Chunked,
            chunk_size: 16,
            seed: 1,
        }
    }

    /// Maximum stable time step for this configuration's unit-cell grid.
    pub fn cfl_limit(&self) -> f64 {
        cfl_max_dt(Vec3::new(1.0, 1.0, 1.0), self.c)
    }

    /// Checks every constraint and reports the complete list of violations,
    /// not only the first. Valid configurations pass unchanged (the check is
    /// idempotent: it mutates nothing).
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.dims.iter().any(|&n| n == 0) {
            violations.push(format!("grid dimensions must be positive, got {:?}", self.dims));
        }
        if self.c <= 0.0 || !self.c.is_finite() {
            violations.push(format!("speed of light must be positive and finite, got {}", self.c));
        }
        if self.dt <= 0.0 || !self.dt.is_finite() {
            violations.push(format!("time step must be positive and finite, got {}", self.dt));
        } else if self.dims.iter().all(|&n| n > 0) && self.c > 0.0 {
            let limit = self.cfl_limit();
            if self.dt > limit {
                violations.push(format!(
                    "time step {:.6e} exceeds the Courant limit {:.6e}",
                    self.dt, limit
                ));
            }
        }
        if self.supercell_size == 0 {
            violations.push("supercell size must be at least 1".to_string());
        } else if let Some(&min_dim) = self.dims.iter().min() {
            if min_dim > 0 && self.supercell_size > min_dim {
                violations.push(format!(
                    "supercell size {} exceeds the smallest grid extent {}",
                    self.supercell_size, min_dim
                ));
            }
        }
        if self.chunk_size == 0 {
            violations.push("interpolation chunk size must be at least 1".to_string());
        }
        if self.workers == 0 {
            violations.push("worker count must be at least 1".to_string());
        }
        if self.subdomains == 0 {
            violations.push("subdomain count must be at least 1".to_string());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config { violations })
        }
    }
}
