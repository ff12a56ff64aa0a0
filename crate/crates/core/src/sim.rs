//! The stepping engine and benchmark drivers.
//!
//! One step advances B a half step, pushes every particle through gathered
//! fields, deposits charge-conserving currents, re-bins particles that left
//! their cell, and finishes the field update. The two particle stages are
//! timed separately; everything else lands in the "other" bucket.
//!
//! Two particle layouts are supported. The naive layout keeps one flat
//! particle array and runs sequentially, as a locality baseline. The
//! blocked layout groups particles by supercell and runs both particle
//! stages in parallel: the push phase touches only its own supercell's
//! bins, and the deposition phase processes one chessboard color at a
//! time, writing its own supercell's edges directly and deferring anything
//! that spills into a neighbor to a sequential seam pass. Deferred lists
//! and the seam order are fixed by storage order, so results are bitwise
//! identical for any worker count or subdomain split.

use std::time::Instant;

use rayon::prelude::*;

use crate::config::{Interpolation, Layout, SimulationConfig};
use crate::diagnostics::{
    charge_density, continuity_residual_max, field_energy, gauss_residual_field,
    kinetic_energy, max_abs_difference, DiagnosticsRecord,
};
use crate::error::{Error, Result};
use crate::grid::{ScalarField3, YeeGrid};
use crate::kernels::{
    boris_push, deposit_current_vb, deposit_segment, gather_fields, gather_fields_chunked_into,
    move_particle, split_trajectory, ChunkBuffers, TrajectorySegment,
};
use crate::maxwell::{advance_b_half, advance_e};
use crate::particle::{Particle, Species, ELECTRON, PROTON};
use crate::supercell::{
    chessboard_schedule, estimate_deposition_data_bytes, estimate_push_data_bytes,
    per_color_counts, CellBin, SharedCurrents, SupercellStore, DEFAULT_THREADS_PER_CORE,
    N_COLORS,
};
use crate::timings::StageTimings;
use crate::vec3::Vec3;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A segment that spilled outside its supercell during parallel deposition,
/// waiting for the sequential seam pass.
#[derive(Debug, Clone, Copy)]
struct DeferredSegment {
    seg: TrajectorySegment,
    charge_per_volume: f64,
}

enum State {
    Naive {
        particles: Vec<Particle>,
        prev: Vec<Vec3>,
    },
    Blocked {
        store: SupercellStore,
        deferred: Vec<Vec<DeferredSegment>>,
    },
}

/// A configured simulation: grid, species table, and particle storage.
pub struct Simulation {
    pub config: SimulationConfig,
    pub grid: YeeGrid,
    pub species: Vec<Species>,
    state: State,
    pools: Vec<rayon::ThreadPool>,
    subdomain_of: Vec<usize>,
    step_index: usize,
}

/// Timings and diagnostics from one benchmark run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub timings: StageTimings,
    pub steps_completed: usize,
    /// Total bin-to-bin moves (0 for the naive layout, which has no bins).
    pub migrations: usize,
    pub diagnostics: Vec<DiagnosticsRecord>,
    /// Order-sensitive hash of fields and particles, for determinism checks.
    pub checksum: u64,
    /// Supercells per chessboard color (blocked layout only).
    pub color_counts: Option<[usize; N_COLORS]>,
}

impl Simulation {
    /// Builds a simulation from parts. The grid must match the configured
    /// dimensions and all particles must lie inside its domain box.
    pub fn new(
        config: &SimulationConfig,
        grid: YeeGrid,
        species: Vec<Species>,
        particles: Vec<Particle>,
    ) -> Result<Self> {
        config.validate()?;
        if grid.dims != config.dims {
            return Err(Error::Config {
                violations: vec![format!(
                    "grid dims {:?} disagree with configured dims {:?}",
                    grid.dims, config.dims
                )],
            });
        }
        let (state, pools, subdomain_of) = match config.layout {
            Layout::Naive => {
                for (index, p) in particles.iter().enumerate() {
                    if !grid.contains(p.position) {
                        return Err(Error::ParticleOutOfDomain {
                            index,
                            x: p.position.x,
                            y: p.position.y,
                            z: p.position.z,
                        });
                    }
                }
                (
                    State::Naive {
                        particles,
                        prev: Vec::new(),
                    },
                    Vec::new(),
                    Vec::new(),
                )
            }
            Layout::Supercell => {
                let store = SupercellStore::build(&grid, config.supercell_size, particles)?;
                chessboard_schedule(&store)?;
                let deferred = vec![Vec::new(); store.n_supercells()];
                let pools = (0..config.subdomains)
                    .map(|_| {
                        rayon::ThreadPoolBuilder::new()
                            .num_threads(config.workers)
                            .build()
                            .map_err(|e| Error::ThreadPool(e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                // Contiguous z-layer slabs of supercells, one per subdomain.
                let layers = store.counts()[2];
                let subs = config.subdomains;
                let layer_sub: Vec<usize> = (0..layers).map(|l| l * subs / layers).collect();
                let subdomain_of = (0..store.n_supercells())
                    .map(|sc| layer_sub[store.supercell_coords(sc)[2]])
                    .collect();
                (State::Blocked { store, deferred }, pools, subdomain_of)
            }
        };
        Ok(Simulation {
            config: config.clone(),
            grid,
            species,
            state,
            pools,
            subdomain_of,
            step_index: 0,
        })
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn n_particles(&self) -> usize {
        match &self.state {
            State::Naive { particles, .. } => particles.len(),
            State::Blocked { store, .. } => store.n_particles(),
        }
    }

    /// All particles in the layout's deterministic storage order.
    pub fn iter_particles(&self) -> Box<dyn Iterator<Item = &Particle> + '_> {
        match &self.state {
            State::Naive { particles, .. } => Box::new(particles.iter()),
            State::Blocked { store, .. } => Box::new(store.iter_particles()),
        }
    }

    /// Copies all particles out in storage order.
    pub fn particles_snapshot(&self) -> Vec<Particle> {
        self.iter_particles().copied().collect()
    }

    pub fn color_counts(&self) -> Option<[usize; N_COLORS]> {
        match &self.state {
            State::Naive { .. } => None,
            State::Blocked { store, .. } => Some(per_color_counts(store.counts())),
        }
    }

    /// Order-sensitive FNV-1a hash over every field array and particle
    /// record. Two runs of the same layout agree bit for bit exactly when
    /// their checksums agree.
    pub fn state_checksum(&self) -> u64 {
        let mut hash = Fnv1a::new();
        for field in self.grid.field_arrays() {
            for v in &field.data {
                hash.update(&v.to_le_bytes());
            }
        }
        for p in self.iter_particles() {
            hash.update(&p.to_bytes());
        }
        hash.finish()
    }

    /// Advances one full step, accumulating stage times.
    pub fn step(&mut self, timings: &mut StageTimings) -> Result<usize> {
        let (c, dt) = (self.config.c, self.config.dt);

        let t = Instant::now();
        advance_b_half(&mut self.grid, c, dt);
        let mut other = t.elapsed().as_secs_f64();

        let t = Instant::now();
        self.push_phase();
        timings.particle_push += t.elapsed().as_secs_f64();

        let t = Instant::now();
        self.deposition_phase()
            .map_err(|e| e.with_step(self.step_index))?;
        timings.current_deposition += t.elapsed().as_secs_f64();

        let t = Instant::now();
        let moved = self.migrate_phase();
        advance_b_half(&mut self.grid, c, dt);
        advance_e(&mut self.grid, c, dt);
        other += t.elapsed().as_secs_f64();
        timings.other += other;

        self.step_index += 1;
        Ok(moved)
    }

    /// Runs the configured number of steps, sampling diagnostics every
    /// `diag_every` steps (0 = only the initial state and the final step).
    pub fn run(&mut self, diag_every: usize) -> Result<RunReport> {
        let overall = Instant::now();
        let mut timings = StageTimings::default();
        let mut diagnostics = Vec::new();

        let rho0 = charge_density(&self.grid, self.iter_particles(), &self.species);
        let gauss_baseline = gauss_residual_field(&self.grid, &rho0);
        diagnostics.push(DiagnosticsRecord {
            step: 0,
            field_energy: field_energy(&self.grid),
            kinetic_energy: kinetic_energy(self.iter_particles(), &self.species, self.config.c),
            max_continuity_residual: 0.0,
            gauss_drift: 0.0,
        });

        let steps = self.config.steps;
        let mut migrations = 0;
        for s in 0..steps {
            let sample = (diag_every > 0 && (s + 1) % diag_every == 0) || s + 1 == steps;
            let rho_old = if sample {
                Some(charge_density(&self.grid, self.iter_particles(), &self.species))
            } else {
                None
            };
            migrations += self.step(&mut timings)?;
            if let Some(rho_old) = rho_old {
                let rho_new = charge_density(&self.grid, self.iter_particles(), &self.species);
                diagnostics.push(DiagnosticsRecord {
                    step: s + 1,
                    field_energy: field_energy(&self.grid),
                    kinetic_energy: kinetic_energy(
                        self.iter_particles(),
                        &self.species,
                        self.config.c,
                    ),
                    max_continuity_residual: continuity_residual_max(
                        &self.grid,
                        &rho_old,
                        &rho_new,
                        self.config.dt,
                    ),
                    gauss_drift: max_abs_difference(
                        &gauss_residual_field(&self.grid, &rho_new),
                        &gauss_baseline,
                    ),
                });
            }
        }
        timings.overall += overall.elapsed().as_secs_f64();
        Ok(RunReport {
            timings,
            steps_completed: steps,
            migrations,
            diagnostics,
            checksum: self.state_checksum(),
            color_counts: self.color_counts(),
        })
    }

    fn push_phase(&mut self) {
        let Simulation {
            grid,
            species,
            config,
            state,
            pools,
            subdomain_of,
            ..
        } = self;
        let grid: &YeeGrid = grid;
        let species: &[Species] = species;
        let (interp, chunk, c, dt) = (
            config.interpolation,
            config.chunk_size,
            config.c,
            config.dt,
        );
        match state {
            State::Naive { particles, prev } => {
                let mut bufs = ChunkBuffers::new();
                push_span(grid, species, interp, chunk, c, dt, particles, prev, &mut bufs);
            }
            State::Blocked { store, .. } => {
                let mut buckets: Vec<Vec<&mut [CellBin]>> =
                    (0..pools.len()).map(|_| Vec::new()).collect();
                for (sc, bins) in store.supercell_slices_mut() {
                    buckets[subdomain_of[sc]].push(bins);
                }
                std::thread::scope(|scope| {
                    for (pool, items) in pools.iter().zip(buckets) {
                        scope.spawn(move || {
                            pool.install(|| {
                                items.into_par_iter().for_each(|bins| {
                                    let mut bufs = ChunkBuffers::new();
                                    for bin in bins {
                                        push_span(
                                            grid,
                                            species,
                                            interp,
                                            chunk,
                                            c,
                                            dt,
                                            &mut bin.particles,
                                            &mut bin.prev_positions,
                                            &mut bufs,
                                        );
                                    }
                                });
                            });
                        });
                    }
                });
            }
        }
    }

    fn deposition_phase(&mut self) -> Result<()> {
        let Simulation {
            grid,
            species,
            config,
            state,
            pools,
            subdomain_of,
            ..
        } = self;
        let species: &[Species] = species;
        let dt = config.dt;
        match state {
            State::Naive { particles, prev } => {
                grid.zero_currents();
                for (p, &x_old) in particles.iter().zip(prev.iter()) {
                    let s = species[p.species as usize];
                    deposit_current_vb(grid, x_old, p.position, s.charge, p.weight, dt)?;
                }
                Ok(())
            }
            State::Blocked { store, deferred } => {
                let cell_volume = grid.cell_volume();
                let mut jx = std::mem::replace(&mut grid.jx, ScalarField3::zeros(0, 0, 0));
                let mut jy = std::mem::replace(&mut grid.jy, ScalarField3::zeros(0, 0, 0));
                let mut jz = std::mem::replace(&mut grid.jz, ScalarField3::zeros(0, 0, 0));
                jx.fill(0.0);
                jy.fill(0.0);
                jz.fill(0.0);

                let spans: Vec<[[usize; 2]; 3]> =
                    (0..store.n_supercells()).map(|sc| store.cell_span(sc)).collect();
                let colors: Vec<usize> =
                    (0..store.n_supercells()).map(|sc| store.color_of(sc)).collect();

                let result = {
                    let shared = SharedCurrents::new(&mut jx, &mut jy, &mut jz);
                    let grid: &YeeGrid = grid;
                    // Bucket per (color, subdomain).
                    let mut buckets: Vec<Vec<Vec<DepositItem>>> = (0..N_COLORS)
                        .map(|_| (0..pools.len()).map(|_| Vec::new()).collect())
                        .collect();
                    for ((sc, bins), def) in
                        store.supercell_slices_mut().into_iter().zip(deferred.iter_mut())
                    {
                        buckets[colors[sc]][subdomain_of[sc]].push(DepositItem {
                            bins,
                            deferred: def,
                            span: spans[sc],
                        });
                    }
                    let mut outcome: Result<()> = Ok(());
                    for color_bucket in buckets {
                        let shared = &shared;
                        let r: Result<()> = std::thread::scope(|scope| {
                            let handles: Vec<_> = pools
                                .iter()
                                .zip(color_bucket)
                                .map(|(pool, items)| {
                                    scope.spawn(move || -> Result<()> {
                                        pool.install(|| {
                                            items.into_par_iter().try_for_each(|item| {
                                                deposit_item(
                                                    grid,
                                                    species,
                                                    cell_volume,
                                                    dt,
                                                    item,
                                                    shared,
                                                )
                                            })
                                        })
                                    })
                                })
                                .collect();
                            for h in handles {
                                h.join().expect("deposition worker panicked")?;
                            }
                            Ok(())
                        });
                        if r.is_err() {
                            outcome = r;
                            break;
                        }
                    }
                    outcome
                };

                grid.jx = jx;
                grid.jy = jy;
                grid.jz = jz;
                result?;

                // Seam pass: spill-over deposits, sequential in supercell
                // order, so the result never depends on worker scheduling.
                for def in deferred.iter_mut() {
                    for d in def.iter() {
                        deposit_segment(&mut *grid, &d.seg, d.charge_per_volume, dt);
                    }
                    def.clear();
                }
                Ok(())
            }
        }
    }

    fn migrate_phase(&mut self) -> usize {
        match &mut self.state {
            State::Naive { particles, .. } => {
                // No bins to maintain; just wrap positions back into the box.
                for p in particles.iter_mut() {
                    if !self.grid.contains(p.position) {
                        p.position = self.grid.wrap_position(p.position);
                    }
                }
                0
            }
            State::Blocked { store, .. } => store.migrate(&self.grid),
        }
    }
}

struct DepositItem<'a> {
    bins: &'a mut [CellBin],
    deferred: &'a mut Vec<DeferredSegment>,
    span: [[usize; 2]; 3],
}

fn in_span(cell: [isize; 3], span: [[usize; 2]; 3]) -> bool {
    (0..3).all(|a| span[a][0] as isize <= cell[a] && cell[a] < span[a][1] as isize)
}

fn deposit_item<'s>(
    grid: &YeeGrid,
    species: &[Species],
    cell_volume: f64,
    dt: f64,
    item: DepositItem<'_>,
    shared: &'s SharedCurrents<'s>,
) -> Result<()> {
    item.deferred.clear();
    let mut sink = shared.sink();
    for bin in item.bins.iter() {
        for (p, &x_old) in bin.particles.iter().zip(&bin.prev_positions) {
            let segments = split_trajectory(grid, x_old, p.position)?;
            let cpv = species[p.species as usize].charge * p.weight / cell_volume;
            for seg in segments.as_slice() {
                if in_span(seg.cell, item.span) {
                    deposit_segment(&mut sink, seg, cpv, dt);
                } else {
                    item.deferred.push(DeferredSegment {
                        seg: *seg,
                        charge_per_volume: cpv,
                    });
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn push_span(
    grid: &YeeGrid,
    species: &[Species],
    interp: Interpolation,
    chunk: usize,
    c: f64,
    dt: f64,
    particles: &mut [Particle],
    prev: &mut Vec<Vec3>,
    bufs: &mut ChunkBuffers,
) {
    prev.clear();
    prev.extend(particles.iter().map(|p| p.position));
    match interp {
        Interpolation::Scalar => {
            for p in particles.iter_mut() {
                let g = gather_fields(grid, p.position);
                advance_particle(p, g.e, g.b, species, c, dt);
            }
        }
        Interpolation::Chunked => {
            let n = particles.len();
            let mut start = 0;
            while start < n {
                let end = (start + chunk).min(n);
                gather_fields_chunked_into(grid, &prev[start..end], bufs);
                for (lane, p) in particles[start..end].iter_mut().enumerate() {
                    let e = Vec3::new(bufs.ex[lane], bufs.ey[lane], bufs.ez[lane]);
                    let b = Vec3::new(bufs.bx[lane], bufs.by[lane], bufs.bz[lane]);
                    advance_particle(p, e, b, species, c, dt);
                }
                start = end;
            }
        }
    }
}

#[inline]
fn advance_particle(p: &mut Particle, e: Vec3, b: Vec3, species: &[Species], c: f64, dt: f64) {
    let s = species[p.species as usize];
    p.momentum = boris_push(p.momentum, e, b, s.charge, s.mass, c, dt);
    p.position = move_particle(p.position, p.momentum, s.mass, c, dt);
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf29ce484222325)
    }

    fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Fills every cell with `particles_per_cell` motionless particles of
/// alternating species (electron, ion) and zero fields: a plasma whose
/// exact state must be a fixed point of the stepping loop. Positions are
/// uniform inside each cell from a counter-based generator seeded by
/// `config.seed`.
pub fn setup_frozen_plasma(config: &SimulationConfig) -> Result<Simulation> {
    let grid = YeeGrid::with_unit_cells(config.dims);
    let species = vec![ELECTRON, PROTON];
    let particles = lattice_particles(config, &grid, |_rng| (Vec3::ZERO, 1.0));
    Simulation::new(config, grid, species, particles)
}

/// Like the frozen setup but with unit-charge species and Gaussian momenta
/// of width `thermal_momentum` (in units of m c), for physics tests that
/// need actual motion.
pub fn setup_thermal_plasma(config: &SimulationConfig, thermal_momentum: f64) -> Result<Simulation> {
    let grid = YeeGrid::with_unit_cells(config.dims);
    let species = vec![Species::new(-1.0, 1.0), Species::new(1.0, 1.0)];
    let weight = 1.0 / config.particles_per_cell.max(1) as f64;
    let scale = thermal_momentum * config.c; // m = 1
    let particles = lattice_particles(config, &grid, |rng| {
        let n: [f64; 3] = [
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        ];
        (Vec3::new(n[0], n[1], n[2]).scale(scale), weight)
    });
    Simulation::new(config, grid, species, particles)
}

fn lattice_particles(
    config: &SimulationConfig,
    grid: &YeeGrid,
    mut momentum_weight: impl FnMut(&mut ChaCha8Rng) -> (Vec3, f64),
) -> Vec<Particle> {
    let [nx, ny, nz] = config.dims;
    let ppc = config.particles_per_cell;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut particles = Vec::with_capacity(nx * ny * nz * ppc);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for s in 0..ppc {
                    let u = Vec3::new(rng.random(), rng.random(), rng.random());
                    let position = Vec3::new(
                        grid.origin.x + (i as f64 + u.x) * grid.spacing.x,
                        grid.origin.y + (j as f64 + u.y) * grid.spacing.y,
                        grid.origin.z + (k as f64 + u.z) * grid.spacing.z,
                    );
                    let (momentum, weight) = momentum_weight(&mut rng);
                    particles.push(Particle::new(position, momentum, weight, (s % 2) as u32));
                }
            }
        }
    }
    particles
}

/// One worker-shape measurement from [`sweep_workers`].
#[derive(Debug, Clone)]
pub struct WorkerSweepRow {
    pub subdomains: usize,
    pub workers: usize,
    pub timings: StageTimings,
    pub checksum: u64,
}

/// Runs the frozen-plasma benchmark once per (subdomains, workers) shape.
/// The checksums let callers verify the physics is identical across shapes.
pub fn sweep_workers(
    config: &SimulationConfig,
    shapes: &[(usize, usize)],
) -> Result<Vec<WorkerSweepRow>> {
    shapes
        .iter()
        .map(|&(subdomains, workers)| {
            let mut cfg = config.clone();
            cfg.layout = Layout::Supercell;
            cfg.subdomains = subdomains;
            cfg.workers = workers;
            let mut sim = setup_frozen_plasma(&cfg)?;
            let report = sim.run(0)?;
            Ok(WorkerSweepRow {
                subdomains,
                workers,
                timings: report.timings,
                checksum: report.checksum,
            })
        })
        .collect()
}

/// One supercell-size measurement from [`sweep_supercell`].
#[derive(Debug, Clone)]
pub struct SupercellSweepRow {
    pub size: usize,
    pub push_bytes: usize,
    pub deposition_bytes: usize,
    /// Timings and checksum when the size was runnable.
    pub result: Option<(StageTimings, u64)>,
    /// Why the size was skipped, when it was.
    pub note: Option<String>,
}

/// Supercell-size sweep plus its naive-layout baseline.
#[derive(Debug, Clone)]
pub struct SupercellSweep {
    pub rows: Vec<SupercellSweepRow>,
    pub naive: StageTimings,
}

/// Times the frozen-plasma benchmark at each supercell size (skipping,
/// with a note, sizes the schedule rejects) and once with the naive
/// layout as the locality baseline. Working-set estimates are reported
/// for every size, runnable or not.
pub fn sweep_supercell(config: &SimulationConfig, sizes: &[usize]) -> Result<SupercellSweep> {
    let mut rows = Vec::new();
    for &size in sizes {
        let push_bytes = estimate_push_data_bytes(size, DEFAULT_THREADS_PER_CORE);
        let deposition_bytes = estimate_deposition_data_bytes(size, DEFAULT_THREADS_PER_CORE);
        let mut cfg = config.clone();
        cfg.layout = Layout::Supercell;
        cfg.supercell_size = size;
        let (result, note) = match setup_frozen_plasma(&cfg) {
            Ok(mut sim) => {
                let report = sim.run(0)?;
                (Some((report.timings, report.checksum)), None)
            }
            Err(e @ (Error::OddSupercellCount { .. } | Error::Config { .. })) => {
                (None, Some(e.to_string()))
            }
            Err(e) => return Err(e),
        };
        rows.push(SupercellSweepRow {
            size,
            push_bytes,
            deposition_bytes,
            result,
            note,
        });
    }
    let mut naive_cfg = config.clone();
    naive_cfg.layout = Layout::Naive;
    let naive = setup_frozen_plasma(&naive_cfg)?.run(0)?.timings;
    Ok(SupercellSweep { rows, naive })
}
