//! Particle storage binned by cell and grouped into supercells.
//!
//! Bins are stored so all cells of one supercell are contiguous, supercells
//! in lexicographic order. A parallel phase can therefore hand each worker
//! one supercell as a plain mutable slice of bins, and a whole block's
//! particles stream through cache front to back.

use crate::error::{Error, Result};
use crate::grid::YeeGrid;
use crate::particle::Particle;
use crate::vec3::Vec3;

/// Particles of one grid cell, plus scratch reused by the stepping loop.
#[derive(Debug, Default, Clone)]
pub struct CellBin {
    pub particles: Vec<Particle>,
    /// Pre-move positions stashed by the push phase for the deposition
    /// phase; `prev_positions[i]` pairs with `particles[i]`.
    pub prev_positions: Vec<Vec3>,
}

/// Cell bins grouped into cubic supercells of edge length `supercell_size`
/// cells. Grid dimensions need not divide evenly; trailing supercells are
/// simply smaller.
#[derive(Debug, Clone)]
pub struct SupercellStore {
    dims: [usize; 3],
    supercell_size: usize,
    counts: [usize; 3],
    /// Prefix offsets into `bins`, one per supercell plus a final total.
    starts: Vec<usize>,
    /// Global cell coordinates of each bin, in storage order.
    cells_by_bin: Vec<[usize; 3]>,
    bins: Vec<CellBin>,
}

impl SupercellStore {
    /// Creates an empty store over a `dims` cell grid.
    pub fn new(dims: [usize; 3], supercell_size: usize) -> Result<Self> {
        let mut violations = Vec::new();
        if dims.iter().any(|&n| n == 0) {
            violations.push(format!("grid dims {dims:?} must all be positive"));
        }
        if supercell_size == 0 {
            violations.push("supercell size must be at least 1".into());
        }
        let min_dim = dims.iter().copied().min().unwrap_or(0);
        if supercell_size > min_dim && min_dim > 0 {
            violations.push(format!(
                "supercell size {supercell_size} exceeds smallest grid dimension {min_dim}"
            ));
        }
        if !violations.is_empty() {
            return Err(Error::Config { violations });
        }

        let counts = [
            dims[0].div_ceil(supercell_size),
            dims[1].div_ceil(supercell_size),
            dims[2].div_ceil(supercell_size),
        ];
        let n_supercells = counts[0] * counts[1] * counts[2];

        let mut starts = Vec::with_capacity(n_supercells + 1);
        let mut cells_by_bin = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        starts.push(0);
        for sk in 0..counts[2] {
            for sj in 0..counts[1] {
                for si in 0..counts[0] {
                    let span = span_of([si, sj, sk], supercell_size, dims);
                    for k in span[2][0]..span[2][1] {
                        for j in span[1][0]..span[1][1] {
                            for i in span[0][0]..span[0][1] {
                                cells_by_bin.push([i, j, k]);
                            }
                        }
                    }
                    starts.push(cells_by_bin.len());
                }
            }
        }
        let bins = vec![CellBin::default(); cells_by_bin.len()];
        Ok(SupercellStore {
            dims,
            supercell_size,
            counts,
            starts,
            cells_by_bin,
            bins,
        })
    }

    /// Creates a store and bins `particles` into it. Positions must lie in
    /// the grid's domain box.
    pub fn build(
        grid: &YeeGrid,
        supercell_size: usize,
        particles: impl IntoIterator<Item = Particle>,
    ) -> Result<Self> {
        let mut store = SupercellStore::new(grid.dims, supercell_size)?;
        for (index, p) in particles.into_iter().enumerate() {
            if !grid.contains(p.position) {
                return Err(Error::ParticleOutOfDomain {
                    index,
                    x: p.position.x,
                    y: p.position.y,
                    z: p.position.z,
                });
            }
            let bin = store.bin_index(grid.cell_of(p.position));
            store.bins[bin].particles.push(p);
        }
        Ok(store)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn supercell_size(&self) -> usize {
        self.supercell_size
    }

    /// Supercells per axis.
    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn n_supercells(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    pub fn n_cells(&self) -> usize {
        self.bins.len()
    }

    pub fn n_particles(&self) -> usize {
        self.bins.iter().map(|b| b.particles.len()).sum()
    }

    pub fn supercell_coords(&self, sc: usize) -> [usize; 3] {
        let si = sc % self.counts[0];
        let sj = (sc / self.counts[0]) % self.counts[1];
        let sk = sc / (self.counts[0] * self.counts[1]);
        [si, sj, sk]
    }

    pub fn supercell_index(&self, coords: [usize; 3]) -> usize {
        coords[0] + self.counts[0] * (coords[1] + self.counts[1] * coords[2])
    }

    /// Chessboard color (0..8) from the parity of the supercell coordinates.
    pub fn color_of(&self, sc: usize) -> usize {
        let [si, sj, sk] = self.supercell_coords(sc);
        (si % 2) + 2 * (sj % 2) + 4 * (sk % 2)
    }

    /// Range of this supercell's bins within [`Self::bins`].
    pub fn cell_range(&self, sc: usize) -> std::ops::Range<usize> {
        self.starts[sc]..self.starts[sc + 1]
    }

    /// Per-axis half-open cell span `[start, end)` of a supercell.
    pub fn cell_span(&self, sc: usize) -> [[usize; 2]; 3] {
        span_of(self.supercell_coords(sc), self.supercell_size, self.dims)
    }

    /// Per-axis inclusive span of grid nodes a supercell's own segments
    /// write current to; a segment in cell c touches nodes c and c+1.
    pub fn home_node_span(&self, sc: usize) -> [[usize; 2]; 3] {
        let span = self.cell_span(sc);
        [
            [span[0][0], span[0][1]],
            [span[1][0], span[1][1]],
            [span[2][0], span[2][1]],
        ]
    }

    /// Storage index of the bin for a global cell.
    pub fn bin_index(&self, cell: [usize; 3]) -> usize {
        let s = self.supercell_size;
        let coords = [cell[0] / s, cell[1] / s, cell[2] / s];
        let sc = self.supercell_index(coords);
        let span = span_of(coords, s, self.dims);
        let w = span[0][1] - span[0][0];
        let h = span[1][1] - span[1][0];
        let local = (cell[0] - span[0][0])
            + w * ((cell[1] - span[1][0]) + h * (cell[2] - span[2][0]));
        self.starts[sc] + local
    }

    pub fn cell_of_bin(&self, bin: usize) -> [usize; 3] {
        self.cells_by_bin[bin]
    }

    pub fn bins(&self) -> &[CellBin] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [CellBin] {
        &mut self.bins
    }

    /// Splits the bin storage into one mutable slice per supercell, in
    /// lexicographic supercell order. This is what lets a parallel phase
    /// hand disjoint supercells to workers without interior mutability.
    pub fn supercell_slices_mut(&mut self) -> Vec<(usize, &mut [CellBin])> {
        let mut out = Vec::with_capacity(self.starts.len() - 1);
        let mut rest: &mut [CellBin] = &mut self.bins;
        for sc in 0..self.starts.len() - 1 {
            let len = self.starts[sc + 1] - self.starts[sc];
            let (head, tail) = std::mem::take(&mut rest).split_at_mut(len);
            out.push((sc, head));
            rest = tail;
        }
        out
    }

    /// All particles in storage order (supercell-major, then cell, then
    /// in-bin order). This order is deterministic for a fixed layout.
    pub fn iter_particles(&self) -> impl Iterator<Item = &Particle> {
        self.bins.iter().flat_map(|b| b.particles.iter())
    }

    /// Re-bins particles that left their cell during the last move, wrapping
    /// positions back into the periodic domain. Survivors keep their in-bin
    /// order; movers are appended to their target bins in scan order, so the
    /// result is independent of how the preceding phase was scheduled.
    /// Returns how many particles changed bins.
    pub fn migrate(&mut self, grid: &YeeGrid) -> usize {
        let mut moved: Vec<(usize, Particle)> = Vec::new();
        for bin_idx in 0..self.bins.len() {
            let cell = self.cells_by_bin[bin_idx];
            let mut particles = std::mem::take(&mut self.bins[bin_idx].particles);
            particles.retain(|p| {
                if grid.cell_of(p.position) == cell && grid.contains(p.position) {
                    true
                } else {
                    let mut q = *p;
                    q.position = grid.wrap_position(q.position);
                    moved.push((self.bin_index(grid.cell_of(q.position)), q));
                    false
                }
            });
            self.bins[bin_idx].particles = particles;
        }
        let n = moved.len();
        for (target, p) in moved {
            self.bins[target].particles.push(p);
        }
        n
    }
}

fn span_of(coords: [usize; 3], size: usize, dims: [usize; 3]) -> [[usize; 2]; 3] {
    let mut span = [[0usize; 2]; 3];
    for a in 0..3 {
        let start = coords[a] * size;
        span[a] = [start, ((coords[a] + 1) * size).min(dims[a])];
    }
    span
}
