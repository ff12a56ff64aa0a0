//! Staggered (Yee) field grid with periodic boundaries.
//!
//! Electric components live on cell edges, magnetic components on cell
//! faces, and the current density is colocated with E:
//!
//! - `Ex` at (i+1/2, j, k), `Ey` at (i, j+1/2, k), `Ez` at (i, j, k+1/2)
//! - `Bx` at (i, j+1/2, k+1/2), `By` at (i+1/2, j, k+1/2), `Bz` at (i+1/2, j+1/2, k)
//!
//! Every component array has the full nx*ny*nz extent; periodicity makes the
//! staggered lattices the same size as the node lattice. Storage is x-fastest:
//! `idx = i + nx*(j + ny*k)`.

use crate::vec3::Vec3;

/// Dense 3D scalar array, x-fastest layout, with periodic accessors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub data: Vec<f64>,
}

impl ScalarField3 {
    pub fn zeros(nx: usize, ny: usize, nz: usize) -> Self {
        ScalarField3 { nx, ny, nz, data: vec![0.0; nx * ny * nz] }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny && k < self.nz);
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let idx = self.idx(i, j, k);
        self.data[idx] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let idx = self.idx(i, j, k);
        self.data[idx] += v;
    }

    /// Value at possibly out-of-range integer coordinates, wrapped periodically.
    #[inline]
    pub fn get_wrapped(&self, i: isize, j: isize, k: isize) -> f64 {
        self.get(
            wrap_index(i, self.nx),
            wrap_index(j, self.ny),
            wrap_index(k, self.nz),
        )
    }

    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Wraps an integer lattice coordinate into `[0, n)`.
#[inline]
pub fn wrap_index(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// Half-offset pattern of one staggered field component, in units of the
/// grid spacing per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stagger {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const STAGGER_EX: Stagger = Stagger { x: 0.5, y: 0.0, z: 0.0 };
pub const STAGGER_EY: Stagger = Stagger { x: 0.0, y: 0.5, z: 0.0 };
pub const STAGGER_EZ: Stagger = Stagger { x: 0.0, y: 0.0, z: 0.5 };
pub const STAGGER_BX: Stagger = Stagger { x: 0.0, y: 0.5, z: 0.5 };
pub const STAGGER_BY: Stagger = Stagger { x: 0.5, y: 0.0, z: 0.5 };
pub const STAGGER_BZ: Stagger = Stagger { x: 0.5, y: 0.5, z: 0.0 };

/// The full electromagnetic state: E, B and J component arrays plus geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct YeeGrid {
    /// Cells per axis.
    pub dims: [usize; 3],
    /// Cell size per axis in cm.
    pub spacing: Vec3,
    /// Position of node (0, 0, 0) in cm.
    pub origin: Vec3,
    pub ex: ScalarField3,
    pub ey: ScalarField3,
    pub ez: ScalarField3,
    pub bx: ScalarField3,
    pub by: ScalarField3,
    pub bz: ScalarField3,
    pub jx: ScalarField3,
    pub jy: ScalarField3,
    pub jz: ScalarField3,
}

impl YeeGrid {
    pub fn new(dims: [usize; 3], spacing: Vec3, origin: Vec3) -> Self {
        assert!(dims[0] > 0 && dims[1] > 0 && dims[2] > 0, "grid dims must be positive");
        let f = || ScalarField3::zeros(dims[0], dims[1], dims[2]);
        YeeGrid {
            dims,
            spacing,
            origin,
            ex: f(),
            ey: f(),
            ez: f(),
            bx: f(),
            by: f(),
            bz: f(),
            jx: f(),
            jy: f(),
            jz: f(),
        }
    }

    /// Unit-spacing grid with the origin at zero.
    pub fn with_unit_cells(dims: [usize; 3]) -> Self {
        YeeGrid::new(dims, Vec3::new(1.0, 1.0, 1.0), Vec3::ZERO)
    }

    /// Physical extent of the periodic box per axis.
    pub fn extent(&self) -> Vec3 {
        Vec3::new(
            self.dims[0] as f64 * self.spacing.x,
            self.dims[1] as f64 * self.spacing.y,
            self.dims[2] as f64 * self.spacing.z,
        )
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.x * self.spacing.y * self.spacing.z
    }

    pub fn n_cells(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Position in global fractional (cell-unit) coordinates. Node (i, j, k)
    /// sits at fractional (i, j, k); this is the shared conversion used by
    /// every kernel so weights and cell binning stay mutually consistent.
    #[inline]
    pub fn frac_coords(&self, position: Vec3) -> Vec3 {
        Vec3::new(
            (position.x - self.origin.x) / self.spacing.x,
            (position.y - self.origin.y) / self.spacing.y,
            (position.z - self.origin.z) / self.spacing.z,
        )
    }

    /// Containing cell of a position, unwrapped (may be negative or >= dims
    /// for positions outside the primary box). A coordinate exactly on a cell
    /// face belongs to the lower cell, so cells are closed on both faces and
    /// the assignment is unique.
    #[inline]
    pub fn cell_of_unwrapped(&self, position: Vec3) -> [isize; 3] {
        let f = self.frac_coords(position);
        [lower_cell(f.x), lower_cell(f.y), lower_cell(f.z)]
    }

    /// Containing cell with periodic wrap into `[0, dims)`.
    #[inline]
    pub fn cell_of(&self, position: Vec3) -> [usize; 3] {
        let c = self.cell_of_unwrapped(position);
        [
            wrap_index(c[0], self.dims[0]),
            wrap_index(c[1], self.dims[1]),
            wrap_index(c[2], self.dims[2]),
        ]
    }

    /// Wraps a position into the primary periodic box `[origin, origin + L)`.
    #[inline]
    pub fn wrap_position(&self, position: Vec3) -> Vec3 {
        let l = self.extent();
        Vec3::new(
            self.origin.x + (position.x - self.origin.x).rem_euclid(l.x),
            self.origin.y + (position.y - self.origin.y).rem_euclid(l.y),
            self.origin.z + (position.z - self.origin.z).rem_euclid(l.z),
        )
    }

    /// True when the position lies inside the closed primary box.
    pub fn contains(&self, position: Vec3) -> bool {
        let l = self.extent();
        let o = self.origin;
        position.x >= o.x
            && position.x <= o.x + l.x
            && position.y >= o.y
            && position.y <= o.y + l.y
            && position.z >= o.z
            && position.z <= o.z + l.z
    }

    /// E, B and J arrays in serialization order.
    pub fn field_arrays(&self) -> [&ScalarField3; 9] {
        [
            &self.ex, &self.ey, &self.ez, &self.bx, &self.by, &self.bz, &self.jx,
            &self.jy, &self.jz,
        ]
    }

    pub fn field_arrays_mut(&mut self) -> [&mut ScalarField3; 9] {
        [
            &mut self.ex,
            &mut self.ey,
            &mut self.ez,
            &mut self.bx,
            &mut self.by,
            &mut self.bz,
            &mut self.jx,
            &mut self.jy,
            &mut self.jz,
        ]
    }

    pub fn zero_currents(&mut self) {
        self.jx.fill(0.0);
        self.jy.fill(0.0);
        self.jz.fill(0.0);
    }
}

/// Cell index of a fractional coordinate with the on-face-goes-lower rule:
/// an exactly integral coordinate m is the shared face of cells m-1 and m
/// and is assigned to m-1.
#[inline]
pub fn lower_cell(f: f64) -> isize {
    let fl = f.floor();
    let mut c = fl as isize;
    if f == fl {
        c -= 1;
    }
    c
}
