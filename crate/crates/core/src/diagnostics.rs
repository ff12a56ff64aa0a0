//! Conservation diagnostics: energies, charge density, and the discrete
//! continuity and divergence identities the scheme is supposed to preserve.

use crate::grid::{wrap_index, ScalarField3, YeeGrid};
use crate::kernels::{base_and_frac, cic_weights_frac, lorentz_gamma};
use crate::particle::{Particle, Species};

/// Per-step diagnostic sample emitted by the benchmark driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub field_energy: f64,
    pub kinetic_energy: f64,
    /// max |d(rho)/dt + div J| over nodes for the step ending here.
    pub max_continuity_residual: f64,
    /// max |(div E - 4 pi rho) - baseline| over nodes, i.e. how far the
    /// divergence constraint has drifted from its initial discretization.
    pub gauss_drift: f64,
}

/// Node-centered cloud-in-cell charge density (charge per volume).
pub fn charge_density<'a>(
    grid: &YeeGrid,
    particles: impl IntoIterator<Item = &'a Particle>,
    species: &[Species],
) -> ScalarField3 {
    let [nx, ny, nz] = grid.dims;
    let mut rho = ScalarField3::zeros(nx, ny, nz);
    let inv_volume = 1.0 / grid.cell_volume();
    for p in particles {
        let f = grid.frac_coords(p.position);
        let (bx, fx) = base_and_frac(f.x);
        let (by, fy) = base_and_frac(f.y);
        let (bz, fz) = base_and_frac(f.z);
        let w = cic_weights_frac(fx, fy, fz);
        let q = species[p.species as usize].charge * p.weight * inv_volume;
        for c in 0..2usize {
            for b in 0..2usize {
                for a in 0..2usize {
                    rho.add(
                        wrap_index(bx + a as isize, nx),
                        wrap_index(by + b as isize, ny),
                        wrap_index(bz + c as isize, nz),
                        q * w[a + 2 * b + 4 * c],
                    );
                }
            }
        }
    }
    rho
}

/// Divergence of E at nodes: backward differences of the edge-centered
/// components, matching the current divergence used in the continuity check.
pub fn divergence_e(grid: &YeeGrid) -> ScalarField3 {
    let [nx, ny, nz] = grid.dims;
    let mut div = ScalarField3::zeros(nx, ny, nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let (is, js, ks) = (i as isize, j as isize, k as isize);
                let v = (grid.ex.get(i, j, k) - grid.ex.get_wrapped(is - 1, js, ks))
                    / grid.spacing.x
                    + (grid.ey.get(i, j, k) - grid.ey.get_wrapped(is, js - 1, ks))
                        / grid.spacing.y
                    + (grid.ez.get(i, j, k) - grid.ez.get_wrapped(is, js, ks - 1))
                        / grid.spacing.z;
                div.set(i, j, k, v);
            }
        }
    }
    div
}

/// div E - 4 pi rho at every node. The stepping scheme cannot make this
/// zero, but it must hold it constant; see [`max_abs_difference`].
pub fn gauss_residual_field(grid: &YeeGrid, rho: &ScalarField3) -> ScalarField3 {
    let mut field = divergence_e(grid);
    for (v, r) in field.data.iter_mut().zip(&rho.data) {
        *v -= 4.0 * std::f64::consts::PI * r;
    }
    field
}

/// Largest pointwise difference between two fields of equal shape.
pub fn max_abs_difference(a: &ScalarField3, b: &ScalarField3) -> f64 {
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// max |d(rho)/dt + div J| over nodes, with J taken from the grid.
pub fn continuity_residual_max(
    grid: &YeeGrid,
    rho_old: &ScalarField3,
    rho_new: &ScalarField3,
    dt: f64,
) -> f64 {
    let [nx, ny, nz] = grid.dims;
    let mut worst = 0.0f64;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let (is, js, ks) = (i as isize, j as isize, k as isize);
                let div = (grid.jx.get(i, j, k) - grid.jx.get_wrapped(is - 1, js, ks))
                    / grid.spacing.x
                    + (grid.jy.get(i, j, k) - grid.jy.get_wrapped(is, js - 1, ks))
                        / grid.spacing.y
                    + (grid.jz.get(i, j, k) - grid.jz.get_wrapped(is, js, ks - 1))
                        / grid.spacing.z;
                let drho = (rho_new.get(i, j, k) - rho_old.get(i, j, k)) / dt;
                worst = worst.max((drho + div).abs());
            }
        }
    }
    worst
}

/// Total electromagnetic energy: sum of (E^2 + B^2) / 8 pi over cells,
/// times the cell volume.
pub fn field_energy(grid: &YeeGrid) -> f64 {
    let mut sum = 0.0;
    for f in [&grid.ex, &grid.ey, &grid.ez, &grid.bx, &grid.by, &grid.bz] {
        for v in &f.data {
            sum += v * v;
        }
    }
    sum * grid.cell_volume() / (8.0 * std::f64::consts::PI)
}

/// Total kinetic energy: sum of weight * (gamma - 1) * m c^2.
pub fn kinetic_energy<'a>(
    particles: impl IntoIterator<Item = &'a Particle>,
    species: &[Species],
    c: f64,
) -> f64 {
    let mut sum = 0.0;
    for p in particles {
        let s = species[p.species as usize];
        let gamma = lorentz_gamma(p.momentum, s.mass, c);
        sum += p.weight * (gamma - 1.0) * s.mass * c * c;
    }
    sum
}
