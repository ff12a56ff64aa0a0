//! Finite-difference time-domain Maxwell solver on the staggered grid.
//!
//! Gaussian units: dE/dt = c curl B - 4 pi J, dB/dt = -c curl E. The
//! magnetic field is advanced in two half steps, one before and one after
//! the particle phase, so the stored B sits half a step behind the stored E
//! between steps and both are synchronized at integer times when particles
//! sample them. All boundaries are periodic.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{wrap_index, YeeGrid};
use crate::vec3::Vec3;

/// Largest stable time step for the given cell sizes:
/// `1 / (c * sqrt(1/dx^2 + 1/dy^2 + 1/dz^2))`.
pub fn cfl_max_dt(spacing: Vec3, c: f64) -> f64 {
    let s = 1.0 / (spacing.x * spacing.x)
        + 1.0 / (spacing.y * spacing.y)
        + 1.0 / (spacing.z * spacing.z);
    1.0 / (c * s.sqrt())
}

/// Advances B by half a time step from the curl of E:
/// `B -= (c dt / 2) * curl E` with the curl evaluated on the staggered
/// lattice. Reads E only, so the in-place update is exact.
pub fn advance_b_half(grid: &mut YeeGrid, c: f64, dt: f64) {
    let [nx, ny, nz] = grid.dims;
    let (dx, dy, dz) = (grid.spacing.x, grid.spacing.y, grid.spacing.z);
    let coef = 0.5 * c * dt;
    for k in 0..nz {
        let kp = if k + 1 == nz { 0 } else { k + 1 };
        for j in 0..ny {
            let jp = if j + 1 == ny { 0 } else { j + 1 };
            for i in 0..nx {
                let ip = if i + 1 == nx { 0 } else { i + 1 };
                let dezdy = (grid.ez.get(i, jp, k) - grid.ez.get(i, j, k)) / dy;
                let deydz = (grid.ey.get(i, j, kp) - grid.ey.get(i, j, k)) / dz;
                grid.bx.add(i, j, k, -(coef * (dezdy - deydz)));

                let dexdz = (grid.ex.get(i, j, kp) - grid.ex.get(i, j, k)) / dz;
                let dezdx = (grid.ez.get(ip, j, k) - grid.ez.get(i, j, k)) / dx;
                grid.by.add(i, j, k, -(coef * (dexdz - dezdx)));

                let deydx = (grid.ey.get(ip, j, k) - grid.ey.get(i, j, k)) / dx;
                let dexdy = (grid.ex.get(i, jp, k) - grid.ex.get(i, j, k)) / dy;
                grid.bz.add(i, j, k, -(coef * (deydx - dexdy)));
            }
        }
    }
}

/// Advances E by a full time step from the curl of B and the accumulated
/// current: `E += c dt * curl B - 4 pi dt * J`. Reads B and J only.
pub fn advance_e(grid: &mut YeeGrid, c: f64, dt: f64) {
    let [nx, ny, nz] = grid.dims;
    let (dx, dy, dz) = (grid.spacing.x, grid.spacing.y, grid.spacing.z);
    let ce = c * dt;
    let cj = 4.0 * PI * dt;
    for k in 0..nz {
        let km = if k == 0 { nz - 1 } else { k - 1 };
        for j in 0..ny {
            let jm = if j == 0 { ny - 1 } else { j - 1 };
            for i in 0..nx {
                let im = if i == 0 { nx - 1 } else { i - 1 };
                let dbzdy = (grid.bz.get(i, j, k) - grid.bz.get(i, jm, k)) / dy;
                let dbydz = (grid.by.get(i, j, k) - grid.by.get(i, j, km)) / dz;
                grid.ex.add(i, j, k, ce * (dbzdy - dbydz) - cj * grid.jx.get(i, j, k));

                let dbxdz = (grid.bx.get(i, j, k) - grid.bx.get(i, j, km)) / dz;
                let dbzdx = (grid.bz.get(i, j, k) - grid.bz.get(im, j, k)) / dx;
                grid.ey.add(i, j, k, ce * (dbxdz - dbzdx) - cj * grid.jy.get(i, j, k));

                let dbydx = (grid.by.get(i, j, k) - grid.by.get(im, j, k)) / dx;
                let dbxdy = (grid.bx.get(i, j, k) - grid.bx.get(i, jm, k)) / dy;
                grid.ez.add(i, j, k, ce * (dbydx - dbxdy) - cj * grid.jz.get(i, j, k));
            }
        }
    }
}

/// Physical wavevector of an integer mode triple on the periodic box.
pub fn mode_wavevector(grid: &YeeGrid, mode: [i64; 3]) -> Vec3 {
    let l = grid.extent();
    Vec3::new(
        2.0 * PI * mode[0] as f64 / l.x,
        2.0 * PI * mode[1] as f64 / l.y,
        2.0 * PI * mode[2] as f64 / l.z,
    )
}

/// Effective lattice wavevector kappa_i = 2 sin(k_i h_i / 2) / h_i that
/// governs the discrete dispersion of the scheme.
pub fn lattice_wavevector(grid: &YeeGrid, mode: [i64; 3]) -> Vec3 {
    let k = mode_wavevector(grid, mode);
    let h = grid.spacing;
    Vec3::new(
        2.0 * (k.x * h.x / 2.0).sin() / h.x,
        2.0 * (k.y * h.y / 2.0).sin() / h.y,
        2.0 * (k.z * h.z / 2.0).sin() / h.z,
    )
}

/// Angular frequency of a lattice mode under the discrete dispersion
/// relation `sin^2(w dt / 2) / (c dt)^2 = sum_i sin^2(k_i h_i / 2) / h_i^2`.
pub fn dispersion_omega(grid: &YeeGrid, c: f64, mode: [i64; 3], dt: f64) -> f64 {
    let kappa = lattice_wavevector(grid, mode).norm();
    let s = 0.5 * c * dt * kappa;
    assert!(s <= 1.0, "mode unstable at this time step (sin argument {s} > 1)");
    2.0 * s.asin() / dt
}

/// Time step that makes one full period of the mode equal exactly `steps`
/// leapfrog steps, from inverting the dispersion relation.
pub fn plane_wave_matched_dt(grid: &YeeGrid, c: f64, mode: [i64; 3], steps: usize) -> f64 {
    assert!(steps >= 2, "a period needs at least two steps");
    let kappa = lattice_wavevector(grid, mode).norm();
    assert!(kappa > 0.0, "zero wavevector has no finite period");
    2.0 * (PI / steps as f64).sin() / (c * kappa)
}

/// Fills the grid with a linearly polarized plane-wave eigenmode of the
/// discrete scheme: E perpendicular to B perpendicular to the wavevector,
/// equal amplitudes, and the stored B sampled half a time step behind E so
/// the pair advances under the solver without any spurious beat.
///
/// `mode` holds integer wavenumbers per axis (periodic-compatible); a zero
/// mode with nonzero amplitude is rejected. Amplitude zero clears the fields.
pub fn init_plane_wave(
    grid: &mut YeeGrid,
    mode: [i64; 3],
    amplitude: f64,
    c: f64,
    dt: f64,
) -> Result<()> {
    for f in grid.field_arrays_mut() {
        f.fill(0.0);
    }
    if amplitude == 0.0 {
        return Ok(());
    }
    if mode == [0, 0, 0] {
        return Err(Error::ZeroWavevector);
    }

    let k = mode_wavevector(grid, mode);
    let kappa = lattice_wavevector(grid, mode);
    let kappa_norm = kappa.norm();
    let kappa_hat = kappa.scale(1.0 / kappa_norm);

    // Polarization: unit vector orthogonal to kappa, chosen deterministically
    // along the axis least aligned with the wavevector.
    let axes = [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)];
    let comps = [kappa_hat.x.abs(), kappa_hat.y.abs(), kappa_hat.z.abs()];
    let mut axis = 0;
    for i in 1..3 {
        if comps[i] < comps[axis] {
            axis = i;
        }
    }
    let u = axes[axis];
    let mut pol = u - kappa_hat.scale(u.dot(kappa_hat));
    pol = pol.scale(1.0 / pol.norm());

    let e0 = pol.scale(amplitude);
    // Discrete Faraday/Ampere balance gives |B0| = |E0| with B0 along
    // kappa_hat x E0.
    let b0 = kappa_hat.cross(e0);

    let omega = dispersion_omega(grid, c, mode, dt);
    // Stored B lags E by half a step: evaluate its phase at t = -dt/2.
    let b_phase = 0.5 * omega * dt;

    let [nx, ny, nz] = grid.dims;
    let h = grid.spacing;
    let o = grid.origin;
    let pos = |i: usize, j: usize, kk: usize, sx: f64, sy: f64, sz: f64| {
        Vec3::new(
            o.x + (i as f64 + sx) * h.x,
            o.y + (j as f64 + sy) * h.y,
            o.z + (kk as f64 + sz) * h.z,
        )
    };
    for kk in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let phase_at = |p: Vec3, extra: f64| (k.dot(p) + extra).cos();
                grid.ex.set(i, j, kk, e0.x * phase_at(pos(i, j, kk, 0.5, 0.0, 0.0), 0.0));
                grid.ey.set(i, j, kk, e0.y * phase_at(pos(i, j, kk, 0.0, 0.5, 0.0), 0.0));
                grid.ez.set(i, j, kk, e0.z * phase_at(pos(i, j, kk, 0.0, 0.0, 0.5), 0.0));
                grid.bx.set(i, j, kk, b0.x * phase_at(pos(i, j, kk, 0.0, 0.5, 0.5), b_phase));
                grid.by.set(i, j, kk, b0.y * phase_at(pos(i, j, kk, 0.5, 0.0, 0.5), b_phase));
                grid.bz.set(i, j, kk, b0.z * phase_at(pos(i, j, kk, 0.5, 0.5, 0.0), b_phase));
            }
        }
    }
    Ok(())
}

/// Discrete divergence of B at cell centers, maximal absolute value.
pub fn max_abs_div_b(grid: &YeeGrid) -> f64 {
    let [nx, ny, nz] = grid.dims;
    let (dx, dy, dz) = (grid.spacing.x, grid.spacing.y, grid.spacing.z);
    let mut worst = 0.0_f64;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let ip = wrap_index(i as isize + 1, nx);
                let jp = wrap_index(j as isize + 1, ny);
                let kp = wrap_index(k as isize + 1, nz);
                let div = (grid.bx.get(ip, j, k) - grid.bx.get(i, j, k)) / dx
                    + (grid.by.get(i, jp, k) - grid.by.get(i, j, k)) / dy
                    + (grid.bz.get(i, j, kp) - grid.bz.get(i, j, k)) / dz;
                worst = worst.max(div.abs());
            }
        }
    }
    worst
}
