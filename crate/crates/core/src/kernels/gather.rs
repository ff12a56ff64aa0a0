//! Field interpolation from the staggered grid to particle positions.
//!
//! Two paths with bitwise-identical results: a scalar path that handles one
//! particle at a time, and a chunked path that stages a fixed-size group of
//! particles through structure-of-arrays buffers so the inner loops run over
//! plain `f64` lanes an optimizing compiler can vectorize.

use crate::grid::{
    wrap_index, ScalarField3, Stagger, YeeGrid, STAGGER_BX, STAGGER_BY, STAGGER_BZ,
    STAGGER_EX, STAGGER_EY, STAGGER_EZ,
};
use crate::kernels::cic::{base_and_frac, cic_weights_frac};
use crate::vec3::Vec3;

/// Interpolated fields plus one reserved auxiliary slot, e.g. for a
/// gamma factor cached between pipeline stages. Exactly 56 bytes per
/// particle: six field values and the scratch slot, all real-width.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[repr(C)]
pub struct GatheredFields {
    pub e: Vec3,
    pub b: Vec3,
    /// Scratch for per-particle push coefficients; interpolation leaves it 0.
    pub gamma_inv: f64,
}

/// Serialized size of the per-particle auxiliary interpolation block.
pub const GATHERED_FIELDS_BYTES: usize = 56;

const _: () = assert!(std::mem::size_of::<GatheredFields>() == GATHERED_FIELDS_BYTES);

/// Trilinear interpolation of one component on its own staggered sub-grid.
/// The eight contributions accumulate in a fixed order so results are
/// reproducible and shared bit-for-bit by the scalar and chunked paths.
#[inline]
fn interp_component(field: &ScalarField3, grid: &YeeGrid, position: Vec3, st: Stagger) -> f64 {
    let f = grid.frac_coords(position);
    let (bx, fx) = base_and_frac(f.x - st.x);
    let (by, fy) = base_and_frac(f.y - st.y);
    let (bz, fz) = base_and_frac(f.z - st.z);
    let w = cic_weights_frac(fx, fy, fz);

    let i = [wrap_index(bx, field.nx), wrap_index(bx + 1, field.nx)];
    let j = [wrap_index(by, field.ny), wrap_index(by + 1, field.ny)];
    let k = [wrap_index(bz, field.nz), wrap_index(bz + 1, field.nz)];

    let mut acc = 0.0;
    for c in 0..2 {
        for b in 0..2 {
            for a in 0..2 {
                acc += w[a + 2 * b + 4 * c] * field.get(i[a], j[b], k[c]);
            }
        }
    }
    acc
}

/// Interpolates E and B to one particle position.
pub fn gather_fields(grid: &YeeGrid, position: Vec3) -> GatheredFields {
    GatheredFields {
        e: Vec3::new(
            interp_component(&grid.ex, grid, position, STAGGER_EX),
            interp_component(&grid.ey, grid, position, STAGGER_EY),
            interp_component(&grid.ez, grid, position, STAGGER_EZ),
        ),
        b: Vec3::new(
            interp_component(&grid.bx, grid, position, STAGGER_BX),
            interp_component(&grid.by, grid, position, STAGGER_BY),
            interp_component(&grid.bz, grid, position, STAGGER_BZ),
        ),
        gamma_inv: 0.0,
    }
}

/// Structure-of-arrays staging buffers for one interpolation chunk: one lane
/// per field component plus the auxiliary lane, reused across chunks.
#[derive(Debug, Default)]
pub struct ChunkBuffers {
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    pub ez: Vec<f64>,
    pub bx: Vec<f64>,
    pub by: Vec<f64>,
    pub bz: Vec<f64>,
    pub gamma_inv: Vec<f64>,
}

impl ChunkBuffers {
    pub fn new() -> Self {
        ChunkBuffers::default()
    }

    fn reset(&mut self, n: usize) {
        for lane in [
            &mut self.ex,
            &mut self.ey,
            &mut self.ez,
            &mut self.bx,
            &mut self.by,
            &mut self.bz,
            &mut self.gamma_inv,
        ] {
            lane.clear();
            lane.resize(n, 0.0);
        }
    }
}

/// Interpolates a chunk of positions into the structure-of-arrays buffers.
/// Component-major loops over contiguous lanes; per lane the arithmetic is
/// exactly the scalar path's, so outputs are bitwise identical to mapping
/// [`gather_fields`] over the chunk.
pub fn gather_fields_chunked_into(grid: &YeeGrid, positions: &[Vec3], buf: &mut ChunkBuffers) {
    buf.reset(positions.len());
    for (lane, p) in positions.iter().enumerate() {
        buf.ex[lane] = interp_component(&grid.ex, grid, *p, STAGGER_EX);
    }
    for (lane, p) in positions.iter().enumerate() {
        buf.ey[lane] = interp_component(&grid.ey, grid, *p, STAGGER_EY);
    }
    for (lane, p) in positions.iter().enumerate() {
        buf.ez[lane] = interp_component(&grid.ez, grid, *p, STAGGER_EZ);
    }
    for (lane, p) in positions.iter().enumerate() {
        buf.bx[lane] = interp_component(&grid.bx, grid, *p, STAGGER_BX);
    }
    for (lane, p) in positions.iter().enumerate() {
        buf.by[lane] = interp_component(&grid.by, grid, *p, STAGGER_BY);
    }
    for (lane, p) in positions.iter().enumerate() {
        buf.bz[lane] = interp_component(&grid.bz, grid, *p, STAGGER_BZ);
    }
}

/// Convenience wrapper returning one [`GatheredFields`] per position.
pub fn gather_fields_chunked(grid: &YeeGrid, positions: &[Vec3]) -> Vec<GatheredFields> {
    let mut buf = ChunkBuffers::new();
    gather_fields_chunked_into(grid, positions, &mut buf);
    (0..positions.len())
        .map(|lane| GatheredFields {
            e: Vec3::new(buf.ex[lane], buf.ey[lane], buf.ez[lane]),
            b: Vec3::new(buf.bx[lane], buf.by[lane], buf.bz[lane]),
            gamma_inv: buf.gamma_inv[lane],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn random_grid(seed: u64) -> YeeGrid {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut g = YeeGrid::with_unit_cells([6, 5, 7]);
        for f in [&mut g.ex, &mut g.ey, &mut g.ez, &mut g.bx, &mut g.by, &mut g.bz] {
            for v in &mut f.data {
                *v = rng.random_range(-2.0..2.0);
            }
        }
        g
    }

    #[test]
    fn uniform_field_interpolates_to_itself() {
        let mut g = YeeGrid::with_unit_cells([5, 5, 5]);
        let (e0, b0) = (1.375, -0.7123);
        g.ex.fill(e0);
        g.ey.fill(e0);
        g.ez.fill(e0);
        g.bx.fill(b0);
        g.by.fill(b0);
        g.bz.fill(b0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let p = Vec3::new(
                rng.random_range(0.0..5.0),
                rng.random_range(0.0..5.0),
                rng.random_range(0.0..5.0),
            );
            let gf = gather_fields(&g, p);
            // The weights sum to one to rounding error; the eight products
            // and seven adds accumulate a few ulps on top of that.
            for (got, want) in [
                (gf.e.x, e0),
                (gf.e.y, e0),
                (gf.e.z, e0),
                (gf.b.x, b0),
                (gf.b.y, b0),
                (gf.b.z, b0),
            ] {
                assert!(
                    (got - want).abs() <= want.abs() * 4.0 * f64::EPSILON,
                    "{got} vs {want} at {p:?}"
                );
            }
        }
    }

    #[test]
    fn matches_brute_force_node_sum() {
        let g = random_grid(17);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(18);
        for _ in 0..2000 {
            let p = Vec3::new(
                rng.random_range(0.0..6.0),
                rng.random_range(0.0..5.0),
                rng.random_range(0.0..7.0),
            );
            let gf = gather_fields(&g, p);
            // Brute force: explicit sum over the 8 nodes of the Ey lattice.
            let fx = p.x - 0.0;
            let fy = p.y - 0.5;
            let fz = p.z;
            let (bx, by, bz) = (fx.floor(), fy.floor(), fz.floor());
            let (ox, oy, oz) = (fx - bx, fy - by, fz - bz);
            let mut expect = 0.0;
            for c in 0..2i64 {
                for b in 0..2i64 {
                    for a in 0..2i64 {
                        let wx = if a == 0 { 1.0 - ox } else { ox };
                        let wy = if b == 0 { 1.0 - oy } else { oy };
                        let wz = if c == 0 { 1.0 - oz } else { oz };
                        expect += ((wx * wy) * wz)
                            * g.ey.get_wrapped(
                                bx as isize + a as isize,
                                by as isize + b as isize,
                                bz as isize + c as isize,
                            );
                    }
                }
            }
            assert_eq!(gf.e.y.to_bits(), expect.to_bits());
        }
    }

    #[test]
    fn chunked_is_bitwise_equal_to_scalar() {
        let g = random_grid(23);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for chunk_len in [1usize, 2, 7, 16, 33] {
            let positions: Vec<Vec3> = (0..chunk_len)
                .map(|_| {
                    Vec3::new(
                        rng.random_range(-1.0..7.0),
                        rng.random_range(-1.0..6.0),
                        rng.random_range(-1.0..8.0),
                    )
                })
                .collect();
            let chunked = gather_fields_chunked(&g, &positions);
            for (p, got) in positions.iter().zip(&chunked) {
                let want = gather_fields(&g, *p);
                assert_eq!(got.e.x.to_bits(), want.e.x.to_bits());
                assert_eq!(got.e.y.to_bits(), want.e.y.to_bits());
                assert_eq!(got.e.z.to_bits(), want.e.z.to_bits());
                assert_eq!(got.b.x.to_bits(), want.b.x.to_bits());
                assert_eq!(got.b.y.to_bits(), want.b.y.to_bits());
                assert_eq!(got.b.z.to_bits(), want.b.z.to_bits());
            }
        }
    }

    #[test]
    fn aux_block_is_56_bytes() {
        assert_eq!(std::mem::size_of::<GatheredFields>(), 56);
    }
}
