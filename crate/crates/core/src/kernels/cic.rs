//! Cloud-in-cell (trilinear) assignment weights.

use crate::grid::{Stagger, YeeGrid};
use crate::vec3::Vec3;

/// Splits a fractional lattice coordinate into its base node and the offset
/// from it in `[0, 1)`.
#[inline]
pub fn base_and_frac(f: f64) -> (isize, f64) {
    let base = f.floor();
    (base as isize, f - base)
}

/// Trilinear weights for in-cell fractions, one per surrounding node.
/// Index layout: `w[a + 2*b + 4*c]` belongs to the node offset `(a, b, c)`
/// from the base node. Each weight is the product of `(1-f)` or `f` factors,
/// so all eight lie in `[0, 1]` and sum to one up to float rounding.
#[inline]
pub fn cic_weights_frac(fx: f64, fy: f64, fz: f64) -> [f64; 8] {
    let wx = [1.0 - fx, fx];
    let wy = [1.0 - fy, fy];
    let wz = [1.0 - fz, fz];
    let mut w = [0.0; 8];
    for c in 0..2 {
        for b in 0..2 {
            for a in 0..2 {
                w[a + 2 * b + 4 * c] = (wx[a] * wy[b]) * wz[c];
            }
        }
    }
    w
}

/// Weights of a position on the eight nodes of a (possibly staggered)
/// lattice, together with the base node in unwrapped integer coordinates.
#[inline]
pub fn cic_weights(grid: &YeeGrid, position: Vec3, stagger: Stagger) -> ([isize; 3], [f64; 8]) {
    let f = grid.frac_coords(position);
    let (ix, fx) = base_and_frac(f.x - stagger.x);
    let (iy, fy) = base_and_frac(f.y - stagger.y);
    let (iz, fz) = base_and_frac(f.z - stagger.z);
    ([ix, iy, iz], cic_weights_frac(fx, fy, fz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::STAGGER_EX;

    #[test]
    fn particle_at_node_gets_full_weight() {
        let w = cic_weights_frac(0.0, 0.0, 0.0);
        assert_eq!(w[0], 1.0);
        assert_eq!(w[1..].iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn cell_center_splits_evenly() {
        let w = cic_weights_frac(0.5, 0.5, 0.5);
        for v in w {
            assert_eq!(v, 0.125);
        }
    }

    #[test]
    fn weights_match_independent_product_formula() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (fx, fy, fz): (f64, f64, f64) =
                (rng.random(), rng.random(), rng.random());
            let w = cic_weights_frac(fx, fy, fz);
            for c in 0..2usize {
                for b in 0..2usize {
                    for a in 0..2usize {
                        let gx = if a == 0 { 1.0 - fx } else { fx };
                        let gy = if b == 0 { 1.0 - fy } else { fy };
                        let gz = if c == 0 { 1.0 - fz } else { fz };
                        let expect = (gx * gy) * gz;
                        assert_eq!(w[a + 2 * b + 4 * c].to_bits(), expect.to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn staggered_base_shifts_by_half_cell() {
        let grid = crate::grid::YeeGrid::with_unit_cells([8, 8, 8]);
        let p = Vec3::new(2.25, 3.0, 4.75);
        let (base, _) = cic_weights(&grid, p, STAGGER_EX);
        // Ex nodes sit at i + 1/2: position x = 2.25 lies between nodes 1 and 2.
        assert_eq!(base, [1, 3, 4]);
    }
}
