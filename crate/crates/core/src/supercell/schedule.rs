//! Chessboard coloring of supercells and the shared current view used by
//! parallel deposition.
//!
//! Supercells are colored by the parity of their three coordinates, giving
//! eight colors. All supercells of one color can deposit current at the same
//! time: their own cells' edges never overlap, and anything spilling into a
//! neighboring supercell is deferred and replayed sequentially. The coloring
//! is only conflict-free on a periodic grid when the number of supercells
//! per axis is even, which is validated here.

use std::cell::UnsafeCell;

use crate::error::{Error, Result};
use crate::grid::{wrap_index, ScalarField3};
use crate::kernels::CurrentSink;
use crate::supercell::store::SupercellStore;

/// Number of chessboard colors: two parities per axis.
pub const N_COLORS: usize = 8;

/// Supercell indices grouped by color, each group in lexicographic order.
#[derive(Debug, Clone)]
pub struct Chessboard {
    pub colors: [Vec<usize>; N_COLORS],
}

impl Chessboard {
    /// Smallest number of supercells in any color group.
    pub fn min_color_count(&self) -> usize {
        self.colors.iter().map(|c| c.len()).min().unwrap_or(0)
    }
}

/// Builds the eight color groups, rejecting tilings where the parity
/// pattern breaks across the periodic boundary.
pub fn chessboard_schedule(store: &SupercellStore) -> Result<Chessboard> {
    let counts = store.counts();
    if counts.iter().any(|c| c % 2 != 0) {
        return Err(Error::OddSupercellCount { counts });
    }
    let mut colors: [Vec<usize>; N_COLORS] = Default::default();
    for sc in 0..store.n_supercells() {
        colors[store.color_of(sc)].push(sc);
    }
    Ok(Chessboard { colors })
}

/// Supercells of each color for a given per-axis supercell count, without
/// building a store. Used by the block-size advisor to check that every
/// color keeps all workers busy.
pub fn per_color_counts(counts: [usize; 3]) -> [usize; N_COLORS] {
    let mut out = [0usize; N_COLORS];
    for (axis_parity, slot) in out.iter_mut().enumerate() {
        let mut n = 1;
        for (a, &count) in counts.iter().enumerate() {
            let parity = (axis_parity >> a) & 1;
            // Indices of this parity in 0..count.
            n *= (count + 1 - parity) / 2;
        }
        *slot = n;
    }
    out
}

/// Current arrays shared mutably across deposition workers.
///
/// Obtaining one of these is safe; writing goes through
/// [`SharedCurrentSink`], whose `add` relies on the schedule's guarantee:
/// while one color is in flight, each worker only writes edges inside its
/// own supercell's home node span, and same-color spans are pairwise
/// disjoint (spill-over deposits are deferred and replayed sequentially
/// afterwards). Violating that is a data race.
pub struct SharedCurrents<'a> {
    dims: [usize; 3],
    jx: &'a [UnsafeCell<f64>],
    jy: &'a [UnsafeCell<f64>],
    jz: &'a [UnsafeCell<f64>],
}

// SAFETY: all concurrent mutation is funneled through SharedCurrentSink::add,
// whose callers must target disjoint edges (see type docs).
unsafe impl Sync for SharedCurrents<'_> {}

fn as_cells(data: &mut [f64]) -> &[UnsafeCell<f64>] {
    // SAFETY: UnsafeCell<f64> has the same layout as f64.
    unsafe { std::slice::from_raw_parts(data.as_mut_ptr() as *const UnsafeCell<f64>, data.len()) }
}

impl<'a> SharedCurrents<'a> {
    pub fn new(
        jx: &'a mut ScalarField3,
        jy: &'a mut ScalarField3,
        jz: &'a mut ScalarField3,
    ) -> Self {
        let dims = [jx.nx, jx.ny, jx.nz];
        assert_eq!(dims, [jy.nx, jy.ny, jy.nz]);
        assert_eq!(dims, [jz.nx, jz.ny, jz.nz]);
        SharedCurrents {
            dims,
            jx: as_cells(&mut jx.data),
            jy: as_cells(&mut jy.data),
            jz: as_cells(&mut jz.data),
        }
    }

    /// Per-worker deposit handle.
    pub fn sink(&'a self) -> SharedCurrentSink<'a> {
        SharedCurrentSink { shared: self }
    }
}

/// [`CurrentSink`] writing into a [`SharedCurrents`] view. One per worker.
pub struct SharedCurrentSink<'a> {
    shared: &'a SharedCurrents<'a>,
}

impl CurrentSink for SharedCurrentSink<'_> {
    fn add(&mut self, comp: usize, node: [isize; 3], value: f64) {
        let d = self.shared.dims;
        let i = wrap_index(node[0], d[0]);
        let j = wrap_index(node[1], d[1]);
        let k = wrap_index(node[2], d[2]);
        let idx = i + d[0] * (j + d[1] * k);
        let slot = match comp {
            0 => &self.shared.jx[idx],
            1 => &self.shared.jy[idx],
            _ => &self.shared.jz[idx],
        };
        // SAFETY: the deposition schedule guarantees no other thread writes
        // this edge while this color is in flight (see SharedCurrents docs).
        unsafe {
            *slot.get() += value;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_tilings_are_rejected_with_the_counts() {
        let store = SupercellStore::new([40, 40, 40], 6).unwrap(); // 7 per axis
        match chessboard_schedule(&store) {
            Err(Error::OddSupercellCount { counts }) => assert_eq!(counts, [7, 7, 7]),
            other => panic!("expected odd-count rejection, got {other:?}"),
        }
        let store = SupercellStore::new([40, 40, 42], 3).unwrap(); // [14, 14, 14]
        assert!(chessboard_schedule(&store).is_ok());
    }

    #[test]
    fn colors_partition_all_supercells() {
        let store = SupercellStore::new([12, 8, 7], 2).unwrap(); // [6, 4, 4] blocks
        let board = chessboard_schedule(&store).unwrap();
        let mut seen = vec![false; store.n_supercells()];
        for (color, group) in board.colors.iter().enumerate() {
            for &sc in group {
                assert_eq!(store.color_of(sc), color);
                assert!(!seen[sc]);
                seen[sc] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        let counts = per_color_counts(store.counts());
        for (color, group) in board.colors.iter().enumerate() {
            assert_eq!(group.len(), counts[color]);
            assert_eq!(group.len(), 12); // 6*4*4 blocks over 8 colors
        }
    }

    #[test]
    fn per_color_counts_match_direct_enumeration() {
        for counts in [[4usize, 4, 4], [7, 5, 3], [14, 14, 14], [2, 6, 9]] {
            let mut direct = [0usize; N_COLORS];
            for sk in 0..counts[2] {
                for sj in 0..counts[1] {
                    for si in 0..counts[0] {
                        direct[(si % 2) + 2 * (sj % 2) + 4 * (sk % 2)] += 1;
                    }
                }
            }
            assert_eq!(per_color_counts(counts), direct, "counts {counts:?}");
        }
    }

    #[test]
    fn torus_adjacent_supercells_never_share_a_color() {
        for (dims, size) in [([8usize, 8, 8], 2), ([10, 12, 14], 3), ([4, 8, 6], 2)] {
            let store = SupercellStore::new(dims, size).unwrap();
            if chessboard_schedule(&store).is_err() {
                continue;
            }
            let counts = store.counts();
            for sc in 0..store.n_supercells() {
                let c = store.supercell_coords(sc);
                for dk in -1i64..=1 {
                    for dj in -1i64..=1 {
                        for di in -1i64..=1 {
                            if di == 0 && dj == 0 && dk == 0 {
                                continue;
                            }
                            let n = store.supercell_index([
                                (c[0] as i64 + di).rem_euclid(counts[0] as i64) as usize,
                                (c[1] as i64 + dj).rem_euclid(counts[1] as i64) as usize,
                                (c[2] as i64 + dk).rem_euclid(counts[2] as i64) as usize,
                            ]);
                            if n != sc {
                                assert_ne!(store.color_of(sc), store.color_of(n));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn shared_currents_accumulate_disjoint_parallel_writes() {
        let mut jx = ScalarField3::zeros(8, 8, 8);
        let mut jy = ScalarField3::zeros(8, 8, 8);
        let mut jz = ScalarField3::zeros(8, 8, 8);
        {
            let shared = SharedCurrents::new(&mut jx, &mut jy, &mut jz);
            std::thread::scope(|scope| {
                for t in 0..4usize {
                    let shared = &shared;
                    scope.spawn(move || {
                        let mut sink = shared.sink();
                        // Each thread owns a disjoint slab of k-planes.
                        for k in (2 * t)..(2 * t + 2) {
                            for rep in 0..10 {
                                sink.add(0, [1, 2, k as isize], 1.0 + rep as f64);
                                sink.add(2, [-1, 8, k as isize], 0.5);
                            }
                        }
                    });
                }
            });
        }
        for k in 0..8 {
            assert_eq!(jx.get(1, 2, k), 55.0);
            assert_eq!(jz.get(7, 0, k), 5.0);
            assert_eq!(jy.max_abs(), 0.0);
        }
    }
}
