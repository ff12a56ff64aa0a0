//! Closed-form working-set model used to pick the supercell edge length.
//!
//! For each of the two particle phases the model counts the bytes a single
//! hardware thread streams while processing one supercell, multiplied by the
//! threads sharing a core (and therefore its first-level cache). Boundary
//! nodes shared between neighboring threads are counted once per thread, so
//! the estimate is an upper bound on the true footprint; sizes that fit the
//! model certainly fit the cache.

use crate::kernels::GATHERED_FIELDS_BYTES;
use crate::particle::PARTICLE_RECORD_BYTES;
use crate::supercell::schedule::per_color_counts;

/// Hardware threads sharing one core's first-level cache on the machines
/// the model was calibrated for.
pub const DEFAULT_THREADS_PER_CORE: usize = 4;

/// Typical per-core first-level data cache.
pub const DEFAULT_L1_BUDGET_BYTES: usize = 32 * 1024;

/// Particles staged per interpolation chunk, as assumed by the push model.
const PUSH_MODEL_CHUNK: usize = 16;

/// Bytes of current data touched while a supercell of edge `s` deposits:
/// (s+1)^3 nodes, three components, eight bytes each, per hardware thread.
pub fn estimate_deposition_data_bytes(supercell_size: usize, threads_per_core: usize) -> usize {
    let nodes = (supercell_size + 1).pow(3);
    threads_per_core * nodes * 3 * 8
}

/// Bytes streamed while a supercell of edge `s` is pushed: six field
/// components on the (s+2)^3 nodes interpolation can reach, plus one
/// chunk of particle records and their interpolation blocks, per
/// hardware thread.
pub fn estimate_push_data_bytes(supercell_size: usize, threads_per_core: usize) -> usize {
    let nodes = (supercell_size + 2).pow(3);
    let fields = nodes * 6 * 8;
    let particles = (PARTICLE_RECORD_BYTES + GATHERED_FIELDS_BYTES) * PUSH_MODEL_CHUNK;
    threads_per_core * (fields + particles)
}

/// Formats a byte count as decimal kilobytes with two digits, the form
/// used in the benchmark reports.
pub fn bytes_as_kb(bytes: usize) -> String {
    format!("{:.2}", bytes as f64 / 1000.0)
}

/// Every candidate size with its working-set estimates and which
/// constraints it satisfies.
#[derive(Debug, Clone)]
pub struct SizingRow {
    pub size: usize,
    pub push_bytes: usize,
    pub deposition_bytes: usize,
    /// max(push, deposition) fits the cache budget.
    pub fits_budget: bool,
    /// The supercell count is even on every axis, as the parallel
    /// schedule requires.
    pub even_tiling: bool,
    /// Smallest number of same-color supercells, i.e. the parallelism
    /// floor of the deposition phase.
    pub min_color_supercells: usize,
    /// Enough same-color supercells to keep every worker busy.
    pub enough_parallelism: bool,
}

impl SizingRow {
    pub fn feasible(&self) -> bool {
        self.fits_budget && self.even_tiling && self.enough_parallelism
    }
}

/// Outcome of [`recommend_supercell_size`].
#[derive(Debug, Clone)]
pub struct SizingReport {
    pub rows: Vec<SizingRow>,
    pub recommended: usize,
    /// Set when no candidate satisfied every constraint and the
    /// recommendation fell back to the smallest size.
    pub fallback: bool,
}

/// Picks the largest supercell edge whose working set fits the cache
/// budget while leaving every worker a same-color supercell to process.
/// Falls back to size 1 (with `fallback` set) when nothing qualifies.
pub fn recommend_supercell_size(
    dims: [usize; 3],
    workers: usize,
    threads_per_core: usize,
    l1_budget_bytes: usize,
) -> SizingReport {
    let max_size = dims.iter().copied().min().unwrap_or(1).max(1);
    let mut rows = Vec::with_capacity(max_size);
    for size in 1..=max_size {
        let counts = [
            dims[0].div_ceil(size),
            dims[1].div_ceil(size),
            dims[2].div_ceil(size),
        ];
        let push_bytes = estimate_push_data_bytes(size, threads_per_core);
        let deposition_bytes = estimate_deposition_data_bytes(size, threads_per_core);
        let min_color_supercells = per_color_counts(counts).into_iter().min().unwrap_or(0);
        rows.push(SizingRow {
            size,
            push_bytes,
            deposition_bytes,
            fits_budget: push_bytes.max(deposition_bytes) <= l1_budget_bytes,
            even_tiling: counts.iter().all(|c| c % 2 == 0),
            min_color_supercells,
            enough_parallelism: min_color_supercells >= workers,
        });
    }
    let recommended = rows.iter().rev().find(|r| r.feasible()).map(|r| r.size);
    SizingReport {
        rows,
        recommended: recommended.unwrap_or(1),
        fallback: recommended.is_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_working_set_matches_hand_computed_values() {
        let expect = [12864, 19968, 31680, 49152, 73536, 105984];
        for (s, want) in (1..=6).zip(expect) {
            assert_eq!(estimate_push_data_bytes(s, 4), want, "size {s}");
        }
        let kb = ["12.86", "19.97", "31.68", "49.15", "73.54", "105.98"];
        for (s, want) in (1..=6).zip(kb) {
            assert_eq!(bytes_as_kb(estimate_push_data_bytes(s, 4)), want);
        }
    }

    #[test]
    fn deposition_working_set_matches_hand_computed_values() {
        let expect = [768, 2592, 6144, 12000, 20736, 32928];
        for (s, want) in (1..=6).zip(expect) {
            assert_eq!(estimate_deposition_data_bytes(s, 4), want, "size {s}");
        }
        let kb = ["0.77", "2.59", "6.14", "12.00", "20.74", "32.93"];
        for (s, want) in (1..=6).zip(kb) {
            assert_eq!(bytes_as_kb(estimate_deposition_data_bytes(s, 4)), want);
        }
    }

    #[test]
    fn recommends_largest_size_fitting_cache_and_parallelism() {
        // 32 KiB budget: size 3 streams 31.68 KB and still leaves
        // 7^3 = 343 same-color supercells for 272 workers; size 4 busts
        // the budget at 49.15 KB.
        let report = recommend_supercell_size([40, 40, 40], 272, 4, 32 * 1024);
        assert_eq!(report.recommended, 3);
        assert!(!report.fallback);
        let row3 = &report.rows[2];
        assert!(row3.fits_budget && row3.enough_parallelism && row3.even_tiling);
        assert_eq!(row3.min_color_supercells, 343);
        assert!(!report.rows[3].fits_budget);
    }

    #[test]
    fn parallelism_constraint_caps_the_size() {
        // Budget is effectively unlimited; 400 workers need 400 same-color
        // supercells, which size 3 (343) cannot provide but size 2 (1000)
        // can.
        let report = recommend_supercell_size([40, 40, 40], 400, 4, usize::MAX);
        assert!(report.rows[2].fits_budget && !report.rows[2].enough_parallelism);
        assert!(report.recommended >= 2);
        let rec = &report.rows[report.recommended - 1];
        assert!(rec.feasible() && rec.min_color_supercells >= 400);
    }

    #[test]
    fn impossible_constraints_fall_back_to_size_one() {
        let report = recommend_supercell_size([8, 8, 8], 1, 4, 100);
        assert_eq!(report.recommended, 1);
        assert!(report.fallback);
        assert!(report.rows.iter().all(|r| !r.fits_budget));
    }

    #[test]
    fn odd_tilings_are_not_recommended() {
        // 40-cell axes tile oddly at size 6 (7 supercells); the advisor
        // must skip it no matter how well it fits.
        let report = recommend_supercell_size([40, 40, 40], 1, 4, usize::MAX);
        assert!(!report.rows[5].even_tiling);
        assert_ne!(report.recommended, 6);
    }
}
