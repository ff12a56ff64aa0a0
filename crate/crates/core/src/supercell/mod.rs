//! Cache-blocked particle storage and the race-free parallel schedule.
//!
//! Cells are grouped into cubic blocks ("supercells") sized so one block's
//! working set fits in first-level cache. Particle bins are laid out so each
//! block's cells are contiguous, blocks are colored like a 3D chessboard so
//! blocks processed together never write the same current edges, and a
//! closed-form working-set model picks the block size for a cache budget.

pub mod cache_model;
pub mod schedule;
pub mod store;

pub use cache_model::{
    bytes_as_kb, estimate_deposition_data_bytes, estimate_push_data_bytes,
    recommend_supercell_size, SizingReport, SizingRow, DEFAULT_L1_BUDGET_BYTES,
    DEFAULT_THREADS_PER_CORE,
};
pub use schedule::{
    chessboard_schedule, per_color_counts, Chessboard, SharedCurrentSink, SharedCurrents,
    N_COLORS,
};
pub use store::{CellBin, SupercellStore};
