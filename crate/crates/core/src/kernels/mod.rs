//! Per-particle compute kernels: interpolation, push, motion and current
//! deposition. Every kernel is pure and deterministic; the parallel engine
//! layers scheduling on top without changing any arithmetic.

mod cic;
mod deposit;
mod gather;
mod push;

pub use cic::{base_and_frac, cic_weights, cic_weights_frac};
pub use deposit::{
    deposit_current_vb, deposit_segment, split_trajectory, CurrentSink, SplitSegments,
    TrajectorySegment, MAX_SEGMENTS,
};
pub use gather::{
    gather_fields, gather_fields_chunked, gather_fields_chunked_into, ChunkBuffers,
    GatheredFields, GATHERED_FIELDS_BYTES,
};
pub use push::{boris_push, lorentz_gamma, move_particle, velocity};
