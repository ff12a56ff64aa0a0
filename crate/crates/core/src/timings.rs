//! Per-stage wall-clock accounting.
//!
//! Every phase of a step is attributed to exactly one bucket: field
//! interpolation plus the momentum/position update count as `particle_push`,
//! trajectory splitting plus current scatter count as `current_deposition`,
//! and everything else (field updates, migration, current zeroing) lands in
//! `other`. `overall` is measured by an independent timer around the whole
//! run loop, so it also absorbs diagnostics sampling.

/// Accumulated seconds per stage.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageTimings {
    pub particle_push: f64,
    pub current_deposition: f64,
    pub other: f64,
    pub overall: f64,
}

/// Stage labels in report order.
pub const STAGE_NAMES: [&str; 4] =
    ["particle_push", "current_deposition", "other", "overall"];

impl StageTimings {
    pub fn accumulate(&mut self, rhs: &StageTimings) {
        self.particle_push += rhs.particle_push;
        self.current_deposition += rhs.current_deposition;
        self.other += rhs.other;
        self.overall += rhs.overall;
    }

    /// Values in [`STAGE_NAMES`] order.
    pub fn values(&self) -> [f64; 4] {
        [self.particle_push, self.current_deposition, self.other, self.overall]
    }

    /// Sum of the three exclusive stage buckets.
    pub fn stage_sum(&self) -> f64 {
        self.particle_push + self.current_deposition + self.other
    }
}
