//! Particle and species records.
//!
//! A macro-particle carries position (cm), momentum (g cm/s), a statistical
//! weight and an index into the species table. The record packs into exactly
//! 64 bytes: seven 8-byte real slots plus the species index in one more
//! real-width slot, so particle data streams through caches at a fixed,
//! cache-line-sized granularity.

use crate::vec3::Vec3;

/// Physical species shared by many macro-particles (Gaussian units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Species {
    /// Charge in statC.
    pub charge: f64,
    /// Mass in g.
    pub mass: f64,
}

impl Species {
    pub const fn new(charge: f64, mass: f64) -> Self {
        Species { charge, mass }
    }
}

/// Electron in Gaussian (CGS) units.
pub const ELECTRON: Species = Species::new(-4.80320425e-10, 9.1093837015e-28);
/// Proton in Gaussian (CGS) units.
pub const PROTON: Species = Species::new(4.80320425e-10, 1.67262192369e-24);

/// One macro-particle. `#[repr(C)]` so the 64-byte layout is guaranteed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[repr(C)]
pub struct Particle {
    /// Position in cm.
    pub position: Vec3,
    /// Momentum in g cm/s.
    pub momentum: Vec3,
    /// Number of physical particles represented.
    pub weight: f64,
    /// Index into the run's species table.
    pub species: u32,
}

/// Serialized size of one particle record in bytes.
pub const PARTICLE_RECORD_BYTES: usize = 64;

const _: () = assert!(std::mem::size_of::<Particle>() == PARTICLE_RECORD_BYTES);

impl Particle {
    pub fn new(position: Vec3, momentum: Vec3, weight: f64, species: u32) -> Self {
        Particle { position, momentum, weight, species }
    }

    /// Serializes to exactly 64 little-endian bytes:
    /// position, momentum and weight as seven `f64` values, then the species
    /// index widened to a `u64` filling the final real-width slot.
    pub fn to_bytes(&self) -> [u8; PARTICLE_RECORD_BYTES] {
        let mut out = [0u8; PARTICLE_RECORD_BYTES];
        let reals = [
            self.position.x,
            self.position.y,
            self.position.z,
            self.momentum.x,
            self.momentum.y,
            self.momentum.z,
            self.weight,
        ];
        for (slot, value) in reals.iter().enumerate() {
            out[slot * 8..slot * 8 + 8].copy_from_slice(&value.to_le_bytes());
        }
        out[56..64].copy_from_slice(&(self.species as u64).to_le_bytes());
        out
    }

    /// Inverse of [`Particle::to_bytes`]; bitwise round-trip.
    pub fn from_bytes(bytes: &[u8; PARTICLE_RECORD_BYTES]) -> Self {
        let real = |slot: usize| {
            f64::from_le_bytes(bytes[slot * 8..slot * 8 + 8].try_into().unwrap())
        };
        let species = u64::from_le_bytes(bytes[56..64].try_into().unwrap()) as u32;
        Particle {
            position: Vec3::new(real(0), real(1), real(2)),
            momentum: Vec3::new(real(3), real(4), real(5)),
            weight: real(6),
            species,
        }
    }
}
