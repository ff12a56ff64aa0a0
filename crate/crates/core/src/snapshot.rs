//! Raw binary state snapshots for regression tests.
//!
//! Format: one ASCII header line `pic-snapshot v1 <nx> <ny> <nz>
//! <nparticles>\n`, then the nine field arrays (Ex Ey Ez Bx By Bz Jx Jy
//! Jz) as little-endian 64-bit reals in x-fastest order, then the
//! particle records in storage order, 64 bytes each. Round-trips are
//! bitwise exact, so snapshots can back bit-level determinism checks.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{ScalarField3, YeeGrid};
use crate::particle::{Particle, PARTICLE_RECORD_BYTES};

/// A decoded snapshot: grid dimensions, the nine field arrays in
/// Ex..Jz order, and the particles in their stored order.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub dims: [usize; 3],
    pub fields: Vec<ScalarField3>,
    pub particles: Vec<Particle>,
}

/// Writes the grid's fields and the given particles to `path`.
pub fn write_snapshot<'a>(
    path: &Path,
    grid: &YeeGrid,
    particles: impl IntoIterator<Item = &'a Particle>,
) -> Result<()> {
    let particles: Vec<&Particle> = particles.into_iter().collect();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    let [nx, ny, nz] = grid.dims;
    writeln!(out, "pic-snapshot v1 {} {} {} {}", nx, ny, nz, particles.len()).map_err(io)?;
    for field in grid.field_arrays() {
        for v in &field.data {
            out.write_all(&v.to_le_bytes()).map_err(io)?;
        }
    }
    for p in particles {
        out.write_all(&p.to_bytes()).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut input = BufReader::new(file);
    let io = |e| Error::io(path, e);

    let mut header = Vec::new();
    loop {
        let mut byte = [0u8; 1];
        input.read_exact(&mut byte).map_err(io)?;
        if byte[0] == b'\n' {
            break;
        }
        if header.len() > 128 {
            return Err(Error::SnapshotFormat("header line too long".to_string()));
        }
        header.push(byte[0]);
    }
    let header = String::from_utf8(header)
        .map_err(|_| Error::SnapshotFormat("header is not UTF-8".to_string()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let [magic, version, rest @ ..] = parts.as_slice() else {
        return Err(Error::SnapshotFormat(format!("malformed header `{header}`")));
    };
    if *magic != "pic-snapshot" || *version != "v1" || rest.len() != 4 {
        return Err(Error::SnapshotFormat(format!("malformed header `{header}`")));
    }
    let mut nums = [0usize; 4];
    for (n, text) in nums.iter_mut().zip(rest) {
        *n = text
            .parse()
            .map_err(|_| Error::SnapshotFormat(format!("bad header number `{text}`")))?;
    }
    let [nx, ny, nz, nparticles] = nums;

    let mut fields = Vec::with_capacity(9);
    let mut buf = [0u8; 8];
    for _ in 0..9 {
        let mut field = ScalarField3::zeros(nx, ny, nz);
        for v in field.data.iter_mut() {
            input.read_exact(&mut buf).map_err(io)?;
            *v = f64::from_le_bytes(buf);
        }
        fields.push(field);
    }
    let mut particles = Vec::with_capacity(nparticles);
    let mut record = [0u8; PARTICLE_RECORD_BYTES];
    for _ in 0..nparticles {
        input.read_exact(&mut record).map_err(io)?;
        particles.push(Particle::from_bytes(&record));
    }
    let mut trailing = [0u8; 1];
    match input.read(&mut trailing).map_err(io)? {
        0 => Ok(Snapshot {
            dims: [nx, ny, nz],
            fields,
            particles,
        }),
        _ => Err(Error::SnapshotFormat(
            "trailing bytes after particle records".to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::Vec3;

    fn sample_grid() -> YeeGrid {
        let mut grid = YeeGrid::with_unit_cells([3, 2, 2]);
        grid.ex.set(1, 0, 1, 0.25);
        grid.by.set(2, 1, 0, -3.5);
        grid.jz.set(0, 1, 1, 1.0e-300);
        grid
    }

    #[test]
    fn snapshot_round_trips_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.snap");
        let grid = sample_grid();
        let particles = vec![
            Particle::new(Vec3::new(0.5, 1.5, 0.25), Vec3::new(-1.0, 0.0, 3.0), 2.0, 1),
            Particle::new(Vec3::new(2.75, 0.0, 1.0), Vec3::ZERO, 1.0, 0),
        ];
        write_snapshot(&path, &grid, &particles).unwrap();

        let snap = read_snapshot(&path).unwrap();
        assert_eq!(snap.dims, [3, 2, 2]);
        for (read, written) in snap.fields.iter().zip(grid.field_arrays()) {
            let read_bits: Vec<u64> = read.data.iter().map(|v| v.to_bits()).collect();
            let written_bits: Vec<u64> = written.data.iter().map(|v| v.to_bits()).collect();
            assert_eq!(read_bits, written_bits);
        }
        assert_eq!(snap.particles.len(), 2);
        for (read, written) in snap.particles.iter().zip(&particles) {
            assert_eq!(read.to_bytes(), written.to_bytes());
        }
    }

    #[test]
    fn header_is_human_readable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.snap");
        write_snapshot(&path, &sample_grid(), std::iter::empty()).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let newline = bytes.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(&bytes[..newline], b"pic-snapshot v1 3 2 2 0");
        assert_eq!(bytes.len(), newline + 1 + 9 * 12 * 8);
    }

    #[test]
    fn rejects_malformed_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.snap");
        std::fs::write(&path, b"pic-snapshot v2 1 1 1 0\n").unwrap();
        let err = read_snapshot(&path).unwrap_err();
        assert!(matches!(err, Error::SnapshotFormat(_)), "{err:?}");
    }

    #[test]
    fn rejects_truncated_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.snap");
        std::fs::write(&path, b"pic-snapshot v1 2 2 2 0\n\x00\x00").unwrap();
        assert!(read_snapshot(&path).is_err());
    }
}
