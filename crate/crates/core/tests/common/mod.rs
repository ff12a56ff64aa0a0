//! Helpers shared by the integration suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pic_core::{Particle, Vec3};

/// `n` particles at random positions with random sub-relativistic momenta.
/// The base weight keeps the plasma frequency well below 1/dt so the
/// oscillation is cleanly resolved and rounding noise is not amplified;
/// on top of that each weight carries a unique tag of a few parts in 2^30
/// so particles can be paired across layouts by identity.
pub fn tagged_particles(n: usize, dims: [usize; 3], seed: u64) -> Vec<Particle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let position = Vec3::new(
                rng.random::<f64>() * dims[0] as f64,
                rng.random::<f64>() * dims[1] as f64,
                rng.random::<f64>() * dims[2] as f64,
            );
            let momentum = Vec3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            )
            .scale(0.4);
            let weight = 0.01 * (1.0 + i as f64 / f64::from(1 << 30));
            Particle::new(position, momentum, weight, (i % 2) as u32)
        })
        .collect()
}

/// Asserts `|a - b| <= rel_tol * max(scale, tiny)` with a readable message.
pub fn assert_close(a: f64, b: f64, scale: f64, rel_tol: f64, what: &str) {
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    assert!(
        (a - b).abs() <= tol,
        "{what}: {a:e} vs {b:e} differ by {:e} (tol {tol:e})",
        (a - b).abs()
    );
}

/// Compares two finished runs that must agree to `rel_tol`: every field
/// value against its array's scale, and every particle (paired by its
/// unique weight tag) in position and momentum. Returns the largest
/// relative deviation seen.
pub fn assert_runs_agree(
    a: &pic_core::sim::Simulation,
    b: &pic_core::sim::Simulation,
    rel_tol: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    let mut track = |x: f64, y: f64, scale: f64| {
        if scale > 0.0 {
            worst = worst.max((x - y).abs() / scale);
        }
    };

    for (fa, fb) in a.grid.field_arrays().iter().zip(b.grid.field_arrays()) {
        let scale = fa.max_abs().max(fb.max_abs());
        for (&va, &vb) in fa.data.iter().zip(&fb.data) {
            assert_close(va, vb, scale, rel_tol, "field value");
            track(va, vb, scale);
        }
    }

    let mut pa = a.particles_snapshot();
    let mut pb = b.particles_snapshot();
    assert_eq!(pa.len(), pb.len());
    pa.sort_by(|p, q| p.weight.total_cmp(&q.weight));
    pb.sort_by(|p, q| p.weight.total_cmp(&q.weight));
    let pos_scale = a.config.dims.iter().copied().max().unwrap_or(1) as f64;
    for (p, q) in pa.iter().zip(&pb) {
        assert_eq!(p.weight.to_bits(), q.weight.to_bits(), "particle pairing broke");
        assert_eq!(p.species, q.species);
        for (x, y) in [
            (p.position.x, q.position.x),
            (p.position.y, q.position.y),
            (p.position.z, q.position.z),
        ] {
            assert_close(x, y, pos_scale, rel_tol, "position");
            track(x, y, pos_scale);
        }
        let mom_scale = p.momentum.norm().max(q.momentum.norm());
        for (x, y) in [
            (p.momentum.x, q.momentum.x),
            (p.momentum.y, q.momentum.y),
            (p.momentum.z, q.momentum.z),
        ] {
            assert_close(x, y, mom_scale, rel_tol, "momentum");
            track(x, y, mom_scale);
        }
    }
    worst
}
