//! Relativistic particle push: velocity rotation split into half
//! electric kicks around an exact magnetic rotation.

use crate::vec3::Vec3;

/// Lorentz factor for momentum `p` (Gaussian units): sqrt(1 + |p|^2/(mc)^2).
#[inline]
pub fn lorentz_gamma(momentum: Vec3, mass: f64, c: f64) -> f64 {
    let mc = mass * c;
    (1.0 + momentum.norm_squared() / (mc * mc)).sqrt()
}

/// Velocity corresponding to momentum `p`: v = p / (gamma m).
#[inline]
pub fn velocity(momentum: Vec3, mass: f64, c: f64) -> Vec3 {
    momentum.scale(1.0 / (lorentz_gamma(momentum, mass, c) * mass))
}

/// Advances a momentum through one time step in fields (e, b).
///
/// Half electric kick, exact-magnitude magnetic rotation, half electric
/// kick. The rotation uses the boosted gamma evaluated after the first
/// half kick, which keeps |p| exactly invariant under a pure magnetic
/// field up to floating-point rounding.
#[inline]
pub fn boris_push(
    momentum: Vec3,
    e: Vec3,
    b: Vec3,
    charge: f64,
    mass: f64,
    c: f64,
    dt: f64,
) -> Vec3 {
    let half_kick = e.scale(charge * dt * 0.5);
    let p_minus = momentum + half_kick;
    let gamma = lorentz_gamma(p_minus, mass, c);
    let t = b.scale(charge * dt / (2.0 * gamma * mass * c));
    let s = t.scale(2.0 / (1.0 + t.norm_squared()));
    let p_prime = p_minus + p_minus.cross(t);
    let p_plus = p_minus + p_prime.cross(s);
    p_plus + half_kick
}

/// Advances a position by one step at constant momentum.
#[inline]
pub fn move_particle(position: Vec3, momentum: Vec3, mass: f64, c: f64, dt: f64) -> Vec3 {
    position + velocity(momentum, mass, c).scale(dt)
}
