//! Deterministic direction sets and seeded random samples.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{Vector, MAX_DIM};
use crate::math;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal deviate (Box–Muller).
pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(core::f64::consts::TAU * u2)
}

/// Uniformly distributed unit vector in `R^n`.
pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    loop {
        let mut v = [0.0; MAX_DIM];
        for c in v.iter_mut().take(n) {
            *c = normal(rng);
        }
        let len = math::sqrt(v.iter().map(|c| c * c).sum());
        if len > 1e-12 {
            v.iter_mut().for_each(|c| *c /= len);
            return v;
        }
    }
}

/// Deterministic, roughly even set of `count` unit directions in `R^n`:
/// equally spaced angles in 2D, a Fibonacci lattice in 3D, `±1` in 1D, and
/// seeded random directions otherwise.
pub fn direction_set(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut out = Vec::with_capacity(count);
    match n {
        1 => {
            out.push([1.0, 0.0, 0.0, 0.0]);
            out.push([-1.0, 0.0, 0.0, 0.0]);
        }
        2 => {
            for k in 0..count {
                let t = core::f64::consts::TAU * k as f64 / count as f64;
                out.push([math::cos(t), math::sin(t), 0.0, 0.0]);
            }
        }
        3 => {
            let golden = core::f64::consts::PI * (3.0 - math::sqrt(5.0));
            for k in 0..count {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                let r = math::sqrt((1.0 - z * z).max(0.0));
                let t = golden * k as f64;
                out.push([r * math::cos(t), r * math::sin(t), z, 0.0]);
            }
        }
        _ => {
            let mut g = rng(seed);
            for _ in 0..count {
                out.push(unit_vector(&mut g, n));
            }
        }
    }
    out
}

/// Typical angle between neighbouring directions of [`direction_set`].
pub fn angular_spacing(n: usize, count: usize) -> f64 {
    let count = count.max(1) as f64;
    match n {
        1 => core::f64::consts::PI,
        2 => core::f64::consts::TAU / count,
        3 => math::sqrt(4.0 * core::f64::consts::PI / count),
        // surface of S^3 is 2π²
        _ => math::pow(2.0 * core::f64::consts::PI * core::f64::consts::PI / count, 1.0 / 3.0),
    }
}
