use alloc::vec::Vec;

use super::{one_form_norm, RandersData};
use crate::linalg::MAX_DIM;
use crate::sampling;

/// Validity data at one sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValidity {
    pub point: Vec<f64>,
    /// `‖ω‖_{g0}` of the stored pair; `+∞` where `g0` is not positive definite.
    pub omega_norm: f64,
    /// `‖b‖_a` of the classical view; the point passes iff this is `< 1`.
    pub randers_norm: f64,
    /// Smallest eigenvalue of `g_v` over the probed directions; `−∞` when
    /// the metric cannot be evaluated.
    pub min_eigenvalue: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub points: Vec<PointValidity>,
    pub max_randers_norm: f64,
    pub pass: bool,
}

impl ValidityReport {
    /// Points whose tensor sign disagrees with the norm test.
    pub fn misclassified(&self) -> usize {
        self.points.iter().filter(|p| p.pass != (p.min_eigenvalue > 0.0)).count()
    }
}

/// Checks `‖b‖_a < 1` on every sample and probes the fundamental tensor in
/// `directions` seeded random directions plus the headwind direction `−a⁻¹b`,
/// where `g_v` degenerates first.
pub fn validity_report(r: &RandersData, samples: &[Vec<f64>], directions: usize, seed: u64) -> ValidityReport {
    let n = r.dim();
    let mut rng = sampling::rng(seed);
    let mut points = Vec::with_capacity(samples.len());
    for x in samples {
        let Ok(local) = r.local(x) else {
            points.push(PointValidity {
                point: x.clone(),
                omega_norm: f64::INFINITY,
                randers_norm: f64::INFINITY,
                min_eigenvalue: f64::NEG_INFINITY,
                pass: false,
            });
            continue;
        };
        let randers_norm = local.randers_norm();
        let omega_norm = one_form_norm(&r.omega, &r.g0, x).unwrap_or(f64::INFINITY);
        let mut probes: Vec<[f64; MAX_DIM]> = (0..directions).map(|_| sampling::unit_vector(&mut rng, n)).collect();
        let head = local.headwind_direction();
        if head[..n].iter().any(|c| *c != 0.0) {
            probes.push(head);
        }
        let mut min_eig = f64::INFINITY;
        for v in &probes {
            let e = match local.fundamental_tensor(&v[..n]) {
                Ok(g) => g.min_eigenvalue(),
                Err(_) => f64::NEG_INFINITY,
            };
            min_eig = min_eig.min(e);
        }
        points.push(PointValidity {
            point: x.clone(),
            omega_norm,
            randers_norm,
            min_eigenvalue: min_eig,
            pass: randers_norm < 1.0,
        });
    }
    let max_randers_norm = points.iter().map(|p| p.randers_norm).fold(0.0, f64::max);
    let pass = !points.is_empty() && points.iter().all(|p| p.pass);
    ValidityReport { points, max_randers_norm, pass }
}
