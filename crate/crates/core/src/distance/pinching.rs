use super::{DistanceError, MetricProbe, Stencil};
use crate::domain::GridDomain;
use crate::geometry::RandersData;
use crate::linalg::MAX_DIM;
use crate::math;

/// Outcome of the pinching inequalities over all arcs of a stencil graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchingReport {
    pub edges: usize,
    pub violations: usize,
    /// Arcs skipped because the metric is invalid at their midpoint.
    pub skipped: usize,
    /// Smallest slack `min(F − lower, upper − F) / F` over both pairs of bounds.
    pub min_margin: f64,
    pub pass: bool,
}

/// Checks, at every arc midpoint and for the arc vector `v`,
///
/// `√h/(2(1+k²)) ≤ F ≤ 2√h` and `√g0/(√(1+k²)+k) ≤ F ≤ (√(1+k²)+k)·√g0`,
///
/// where `(g0, ω)` is the Fermat view, `h = g0 + ω⊗ω` and `k = ‖ω‖_{g0}`.
/// In the classical view `(a, b)` with `c = ‖b‖²_a`: `h = a`,
/// `g0 = a − b⊗b`, `k² = c/(1−c)`.
pub fn pinching_check(r: &RandersData, dom: &GridDomain, stencil: &Stencil) -> Result<PinchingReport, DistanceError> {
    let n = dom.dim();
    if r.dim() != n || stencil.dim() != n {
        return Err(DistanceError::DimensionMismatch { metric: r.dim(), domain: n });
    }
    let probe = MetricProbe::new(r, dom);
    let spacing: alloc::vec::Vec<f64> = dom.axes().iter().map(|a| a.spacing()).collect();
    let slack = 1e-12;
    let (mut edges, mut violations, mut skipped) = (0usize, 0usize, 0usize);
    let mut min_margin = f64::INFINITY;
    for u in 0..dom.node_count() {
        let xu = dom.node_coords(u);
        for off in stencil.offsets() {
            if dom.offset_node(u, &off[..n]).is_none() {
                continue;
            }
            let mut v = [0.0; MAX_DIM];
            let mut mid = [0.0; MAX_DIM];
            for k in 0..n {
                v[k] = f64::from(off[k]) * spacing[k];
                mid[k] = xu[k] + 0.5 * v[k];
            }
            let Some((loc, norm)) = probe.local(&mid[..n]).map(|l| (l, l.randers_norm())).filter(|(_, m)| *m < 1.0)
            else {
                skipped += 1;
                continue;
            };
            edges += 1;
            let c = norm * norm;
            let k2 = c / (1.0 - c);
            let k = math::sqrt(k2);
            let alpha = loc.alpha(&v[..n]);
            let beta = loc.beta(&v[..n]);
            let f = alpha + beta;
            let g0 = math::sqrt((alpha * alpha - beta * beta).max(0.0));
            let stretch = math::sqrt(1.0 + k2) + k;
            let bounds = [(alpha / (2.0 * (1.0 + k2)), 2.0 * alpha), (g0 / stretch, stretch * g0)];
            let mut ok = true;
            for (lo, hi) in bounds {
                let tol = slack * f.abs().max(hi);
                ok &= f >= lo - tol && f <= hi + tol;
                if f > 0.0 {
                    min_margin = min_margin.min((f - lo).min(hi - f) / f);
                }
            }
            if !ok {
                violations += 1;
            }
        }
    }
    Ok(PinchingReport { edges, violations, skipped, min_margin, pass: violations == 0 })
}
