use alloc::vec::Vec;

use super::{grid_distance, Direction, DistanceError, MetricProbe, Source};
use crate::domain::GridDomain;
use crate::geodesics::{connect, ConnectOptions, Curve};
use crate::geometry::RandersData;

/// How `d_F(x, c(s))` is obtained at each node.
#[derive(Debug, Clone, PartialEq)]
pub enum BusemannMethod {
    /// Backward grid distance from `c(s)`; `c(s)` must lie in the domain.
    Grid,
    /// Shortest connecting geodesic per node; `c(s)` may lie outside.
    Shooting(ConnectOptions),
}

/// Truncated Busemann function `b(x) = s_max − d_F(x, c(s_max))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BusemannField {
    pub domain: GridDomain,
    pub s_max: f64,
    pub values: Vec<f64>,
    /// Same quantity at `s_max / 2`.
    pub half_values: Vec<f64>,
    /// Nodes where `b` decreased from `s_max/2` to `s_max` by more than the
    /// tolerance (the exact limit is nondecreasing). For the grid method the
    /// tolerance includes the cost of snapping both ray points to nodes.
    pub non_monotone_nodes: usize,
    pub max_decrease: f64,
}

fn ray_point(ray: &Curve, s: f64) -> Result<Vec<f64>, DistanceError> {
    let (lo, hi) = (ray.params[0], ray.params[ray.len() - 1]);
    if !(s >= lo && s <= hi) {
        return Err(DistanceError::InvalidRay("parameter outside the ray"));
    }
    Ok(ray.sample_at(s).0)
}

fn distances_to(
    r: &RandersData,
    dom: &GridDomain,
    target: &[f64],
    method: &BusemannMethod,
) -> Result<Vec<f64>, DistanceError> {
    match method {
        BusemannMethod::Grid => {
            if !dom.contains(target) {
                return Err(DistanceError::RayExitsDomain { point: target.to_vec() });
            }
            Ok(grid_distance(r, dom, &Source::Point(target.to_vec()), Direction::Backward)?.values)
        }
        BusemannMethod::Shooting(opts) => {
            let mut out = Vec::with_capacity(dom.node_count());
            for idx in 0..dom.node_count() {
                let x = dom.node_point(idx);
                let res = connect(r, &x, target, opts)?;
                out.push(res.shortest().map_or(f64::INFINITY, |s| s.length));
            }
            Ok(out)
        }
    }
}

/// Largest of `F(±(node − target))` for the node the grid source snaps to.
fn snap_error(r: &RandersData, dom: &GridDomain, target: &[f64]) -> Result<f64, DistanceError> {
    let node = dom
        .nearest_node(target)
        .map(|i| dom.node_point(i))
        .ok_or_else(|| DistanceError::RayExitsDomain { point: target.to_vec() })?;
    let d: Vec<f64> = node.iter().zip(target).map(|(a, b)| a - b).collect();
    let back: Vec<f64> = d.iter().map(|x| -x).collect();
    let loc = r.local(target)?;
    Ok(loc.value(&d).max(loc.value(&back)))
}

/// Busemann function of `ray` (parametrized by `s`) truncated at `s_max`,
/// with a monotonicity diagnostic against `s_max / 2`.
///
/// The ray must satisfy `F(ċ) < 1` at its samples.
pub fn busemann(
    r: &RandersData,
    dom: &GridDomain,
    ray: &Curve,
    s_max: f64,
    method: &BusemannMethod,
) -> Result<BusemannField, DistanceError> {
    if ray.len() < 2 {
        return Err(DistanceError::InvalidRay("ray needs at least two samples"));
    }
    if !(s_max > 0.0) {
        return Err(DistanceError::InvalidRay("s_max must be positive"));
    }
    let probe = MetricProbe::new(r, dom);
    for (x, v) in ray.points.iter().zip(&ray.velocities) {
        let f = match probe.local(x) {
            Some(l) => l.value(v),
            None => r.local(x)?.value(v),
        };
        if !(f < 1.0) {
            return Err(DistanceError::InvalidRay("ray speed F(ċ) must stay below 1"));
        }
    }
    let far = ray_point(ray, s_max)?;
    let half = ray_point(ray, 0.5 * s_max)?;
    let d_far = distances_to(r, dom, &far, method)?;
    let d_half = distances_to(r, dom, &half, method)?;
    let values: Vec<f64> = d_far.iter().map(|d| s_max - d).collect();
    let half_values: Vec<f64> = d_half.iter().map(|d| 0.5 * s_max - d).collect();
    let mut tol = 1e-9 * (1.0 + s_max);
    if matches!(method, BusemannMethod::Grid) {
        tol += snap_error(r, dom, &far)? + snap_error(r, dom, &half)?;
    }
    let mut non_monotone_nodes = 0;
    let mut max_decrease: f64 = 0.0;
    for (b, h) in values.iter().zip(&half_values) {
        if b.is_finite() && h.is_finite() {
            let drop = h - b;
            if drop > tol {
                non_monotone_nodes += 1;
            }
            max_decrease = max_decrease.max(drop);
        }
    }
    Ok(BusemannField { domain: dom.clone(), s_max, values, half_values, non_monotone_nodes, max_decrease })
}
