//! Asymmetric grid distances.
//!
//! The grid is a graph whose arcs join each node to the nodes reached by the
//! offsets of a [`Stencil`]; the arc `u → w` costs `F(m, x_w − x_u)` with `m`
//! the arc midpoint. Forward fields hold `d(source, y)`, backward fields
//! `d(y, source)`. A backward field is computed on the same arcs read in
//! reverse, so it equals the forward field of the reversed metric bit for bit.

mod busemann;
mod pinching;

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::domain::GridDomain;
use crate::geodesics::{connect, ConnectOptions, GeodesicError};
use crate::geometry::{GeometryError, LocalRanders, RandersData};
use crate::linalg::MAX_DIM;

pub use busemann::{busemann, BusemannField, BusemannMethod};
pub use pinching::{pinching_check, PinchingReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistanceError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error("point {point:?} is outside the domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("source set is empty")]
    EmptySource,
    #[error("mask has {found} entries, the domain has {expected} nodes")]
    MaskSize { expected: usize, found: usize },
    #[error("metric dimension {metric} does not match domain dimension {domain}")]
    DimensionMismatch { metric: usize, domain: usize },
    #[error("stencil radius must be at least 1")]
    InvalidStencil,
    #[error("ray leaves the domain at {point:?}")]
    RayExitsDomain { point: Vec<f64> },
    #[error("invalid ray: {0}")]
    InvalidRay(&'static str),
    #[error("radius must be positive")]
    InvalidRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `d(source, ·)`
    Forward,
    /// `d(·, source)`
    Backward,
}

/// Arc offsets: every primitive integer vector with max-norm `<= radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stencil {
    dim: usize,
    radius: i32,
    offsets: Vec<[i32; MAX_DIM]>,
}

fn gcd(a: i32, b: i32) -> i32 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Stencil {
    pub fn new(dim: usize, radius: i32) -> Result<Stencil, DistanceError> {
        if radius < 1 {
            return Err(DistanceError::InvalidStencil);
        }
        let side = (2 * radius + 1) as usize;
        let mut offsets = Vec::new();
        for code in 0..side.pow(dim as u32) {
            let mut c = code;
            let mut off = [0i32; MAX_DIM];
            for o in off.iter_mut().take(dim) {
                *o = (c % side) as i32 - radius;
                c /= side;
            }
            let g = off[..dim].iter().fold(0, |g, &x| gcd(g, x));
            if g == 1 {
                offsets.push(off);
            }
        }
        Ok(Stencil { dim, radius, offsets })
    }

    /// Radius 4 in 2D (48 arcs per node), 2 in 3D, 1 otherwise.
    pub fn default_for(dim: usize) -> Stencil {
        let radius = match dim {
            1 => 1,
            2 => 4,
            3 => 2,
            _ => 1,
        };
        Stencil::new(dim, radius).expect("positive radius")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> i32 {
        self.radius
    }

    pub fn offsets(&self) -> &[[i32; MAX_DIM]] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Where distances are measured from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Snapped to the nearest node.
    Point(Vec<f64>),
    /// One flag per node; every flagged node is a source.
    Mask(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    pub domain: GridDomain,
    pub direction: Direction,
    pub sources: Vec<usize>,
    /// Per node; `+∞` marks unreachable nodes.
    pub values: Vec<f64>,
}

impl DistanceField {
    pub fn value_at_node(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Value at the node nearest to `p`.
    pub fn value_near(&self, p: &[f64]) -> Option<f64> {
        self.domain.nearest_node(p).map(|i| self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallRegion {
    pub domain: GridDomain,
    pub center: Vec<f64>,
    pub radius: f64,
    pub direction: Direction,
    /// Nodes with distance `< radius`.
    pub mask: Vec<bool>,
}

impl BallRegion {
    pub fn node_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// Node count times cell volume.
    pub fn area(&self) -> f64 {
        self.node_count() as f64 * self.domain.cell_volume()
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties by node index
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cached evaluation of the metric; constant metrics are evaluated once.
pub(crate) struct MetricProbe<'a> {
    r: &'a RandersData,
    dom: &'a GridDomain,
    constant: Option<LocalRanders>,
}

impl<'a> MetricProbe<'a> {
    pub(crate) fn new(r: &'a RandersData, dom: &'a GridDomain) -> Self {
        let n = r.dim();
        let is_const = r.g0.components().iter().all(|c| c.is_constant())
            && r.omega.components().iter().all(|c| c.is_constant());
        let constant = if is_const { r.local(&[0.0; MAX_DIM][..n]).ok() } else { None };
        MetricProbe { r, dom, constant }
    }

    pub(crate) fn local(&self, x: &[f64]) -> Option<LocalRanders> {
        if let Some(l) = self.constant {
            return Some(l);
        }
        let n = x.len();
        let mut w = [0.0; MAX_DIM];
        self.dom.wrap_point(x, &mut w[..n]);
        self.r.local(&w[..n]).ok()
    }

    pub(crate) fn valid_at(&self, x: &[f64]) -> bool {
        self.local(x).is_some_and(|l| l.randers_norm() < 1.0)
    }
}

fn source_nodes(dom: &GridDomain, source: &Source) -> Result<Vec<usize>, DistanceError> {
    let nodes: Vec<usize> = match source {
        Source::Point(p) => {
            let idx = dom.nearest_node(p).ok_or_else(|| DistanceError::OutsideDomain { point: p.clone() })?;
            alloc::vec![idx]
        }
        Source::Mask(m) => {
            if m.len() != dom.node_count() {
                return Err(DistanceError::MaskSize { expected: dom.node_count(), found: m.len() });
            }
            m.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect()
        }
    };
    if nodes.is_empty() {
        return Err(DistanceError::EmptySource);
    }
    Ok(nodes)
}

/// Grid distance with the default stencil.
pub fn grid_distance(
    r: &RandersData,
    dom: &GridDomain,
    source: &Source,
    direction: Direction,
) -> Result<DistanceField, DistanceError> {
    grid_distance_with(r, dom, source, direction, &Stencil::default_for(dom.dim()))
}

/// Dijkstra over the stencil graph. Nodes where the metric is not a valid
/// Randers metric are never entered and stay `+∞`.
pub fn grid_distance_with(
    r: &RandersData,
    dom: &GridDomain,
    source: &Source,
    direction: Direction,
    stencil: &Stencil,
) -> Result<DistanceField, DistanceError> {
    let n = dom.dim();
    if r.dim() != n || stencil.dim() != n {
        return Err(DistanceError::DimensionMismatch { metric: r.dim(), domain: n });
    }
    let sources = source_nodes(dom, source)?;
    let probe = MetricProbe::new(r, dom);
    let count = dom.node_count();
    let valid: Vec<bool> = (0..count).map(|i| probe.valid_at(&dom.node_coords(i)[..n])).collect();
    let mut dist = alloc::vec![f64::INFINITY; count];
    let mut done = alloc::vec![false; count];
    let mut heap = BinaryHeap::new();
    for &s in &sources {
        if valid[s] {
            dist[s] = 0.0;
            heap.push(Entry { dist: 0.0, node: s });
        }
    }
    let spacing: Vec<f64> = dom.axes().iter().map(|a| a.spacing()).collect();
    while let Some(Entry { dist: du, node: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let xu = dom.node_coords(u);
        for off in stencil.offsets() {
            let Some(w) = dom.offset_node(u, &off[..n]) else { continue };
            if done[w] || !valid[w] {
                continue;
            }
            let mut d = [0.0; MAX_DIM];
            let mut mid = [0.0; MAX_DIM];
            for k in 0..n {
                d[k] = f64::from(off[k]) * spacing[k];
                mid[k] = xu[k] + 0.5 * d[k];
            }
            let Some(loc) = probe.local(&mid[..n]) else { continue };
            let cost = match direction {
                Direction::Forward => loc.value(&d[..n]),
                Direction::Backward => {
                    let mut back = [0.0; MAX_DIM];
                    for k in 0..n {
                        back[k] = f64::from(-off[k]) * spacing[k];
                    }
                    loc.value(&back[..n])
                }
            };
            if !(cost > 0.0) {
                continue;
            }
            let cand = du + cost;
            if cand < dist[w] {
                dist[w] = cand;
                heap.push(Entry { dist: cand, node: w });
            }
        }
    }
    Ok(DistanceField { domain: dom.clone(), direction, sources, values: dist })
}

/// Forward (`B⁺`) or backward (`B⁻`) ball as a node mask.
pub fn ball(
    r: &RandersData,
    dom: &GridDomain,
    center: &[f64],
    radius: f64,
    direction: Direction,
) -> Result<BallRegion, DistanceError> {
    if !(radius > 0.0) {
        return Err(DistanceError::InvalidRadius);
    }
    let field = grid_distance(r, dom, &Source::Point(center.to_vec()), direction)?;
    Ok(ball_from_field(&field, center, radius))
}

pub fn ball_from_field(field: &DistanceField, center: &[f64], radius: f64) -> BallRegion {
    BallRegion {
        domain: field.domain.clone(),
        center: center.to_vec(),
        radius,
        direction: field.direction,
        mask: field.values.iter().map(|v| *v < radius).collect(),
    }
}

/// Distance refined by the shooting solver.
#[derive(Debug, Clone, PartialEq)]
pub struct BvpDistance {
    pub value: f64,
    /// False when no geodesic converged and `value` is the grid fallback.
    pub converged: bool,
    pub solutions: usize,
}

/// Shortest connecting geodesic length from `p` to `q`. When the solver finds
/// nothing the value of `fallback` at `q`'s node is returned, flagged.
pub fn distance_via_bvp(
    r: &RandersData,
    p: &[f64],
    q: &[f64],
    opts: &ConnectOptions,
    fallback: Option<&DistanceField>,
) -> Result<BvpDistance, DistanceError> {
    let res = connect(r, p, q, opts)?;
    if let Some(best) = res.shortest() {
        return Ok(BvpDistance { value: best.length, converged: true, solutions: res.solutions.len() });
    }
    let value = fallback.and_then(|f| f.value_near(q)).unwrap_or(f64::INFINITY);
    Ok(BvpDistance { value, converged: false, solutions: 0 })
}
