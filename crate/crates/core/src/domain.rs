//! Rectangular sample grids with optional periodic axes.

use alloc::vec::Vec;

use crate::linalg::MAX_DIM;
use crate::math;

/// One coordinate axis of a [`GridDomain`].
///
/// A periodic axis identifies `max` with `min`; its `nodes` sit at
/// `min + k·(max−min)/nodes` for `k < nodes`. A bounded axis places nodes on
/// both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub nodes: usize,
    pub periodic: bool,
}

impl Axis {
    pub fn new(min: f64, max: f64, nodes: usize) -> Axis {
        Axis { min, max, nodes, periodic: false }
    }

    pub fn periodic(min: f64, max: f64, nodes: usize) -> Axis {
        Axis { min, max, nodes, periodic: true }
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            (self.max - self.min) / self.nodes as f64
        } else {
            (self.max - self.min) / (self.nodes - 1) as f64
        }
    }

    pub fn period(&self) -> f64 {
        self.max - self.min
    }

    pub fn coord(&self, k: usize) -> f64 {
        self.min + k as f64 * self.spacing()
    }

    /// Maps a coordinate into `[min, max)` on periodic axes; identity otherwise.
    pub fn wrap(&self, x: f64) -> f64 {
        if !self.periodic {
            return x;
        }
        let p = self.period();
        let mut r = x - p * math::floor((x - self.min) / p);
        if r >= self.max {
            r -= p;
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("domain needs between 1 and {MAX_DIM} axes, got {0}")]
    BadDimension(usize),
    #[error("axis {axis} needs at least 2 nodes")]
    TooFewNodes { axis: usize },
    #[error("axis {axis} has min >= max or non-finite bounds")]
    EmptyRange { axis: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    axes: Vec<Axis>,
}

impl GridDomain {
    pub fn new(axes: Vec<Axis>) -> Result<GridDomain, DomainError> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(DomainError::BadDimension(axes.len()));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.nodes < 2 {
                return Err(DomainError::TooFewNodes { axis: i });
            }
            if !(a.min < a.max) || !a.min.is_finite() || !a.max.is_finite() {
                return Err(DomainError::EmptyRange { axis: i });
            }
        }
        Ok(GridDomain { axes })
    }

    /// Square (cube) domain `[min, max]^dim` with `nodes` per axis.
    pub fn uniform(dim: usize, min: f64, max: f64, nodes: usize) -> Result<GridDomain, DomainError> {
        GridDomain::new((0..dim).map(|_| Axis::new(min, max, nodes)).collect())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    pub fn is_periodic(&self) -> bool {
        self.axes.iter().any(|a| a.periodic)
    }

    /// Linear node index; the first axis varies slowest.
    pub fn index(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for (a, &k) in self.axes.iter().zip(multi) {
            idx = idx * a.nodes + k;
        }
        idx
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for (d, a) in self.axes.iter().enumerate().rev() {
            out[d] = idx % a.nodes;
            idx /= a.nodes;
        }
        out
    }

    pub fn node_coords(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let mut out = [0.0; MAX_DIM];
        for (d, a) in self.axes.iter().enumerate() {
            out[d] = a.coord(m[d]);
        }
        out
    }

    pub fn node_point(&self, idx: usize) -> Vec<f64> {
        self.node_coords(idx)[..self.dim()].to_vec()
    }

    /// Whether `p` lies inside the bounded axes (periodic axes accept anything).
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && self.axes.iter().zip(p).all(|(a, &x)| {
                let slack = 1e-9 * a.spacing();
                a.periodic || (x >= a.min - slack && x <= a.max + slack)
            })
    }

    pub fn wrap_point(&self, p: &[f64], out: &mut [f64]) {
        for ((o, a), &x) in out.iter_mut().zip(&self.axes).zip(p) {
            *o = a.wrap(x);
        }
    }

    /// Nearest node to `p`, or `None` when `p` is outside the domain.
    pub fn nearest_node(&self, p: &[f64]) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut multi = [0usize; MAX_DIM];
        for (d, a) in self.axes.iter().enumerate() {
            let k = math::round((a.wrap(p[d]) - a.min) / a.spacing());
            multi[d] = if a.periodic {
                (k as i64).rem_euclid(a.nodes as i64) as usize
            } else {
                (k.max(0.0) as usize).min(a.nodes - 1)
            };
        }
        Some(self.index(&multi[..self.dim()]))
    }

    /// Node reached from `idx` by an integer offset, with wrap-around on
    /// periodic axes; `None` when it leaves a bounded axis.
    pub fn offset_node(&self, idx: usize, offset: &[i32]) -> Option<usize> {
        let m = self.multi_index(idx);
        let mut target = [0usize; MAX_DIM];
        for (d, a) in self.axes.iter().enumerate() {
            let k = m[d] as i64 + i64::from(offset[d]);
            target[d] = if a.periodic {
                k.rem_euclid(a.nodes as i64) as usize
            } else if k < 0 || k >= a.nodes as i64 {
                return None;
            } else {
                k as usize
            };
        }
        Some(self.index(&target[..self.dim()]))
    }

    /// True for nodes on a face of a bounded axis.
    pub fn is_boundary_node(&self, idx: usize) -> bool {
        let m = self.multi_index(idx);
        self.axes
            .iter()
            .enumerate()
            .any(|(d, a)| !a.periodic && (m[d] == 0 || m[d] == a.nodes - 1))
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(f64::INFINITY, f64::min)
    }

    /// `b − a` reduced to the nearest periodic image on periodic axes.
    pub fn difference(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        for (d, ax) in self.axes.iter().enumerate() {
            let mut diff = b[d] - a[d];
            if ax.periodic {
                let p = ax.period();
                diff -= p * math::round(diff / p);
            }
            out[d] = diff;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let dom = GridDomain::new(alloc::vec![Axis::new(0.0, 1.0, 3), Axis::periodic(0.0, 2.0, 4)]).unwrap();
        assert_eq!(dom.node_count(), 12);
        for idx in 0..12 {
            let m = dom.multi_index(idx);
            assert_eq!(dom.index(&m[..2]), idx);
        }
        assert_eq!(dom.axis(1).spacing(), 0.5);
        assert_eq!(dom.node_point(dom.index(&[2, 3])), alloc::vec![1.0, 1.5]);
    }

    #[test]
    fn periodic_wrap_and_offsets() {
        let dom = GridDomain::new(alloc::vec![Axis::periodic(0.0, 1.0, 10), Axis::new(0.0, 1.0, 11)]).unwrap();
        assert!((dom.axis(0).wrap(1.25) - 0.25).abs() < 1e-15);
        assert!((dom.axis(0).wrap(-0.25) - 0.75).abs() < 1e-15);
        let start = dom.index(&[9, 0]);
        assert_eq!(dom.offset_node(start, &[1, 0]), Some(dom.index(&[0, 0])));
        assert_eq!(dom.offset_node(start, &[0, -1]), None);
        assert_eq!(dom.nearest_node(&[1.04, 0.5]), Some(dom.index(&[0, 5])));
        assert!(dom.is_boundary_node(start));
        assert!(!dom.is_boundary_node(dom.index(&[0, 5])));
        let mut d = [0.0; 2];
        dom.difference(&[0.9, 0.0], &[0.1, 0.0], &mut d);
        assert!((d[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_axes() {
        assert!(GridDomain::new(alloc::vec![Axis::new(0.0, 1.0, 1)]).is_err());
        assert!(GridDomain::new(alloc::vec![Axis::new(1.0, 1.0, 4)]).is_err());
        assert!(GridDomain::new(alloc::vec![]).is_err());
    }
}
