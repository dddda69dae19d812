//! Causal sets of a standard stationary spacetime read off its Fermat metric.
//!
//! With `d` the Fermat distance:
//! * `I⁺(x0, t0) ∩ {t = t0 + s} = B⁺(x0, s)` and `I⁻` uses backward balls;
//! * `D⁺(A) ∩ {t} = {y ∈ A : d(x, y) > t − t0 for all x ∉ A}`;
//! * the horizon `H⁺(A)` is `t = t0 + inf_{x∉A} d(x, y)`.
//!
//! The infimum over the complement is one multi-source Dijkstra run, shared
//! by developments and horizons so the two agree exactly on the grid.

mod diagnostics;

use alloc::vec::Vec;

use crate::distance::{grid_distance, Direction, DistanceError, DistanceField, Source};
use crate::domain::GridDomain;
use crate::geometry::RandersData;

pub use diagnostics::{completeness_diagnostics, Check, DiagnosticsOptions, DiagnosticsReport, Verdict};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CausalityError {
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("time values must be sorted ascending")]
    UnsortedTimes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeDirection {
    Future,
    Past,
}

impl TimeDirection {
    fn distance_direction(self) -> Direction {
        match self {
            TimeDirection::Future => Direction::Forward,
            TimeDirection::Past => Direction::Backward,
        }
    }

    /// Elapsed time from `t0` to `t` in this direction.
    fn elapsed(self, t0: f64, t: f64) -> f64 {
        match self {
            TimeDirection::Future => t - t0,
            TimeDirection::Past => t0 - t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChronoSlice {
    pub t: f64,
    pub mask: Vec<bool>,
}

impl ChronoSlice {
    pub fn node_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }
}

/// Time slices of a causal set over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChronoRegion {
    pub domain: GridDomain,
    pub t0: f64,
    pub direction: TimeDirection,
    pub slices: Vec<ChronoSlice>,
}

fn check_sorted(t_values: &[f64]) -> Result<(), CausalityError> {
    if t_values.windows(2).any(|w| !(w[0] <= w[1])) || t_values.iter().any(|t| t.is_nan()) {
        return Err(CausalityError::UnsortedTimes);
    }
    Ok(())
}

/// `I⁺(x0, t0)` or `I⁻(x0, t0)` sliced at `t_values`: the slice at
/// `t0 ± s` is the open ball of radius `s`, empty for `s <= 0`.
pub fn chronological_set(
    r: &RandersData,
    dom: &GridDomain,
    x0: &[f64],
    t0: f64,
    t_values: &[f64],
    direction: TimeDirection,
) -> Result<ChronoRegion, CausalityError> {
    check_sorted(t_values)?;
    if !dom.contains(x0) {
        return Err(DistanceError::OutsideDomain { point: x0.to_vec() }.into());
    }
    let field = grid_distance(r, dom, &Source::Point(x0.to_vec()), direction.distance_direction())?;
    let slices = t_values
        .iter()
        .map(|&t| {
            let s = direction.elapsed(t0, t);
            ChronoSlice { t, mask: field.values.iter().map(|d| *d < s).collect() }
        })
        .collect();
    Ok(ChronoRegion { domain: dom.clone(), t0, direction, slices })
}

/// The field `m(y) = inf_{x∉A} d(x, y)` (future) or `inf_{x∉A} d(y, x)`
/// (past) restricted to `A`, shared by developments and horizons.
#[derive(Debug, Clone, PartialEq)]
pub struct DevelopmentField {
    pub base: Vec<bool>,
    pub t0: f64,
    pub direction: TimeDirection,
    pub complement: DistanceField,
}

impl DevelopmentField {
    pub fn new(
        r: &RandersData,
        dom: &GridDomain,
        base: &[bool],
        t0: f64,
        direction: TimeDirection,
    ) -> Result<Self, CausalityError> {
        if base.len() != dom.node_count() {
            return Err(DistanceError::MaskSize { expected: dom.node_count(), found: base.len() }.into());
        }
        if !base.iter().any(|a| *a) {
            return Err(CausalityError::Degenerate("base region is empty"));
        }
        if base.iter().all(|a| *a) {
            return Err(CausalityError::Degenerate("base region has empty complement"));
        }
        let outside: Vec<bool> = base.iter().map(|a| !a).collect();
        let complement = grid_distance(r, dom, &Source::Mask(outside), direction.distance_direction())?;
        Ok(DevelopmentField { base: base.to_vec(), t0, direction, complement })
    }

    /// `m(y)` on `A`, `None` outside.
    pub fn depth(&self, idx: usize) -> Option<f64> {
        self.base[idx].then(|| self.complement.values[idx])
    }

    pub fn slice(&self, t: f64) -> ChronoSlice {
        let s = self.direction.elapsed(self.t0, t);
        let mask = (0..self.base.len()).map(|i| self.depth(i).is_some_and(|m| m > s)).collect();
        ChronoSlice { t, mask }
    }

    pub fn development(&self, t_values: &[f64]) -> Result<ChronoRegion, CausalityError> {
        check_sorted(t_values)?;
        Ok(ChronoRegion {
            domain: self.complement.domain.clone(),
            t0: self.t0,
            direction: self.direction,
            slices: t_values.iter().map(|&t| self.slice(t)).collect(),
        })
    }

    pub fn horizon(&self) -> HorizonSurface {
        HorizonSurface {
            domain: self.complement.domain.clone(),
            base: self.base.clone(),
            t0: self.t0,
            direction: self.direction,
            depth: (0..self.base.len()).map(|i| self.depth(i)).collect(),
        }
    }
}

/// `H±(A)`: at each node of `A` the time `t0 ± m(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonSurface {
    pub domain: GridDomain,
    pub base: Vec<bool>,
    pub t0: f64,
    pub direction: TimeDirection,
    /// `m(y)`, `None` off `A`.
    pub depth: Vec<Option<f64>>,
}

impl HorizonSurface {
    pub fn time(&self, idx: usize) -> Option<f64> {
        self.depth[idx].map(|m| match self.direction {
            TimeDirection::Future => self.t0 + m,
            TimeDirection::Past => self.t0 - m,
        })
    }

    /// Node of largest depth (the apex), first in index order on ties.
    pub fn apex(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, d) in self.depth.iter().enumerate() {
            if let Some(m) = d {
                if m.is_finite() && best.is_none_or(|(_, b)| *m > b) {
                    best = Some((i, *m));
                }
            }
        }
        best.map(|(i, _)| i)
    }
}

/// `D⁺(A)` or `D⁻(A)` sliced at `t_values`.
pub fn cauchy_development(
    r: &RandersData,
    dom: &GridDomain,
    base: &[bool],
    t0: f64,
    direction: TimeDirection,
    t_values: &[f64],
) -> Result<ChronoRegion, CausalityError> {
    check_sorted(t_values)?;
    DevelopmentField::new(r, dom, base, t0, direction)?.development(t_values)
}

pub fn cauchy_horizon(
    r: &RandersData,
    dom: &GridDomain,
    base: &[bool],
    t0: f64,
    direction: TimeDirection,
) -> Result<HorizonSurface, CausalityError> {
    Ok(DevelopmentField::new(r, dom, base, t0, direction)?.horizon())
}
