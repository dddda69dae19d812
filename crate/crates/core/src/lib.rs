//! Numerical engine for Randers (Fermat) metrics of stationary spacetimes.
//!
//! The crate builds Randers metrics from closed-form field expressions or from
//! stationary spacetime data, integrates their geodesics, computes asymmetric
//! distances on grids, lifts geodesics to lightlike curves and reads off causal
//! sets (chronological futures, Cauchy developments and horizons) as level sets
//! of the Fermat distance.
//!
//! Everything here is pure computation on `alloc` types; file formats and the
//! command line live in the companion `randers-cli` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod causality;
pub mod distance;
pub mod domain;
pub mod fieldexpr;
pub mod geodesics;
pub mod geometry;
pub mod linalg;
pub mod spacetime;

mod math;
pub mod sampling;

pub use domain::{Axis, GridDomain};
pub use fieldexpr::{parse_field, ExprAst, ScalarField};
pub use geometry::{OneFormField, RandersData, RandersForm, RiemannianMetricField, ZermeloData};
