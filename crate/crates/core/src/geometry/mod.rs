//! Randers metrics: values, fundamental tensor, validity and the Zermelo form.

mod fields;
mod randers;
pub(crate) mod symbolic;
mod validity;
mod zermelo;

use alloc::vec::Vec;

use crate::fieldexpr::{EvalError, ParseError};

pub use fields::{OneFormField, RiemannianMetricField};
pub use randers::{
    fundamental_tensor, one_form_norm, perlick_h, randers_value, recover_components, reverse_value, LocalJet,
    LocalRanders, RandersData, RandersForm,
};
pub use validity::{validity_report, PointValidity, ValidityReport};
pub use zermelo::{randers_from_zermelo, zermelo_from_randers, ZermeloData};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("metric not positive definite at {point:?} (pivot {pivot} = {value:e})")]
    InvalidMetric { point: Vec<f64>, pivot: usize, value: f64 },
    #[error("zero tangent vector")]
    ZeroVector,
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not supported (1 to 4)")]
    UnsupportedDimension(usize),
    #[error("wind too strong at {point:?}: 1 - g(W,W) = {lambda:e}")]
    NonPositiveLambda { point: Vec<f64>, lambda: f64 },
    #[error("not a Randers metric at {point:?}: one-form norm {norm} >= 1")]
    NotRanders { point: Vec<f64>, norm: f64 },
}
