//! Standard stationary spacetimes `g0 + 2ω dt − β dt²` (up to a conformal
//! factor φ), their Fermat metrics, lightlike lifts and gauge changes.
//!
//! The conformal factor never enters a computation: lightlike geodesics are
//! conformally invariant, so every operation works with the normalized data.

mod gauge;
mod lift;
mod proper_time;

use alloc::vec::Vec;

use crate::fieldexpr::{ExprAst, ScalarField};
use crate::geodesics::GeodesicError;
use crate::geometry::{GeometryError, OneFormField, RandersData, RandersForm, RiemannianMetricField};
use crate::linalg::MAX_DIM;

pub use gauge::{almost_isometry_check, gauge_transform, section_spacelike_check, IsometryReport, SectionReport};
pub use lift::{
    lift_closed_geodesic, lift_closed_geodesic_in, lift_null_geodesic, lift_null_geodesic_in, null_defect,
    null_defect_scaled, ClosedLift, LightlikeGeodesic, LIFT_TOLERANCE,
};
pub use proper_time::{augmented_proper_time_metric, proper_time_arrival, ProperTimeGeodesic};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpacetimeError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error("{field} must be positive, found {value:e} at {point:?}")]
    NonPositive { field: &'static str, point: Vec<f64>, value: f64 },
    #[error("base curve is not a geodesic (residual {residual:e})")]
    NotGeodesic { residual: f64 },
    #[error("curve is not a closed geodesic")]
    NotClosed,
    #[error("section is not spacelike at {point:?}: margin {margin:e}")]
    NonSpacelikeSection { point: Vec<f64>, margin: f64 },
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no connecting geodesic found")]
    NoConnection,
}

/// Data of `φ·(g0 + 2ω dt − β dt²)` on `S × ℝ`.
///
/// `phi` takes `n + 1` coordinates, the last one being `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryData {
    pub g0: RiemannianMetricField,
    pub omega: OneFormField,
    pub beta: ScalarField,
    pub phi: Option<ScalarField>,
}

impl StationaryData {
    pub fn new(
        g0: RiemannianMetricField,
        omega: OneFormField,
        beta: ScalarField,
        phi: Option<ScalarField>,
    ) -> Result<Self, SpacetimeError> {
        let n = g0.dim();
        if omega.dim() != n {
            return Err(SpacetimeError::DimensionMismatch { expected: n, found: omega.dim() });
        }
        if beta.dim() != n {
            return Err(SpacetimeError::DimensionMismatch { expected: n, found: beta.dim() });
        }
        if let Some(p) = &phi {
            if p.dim() != n + 1 {
                return Err(SpacetimeError::DimensionMismatch { expected: n + 1, found: p.dim() });
            }
        }
        Ok(StationaryData { g0, omega, beta, phi })
    }

    /// `β = 1`, no conformal factor.
    pub fn normalized(g0: RiemannianMetricField, omega: OneFormField) -> Self {
        let n = g0.dim();
        StationaryData { g0, omega, beta: ScalarField::constant(1.0, n), phi: None }
    }

    /// Minkowski space of spatial dimension `n`.
    pub fn minkowski(n: usize) -> Self {
        StationaryData::normalized(RiemannianMetricField::euclidean(n), OneFormField::zero(n))
    }

    /// The normalized spacetime whose Fermat metric is `r`.
    pub fn from_randers(r: &RandersData) -> Self {
        let (g0, omega) = r.fermat_view();
        StationaryData::normalized(g0, omega)
    }

    pub fn dim(&self) -> usize {
        self.g0.dim()
    }

    /// Checks `β > 0` at `samples`, and `φ > 0` at `(x, 0)`.
    pub fn check_positivity(&self, samples: &[Vec<f64>]) -> Result<(), SpacetimeError> {
        for x in samples {
            let b = self.beta.eval(x).map_err(GeometryError::from)?;
            if !(b > 0.0) {
                return Err(SpacetimeError::NonPositive { field: "beta", point: x.clone(), value: b });
            }
            if let Some(phi) = &self.phi {
                let mut xt = x.clone();
                xt.push(0.0);
                let p = phi.eval(&xt).map_err(GeometryError::from)?;
                if !(p > 0.0) {
                    return Err(SpacetimeError::NonPositive { field: "phi", point: xt, value: p });
                }
            }
        }
        Ok(())
    }

    /// `g((v, τ), (v, τ))` of the normalized metric at `x`.
    pub fn metric_value(&self, x: &[f64], v: &[f64], tau: f64) -> Result<f64, SpacetimeError> {
        let n = self.dim();
        if x.len() != n || v.len() != n {
            return Err(SpacetimeError::DimensionMismatch { expected: n, found: x.len().max(v.len()) });
        }
        let g = self.g0.eval(x)?;
        let w = self.omega.eval(x)?;
        let b = self.beta.eval(x).map_err(GeometryError::from)?;
        let wv: f64 = (0..n).map(|i| w[i] * v[i]).sum();
        Ok(g.quad(v) + 2.0 * wv * tau - b * tau * tau)
    }
}

fn over_beta(e: ExprAst, beta: &ExprAst) -> ExprAst {
    ExprAst::div(e, beta.clone())
}

/// Fermat metric `√(g0/β + ω²/β²) + ω/β` in Fermat form; `φ` is ignored and
/// `β` is checked positive at `samples`. With `β ≡ 1` the expressions are kept
/// as given.
pub fn fermat_metric(sd: &StationaryData, samples: &[Vec<f64>]) -> Result<RandersData, SpacetimeError> {
    let n = sd.dim();
    sd.check_positivity(samples)?;
    let beta = sd.beta.ast();
    if let Some(b) = beta.as_num() {
        if !(b > 0.0) {
            return Err(SpacetimeError::NonPositive { field: "beta", point: Vec::new(), value: b });
        }
        if b == 1.0 {
            return Ok(RandersData::new(sd.g0.clone(), sd.omega.clone(), RandersForm::Fermat)?);
        }
    }
    let g0 = RiemannianMetricField::from_asts(n, |i, j| over_beta(sd.g0.component(i, j).ast().clone(), beta))?;
    let omega = OneFormField::from_asts(n, |i| over_beta(sd.omega.component(i).ast().clone(), beta))?;
    Ok(RandersData::new(g0, omega, RandersForm::Fermat)?)
}

pub(crate) fn check_dim(n: usize, len: usize) -> Result<(), SpacetimeError> {
    if len != n || n > MAX_DIM {
        return Err(SpacetimeError::DimensionMismatch { expected: n, found: len });
    }
    Ok(())
}
