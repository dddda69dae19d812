use alloc::vec::Vec;

use super::{fermat_metric, SpacetimeError, StationaryData};
use crate::fieldexpr::ExprAst;
use crate::geodesics::{connect, ConnectOptions, Curve};
use crate::geometry::{OneFormField, RandersData, RandersForm, RiemannianMetricField};
use crate::linalg::MAX_DIM;

/// Fermat metric of `S × ℝ_y` with `g0' = g0/β ⊕ 1/β` and `ω' = (ω/β, 0)`:
///
/// `F̃(v, y) = √(g0(v,v)/β + y²/β + ω(v)²/β²) + ω(v)/β`.
///
/// A geodesic from `(x0, 0)` to `(x1, T)` projects to a timelike geodesic of
/// proper time `T`, arriving after `t1 − t0 = ℓ_F̃`. `F̃(v, 0) = F(v)`.
pub fn augmented_proper_time_metric(sd: &StationaryData, samples: &[Vec<f64>]) -> Result<RandersData, SpacetimeError> {
    let n = sd.dim();
    if n + 1 > MAX_DIM {
        return Err(SpacetimeError::DimensionMismatch { expected: MAX_DIM - 1, found: n });
    }
    let base = fermat_metric(sd, samples)?;
    let m = n + 1;
    let inv_beta = match sd.beta.ast().as_num() {
        Some(b) if b == 1.0 => ExprAst::num(1.0),
        _ => ExprAst::div(ExprAst::num(1.0), sd.beta.ast().clone()),
    };
    let g0 = RiemannianMetricField::from_asts(m, |i, j| match (i < n, j < n) {
        (true, true) => base.g0.component(i, j).ast().clone(),
        (false, false) => inv_beta.clone(),
        _ => ExprAst::num(0.0),
    })?;
    let omega =
        OneFormField::from_asts(m, |i| if i < n { base.omega.component(i).ast().clone() } else { ExprAst::num(0.0) })?;
    Ok(RandersData::new(g0, omega, RandersForm::Fermat)?)
}

/// Shortest `F̃`-geodesic from `(x0, 0)` to `(x1, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperTimeGeodesic {
    /// `t1 − t0`.
    pub arrival: f64,
    /// Curve in `(x, y)` coordinates.
    pub curve: Curve,
}

/// Arrival time of the timelike geodesic from `x0` to `x1` with proper time
/// `proper_time`. `opts.domain`, if any, lives in `S × ℝ_y`.
pub fn proper_time_arrival(
    sd: &StationaryData,
    x0: &[f64],
    x1: &[f64],
    proper_time: f64,
    opts: &ConnectOptions,
) -> Result<ProperTimeGeodesic, SpacetimeError> {
    let n = sd.dim();
    super::check_dim(n, x0.len())?;
    super::check_dim(n, x1.len())?;
    let samples = [x0.to_vec(), x1.to_vec()];
    let aug = augmented_proper_time_metric(sd, &samples)?;
    let mut p = x0.to_vec();
    p.push(0.0);
    let mut q = x1.to_vec();
    q.push(proper_time);
    let res = connect(&aug, &p, &q, opts)?;
    let best = res.shortest().ok_or(SpacetimeError::NoConnection)?;
    Ok(ProperTimeGeodesic { arrival: best.length, curve: best.curve.clone() })
}
