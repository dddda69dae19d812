use alloc::vec::Vec;

use super::SpacetimeError;
use crate::fieldexpr::{ExprAst, ScalarField};
use crate::geometry::{GeometryError, OneFormField, RandersData, RandersForm, RiemannianMetricField};
use crate::linalg::{Vector, MAX_DIM};
use crate::math;
use crate::sampling::direction_set;

/// Spacelike test of the section `{t = f(x)}`: `F(v) > df(v)` for all `v ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionReport {
    /// `1 − ‖b − df‖_a` per sample, the exact infimum of `(F − df)(v)/α(v)`.
    pub margins: Vec<f64>,
    /// Same infimum estimated over the sampled directions (never below the exact one).
    pub sampled_margins: Vec<f64>,
    pub min_margin: f64,
    pub worst_point: Option<Vec<f64>>,
    pub pass: bool,
}

fn gradient(f: &ScalarField, x: &[f64]) -> Result<Vector, GeometryError> {
    let mut g = [0.0; MAX_DIM];
    f.value_and_gradient(x, &mut g[..x.len()])?;
    Ok(g)
}

pub fn section_spacelike_check(
    r: &RandersData,
    f: &ScalarField,
    samples: &[Vec<f64>],
    directions: usize,
    seed: u64,
) -> Result<SectionReport, SpacetimeError> {
    let n = r.dim();
    super::check_dim(n, f.dim())?;
    let dirs = direction_set(n, directions, seed);
    let mut report =
        SectionReport { margins: Vec::new(), sampled_margins: Vec::new(), min_margin: f64::INFINITY, worst_point: None, pass: true };
    for x in samples {
        let loc = r.local(x)?;
        let df = gradient(f, x)?;
        let mut b = loc.b;
        for i in 0..n {
            b[i] -= df[i];
        }
        let norm = math::sqrt(loc.cholesky().inverse_quad(&b[..n]).max(0.0));
        let margin = 1.0 - norm;
        let sampled = dirs
            .iter()
            .map(|d| {
                let dv: f64 = (0..n).map(|i| b[i] * d[i]).sum();
                1.0 + dv / loc.alpha(&d[..n])
            })
            .fold(f64::INFINITY, f64::min);
        if margin < report.min_margin {
            report.min_margin = margin;
            report.worst_point = Some(x.clone());
        }
        report.pass &= margin > 0.0 && sampled > 0.0;
        report.margins.push(margin);
        report.sampled_margins.push(sampled);
    }
    Ok(report)
}

/// The metric `F − df`, in the form of `r`.
///
/// Classical form: `b' = b − df`. Fermat form: `ω' = ω − df` and
/// `g0' = g0 + ω⊗ω − ω'⊗ω'`, so the `h`-metric is unchanged.
/// Fails when the section is not spacelike at one of `samples`.
pub fn gauge_transform(r: &RandersData, f: &ScalarField, samples: &[Vec<f64>]) -> Result<RandersData, SpacetimeError> {
    let n = r.dim();
    let report = section_spacelike_check(r, f, samples, 32, 0)?;
    if !report.pass {
        return Err(SpacetimeError::NonSpacelikeSection {
            point: report.worst_point.unwrap_or_default(),
            margin: report.min_margin,
        });
    }
    let df = OneFormField::differential(f)?;
    let w = |i: usize| r.omega.component(i).ast().clone();
    let w_new = |i: usize| ExprAst::sub(w(i), df.component(i).ast().clone());
    let omega = OneFormField::from_asts(n, w_new)?;
    let g0 = match r.form {
        RandersForm::Classical => r.g0.clone(),
        RandersForm::Fermat => RiemannianMetricField::from_asts(n, |i, j| {
            ExprAst::sub(
                ExprAst::add(r.g0.component(i, j).ast().clone(), ExprAst::mul(w(i), w(j))),
                ExprAst::mul(w_new(i), w_new(j)),
            )
        })?,
    };
    Ok(RandersData::new(g0, omega, r.form)?)
}

/// Pointwise residuals of `F(φ(x), Dφ·v) = F(x, v) + df(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryReport {
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub pass: bool,
}

/// Checks that `map` is an almost isometry with potential `f`, at `samples`
/// and `directions` unit vectors each; residuals are relative to
/// `max(1, F(x, v))`.
pub fn almost_isometry_check(
    r: &RandersData,
    map: &[ScalarField],
    f: &ScalarField,
    samples: &[Vec<f64>],
    directions: usize,
    seed: u64,
    tol: f64,
) -> Result<IsometryReport, SpacetimeError> {
    let n = r.dim();
    super::check_dim(n, map.len())?;
    super::check_dim(n, f.dim())?;
    if let Some(m) = map.iter().find(|m| m.dim() != n) {
        return Err(SpacetimeError::DimensionMismatch { expected: n, found: m.dim() });
    }
    let dirs = direction_set(n, directions, seed);
    let mut report = IsometryReport { max_residual: 0.0, worst_point: None, pass: true };
    for x in samples {
        let mut y = [0.0; MAX_DIM];
        let mut jac = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            y[i] = map[i].value_and_gradient(x, &mut jac[i][..n]).map_err(GeometryError::from)?;
        }
        let here = r.local(x)?;
        let there = r.local(&y[..n])?;
        let df = gradient(f, x)?;
        for d in &dirs {
            let v = &d[..n];
            let mut pushed = [0.0; MAX_DIM];
            for i in 0..n {
                pushed[i] = (0..n).map(|k| jac[i][k] * v[k]).sum();
            }
            let lhs = there.value(&pushed[..n]);
            let fv = here.value(v);
            let dfv: f64 = (0..n).map(|k| df[k] * v[k]).sum();
            let res = math::abs(lhs - fv - dfv) / fv.max(1.0);
            if res > report.max_residual {
                report.max_residual = res;
                report.worst_point = Some(x.clone());
            }
        }
    }
    report.pass = report.max_residual <= tol;
    Ok(report)
}
