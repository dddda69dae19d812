use alloc::vec::Vec;

use super::symbolic::{self, AstMatrix};
use super::{GeometryError, OneFormField, RandersData, RandersForm, RiemannianMetricField};
use crate::fieldexpr::{ExprAst, ScalarField};
use crate::linalg::MAX_DIM;

/// Navigation data: a Riemannian metric `g` and a wind `W` with `g(W,W) < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZermeloData {
    pub g: RiemannianMetricField,
    pub wind: Vec<ScalarField>,
}

impl ZermeloData {
    pub fn new(g: RiemannianMetricField, wind: Vec<ScalarField>) -> Result<Self, GeometryError> {
        let n = g.dim();
        if wind.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: wind.len() });
        }
        if let Some(w) = wind.iter().find(|w| w.dim() != n) {
            return Err(GeometryError::DimensionMismatch { expected: n, found: w.dim() });
        }
        Ok(ZermeloData { g, wind })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `W(x)`.
    pub fn wind_at(&self, x: &[f64]) -> Result<[f64; MAX_DIM], GeometryError> {
        let mut w = [0.0; MAX_DIM];
        for (o, c) in w.iter_mut().zip(&self.wind) {
            *o = c.eval(x)?;
        }
        Ok(w)
    }

    /// `λ(x) = 1 − g(W,W)`.
    pub fn lambda(&self, x: &[f64]) -> Result<f64, GeometryError> {
        let n = self.dim();
        let w = self.wind_at(x)?;
        Ok(1.0 - self.g.eval(x)?.quad(&w[..n]))
    }

    /// Travel time along `v` directly from the navigation formula
    /// `√(g(v,v)/λ + g(v,W)²/λ²) − g(v,W)/λ`.
    pub fn value(&self, x: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
        let n = self.dim();
        let g = self.g.eval(x)?;
        let w = self.wind_at(x)?;
        let lambda = 1.0 - g.quad(&w[..n]);
        if lambda <= 0.0 {
            return Err(GeometryError::NonPositiveLambda { point: x.to_vec(), lambda });
        }
        let gvw = g.bilinear(v, &w[..n]);
        Ok(crate::math::sqrt(g.quad(v) / lambda + gvw * gvw / (lambda * lambda)) - gvw / lambda)
    }
}

fn metric_asts(g: &RiemannianMetricField) -> AstMatrix {
    let n = g.dim();
    (0..n).map(|i| (0..n).map(|j| g.ast(i, j)).collect()).collect()
}

/// Randers metric with the same travel times as `z`, in Fermat form:
/// `g0 = g/λ`, `ω = −g(·,W)/λ`. `λ > 0` is checked at `samples`.
pub fn randers_from_zermelo(z: &ZermeloData, samples: &[Vec<f64>]) -> Result<RandersData, GeometryError> {
    for x in samples {
        let lambda = z.lambda(x)?;
        if lambda <= 0.0 {
            return Err(GeometryError::NonPositiveLambda { point: x.clone(), lambda });
        }
    }
    let n = z.dim();
    let g = metric_asts(&z.g);
    let w: Vec<ExprAst> = z.wind.iter().map(|c| c.ast().clone()).collect();
    let w_flat = symbolic::mul_vec(&g, &w);
    let lambda = ExprAst::sub(ExprAst::num(1.0), symbolic::dot(&w, &w_flat));
    let g0 = RiemannianMetricField::from_asts(n, |i, j| ExprAst::div(g[i][j].clone(), lambda.clone()))?;
    let omega = OneFormField::from_asts(n, |i| ExprAst::neg(ExprAst::div(w_flat[i].clone(), lambda.clone())))?;
    Ok(RandersData { g0, omega, form: RandersForm::Fermat })
}

/// Inverse of [`randers_from_zermelo`]. With the Fermat view `(g0, ω)` of
/// `r`: `W = −g0⁻¹ω`, `g = g0 / (1 + ‖ω‖²_{g0})`. Validity is checked at
/// `samples`.
pub fn zermelo_from_randers(r: &RandersData, samples: &[Vec<f64>]) -> Result<ZermeloData, GeometryError> {
    for x in samples {
        let norm = r.local(x)?.randers_norm();
        if !(norm < 1.0) {
            return Err(GeometryError::NotRanders { point: x.clone(), norm });
        }
    }
    let n = r.dim();
    let (g0f, omf) = r.fermat_view();
    let g0 = metric_asts(&g0f);
    let om: Vec<ExprAst> = (0..n).map(|i| omf.ast(i)).collect();
    let det = symbolic::det(&g0);
    let adj_om = symbolic::mul_vec(&symbolic::adjugate(&g0), &om);
    // ‖ω‖² = ωᵀ adj(g0) ω / det(g0)
    let norm2 = ExprAst::div(symbolic::dot(&om, &adj_om), det.clone());
    let scale = ExprAst::add(ExprAst::num(1.0), norm2);
    let g = RiemannianMetricField::from_asts(n, |i, j| ExprAst::div(g0[i][j].clone(), scale.clone()))?;
    let wind = adj_om
        .into_iter()
        .map(|c| ScalarField::from_ast(ExprAst::neg(ExprAst::div(c, det.clone())), n))
        .collect::<Result<Vec<_>, _>>()?;
    ZermeloData::new(g, wind)
}
