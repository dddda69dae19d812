use alloc::vec::Vec;

use super::fields::{OneFormField, RiemannianMetricField};
use super::GeometryError;
use crate::fieldexpr::ExprAst;
use crate::linalg::{dot, Cholesky, Matrix, Vector, MAX_DIM};
use crate::math;

/// How the stored pair `(g0, ω)` turns into a Finsler function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RandersForm {
    /// `F(v) = √(g0(v,v) + ω(v)²) + ω(v)`, the Fermat metric of the
    /// normalized stationary spacetime `g0 + 2ω dt − dt²`.
    Fermat,
    /// `F(v) = √(g0(v,v)) + ω(v)`.
    Classical,
}

/// A Randers metric given by a Riemannian field, a one-form field and the
/// form that combines them.
///
/// Internally every evaluation goes through the classical view
/// `F = √a(v,v) + b(v)`, with `a = g0 + ω⊗ω, b = ω` for the Fermat form.
#[derive(Debug, Clone, PartialEq)]
pub struct RandersData {
    pub g0: RiemannianMetricField,
    pub omega: OneFormField,
    pub form: RandersForm,
}

/// The classical view `(a, b)` of a Randers metric at one point.
#[derive(Debug, Clone, Copy)]
pub struct LocalRanders {
    pub a: Matrix,
    pub b: Vector,
    chol: Cholesky,
}

/// [`LocalRanders`] plus first derivatives along each coordinate axis.
#[derive(Debug, Clone, Copy)]
pub struct LocalJet {
    pub local: LocalRanders,
    /// `da[k] = ∂a/∂x_k`
    pub da: [Matrix; MAX_DIM],
    /// `db[k][i] = ∂b_i/∂x_k`
    pub db: [Vector; MAX_DIM],
}

impl RandersData {
    pub fn new(g0: RiemannianMetricField, omega: OneFormField, form: RandersForm) -> Result<Self, GeometryError> {
        if g0.dim() != omega.dim() {
            return Err(GeometryError::DimensionMismatch { expected: g0.dim(), found: omega.dim() });
        }
        Ok(RandersData { g0, omega, form })
    }

    /// `√g0` with no one-form.
    pub fn riemannian(g0: RiemannianMetricField) -> Self {
        let dim = g0.dim();
        RandersData { g0, omega: OneFormField::zero(dim), form: RandersForm::Classical }
    }

    pub fn euclidean(dim: usize) -> Self {
        RandersData::riemannian(RiemannianMetricField::euclidean(dim))
    }

    pub fn dim(&self) -> usize {
        self.g0.dim()
    }

    fn check_dim(&self, len: usize) -> Result<(), GeometryError> {
        if len != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), found: len });
        }
        Ok(())
    }

    fn invalid(x: &[f64], e: crate::linalg::NotPositiveDefinite) -> GeometryError {
        GeometryError::InvalidMetric { point: x.to_vec(), pivot: e.pivot, value: e.value }
    }

    /// Classical view at `x`. Fails when `g0(x)` is not positive definite.
    pub fn local(&self, x: &[f64]) -> Result<LocalRanders, GeometryError> {
        self.check_dim(x.len())?;
        let g0 = self.g0.eval(x)?;
        let w = self.omega.eval(x)?;
        let g0_chol = g0.cholesky().map_err(|e| Self::invalid(x, e))?;
        let (a, chol) = match self.form {
            RandersForm::Classical => (g0, g0_chol),
            RandersForm::Fermat => {
                let n = self.dim();
                let a = Matrix::from_fn(n, |i, j| g0.get(i, j) + w[i] * w[j]);
                let chol = a.cholesky().map_err(|e| Self::invalid(x, e))?;
                (a, chol)
            }
        };
        Ok(LocalRanders { a, b: w, chol })
    }

    pub fn local_jet(&self, x: &[f64]) -> Result<LocalJet, GeometryError> {
        self.check_dim(x.len())?;
        let n = self.dim();
        let (g0, dg0) = self.g0.eval_with_derivatives(x)?;
        let (w, dw) = self.omega.eval_with_derivatives(x)?;
        let g0_chol = g0.cholesky().map_err(|e| Self::invalid(x, e))?;
        let local = match self.form {
            RandersForm::Classical => LocalRanders { a: g0, b: w, chol: g0_chol },
            RandersForm::Fermat => {
                let a = Matrix::from_fn(n, |i, j| g0.get(i, j) + w[i] * w[j]);
                let chol = a.cholesky().map_err(|e| Self::invalid(x, e))?;
                LocalRanders { a, b: w, chol }
            }
        };
        let mut da = dg0;
        if self.form == RandersForm::Fermat {
            for k in 0..n {
                da[k] = Matrix::from_fn(n, |i, j| dg0[k].get(i, j) + dw[k][i] * w[j] + w[i] * dw[k][j]);
            }
        }
        Ok(LocalJet { local, da, db: dw })
    }

    /// The reversed metric `F̃(v) = F(−v)`.
    pub fn reversed(&self) -> RandersData {
        let n = self.dim();
        let omega = OneFormField::from_asts(n, |i| ExprAst::neg(self.omega.ast(i)))
            .expect("negated one-form keeps its dimension");
        RandersData { g0: self.g0.clone(), omega, form: self.form }
    }

    /// Same metric expressed in the requested form.
    ///
    /// Converting to the Fermat form needs `g0 − ω⊗ω`, which is positive
    /// definite exactly where the classical metric is valid.
    pub fn to_form(&self, form: RandersForm) -> RandersData {
        if form == self.form {
            return self.clone();
        }
        let n = self.dim();
        let sign = match form {
            RandersForm::Classical => 1.0,
            RandersForm::Fermat => -1.0,
        };
        let g0 = RiemannianMetricField::from_asts(n, |i, j| {
            let ww = ExprAst::mul(self.omega.ast(i), self.omega.ast(j));
            if sign > 0.0 {
                ExprAst::add(self.g0.ast(i, j), ww)
            } else {
                ExprAst::sub(self.g0.ast(i, j), ww)
            }
        })
        .expect("same dimension");
        RandersData { g0, omega: self.omega.clone(), form }
    }

    /// The pair `(g0, ω)` of the normalized stationary spacetime whose Fermat
    /// metric this is.
    pub fn fermat_view(&self) -> (RiemannianMetricField, OneFormField) {
        let f = self.to_form(RandersForm::Fermat);
        (f.g0, f.omega)
    }
}

impl LocalRanders {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `√a(v,v)`.
    #[inline]
    pub fn alpha(&self, v: &[f64]) -> f64 {
        math::sqrt(self.a.quad(v).max(0.0))
    }

    #[inline]
    pub fn beta(&self, v: &[f64]) -> f64 {
        dot(&self.b[..self.dim()], v)
    }

    #[inline]
    pub fn value(&self, v: &[f64]) -> f64 {
        self.alpha(v) + self.beta(v)
    }

    /// `‖b‖_a`; the metric is a genuine Finsler metric iff this is `< 1`.
    pub fn randers_norm(&self) -> f64 {
        math::sqrt(self.chol.inverse_quad(&self.b[..self.dim()]))
    }

    /// Direction minimizing `F(v)/α(v)`, i.e. `−a⁻¹b` (zero when `b = 0`).
    pub fn headwind_direction(&self) -> Vector {
        let mut v = self.chol.solve(&self.b[..self.dim()]);
        v.iter_mut().for_each(|c| *c = -*c);
        v
    }

    pub fn cholesky(&self) -> &Cholesky {
        &self.chol
    }

    /// Hessian of `F²/2` in the fiber at `v ≠ 0`:
    /// `(F/α)(a − ℓℓᵀ) + (ℓ + b)(ℓ + b)ᵀ` with `ℓ = a v / α`.
    pub fn fundamental_tensor(&self, v: &[f64]) -> Result<Matrix, GeometryError> {
        let n = self.dim();
        let alpha = self.alpha(v);
        if alpha == 0.0 {
            return Err(GeometryError::ZeroVector);
        }
        let av = self.a.mul_vec(v);
        let mut l = [0.0; MAX_DIM];
        for i in 0..n {
            l[i] = av[i] / alpha;
        }
        let f = alpha + self.beta(v);
        let ratio = f / alpha;
        Ok(Matrix::from_fn(n, |i, j| {
            ratio * (self.a.get(i, j) - l[i] * l[j]) + (l[i] + self.b[i]) * (l[j] + self.b[j])
        }))
    }
}

/// `F(x, v)`.
pub fn randers_value(r: &RandersData, x: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
    r.check_dim(v.len())?;
    Ok(r.local(x)?.value(v))
}

/// `F(x, −v)`.
pub fn reverse_value(r: &RandersData, x: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
    r.check_dim(v.len())?;
    let neg: Vec<f64> = v.iter().map(|c| -c).collect();
    Ok(r.local(x)?.value(&neg))
}

/// The symmetric part `h(v, w)` (`g0 + ω⊗ω` for Fermat data), polarized.
pub fn perlick_h(r: &RandersData, x: &[f64], v: &[f64], w: &[f64]) -> Result<f64, GeometryError> {
    r.check_dim(v.len())?;
    r.check_dim(w.len())?;
    Ok(r.local(x)?.a.sym_bilinear(v, w))
}

/// Recovers `(h(v,v), ω(v))` from a positively homogeneous metric evaluated
/// as a black box: `h = ¼(F(v)+F(−v))²`, `ω = ½(F(v)−F(−v))`.
pub fn recover_components<E>(
    metric: impl Fn(&[f64]) -> Result<f64, E>,
    v: &[f64],
) -> Result<(f64, f64), E> {
    let neg: Vec<f64> = v.iter().map(|c| -c).collect();
    let fwd = metric(v)?;
    let back = metric(&neg)?;
    let s = fwd + back;
    Ok((0.25 * s * s, 0.5 * (fwd - back)))
}

/// Fundamental tensor `g_v` of `F` at `(x, v)`, `v ≠ 0`.
pub fn fundamental_tensor(r: &RandersData, x: &[f64], v: &[f64]) -> Result<Matrix, GeometryError> {
    r.check_dim(v.len())?;
    if v.iter().all(|c| *c == 0.0) {
        return Err(GeometryError::ZeroVector);
    }
    r.local(x)?.fundamental_tensor(v)
}

/// `‖ω‖_g = √(ωᵀ g⁻¹ ω)` at `x`.
pub fn one_form_norm(om: &OneFormField, g: &RiemannianMetricField, x: &[f64]) -> Result<f64, GeometryError> {
    if om.dim() != g.dim() {
        return Err(GeometryError::DimensionMismatch { expected: g.dim(), found: om.dim() });
    }
    let gm = g.eval(x)?;
    let w = om.eval(x)?;
    let chol = gm
        .cholesky()
        .map_err(|e| GeometryError::InvalidMetric { point: x.to_vec(), pivot: e.pivot, value: e.value })?;
    Ok(math::sqrt(chol.inverse_quad(&w[..g.dim()])))
}
