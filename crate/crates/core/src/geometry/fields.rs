use alloc::vec::Vec;

use super::GeometryError;
use crate::fieldexpr::{parse_field, ExprAst, ParseError, ScalarField};
use crate::linalg::{Matrix, Vector, MAX_DIM};

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows of the upper triangle, stored row by row
    i * dim - i * (i + 1) / 2 + j
}

/// Symmetric tensor field `g_ij(x)`; only the upper triangle is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannianMetricField {
    dim: usize,
    comps: Vec<ScalarField>,
}

impl RiemannianMetricField {
    /// `comps` lists the upper triangle row by row: `g11, g12, .., g1n, g22, ..`.
    pub fn new(dim: usize, comps: Vec<ScalarField>) -> Result<Self, GeometryError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        if comps.len() != dim * (dim + 1) / 2 {
            return Err(GeometryError::DimensionMismatch { expected: dim * (dim + 1) / 2, found: comps.len() });
        }
        if let Some(c) = comps.iter().find(|c| c.dim() != dim) {
            return Err(GeometryError::DimensionMismatch { expected: dim, found: c.dim() });
        }
        Ok(RiemannianMetricField { dim, comps })
    }

    /// Builds from a full component function; `(i, j)` is only asked for `i <= j`.
    pub fn from_fn(
        dim: usize,
        mut f: impl FnMut(usize, usize) -> ScalarField,
    ) -> Result<Self, GeometryError> {
        let mut comps = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                comps.push(f(i, j));
            }
        }
        RiemannianMetricField::new(dim, comps)
    }

    pub fn from_asts(dim: usize, mut f: impl FnMut(usize, usize) -> ExprAst) -> Result<Self, GeometryError> {
        let mut comps = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                comps.push(ScalarField::from_ast(f(i, j), dim)?);
            }
        }
        RiemannianMetricField::new(dim, comps)
    }

    /// Parses the upper triangle given row by row.
    pub fn parse(dim: usize, upper: &[&str]) -> Result<Self, GeometryError> {
        let comps = upper
            .iter()
            .map(|s| parse_field(s, dim))
            .collect::<Result<Vec<_>, ParseError>>()?;
        RiemannianMetricField::new(dim, comps)
    }

    pub fn euclidean(dim: usize) -> Self {
        RiemannianMetricField::from_fn(dim, |i, j| ScalarField::constant(if i == j { 1.0 } else { 0.0 }, dim))
            .expect("euclidean metric in supported dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.comps[upper_index(self.dim, i, j)]
    }

    pub fn eval(&self, x: &[f64]) -> Result<Matrix, GeometryError> {
        let n = self.dim;
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = self.component(i, j).eval(x)?;
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        Ok(m)
    }

    /// Values plus `∂g/∂x_k` for every axis `k`.
    pub fn eval_with_derivatives(&self, x: &[f64]) -> Result<(Matrix, [Matrix; MAX_DIM]), GeometryError> {
        let n = self.dim;
        let mut m = Matrix::zeros(n);
        let mut d = [Matrix::zeros(n); MAX_DIM];
        let mut grad = [0.0; MAX_DIM];
        for i in 0..n {
            for j in i..n {
                let v = self.component(i, j).value_and_gradient(x, &mut grad[..n])?;
                m.set(i, j, v);
                m.set(j, i, v);
                for (k, dk) in d.iter_mut().enumerate().take(n) {
                    dk.set(i, j, grad[k]);
                    dk.set(j, i, grad[k]);
                }
            }
        }
        Ok((m, d))
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub(crate) fn ast(&self, i: usize, j: usize) -> ExprAst {
        self.component(i, j).ast().clone()
    }
}

/// One-form field `ω_i(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField {
    dim: usize,
    comps: Vec<ScalarField>,
}

impl OneFormField {
    pub fn new(dim: usize, comps: Vec<ScalarField>) -> Result<Self, GeometryError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        if comps.len() != dim {
            return Err(GeometryError::DimensionMismatch { expected: dim, found: comps.len() });
        }
        if let Some(c) = comps.iter().find(|c| c.dim() != dim) {
            return Err(GeometryError::DimensionMismatch { expected: dim, found: c.dim() });
        }
        Ok(OneFormField { dim, comps })
    }

    pub fn from_asts(dim: usize, f: impl FnMut(usize) -> ExprAst) -> Result<Self, GeometryError> {
        let comps = (0..dim)
            .map(f)
            .map(|a| ScalarField::from_ast(a, dim))
            .collect::<Result<Vec<_>, ParseError>>()?;
        OneFormField::new(dim, comps)
    }

    pub fn parse(dim: usize, comps: &[&str]) -> Result<Self, GeometryError> {
        let comps = comps
            .iter()
            .map(|s| parse_field(s, dim))
            .collect::<Result<Vec<_>, ParseError>>()?;
        OneFormField::new(dim, comps)
    }

    pub fn zero(dim: usize) -> Self {
        OneFormField::new(dim, (0..dim).map(|_| ScalarField::constant(0.0, dim)).collect())
            .expect("zero form in supported dimension")
    }

    /// The exact form `df`, differentiated symbolically.
    pub fn differential(f: &ScalarField) -> Result<Self, GeometryError> {
        let dim = f.dim();
        OneFormField::new(dim, (0..dim).map(|i| f.derivative(i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vector, GeometryError> {
        let mut out = [0.0; MAX_DIM];
        for (o, c) in out.iter_mut().zip(&self.comps) {
            *o = c.eval(x)?;
        }
        Ok(out)
    }

    /// Values plus `d[k][i] = ∂ω_i/∂x_k`.
    pub fn eval_with_derivatives(&self, x: &[f64]) -> Result<(Vector, [Vector; MAX_DIM]), GeometryError> {
        let n = self.dim;
        let mut out = [0.0; MAX_DIM];
        let mut d = [[0.0; MAX_DIM]; MAX_DIM];
        let mut grad = [0.0; MAX_DIM];
        for (i, c) in self.comps.iter().enumerate() {
            out[i] = c.value_and_gradient(x, &mut grad[..n])?;
            for k in 0..n {
                d[k][i] = grad[k];
            }
        }
        Ok((out, d))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.ast().as_num() == Some(0.0))
    }

    pub(crate) fn ast(&self, i: usize) -> ExprAst {
        self.comps[i].ast().clone()
    }
}
