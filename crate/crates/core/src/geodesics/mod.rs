//! Geodesics of Randers metrics: the spray of `F²/2`, fixed-step RK4
//! integration, curve functionals and the two-point shooting problem.
//!
//! Integrated curves keep *cover* coordinates on periodic axes (they may
//! leave `[min, max)`), while every field evaluation happens at the wrapped
//! point. Curves are affinely parametrized, i.e. `F(x, ẋ)` is constant.

mod connect;
mod reparam;

use alloc::vec::Vec;

use crate::domain::GridDomain;
use crate::geometry::{GeometryError, LocalJet, RandersData};
use crate::linalg::{Vector, MAX_DIM};
use crate::math;

pub use connect::{connect, BvpResult, BvpSolution, ConnectOptions};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeodesicError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("fundamental tensor is not positive definite at {point:?}")]
    SingularTensor { point: Vec<f64> },
    #[error("geodesic left the domain at {point:?} (parameter {param})")]
    DomainExit { point: Vec<f64>, param: f64 },
    #[error("zero velocity")]
    ZeroVelocity,
    #[error("invalid integration request: {0}")]
    InvalidRequest(&'static str),
    #[error("curve needs at least two samples with increasing parameters")]
    DegenerateCurve,
    #[error("curve is not a geodesic (residual {residual:e})")]
    NotGeodesic { residual: f64 },
}

/// Initial data of a geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl GeodesicState {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Self {
        GeodesicState { x, v }
    }
}

/// A sampled path. `params` is strictly increasing and all three arrays have
/// the same length `>= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub params: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(params: Vec<f64>, points: Vec<Vec<f64>>, velocities: Vec<Vec<f64>>) -> Result<Curve, GeodesicError> {
        let c = Curve { params, points, velocities };
        c.check()?;
        Ok(c)
    }

    /// Straight segment `a + s(b − a)`, `s ∈ [0, 1]`, with `samples` nodes.
    pub fn segment(a: &[f64], b: &[f64], samples: usize) -> Curve {
        let samples = samples.max(2);
        let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
        let mut params = Vec::with_capacity(samples);
        let mut points = Vec::with_capacity(samples);
        for k in 0..samples {
            let s = k as f64 / (samples - 1) as f64;
            params.push(s);
            points.push(a.iter().zip(&d).map(|(p, dp)| p + s * dp).collect());
        }
        Curve { params, points, velocities: alloc::vec![d; samples] }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn start(&self) -> &[f64] {
        &self.points[0]
    }

    pub fn end(&self) -> &[f64] {
        &self.points[self.len() - 1]
    }

    /// Same trace run backwards, parameter `s ↦ s_end + s_start − s`.
    pub fn reversed(&self) -> Curve {
        let (a, b) = (self.params[0], self.params[self.len() - 1]);
        Curve {
            params: self.params.iter().rev().map(|s| a + b - s).collect(),
            points: self.points.iter().rev().cloned().collect(),
            velocities: self.velocities.iter().rev().map(|v| v.iter().map(|c| -c).collect()).collect(),
        }
    }

    pub(crate) fn check(&self) -> Result<(), GeodesicError> {
        let n = self.params.len();
        if n < 2 || self.points.len() != n || self.velocities.len() != n {
            return Err(GeodesicError::DegenerateCurve);
        }
        if self.params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeodesicError::DegenerateCurve);
        }
        Ok(())
    }
}

/// Evaluation chart: wraps periodic coordinates and watches bounded axes.
#[derive(Clone, Copy)]
pub(crate) struct Chart<'a> {
    pub dom: Option<&'a GridDomain>,
}

impl Chart<'_> {
    pub(crate) fn wrap(&self, x: &[f64]) -> Vector {
        let mut out = [0.0; MAX_DIM];
        out[..x.len()].copy_from_slice(x);
        if let Some(d) = self.dom {
            d.wrap_point(x, &mut out[..x.len()]);
        }
        out
    }

    pub(crate) fn inside(&self, x: &[f64]) -> bool {
        self.dom.is_none_or(|d| d.contains(x))
    }
}

/// Right-hand side of the geodesic equation from a local jet: `dv/ds` with
/// `g_v · dv = ∂L/∂x − (∂²L/∂v∂x) v`, `L = F²/2`.
pub(crate) fn spray_from_jet(jet: &LocalJet, x: &[f64], v: &[f64]) -> Result<Vector, GeodesicError> {
    let n = v.len();
    let loc = &jet.local;
    let alpha = loc.alpha(v);
    if alpha == 0.0 {
        return Err(GeodesicError::ZeroVelocity);
    }
    let f = alpha + loc.beta(v);
    let av = loc.a.mul_vec(v);
    let mut p = [0.0; MAX_DIM];
    for i in 0..n {
        p[i] = av[i] / alpha + loc.b[i];
    }
    // ∂_k α, ∂_k F
    let mut dalpha = [0.0; MAX_DIM];
    let mut df = [0.0; MAX_DIM];
    for k in 0..n {
        dalpha[k] = jet.da[k].quad(v) / (2.0 * alpha);
        df[k] = dalpha[k] + crate::linalg::dot(&jet.db[k][..n], v);
    }
    let df_v: f64 = (0..n).map(|k| df[k] * v[k]).sum();
    // Σ_k v_k ∂_k p_i
    let mut dp_v = [0.0; MAX_DIM];
    for k in 0..n {
        let dav = jet.da[k].mul_vec(v);
        for i in 0..n {
            dp_v[i] += v[k] * (dav[i] / alpha - av[i] * dalpha[k] / (alpha * alpha) + jet.db[k][i]);
        }
    }
    let mut rhs = [0.0; MAX_DIM];
    for i in 0..n {
        rhs[i] = f * df[i] - (p[i] * df_v + f * dp_v[i]);
    }
    let g = loc.fundamental_tensor(v)?;
    let chol = g.cholesky().map_err(|_| GeodesicError::SingularTensor { point: x.to_vec() })?;
    Ok(chol.solve(&rhs[..n]))
}

/// `(dx/ds, dv/ds)` of the geodesic flow at `s`.
pub fn spray_rhs(r: &RandersData, s: &GeodesicState) -> Result<(Vector, Vector), GeodesicError> {
    let n = r.dim();
    if s.x.len() != n || s.v.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, found: s.x.len().max(s.v.len()) }.into());
    }
    let jet = r.local_jet(&s.x)?;
    let dv = spray_from_jet(&jet, &s.x, &s.v)?;
    let mut dx = [0.0; MAX_DIM];
    dx[..n].copy_from_slice(&s.v);
    Ok((dx, dv))
}

fn accel(r: &RandersData, chart: Chart<'_>, x: &[f64], v: &[f64]) -> Result<Vector, GeodesicError> {
    let n = x.len();
    let xw = chart.wrap(x);
    let jet = r.local_jet(&xw[..n])?;
    spray_from_jet(&jet, &xw[..n], v)
}

/// One classical RK4 step of size `h` for `(x, v)`.
pub(crate) fn rk4_step(
    r: &RandersData,
    chart: Chart<'_>,
    x: &[f64],
    v: &[f64],
    h: f64,
) -> Result<(Vector, Vector), GeodesicError> {
    let n = x.len();
    let mut xt = [0.0; MAX_DIM];
    let mut vt = [0.0; MAX_DIM];
    let a1 = accel(r, chart, x, v)?;
    for i in 0..n {
        xt[i] = x[i] + 0.5 * h * v[i];
        vt[i] = v[i] + 0.5 * h * a1[i];
    }
    let v2 = vt;
    let a2 = accel(r, chart, &xt[..n], &v2[..n])?;
    for i in 0..n {
        xt[i] = x[i] + 0.5 * h * v2[i];
        vt[i] = v[i] + 0.5 * h * a2[i];
    }
    let v3 = vt;
    let a3 = accel(r, chart, &xt[..n], &v3[..n])?;
    for i in 0..n {
        xt[i] = x[i] + h * v3[i];
        vt[i] = v[i] + h * a3[i];
    }
    let v4 = vt;
    let a4 = accel(r, chart, &xt[..n], &v4[..n])?;
    let mut xn = [0.0; MAX_DIM];
    let mut vn = [0.0; MAX_DIM];
    for i in 0..n {
        xn[i] = x[i] + h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
        vn[i] = v[i] + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
    }
    Ok((xn, vn))
}

/// Integrates `steps` equal RK4 steps over the parameter span `span`.
pub(crate) fn integrate_steps(
    r: &RandersData,
    chart: Chart<'_>,
    x0: &[f64],
    v0: &[f64],
    span: f64,
    steps: usize,
) -> Result<Curve, GeodesicError> {
    let n = x0.len();
    let h = span / steps as f64;
    let mut params = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    params.push(0.0);
    points.push(x0.to_vec());
    velocities.push(v0.to_vec());
    let (mut x, mut v) = ([0.0; MAX_DIM], [0.0; MAX_DIM]);
    x[..n].copy_from_slice(x0);
    v[..n].copy_from_slice(v0);
    for k in 1..=steps {
        let (xn, vn) = rk4_step(r, chart, &x[..n], &v[..n], h)?;
        if !chart.inside(&xn[..n]) {
            return Err(GeodesicError::DomainExit { point: xn[..n].to_vec(), param: k as f64 * h });
        }
        x = xn;
        v = vn;
        params.push(if k == steps { span } else { k as f64 * h });
        points.push(x[..n].to_vec());
        velocities.push(v[..n].to_vec());
    }
    Ok(Curve { params, points, velocities })
}

/// Default RK4 step in F-length units.
pub fn default_step(length: f64) -> f64 {
    (length / 200.0).min(1e-2)
}

/// Geodesic from `s0` with F-length `length`, integrated with RK4 in
/// `ceil(length / step)` equal steps. The parameter is `s ∈ [0, length/F(v0)]`
/// and the speed `F(x, ẋ)` stays `F(v0)`.
pub fn integrate_geodesic(
    r: &RandersData,
    s0: &GeodesicState,
    length: f64,
    step: Option<f64>,
) -> Result<Curve, GeodesicError> {
    integrate_geodesic_in(r, None, s0, length, step)
}

/// [`integrate_geodesic`] on a domain: periodic axes wrap, leaving a bounded
/// axis is an error carrying the exit point.
pub fn integrate_geodesic_in(
    r: &RandersData,
    dom: Option<&GridDomain>,
    s0: &GeodesicState,
    length: f64,
    step: Option<f64>,
) -> Result<Curve, GeodesicError> {
    let n = r.dim();
    if s0.x.len() != n || s0.v.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, found: s0.x.len().max(s0.v.len()) }.into());
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(GeodesicError::InvalidRequest("length must be positive"));
    }
    let step = step.unwrap_or_else(|| default_step(length));
    if !(step > 0.0) {
        return Err(GeodesicError::InvalidRequest("step must be positive"));
    }
    let chart = Chart { dom };
    if !chart.inside(&s0.x) {
        return Err(GeodesicError::DomainExit { point: s0.x.clone(), param: 0.0 });
    }
    let xw = chart.wrap(&s0.x);
    let speed = r.local(&xw[..n])?.value(&s0.v);
    if !(speed > 0.0) {
        return Err(GeodesicError::ZeroVelocity);
    }
    let steps = math::ceil(length / step).max(1.0) as usize;
    integrate_steps(r, chart, &s0.x, &s0.v, length / speed, steps)
}

fn speed_at(r: &RandersData, chart: Chart<'_>, x: &[f64], v: &[f64]) -> Result<f64, GeodesicError> {
    let xw = chart.wrap(x);
    Ok(r.local(&xw[..x.len()])?.value(v))
}

/// `∫ F(ẋ) ds` by the composite trapezoid rule.
pub fn curve_length(r: &RandersData, c: &Curve) -> Result<f64, GeodesicError> {
    curve_length_in(r, None, c)
}

pub fn curve_length_in(r: &RandersData, dom: Option<&GridDomain>, c: &Curve) -> Result<f64, GeodesicError> {
    functional(r, Chart { dom }, c, |f| f)
}

/// `½ ∫ F(ẋ)² ds` by the composite trapezoid rule.
pub fn curve_energy(r: &RandersData, c: &Curve) -> Result<f64, GeodesicError> {
    functional(r, Chart { dom: None }, c, |f| 0.5 * f * f)
}

fn functional(r: &RandersData, chart: Chart<'_>, c: &Curve, g: impl Fn(f64) -> f64) -> Result<f64, GeodesicError> {
    c.check()?;
    let mut prev = g(speed_at(r, chart, &c.points[0], &c.velocities[0])?);
    let mut sum = 0.0;
    for i in 1..c.len() {
        let cur = g(speed_at(r, chart, &c.points[i], &c.velocities[i])?);
        sum += 0.5 * (prev + cur) * (c.params[i] - c.params[i - 1]);
        prev = cur;
    }
    Ok(sum)
}

/// Largest one-step defect of `c` as a sampled geodesic: from each node an
/// RK4 step of the segment's parameter width is compared with the next node,
/// positions relative to `|ẋ| Δs` and velocities relative to `|ẋ|`.
pub fn geodesic_residual(r: &RandersData, c: &Curve) -> Result<f64, GeodesicError> {
    geodesic_residual_in(r, None, c)
}

pub fn geodesic_residual_in(r: &RandersData, dom: Option<&GridDomain>, c: &Curve) -> Result<f64, GeodesicError> {
    c.check()?;
    let chart = Chart { dom };
    let n = c.dim();
    let mut worst: f64 = 0.0;
    for i in 0..c.len() - 1 {
        let h = c.params[i + 1] - c.params[i];
        let (x, v) = (&c.points[i], &c.velocities[i]);
        let (xn, vn) = rk4_step(r, chart, x, v, h)?;
        let speed = crate::linalg::norm(v).max(1e-300);
        let mut ex: f64 = 0.0;
        let mut ev: f64 = 0.0;
        for k in 0..n {
            ex = ex.max(math::abs(xn[k] - c.points[i + 1][k]));
            ev = ev.max(math::abs(vn[k] - c.velocities[i + 1][k]));
        }
        worst = worst.max(ex / (speed * h)).max(ev / speed);
    }
    Ok(worst)
}

/// Closed geodesic test: end position equals start (up to periods on a
/// periodic domain), end velocity equals start velocity, and the geodesic
/// residual is below `tol`.
pub fn closed_geodesic_check(r: &RandersData, c: &Curve, tol: f64) -> bool {
    closed_geodesic_check_in(r, None, c, tol)
}

pub fn closed_geodesic_check_in(r: &RandersData, dom: Option<&GridDomain>, c: &Curve, tol: f64) -> bool {
    if c.check().is_err() {
        return false;
    }
    let n = c.dim();
    let mut gap = [0.0; MAX_DIM];
    match dom {
        Some(d) => d.difference(c.start(), c.end(), &mut gap[..n]),
        None => {
            for k in 0..n {
                gap[k] = c.end()[k] - c.start()[k];
            }
        }
    }
    let dv = c.velocities[0].iter().zip(&c.velocities[c.len() - 1]).map(|(a, b)| math::abs(a - b)).fold(0.0, f64::max);
    let dx = gap[..n].iter().map(|g| math::abs(*g)).fold(0.0, f64::max);
    if dx > tol || dv > tol {
        return false;
    }
    matches!(geodesic_residual_in(r, dom, c), Ok(res) if res < tol)
}

/// `√h(v, v)` with `h` the symmetric part of the classical view.
pub(crate) fn h_speed(r: &RandersData, chart: Chart<'_>, x: &[f64], v: &[f64]) -> Result<f64, GeodesicError> {
    let xw = chart.wrap(x);
    Ok(r.local(&xw[..x.len()])?.alpha(v))
}

