use alloc::vec::Vec;

use super::{SpacetimeError, StationaryData};
use crate::domain::GridDomain;
use crate::geodesics::{closed_geodesic_check_in, geodesic_residual_in, spray_from_jet, Chart, Curve, GeodesicError};
use crate::geometry::RandersData;
use crate::linalg::MAX_DIM;

/// Largest geodesic residual accepted for a base curve.
pub const LIFT_TOLERANCE: f64 = 1e-6;

const STATE: usize = 2 * MAX_DIM + 1;
type State = [f64; STATE];

/// Future-pointing lightlike curve `(x(σ), t(σ))` over a Fermat geodesic.
///
/// `base.params` is the `h`-arclength σ and `base.velocities` have unit
/// `h`-speed; `t_rate[i] = dt/dσ = F(ẋ)` at node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LightlikeGeodesic {
    pub base: Curve,
    pub t: Vec<f64>,
    pub t_rate: Vec<f64>,
    pub t0: f64,
}

impl LightlikeGeodesic {
    /// `t1 − t0`.
    pub fn arrival(&self) -> f64 {
        self.t[self.t.len() - 1] - self.t0
    }

    /// `(x, t)` at `σ` by cubic Hermite interpolation.
    pub fn sample_at(&self, sigma: f64) -> (Vec<f64>, f64) {
        let c = &self.base;
        let m = c.len();
        let s = sigma.clamp(c.params[0], c.params[m - 1]);
        let i = match c.params.iter().position(|p| *p > s) {
            Some(0) => 0,
            Some(k) => k - 1,
            None => m - 2,
        };
        let h = c.params[i + 1] - c.params[i];
        let u = (s - c.params[i]) / h;
        let (x, _) = c.hermite_at(i, u);
        let (u2, u3) = (u * u, u * u * u);
        let t = (2.0 * u3 - 3.0 * u2 + 1.0) * self.t[i]
            + (u3 - 2.0 * u2 + u) * h * self.t_rate[i]
            + (-2.0 * u3 + 3.0 * u2) * self.t[i + 1]
            + (u3 - u2) * h * self.t_rate[i + 1];
        (x, t)
    }
}

/// `t`-periodic lightlike geodesic over a closed Fermat geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLift {
    pub lift: LightlikeGeodesic,
    /// Universal period `T = ℓ_F(c)`.
    pub period: f64,
}

fn rk4(y: &State, h: f64, f: &impl Fn(&State) -> Result<State, GeodesicError>) -> Result<State, GeodesicError> {
    let k1 = f(y)?;
    let mut t = *y;
    for i in 0..STATE {
        t[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(&t)?;
    for i in 0..STATE {
        t[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(&t)?;
    for i in 0..STATE {
        t[i] = y[i] + h * k3[i];
    }
    let k4 = f(&t)?;
    let mut out = *y;
    for i in 0..STATE {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// `(ẋ, v̇, (α(v), F(v)))` of the geodesic flow at `(x, v)`.
fn flow(r: &RandersData, chart: Chart<'_>, n: usize, y: &State) -> Result<(State, f64, f64), GeodesicError> {
    let (x, v) = (&y[..n], &y[n..2 * n]);
    let xw = chart.wrap(x);
    let jet = r.local_jet(&xw[..n])?;
    let a = spray_from_jet(&jet, &xw[..n], v)?;
    let mut d = [0.0; STATE];
    d[..n].copy_from_slice(v);
    d[n..2 * n].copy_from_slice(&a[..n]);
    let alpha = jet.local.alpha(v);
    Ok((d, alpha, alpha + jet.local.beta(v)))
}

/// Lifts a Fermat geodesic of `r` to a lightlike geodesic of the normalized
/// stationary spacetime, starting at time `t0`.
///
/// The base is re-integrated with RK4 in its `h`-arclength σ, with
/// `dt/dσ = F(ẋ)` carried as an extra state, over as many equal steps as the
/// base has segments.
pub fn lift_null_geodesic(r: &RandersData, base: &Curve, t0: f64) -> Result<LightlikeGeodesic, SpacetimeError> {
    lift_null_geodesic_in(r, None, base, t0)
}

pub fn lift_null_geodesic_in(
    r: &RandersData,
    dom: Option<&GridDomain>,
    base: &Curve,
    t0: f64,
) -> Result<LightlikeGeodesic, SpacetimeError> {
    let n = r.dim();
    super::check_dim(n, base.dim())?;
    base.check()?;
    let residual = geodesic_residual_in(r, dom, base)?;
    if !(residual < LIFT_TOLERANCE) {
        return Err(SpacetimeError::NotGeodesic { residual });
    }
    let chart = Chart { dom };
    let steps = base.len() - 1;
    let mut y: State = [0.0; STATE];
    y[..n].copy_from_slice(base.start());
    y[n..2 * n].copy_from_slice(&base.velocities[0]);

    // h-length of the base, integrated along its own parameter
    let in_s = |y: &State| -> Result<State, GeodesicError> {
        let (mut d, alpha, _) = flow(r, chart, n, y)?;
        d[2 * n] = alpha;
        Ok(d)
    };
    let mut z = y;
    for i in 0..steps {
        z = rk4(&z, base.params[i + 1] - base.params[i], &in_s)?;
    }
    let total = z[2 * n];
    if !(total > 0.0) {
        return Err(GeodesicError::DegenerateCurve.into());
    }

    let in_sigma = |y: &State| -> Result<State, GeodesicError> {
        let (mut d, alpha, f) = flow(r, chart, n, y)?;
        for di in d.iter_mut().take(2 * n) {
            *di /= alpha;
        }
        d[2 * n] = f / alpha;
        Ok(d)
    };
    let h = total / steps as f64;
    y[2 * n] = t0;
    let mut params = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    let mut t = Vec::with_capacity(steps + 1);
    let mut t_rate = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            y = rk4(&y, h, &in_sigma)?;
        }
        let (_, alpha, f) = flow(r, chart, n, &y)?;
        params.push(if k == steps { total } else { k as f64 * h });
        points.push(y[..n].to_vec());
        velocities.push(y[n..2 * n].iter().map(|v| v / alpha).collect());
        t.push(y[2 * n]);
        t_rate.push(f / alpha);
    }
    Ok(LightlikeGeodesic { base: Curve { params, points, velocities }, t, t_rate, t0 })
}

/// Largest `|g(γ̇, γ̇)|` over the nodes, for the normalized metric of `sd`.
pub fn null_defect(sd: &StationaryData, gamma: &LightlikeGeodesic) -> Result<f64, SpacetimeError> {
    defect(sd, gamma, false)
}

/// [`null_defect`] with each node's value divided by `a(ẋ, ẋ)`, `a` the
/// `h`-metric of the Fermat metric of `sd` with `β = 1`.
pub fn null_defect_scaled(sd: &StationaryData, gamma: &LightlikeGeodesic) -> Result<f64, SpacetimeError> {
    defect(sd, gamma, true)
}

fn defect(sd: &StationaryData, gamma: &LightlikeGeodesic, scaled: bool) -> Result<f64, SpacetimeError> {
    let n = sd.dim();
    super::check_dim(n, gamma.base.dim())?;
    let mut worst: f64 = 0.0;
    for i in 0..gamma.base.len() {
        let (x, v) = (&gamma.base.points[i], &gamma.base.velocities[i]);
        let g = sd.metric_value(x, v, gamma.t_rate[i])?;
        let mut d = crate::math::abs(g);
        if scaled {
            let w = sd.omega.eval(x)?;
            let wv: f64 = (0..n).map(|k| w[k] * v[k]).sum();
            let q = sd.g0.eval(x)?.quad(v) + wv * wv;
            d /= q.max(f64::MIN_POSITIVE);
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Lift of a closed geodesic; the time gained over one loop is its Fermat
/// length.
pub fn lift_closed_geodesic(r: &RandersData, c: &Curve, t0: f64) -> Result<ClosedLift, SpacetimeError> {
    lift_closed_geodesic_in(r, None, c, t0)
}

pub fn lift_closed_geodesic_in(
    r: &RandersData,
    dom: Option<&GridDomain>,
    c: &Curve,
    t0: f64,
) -> Result<ClosedLift, SpacetimeError> {
    if !closed_geodesic_check_in(r, dom, c, LIFT_TOLERANCE) {
        return Err(SpacetimeError::NotClosed);
    }
    let lift = lift_null_geodesic_in(r, dom, c, t0)?;
    let period = lift.arrival();
    Ok(ClosedLift { lift, period })
}
