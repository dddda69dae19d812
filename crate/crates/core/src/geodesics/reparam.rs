use alloc::vec::Vec;

use super::{h_speed, Chart, Curve, GeodesicError};
use crate::domain::GridDomain;
use crate::geometry::RandersData;

// Cubic Hermite basis on [0, 1] and its derivative.
fn hermite(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2]
}

fn hermite_d(t: f64) -> [f64; 4] {
    let t2 = t * t;
    [6.0 * t2 - 6.0 * t, 3.0 * t2 - 4.0 * t + 1.0, -6.0 * t2 + 6.0 * t, 3.0 * t2 - 2.0 * t]
}

impl Curve {
    /// Point and velocity at parameter `s`, cubic Hermite between nodes and
    /// clamped to the parameter range.
    pub fn sample_at(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        let m = self.len();
        let s = s.clamp(self.params[0], self.params[m - 1]);
        let i = match self.params.binary_search_by(|p| p.total_cmp(&s)) {
            Ok(k) => return (self.points[k].clone(), self.velocities[k].clone()),
            Err(k) => k.clamp(1, m - 1) - 1,
        };
        let t = (s - self.params[i]) / (self.params[i + 1] - self.params[i]);
        self.hermite_at(i, t)
    }

    /// Point and `dx/ds` at parameter fraction `t ∈ [0, 1]` of segment `i`,
    /// interpolated with cubic Hermite polynomials.
    pub(crate) fn hermite_at(&self, i: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
        let h = self.params[i + 1] - self.params[i];
        let b = hermite(t);
        let db = hermite_d(t);
        let (p0, p1) = (&self.points[i], &self.points[i + 1]);
        let (v0, v1) = (&self.velocities[i], &self.velocities[i + 1]);
        let x = (0..self.dim()).map(|k| b[0] * p0[k] + b[1] * h * v0[k] + b[2] * p1[k] + b[3] * h * v1[k]).collect();
        let v = (0..self.dim())
            .map(|k| (db[0] * p0[k] + db[2] * p1[k]) / h + db[1] * v0[k] + db[3] * v1[k])
            .collect();
        (x, v)
    }

    /// The same trace with constant unit `h`-speed: parameter = `h`-arclength,
    /// `samples` nodes equally spaced in it. Positions come from cubic Hermite
    /// interpolation; each output velocity is normalized to `h(ẋ,ẋ) = 1`.
    pub fn reparametrize_constant_h_speed(
        &self,
        r: &RandersData,
        dom: Option<&GridDomain>,
        samples: usize,
    ) -> Result<Curve, GeodesicError> {
        self.check()?;
        let chart = Chart { dom };
        let m = self.len();
        let q: Vec<f64> = (0..m)
            .map(|i| h_speed(r, chart, &self.points[i], &self.velocities[i]))
            .collect::<Result<_, _>>()?;
        // h-arclength at the nodes, Simpson per segment
        let mut sigma = Vec::with_capacity(m);
        sigma.push(0.0);
        for i in 0..m - 1 {
            let (xm, vm) = self.hermite_at(i, 0.5);
            let qm = h_speed(r, chart, &xm, &vm)?;
            let ds = self.params[i + 1] - self.params[i];
            sigma.push(sigma[i] + ds / 6.0 * (q[i] + 4.0 * qm + q[i + 1]));
        }
        let total = sigma[m - 1];
        if !(total > 0.0) {
            return Err(GeodesicError::DegenerateCurve);
        }
        let samples = samples.max(2);
        let mut params = Vec::with_capacity(samples);
        let mut points = Vec::with_capacity(samples);
        let mut velocities = Vec::with_capacity(samples);
        let mut seg = 0;
        for j in 0..samples {
            let target = total * j as f64 / (samples - 1) as f64;
            while seg < m - 2 && sigma[seg + 1] < target {
                seg += 1;
            }
            let ds = self.params[seg + 1] - self.params[seg];
            // σ(t) on the segment as a Hermite cubic in t, inverted by Newton
            let (s0, s1) = (sigma[seg], sigma[seg + 1]);
            let (d0, d1) = (q[seg] * ds, q[seg + 1] * ds);
            let span = s1 - s0;
            let mut t = if span > 0.0 { ((target - s0) / span).clamp(0.0, 1.0) } else { 0.0 };
            for _ in 0..30 {
                let b = hermite(t);
                let db = hermite_d(t);
                let val = b[0] * s0 + b[1] * d0 + b[2] * s1 + b[3] * d1 - target;
                let der = db[0] * s0 + db[1] * d0 + db[2] * s1 + db[3] * d1;
                if der <= 0.0 {
                    break;
                }
                let nt = (t - val / der).clamp(0.0, 1.0);
                let done = crate::math::abs(nt - t) < 1e-15;
                t = nt;
                if done {
                    break;
                }
            }
            let (x, v) = if j == 0 {
                (self.points[0].clone(), self.velocities[0].clone())
            } else if j == samples - 1 {
                (self.points[m - 1].clone(), self.velocities[m - 1].clone())
            } else {
                self.hermite_at(seg, t)
            };
            let speed = h_speed(r, chart, &x, &v)?;
            if !(speed > 0.0) {
                return Err(GeodesicError::ZeroVelocity);
            }
            params.push(target);
            points.push(x);
            velocities.push(v.iter().map(|c| c / speed).collect());
        }
        Curve::new(params, points, velocities)
    }
}
