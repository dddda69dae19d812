//! Two-point boundary value problem by shooting.
//!
//! Unknown: the initial velocity `w` at `p`; the geodesic runs over `s ∈ [0, 1]`
//! and must end at (an image of) `q`. Seeds come from the straight chord, from
//! periodic images of `q`, and from a scan of rays over the unit sphere of
//! directions; each seed is refined by damped Newton with a finite-difference
//! Jacobian.

use alloc::vec::Vec;

use super::{default_step, rk4_step, Chart, Curve, GeodesicError};
use crate::domain::GridDomain;
use crate::geometry::RandersData;
use crate::linalg::{self, Matrix, Vector, MAX_DIM};
use crate::{math, sampling};

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectOptions {
    /// Periodic axes are identified; bounded axes must not be left.
    pub domain: Option<GridDomain>,
    /// Endpoint tolerance in coordinates.
    pub tol: f64,
    /// RK4 step in F-length units; defaults to [`default_step`].
    pub step: Option<f64>,
    /// Rays in the direction scan; 0 disables the scan.
    pub directions: usize,
    /// F-length of the scanned rays; defaults to three times the chord's.
    pub scan_length: Option<f64>,
    /// Periodic images `q + k·period` with `|k| <= windings` are tried.
    pub windings: i32,
    pub max_newton: usize,
    pub max_seeds: usize,
    pub seed: u64,
}

impl Default for ConnectOptions {
    fn default() -> Self {
        ConnectOptions {
            domain: None,
            tol: 1e-6,
            step: None,
            directions: 64,
            scan_length: None,
            windings: 1,
            max_newton: 40,
            max_seeds: 24,
            seed: 0,
        }
    }
}

impl ConnectOptions {
    /// Only the chord seed: one Newton solve, no multiplicity search.
    pub fn direct() -> Self {
        ConnectOptions { directions: 0, windings: 0, ..ConnectOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvpSolution {
    /// F-arclength parametrized geodesic from `p` to the target image of `q`.
    pub curve: Curve,
    pub length: f64,
    /// Initial unit direction (Euclidean normalization of `w`).
    pub direction: Vec<f64>,
    /// Initial velocity for the parameter interval `[0, 1]`.
    pub velocity: Vec<f64>,
    pub endpoint_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BvpResult {
    /// Sorted by length, shortest first. Empty when nothing converged.
    pub solutions: Vec<BvpSolution>,
    /// Endpoint errors, aligned with `solutions`.
    pub residuals: Vec<f64>,
    pub seeds_tried: usize,
}

impl BvpResult {
    pub fn shortest(&self) -> Option<&BvpSolution> {
        self.solutions.first()
    }
}

struct Shooter<'a> {
    r: &'a RandersData,
    chart: Chart<'a>,
    p: Vector,
    n: usize,
    step: f64,
}

impl Shooter<'_> {
    fn speed(&self, w: &[f64]) -> Option<f64> {
        let xw = self.chart.wrap(&self.p[..self.n]);
        self.r.local(&xw[..self.n]).ok().map(|l| l.value(w))
    }

    fn steps_for(&self, w: &[f64]) -> Option<usize> {
        let f = self.speed(w)?;
        if !(f > 0.0) || !f.is_finite() {
            return None;
        }
        Some((math::ceil(f / self.step) as usize).clamp(20, 400_000))
    }

    /// Endpoint of the geodesic with initial velocity `w` after `steps` steps
    /// over `[0, 1]`, or the whole trajectory when `keep` is set.
    fn shoot(&self, w: &[f64], steps: usize, keep: bool) -> Option<(Vector, Option<Curve>)> {
        let n = self.n;
        let h = 1.0 / steps as f64;
        let (mut x, mut v) = (self.p, [0.0; MAX_DIM]);
        v[..n].copy_from_slice(w);
        let mut trail = keep.then(|| (Vec::with_capacity(steps + 1), Vec::with_capacity(steps + 1), Vec::with_capacity(steps + 1)));
        if let Some((s, xs, vs)) = trail.as_mut() {
            s.push(0.0);
            xs.push(x[..n].to_vec());
            vs.push(v[..n].to_vec());
        }
        for k in 1..=steps {
            let (xn, vn) = rk4_step(self.r, self.chart, &x[..n], &v[..n], h).ok()?;
            if !self.chart.inside(&xn[..n]) || xn[..n].iter().any(|c| !c.is_finite()) {
                return None;
            }
            x = xn;
            v = vn;
            if let Some((s, xs, vs)) = trail.as_mut() {
                s.push(if k == steps { 1.0 } else { k as f64 * h });
                xs.push(x[..n].to_vec());
                vs.push(v[..n].to_vec());
            }
        }
        let curve = trail.map(|(params, points, velocities)| Curve { params, points, velocities });
        Some((x, curve))
    }

    fn residual(&self, w: &[f64], steps: usize, target: &[f64]) -> Option<Vector> {
        let (end, _) = self.shoot(w, steps, false)?;
        let mut r = [0.0; MAX_DIM];
        for k in 0..self.n {
            r[k] = end[k] - target[k];
        }
        Some(r)
    }

    /// Damped Newton for `exp_p(w) = target`.
    fn solve(&self, w0: &[f64], target: &[f64], tol: f64, max_iter: usize) -> Option<(Vector, usize, f64)> {
        let n = self.n;
        let mut w = [0.0; MAX_DIM];
        w[..n].copy_from_slice(w0);
        let goal = (tol * 1e-3).max(1e-14);
        let inf = |r: &Vector| r[..n].iter().fold(0.0f64, |m, c| m.max(math::abs(*c)));
        for _ in 0..max_iter {
            let steps = self.steps_for(&w[..n])?;
            let r = self.residual(&w[..n], steps, target)?;
            let err = inf(&r);
            if err <= goal {
                return Some((w, steps, err));
            }
            let wn = linalg::norm(&w[..n]).max(1.0);
            let delta = 1e-7 * wn;
            let mut jac = Matrix::zeros(n);
            for j in 0..n {
                let mut wp = w;
                wp[j] += delta;
                let rp = self.residual(&wp[..n], steps, target)?;
                for i in 0..n {
                    jac.set(i, j, (rp[i] - r[i]) / delta);
                }
            }
            let mut neg = [0.0; MAX_DIM];
            for i in 0..n {
                neg[i] = -r[i];
            }
            let dw = linalg::solve_linear(&jac, &neg[..n])?;
            // Cap the step so one Newton update cannot jump across the domain.
            let cap = 2.0 * wn / linalg::norm(&dw[..n]).max(1e-300);
            let mut lambda = cap.min(1.0);
            let mut accepted = false;
            for _ in 0..16 {
                let mut wt = w;
                for i in 0..n {
                    wt[i] += lambda * dw[i];
                }
                if let Some(rt) = self.residual(&wt[..n], steps, target) {
                    if inf(&rt) < err {
                        w = wt;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                return (err <= tol).then_some((w, steps, err));
            }
        }
        let steps = self.steps_for(&w[..n])?;
        let err = inf(&self.residual(&w[..n], steps, target)?);
        (err <= tol).then_some((w, steps, err))
    }
}

struct Seed {
    w: Vector,
    target: Vector,
    score: f64,
}

/// Geodesics from `p` to `q`, with multiplicity search.
///
/// Solutions are deduplicated by (initial unit direction within `1e-3`,
/// length within `1e-6` relative) and sorted by length.
pub fn connect(r: &RandersData, p: &[f64], q: &[f64], opts: &ConnectOptions) -> Result<BvpResult, GeodesicError> {
    let n = r.dim();
    if p.len() != n || q.len() != n {
        return Err(crate::geometry::GeometryError::DimensionMismatch { expected: n, found: p.len().max(q.len()) }.into());
    }
    let dom = opts.domain.as_ref();
    let chart = Chart { dom };
    if !chart.inside(p) {
        return Err(GeodesicError::DomainExit { point: p.to_vec(), param: 0.0 });
    }
    if !chart.inside(q) {
        return Err(GeodesicError::DomainExit { point: q.to_vec(), param: 1.0 });
    }
    let mut pv = [0.0; MAX_DIM];
    pv[..n].copy_from_slice(p);
    // validity at p is required for any shot
    let pw = chart.wrap(p);
    let local_p = r.local(&pw[..n])?;

    let mut chord = [0.0; MAX_DIM];
    match dom {
        Some(d) => d.difference(p, q, &mut chord[..n]),
        None => {
            for k in 0..n {
                chord[k] = q[k] - p[k];
            }
        }
    }
    let chord_len = local_p.value(&chord[..n]);
    let mut seeds: Vec<Seed> = Vec::new();
    let push_target = |seeds: &mut Vec<Seed>, offset: &[f64]| {
        let mut target = [0.0; MAX_DIM];
        let mut w = [0.0; MAX_DIM];
        for k in 0..n {
            w[k] = chord[k] + offset[k];
            target[k] = p[k] + w[k];
        }
        seeds.push(Seed { w, target, score: 0.0 });
    };
    if linalg::norm(&chord[..n]) == 0.0 {
        let curve = Curve {
            params: alloc::vec![0.0, 1.0],
            points: alloc::vec![p.to_vec(), p.to_vec()],
            velocities: alloc::vec![alloc::vec![0.0; n]; 2],
        };
        let sol = BvpSolution { curve, length: 0.0, direction: alloc::vec![0.0; n], velocity: alloc::vec![0.0; n], endpoint_error: 0.0 };
        return Ok(BvpResult { solutions: alloc::vec![sol], residuals: alloc::vec![0.0], seeds_tried: 0 });
    }
    push_target(&mut seeds, &[0.0; MAX_DIM][..n]);

    // periodic images
    if let Some(d) = dom {
        let periodic: Vec<usize> = (0..n).filter(|&k| d.axis(k).periodic).collect();
        let span = (2 * opts.windings + 1) as usize;
        let total = span.pow(periodic.len() as u32);
        for combo in 0..total {
            let mut c = combo;
            let mut offset = [0.0; MAX_DIM];
            let mut nonzero = false;
            for &k in &periodic {
                let shift = (c % span) as i32 - opts.windings;
                c /= span;
                offset[k] = f64::from(shift) * d.axis(k).period();
                nonzero |= shift != 0;
            }
            if nonzero {
                push_target(&mut seeds, &offset[..n]);
            }
        }
    }

    let length_hint = opts.scan_length.unwrap_or(3.0 * chord_len);
    let step = opts.step.unwrap_or_else(|| default_step(length_hint.max(chord_len)));
    let shooter = Shooter { r, chart, p: pv, n, step };

    // ray scan
    if opts.directions > 0 && n >= 2 && length_hint > 0.0 {
        let spacing = sampling::angular_spacing(n, opts.directions);
        let mut found: Vec<Seed> = Vec::new();
        for dir in sampling::direction_set(n, opts.directions, opts.seed) {
            let f = local_p.value(&dir[..n]);
            if !(f > 0.0) {
                continue;
            }
            let mut v = [0.0; MAX_DIM];
            for k in 0..n {
                v[k] = dir[k] / f;
            }
            let steps = (math::ceil(length_hint / step) as usize).max(20);
            let h = length_hint / steps as f64;
            let (mut x, mut vel) = (pv, v);
            let mut gap = [0.0; MAX_DIM];
            let dist_to_q = |x: &[f64], gap: &mut [f64]| {
                match dom {
                    Some(d) => d.difference(x, q, gap),
                    None => {
                        for k in 0..n {
                            gap[k] = q[k] - x[k];
                        }
                    }
                }
                linalg::norm(gap)
            };
            let mut prev2 = f64::INFINITY;
            let mut prev1 = dist_to_q(&x[..n], &mut gap[..n]);
            let mut prev_state = (x, gap);
            for k in 1..=steps {
                let Ok((xn, vn)) = rk4_step(r, chart, &x[..n], &vel[..n], h) else { break };
                if !chart.inside(&xn[..n]) {
                    break;
                }
                x = xn;
                vel = vn;
                let mut g = [0.0; MAX_DIM];
                let d = dist_to_q(&x[..n], &mut g[..n]);
                // local minimum at the previous sample
                if prev1 <= prev2 && prev1 <= d && k >= 2 {
                    let s = (k - 1) as f64 * h;
                    if prev1 < 1.5 * s * spacing + 1e-12 {
                        let (xm, gm) = prev_state;
                        let mut w = [0.0; MAX_DIM];
                        let mut target = [0.0; MAX_DIM];
                        for c in 0..n {
                            w[c] = v[c] * s;
                            target[c] = xm[c] + gm[c];
                        }
                        found.push(Seed { w, target, score: prev1 / s });
                    }
                }
                prev2 = prev1;
                prev1 = d;
                prev_state = (x, g);
            }
        }
        found.sort_by(|a, b| a.score.total_cmp(&b.score));
        found.truncate(opts.max_seeds);
        seeds.extend(found);
    }

    let mut out: Vec<BvpSolution> = Vec::new();
    for seed in &seeds {
        let Some((w, steps, err)) = shooter.solve(&seed.w[..n], &seed.target[..n], opts.tol, opts.max_newton) else {
            continue;
        };
        let Some((_, Some(traj))) = shooter.shoot(&w[..n], steps, true) else { continue };
        let length = local_p.value(&w[..n]);
        if !(length > 0.0) {
            continue;
        }
        let wn = linalg::norm(&w[..n]);
        let direction: Vec<f64> = w[..n].iter().map(|c| c / wn).collect();
        let duplicate = out.iter().any(|o| {
            let ddir = o.direction.iter().zip(&direction).fold(0.0f64, |m, (a, b)| m.max(math::abs(a - b)));
            ddir < 1e-3 && math::abs(o.length - length) <= 1e-6 * o.length.max(length)
        });
        if duplicate {
            continue;
        }
        let curve = Curve {
            params: traj.params.iter().map(|s| s * length).collect(),
            points: traj.points,
            velocities: traj.velocities.iter().map(|v| v.iter().map(|c| c / length).collect()).collect(),
        };
        out.push(BvpSolution { curve, length, direction, velocity: w[..n].to_vec(), endpoint_error: err });
    }
    out.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then_with(|| a.direction.iter().zip(&b.direction).fold(core::cmp::Ordering::Equal, |o, (x, y)| o.then(x.total_cmp(y))))
    });
    let residuals = out.iter().map(|s| s.endpoint_error).collect();
    Ok(BvpResult { solutions: out, residuals, seeds_tried: seeds.len() })
}
