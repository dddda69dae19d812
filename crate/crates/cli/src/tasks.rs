//! Task execution. Every task is a pure function of the prepared scenario and
//! returns its artifacts in memory; the runner writes them.

use std::fmt::Display;

use randers_core::causality::{
    chronological_set, completeness_diagnostics, DevelopmentField, TimeDirection, Verdict,
};
use randers_core::distance::{
    ball, busemann, distance_via_bvp, grid_distance, BusemannMethod, Direction, Source, Stencil,
};
use randers_core::geodesics::{
    connect, curve_length_in, geodesic_residual_in, integrate_geodesic_in, ConnectOptions, Curve, GeodesicState,
};
use randers_core::geometry::{randers_from_zermelo, validity_report, zermelo_from_randers, ValidityReport};
use randers_core::spacetime::{
    almost_isometry_check, fermat_metric, gauge_transform, lift_closed_geodesic_in, lift_null_geodesic_in,
    null_defect_scaled, proper_time_arrival, section_spacelike_check, StationaryData,
};
use randers_core::{GridDomain, RandersData, RandersForm};
use serde_json::{json, Map, Value};

use crate::config::{MetricSpec, RunConfig, TaskKind, TaskSpec};
use crate::output;

/// A file produced by a task, named relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaskOutput {
    pub files: Vec<Artifact>,
    pub summary: Map<String, Value>,
}

impl TaskOutput {
    fn file(&mut self, name: String, bytes: Vec<u8>) {
        self.files.push(Artifact { name, bytes });
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }
}

pub type TaskResult = Result<TaskOutput, String>;

fn msg<E: Display>(e: E) -> String {
    e.to_string()
}

/// Rejection of the metric at the sample lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidMetric {
    pub pointer: String,
    pub message: String,
    pub worst_point: Option<Vec<f64>>,
    pub max_omega_norm: f64,
}

/// The config with its metric resolved into the Randers metric every task
/// works with and the stationary spacetime whose Fermat metric it is.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: RunConfig,
    pub randers: RandersData,
    pub spacetime: StationaryData,
    pub samples: Vec<Vec<f64>>,
    pub validity: ValidityReport,
}

/// Lattice of `k` points per axis spanning the domain; periodic axes omit
/// the endpoint that duplicates the start.
pub fn sample_lattice(dom: &GridDomain, k: usize) -> Vec<Vec<f64>> {
    let per_axis: Vec<Vec<f64>> = dom
        .axes()
        .iter()
        .map(|a| {
            let m = if a.periodic { k } else { k - 1 };
            (0..k).map(|j| a.min + (a.max - a.min) * j as f64 / m as f64).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for coords in &per_axis {
        out = out.iter().flat_map(|p| coords.iter().map(move |c| [p.as_slice(), &[*c]].concat())).collect();
    }
    out
}

impl Scenario {
    pub fn prepare(config: RunConfig) -> Result<Scenario, InvalidMetric> {
        let samples = sample_lattice(&config.domain, config.validation.nodes_per_axis);
        let pointer = format!("/{}", config.metric.key());
        let reject = |message: String, worst_point: Option<Vec<f64>>| InvalidMetric {
            pointer: pointer.clone(),
            message,
            worst_point,
            max_omega_norm: f64::NAN,
        };
        let (randers, spacetime) = match &config.metric {
            MetricSpec::Randers(r) => (r.clone(), StationaryData::from_randers(r)),
            MetricSpec::Stationary(sd) => {
                sd.check_positivity(&samples).map_err(|e| reject(msg(&e), nonpositive_point(&e)))?;
                (fermat_metric(sd, &samples).map_err(|e| reject(msg(&e), None))?, sd.clone())
            }
            MetricSpec::Zermelo(z) => {
                let r = randers_from_zermelo(z, &samples).map_err(|e| {
                    let p = match &e {
                        randers_core::geometry::GeometryError::NonPositiveLambda { point, .. } => Some(point.clone()),
                        _ => None,
                    };
                    reject(msg(&e), p)
                })?;
                let sd = StationaryData::from_randers(&r);
                (r, sd)
            }
        };
        let validity = validity_report(&randers, &samples, config.validation.directions, config.seed);
        let max_omega_norm = validity.points.iter().map(|p| p.omega_norm).fold(0.0, f64::max);
        if !validity.pass {
            let worst = validity
                .points
                .iter()
                .filter(|p| !p.pass)
                .max_by(|a, b| a.randers_norm.total_cmp(&b.randers_norm))
                .expect("a failing report has a failing point");
            return Err(InvalidMetric {
                pointer,
                message: format!(
                    "not a valid Randers metric: one-form norm {} >= 1 at {:?}",
                    worst.randers_norm, worst.point
                ),
                worst_point: Some(worst.point.clone()),
                max_omega_norm,
            });
        }
        Ok(Scenario { config, randers, spacetime, samples, validity })
    }

    pub fn max_omega_norm(&self) -> f64 {
        self.validity.points.iter().map(|p| p.omega_norm).fold(0.0, f64::max)
    }

    fn dom(&self) -> &GridDomain {
        &self.config.domain
    }

    fn connect_options(&self, multistart: bool, step: Option<f64>) -> ConnectOptions {
        let base = if multistart { ConnectOptions::default() } else { ConnectOptions::direct() };
        ConnectOptions {
            domain: Some(self.dom().clone()),
            tol: self.config.tolerances.endpoint,
            step,
            seed: self.config.seed,
            ..base
        }
    }

    pub fn run_task(&self, task: &TaskSpec) -> TaskResult {
        let id = task.id.as_str();
        let r = &self.randers;
        let dom = self.dom();
        let mut out = TaskOutput::default();
        match &task.kind {
            TaskKind::Geodesic { start, velocity, length, step } => {
                let s0 = GeodesicState::new(start.clone(), velocity.clone());
                let c = integrate_geodesic_in(r, Some(dom), &s0, *length, *step).map_err(msg)?;
                out.put("length", curve_length_in(r, Some(dom), &c).map_err(msg)?);
                out.put("residual", geodesic_residual_in(r, Some(dom), &c).map_err(msg)?);
                out.put("end", c.end().to_vec());
                out.file(format!("{id}.csv"), output::curve_csv(&c));
            }
            TaskKind::Connect { from, to, multistart, step } => {
                let res = connect(r, from, to, &self.connect_options(*multistart, *step)).map_err(msg)?;
                let mut sols: Vec<_> = res.solutions.iter().collect();
                if sols.is_empty() {
                    return Err(format!("no connecting geodesic found after {} seeds", res.seeds_tried));
                }
                sols.sort_by(|a, b| a.length.total_cmp(&b.length));
                out.put("length", sols[0].length);
                out.put("endpoint_error", sols[0].endpoint_error);
                out.put("direction", sols[0].direction.clone());
                out.put("solutions", sols.len());
                out.put("lengths", sols.iter().map(|s| s.length).collect::<Vec<_>>());
                for (k, s) in sols.iter().enumerate() {
                    let name = if k == 0 { format!("{id}.csv") } else { format!("{id}.solution{k}.csv") };
                    out.file(name, output::curve_csv(&s.curve));
                }
            }
            TaskKind::Distance { source, direction, targets, bvp } => {
                let field = grid_distance(r, dom, &Source::Point(source.clone()), *direction).map_err(msg)?;
                let unreachable = field.values.iter().filter(|v| !v.is_finite()).count();
                let max = field.values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
                out.put("max_distance", max);
                out.put("unreachable_nodes", unreachable);
                if !targets.is_empty() {
                    let grid: Vec<Option<f64>> = targets.iter().map(|t| field.value_near(t)).collect();
                    out.put("targets_grid", grid);
                }
                if *bvp {
                    let opts = self.connect_options(false, None);
                    let mut values = Vec::new();
                    for t in targets {
                        let (p, q) = match direction {
                            Direction::Forward => (source.as_slice(), t.as_slice()),
                            Direction::Backward => (t.as_slice(), source.as_slice()),
                        };
                        let d = distance_via_bvp(r, p, q, &opts, Some(&field)).map_err(msg)?;
                        values.push(json!({"value": d.value, "converged": d.converged}));
                    }
                    out.put("targets_bvp", values);
                }
                out.file(format!("{id}.csv"), output::grid_csv(dom, "value", |i| Some(field.values[i])));
                let meta = json!({
                    "domain": output::domain_json(dom),
                    "direction": direction_name(*direction),
                    "source": source,
                    "stencil_radius": Stencil::default_for(dom.dim()).radius(),
                });
                out.file(format!("{id}.json"), output::json_bytes(&meta));
            }
            TaskKind::Ball { center, radius, direction } => {
                let b = ball(r, dom, center, *radius, *direction).map_err(msg)?;
                out.put("nodes", b.node_count());
                out.put("area", b.area());
                out.file(format!("{id}.csv"), output::mask_csv(dom, &b.mask));
            }
            TaskKind::Lightcone { apex, t0, times, direction } => {
                let region = chronological_set(r, dom, apex, *t0, times, *direction).map_err(msg)?;
                let mut slices = Vec::new();
                for (k, s) in region.slices.iter().enumerate() {
                    let name = format!("{id}.slice{k}.csv");
                    slices.push(json!({"t": s.t, "nodes": s.node_count(), "file": name}));
                    out.file(name, output::slice_csv(dom, s));
                }
                out.put("direction", time_direction_name(*direction));
                out.put("slices", slices);
            }
            TaskKind::Development { base, t0, times, direction } => {
                let field = DevelopmentField::new(r, dom, &base_mask(dom, base)?, *t0, *direction).map_err(msg)?;
                let region = field.development(times).map_err(msg)?;
                let mut slices = Vec::new();
                for (k, s) in region.slices.iter().enumerate() {
                    let name = format!("{id}.slice{k}.csv");
                    slices.push(json!({"t": s.t, "nodes": s.node_count(), "file": name}));
                    out.file(name, output::slice_csv(dom, s));
                }
                out.put("base_nodes", field.base.iter().filter(|a| **a).count());
                out.put("slices", slices);
            }
            TaskKind::Horizon { base, t0, direction } => {
                let field = DevelopmentField::new(r, dom, &base_mask(dom, base)?, *t0, *direction).map_err(msg)?;
                let h = field.horizon();
                if let Some(a) = h.apex() {
                    out.put("apex", dom.node_point(a));
                    out.put("apex_time", h.time(a));
                }
                out.file(format!("{id}.csv"), output::grid_csv(dom, "t_horizon", |i| h.time(i)));
            }
            TaskKind::Gauge { f } => {
                let report = section_spacelike_check(r, f, &self.samples, self.config.validation.directions, self.config.seed)
                    .map_err(msg)?;
                out.put("min_margin", report.min_margin);
                let g = gauge_transform(r, f, &self.samples).map_err(msg)?;
                out.file(format!("{id}.json"), output::json_bytes(&randers_json(&g)));
            }
            TaskKind::ZermeloConvert => match &self.config.metric {
                MetricSpec::Zermelo(_) => {
                    out.put("direction", "zermelo-to-randers");
                    out.file(format!("{id}.json"), output::json_bytes(&randers_json(r)));
                }
                _ => {
                    let z = zermelo_from_randers(r, &self.samples).map_err(msg)?;
                    let mut worst: f64 = 0.0;
                    for x in &self.samples {
                        worst = worst.max((1.0 - z.lambda(x).map_err(msg)?).max(0.0).sqrt());
                    }
                    out.put("direction", "randers-to-zermelo");
                    out.put("max_wind_norm", worst);
                    let mut m = Map::new();
                    output::tensor_json(&mut m, "g", &z.g);
                    for (i, w) in z.wind.iter().enumerate() {
                        m.insert(format!("W[{i}]"), Value::String(output::expr_string(w)));
                    }
                    out.file(format!("{id}.json"), output::json_bytes(&json!({ "zermelo": m })));
                }
            },
            TaskKind::Lift { start, velocity, length, t0, step, closed } => {
                let s0 = GeodesicState::new(start.clone(), velocity.clone());
                let c = integrate_geodesic_in(r, Some(dom), &s0, *length, *step).map_err(msg)?;
                out.put("base_length", curve_length_in(r, Some(dom), &c).map_err(msg)?);
                let lift = if *closed {
                    let cl = lift_closed_geodesic_in(r, Some(dom), &c, *t0).map_err(msg)?;
                    out.put("period", cl.period);
                    cl.lift
                } else {
                    lift_null_geodesic_in(r, Some(dom), &c, *t0).map_err(msg)?
                };
                out.put("arrival", lift.arrival());
                out.put("null_defect_scaled", null_defect_scaled(&self.spacetime, &lift).map_err(msg)?);
                out.file(format!("{id}.csv"), output::lift_csv(&lift.base, &lift.t));
            }
            TaskKind::ProperTime { from, to, proper_time } => {
                let opts = ConnectOptions { tol: self.config.tolerances.endpoint, ..ConnectOptions::direct() };
                let g = proper_time_arrival(&self.spacetime, from, to, *proper_time, &opts).map_err(msg)?;
                out.put("arrival", g.arrival);
                out.file(format!("{id}.csv"), output::curve_csv(&g.curve));
            }
            TaskKind::Diagnostics(opts) => {
                let rep = completeness_diagnostics(&self.spacetime, dom, opts).map_err(msg)?;
                let checks: Vec<Value> = rep
                    .checks
                    .iter()
                    .map(|c| {
                        let evidence: Map<String, Value> =
                            c.evidence.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                        json!({
                            "name": c.name,
                            "verdict": verdict_name(c.verdict),
                            "flagged": c.flagged,
                            "evidence": evidence,
                        })
                    })
                    .collect();
                out.put("verdict", verdict_name(rep.verdict()));
                for c in &rep.checks {
                    out.put(c.name, verdict_name(c.verdict));
                }
                out.file(
                    format!("{id}.json"),
                    output::json_bytes(&json!({"verdict": verdict_name(rep.verdict()), "checks": checks})),
                );
            }
            TaskKind::Busemann { point, direction, s_max, shooting } => {
                let ray = straight_ray(point, direction, *s_max)?;
                let method = if *shooting {
                    BusemannMethod::Shooting(ConnectOptions { tol: self.config.tolerances.endpoint, ..ConnectOptions::direct() })
                } else {
                    BusemannMethod::Grid
                };
                let b = busemann(r, dom, &ray, *s_max, &method).map_err(msg)?;
                out.put("non_monotone_nodes", b.non_monotone_nodes);
                out.put("max_decrease", b.max_decrease);
                out.file(format!("{id}.csv"), output::grid_csv(dom, "value", |i| Some(b.values[i])));
            }
            TaskKind::AlmostIsometry { map, potential } => {
                let rep = almost_isometry_check(
                    r,
                    map,
                    potential,
                    &self.samples,
                    self.config.validation.directions,
                    self.config.seed,
                    self.config.tolerances.isometry,
                )
                .map_err(msg)?;
                out.put("max_residual", rep.max_residual);
                out.put("pass", rep.pass);
                if let Some(p) = rep.worst_point {
                    out.put("worst_point", p);
                }
            }
        }
        Ok(out)
    }
}

fn nonpositive_point(e: &randers_core::spacetime::SpacetimeError) -> Option<Vec<f64>> {
    match e {
        randers_core::spacetime::SpacetimeError::NonPositive { point, .. } => Some(point.clone()),
        _ => None,
    }
}

/// Nodes where `base >= 0`.
fn base_mask(dom: &GridDomain, base: &randers_core::ScalarField) -> Result<Vec<bool>, String> {
    (0..dom.node_count()).map(|i| base.eval(&dom.node_point(i)).map(|v| v >= 0.0).map_err(msg)).collect()
}

/// `c(s) = p + s·d` on `[0, s_max]`.
fn straight_ray(p: &[f64], d: &[f64], s_max: f64) -> Result<Curve, String> {
    let m = ((s_max * 8.0).ceil() as usize).clamp(64, 100_000);
    let params: Vec<f64> = (0..=m).map(|k| s_max * k as f64 / m as f64).collect();
    let points = params.iter().map(|s| p.iter().zip(d).map(|(a, b)| a + s * b).collect()).collect();
    Curve::new(params, points, vec![d.to_vec(); m + 1]).map_err(msg)
}

/// A Randers metric in the config's own `"randers"` layout.
pub fn randers_json(r: &RandersData) -> Value {
    let mut m = Map::new();
    m.insert(
        "form".into(),
        Value::String(match r.form {
            RandersForm::Classical => "classical".into(),
            RandersForm::Fermat => "fermat".into(),
        }),
    );
    output::tensor_json(&mut m, "g0", &r.g0);
    output::covector_json(&mut m, "omega", &r.omega);
    json!({ "randers": m })
}

pub fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Forward => "forward",
        Direction::Backward => "backward",
    }
}

pub fn time_direction_name(d: TimeDirection) -> &'static str {
    match d {
        TimeDirection::Future => "future",
        TimeDirection::Past => "past",
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Indeterminate => "indeterminate",
    }
}
