//! JSON scenario configs.
//!
//! The document is walked as a [`serde_json::Value`] so every schema error can
//! carry the JSON pointer of the offending key. Unknown keys are rejected.

use std::collections::{BTreeMap, BTreeSet};

use randers_core::causality::{DiagnosticsOptions, TimeDirection};
use randers_core::distance::Direction;
use randers_core::linalg::MAX_DIM;
use randers_core::spacetime::StationaryData;
use randers_core::{parse_field, Axis, GridDomain, OneFormField, RandersData, RandersForm, RiemannianMetricField};
use randers_core::{ScalarField, ZermeloData};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message} (at `{pointer}`)")]
pub struct SchemaError {
    /// JSON pointer (RFC 6901) of the offending or missing key.
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError { pointer: pointer.into(), message: message.into() }
    }
}

type Result<T> = std::result::Result<T, SchemaError>;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    Randers(RandersData),
    Stationary(StationaryData),
    Zermelo(ZermeloData),
}

impl MetricSpec {
    pub fn key(&self) -> &'static str {
        match self {
            MetricSpec::Randers(_) => "randers",
            MetricSpec::Stationary(_) => "stationary",
            MetricSpec::Zermelo(_) => "zermelo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Endpoint tolerance of every shooting solve.
    pub endpoint: f64,
    /// Residual bound of the almost-isometry check.
    pub isometry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { endpoint: 1e-8, isometry: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Validation {
    /// Sample lattice resolution per axis.
    pub nodes_per_axis: usize,
    /// Random unit directions probed per sample.
    pub directions: usize,
}

impl Default for Validation {
    fn default() -> Self {
        Validation { nodes_per_axis: 11, directions: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub dimension: usize,
    pub domain: GridDomain,
    pub metric: MetricSpec,
    pub tasks: Vec<TaskSpec>,
    pub output_dir: Option<String>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub validation: Validation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub id: String,
    pub kind: TaskKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskKind {
    Geodesic { start: Vec<f64>, velocity: Vec<f64>, length: f64, step: Option<f64> },
    Connect { from: Vec<f64>, to: Vec<f64>, multistart: bool, step: Option<f64> },
    Distance { source: Vec<f64>, direction: Direction, targets: Vec<Vec<f64>>, bvp: bool },
    Ball { center: Vec<f64>, radius: f64, direction: Direction },
    Lightcone { apex: Vec<f64>, t0: f64, times: Vec<f64>, direction: TimeDirection },
    Development { base: ScalarField, t0: f64, times: Vec<f64>, direction: TimeDirection },
    Horizon { base: ScalarField, t0: f64, direction: TimeDirection },
    Gauge { f: ScalarField },
    ZermeloConvert,
    Lift { start: Vec<f64>, velocity: Vec<f64>, length: f64, t0: f64, step: Option<f64>, closed: bool },
    ProperTime { from: Vec<f64>, to: Vec<f64>, proper_time: f64 },
    Diagnostics(DiagnosticsOptions),
    Busemann { point: Vec<f64>, direction: Vec<f64>, s_max: f64, shooting: bool },
    AlmostIsometry { map: Vec<ScalarField>, potential: ScalarField },
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Geodesic { .. } => "geodesic",
            TaskKind::Connect { .. } => "connect",
            TaskKind::Distance { .. } => "distance",
            TaskKind::Ball { .. } => "ball",
            TaskKind::Lightcone { .. } => "lightcone",
            TaskKind::Development { .. } => "development",
            TaskKind::Horizon { .. } => "horizon",
            TaskKind::Gauge { .. } => "gauge",
            TaskKind::ZermeloConvert => "zermelo-convert",
            TaskKind::Lift { .. } => "lift",
            TaskKind::ProperTime { .. } => "proper-time",
            TaskKind::Diagnostics(_) => "diagnostics",
            TaskKind::Busemann { .. } => "busemann",
            TaskKind::AlmostIsometry { .. } => "almost-isometry",
        }
    }
}

pub const TASK_TYPES: [&str; 14] = [
    "geodesic",
    "connect",
    "distance",
    "ball",
    "lightcone",
    "development",
    "horizon",
    "gauge",
    "zermelo-convert",
    "lift",
    "proper-time",
    "diagnostics",
    "busemann",
    "almost-isometry",
];

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn as_f64(v: &Value, ptr: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| SchemaError::new(ptr, format!("expected a finite number, found {}", type_name(v))))
}

fn as_u64(v: &Value, ptr: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| SchemaError::new(ptr, format!("expected a non-negative integer, found {}", type_name(v))))
}

fn as_str<'a>(v: &'a Value, ptr: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| SchemaError::new(ptr, format!("expected a string, found {}", type_name(v))))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| SchemaError::new(ptr, format!("expected an array, found {}", type_name(v))))
}

fn as_point(v: &Value, ptr: &str, n: usize) -> Result<Vec<f64>> {
    let a = as_array(v, ptr)?;
    if a.len() != n {
        return Err(SchemaError::new(ptr, format!("expected {n} coordinates, found {}", a.len())));
    }
    a.iter().enumerate().map(|(k, x)| as_f64(x, &format!("{ptr}/{k}"))).collect()
}

fn as_expr(v: &Value, ptr: &str, dim: usize) -> Result<ScalarField> {
    let src = as_str(v, ptr)?;
    parse_field(src, dim).map_err(|e| SchemaError::new(ptr, format!("expression parse error in `{src}`: {e}")))
}

/// An object being read: tracks visited keys so leftovers can be rejected.
struct Obj<'a> {
    map: &'a Map<String, Value>,
    ptr: String,
    seen: BTreeSet<&'a str>,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, ptr: String) -> Result<Self> {
        let map = v
            .as_object()
            .ok_or_else(|| SchemaError::new(ptr.clone(), format!("expected an object, found {}", type_name(v))))?;
        Ok(Obj { map, ptr, seen: BTreeSet::new() })
    }

    fn at(&self, key: &str) -> String {
        format!("{}/{}", self.ptr, escape(key))
    }

    fn get(&mut self, key: &str) -> Option<&'a Value> {
        let (k, v) = self.map.get_key_value(key)?;
        self.seen.insert(k.as_str());
        Some(v)
    }

    fn req(&mut self, key: &str) -> Result<&'a Value> {
        self.get(key).ok_or_else(|| SchemaError::new(self.at(key), format!("missing required key \"{key}\"")))
    }

    fn f64(&mut self, key: &str) -> Result<f64> {
        let v = self.req(key)?;
        as_f64(v, &self.at(key))
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| as_f64(v, &self.at(key))).transpose()
    }

    fn positive(&mut self, key: &str) -> Result<f64> {
        let x = self.f64(key)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(SchemaError::new(self.at(key), "must be positive"))
        }
    }

    fn opt_positive(&mut self, key: &str) -> Result<Option<f64>> {
        match self.opt_f64(key)? {
            Some(x) if !(x > 0.0) => Err(SchemaError::new(self.at(key), "must be positive")),
            x => Ok(x),
        }
    }

    fn opt_bool(&mut self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| {
                v.as_bool().ok_or_else(|| {
                    SchemaError::new(self.at(key), format!("expected a boolean, found {}", type_name(v)))
                })
            })
            .transpose()
    }

    fn opt_u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.get(key).map(|v| as_u64(v, &self.at(key))).transpose()
    }

    fn opt_str(&mut self, key: &str) -> Result<Option<&'a str>> {
        self.get(key).map(|v| as_str(v, &self.at(key))).transpose()
    }

    fn point(&mut self, key: &str, n: usize) -> Result<Vec<f64>> {
        let v = self.req(key)?;
        as_point(v, &self.at(key), n)
    }

    fn expr(&mut self, key: &str, dim: usize) -> Result<ScalarField> {
        let v = self.req(key)?;
        as_expr(v, &self.at(key), dim)
    }

    fn opt_expr(&mut self, key: &str, dim: usize) -> Result<Option<ScalarField>> {
        self.get(key).map(|v| as_expr(v, &self.at(key), dim)).transpose()
    }

    fn times(&mut self, key: &str) -> Result<Vec<f64>> {
        let ptr = self.at(key);
        let a = as_array(self.req(key)?, &ptr)?;
        let t: Vec<f64> = a.iter().enumerate().map(|(k, x)| as_f64(x, &format!("{ptr}/{k}"))).collect::<Result<_>>()?;
        if t.is_empty() {
            return Err(SchemaError::new(ptr, "needs at least one time value"));
        }
        if t.windows(2).any(|w| w[0] > w[1]) {
            return Err(SchemaError::new(ptr, "time values must be sorted ascending"));
        }
        Ok(t)
    }

    fn choice(&mut self, key: &str, options: &[&str], default: &'static str) -> Result<&'a str> {
        match self.opt_str(key)? {
            None => Ok(default),
            Some(s) if options.contains(&s) => Ok(s),
            Some(s) => Err(SchemaError::new(self.at(key), format!("unknown value \"{s}\", expected one of {options:?}"))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().find(|k| !self.seen.contains(k.as_str())) {
            Some(k) => Err(SchemaError::new(self.at(k), format!("unknown key \"{k}\""))),
            None => Ok(()),
        }
    }
}

/// `"name[i]"` or `"name[i][j]"` to its indices.
fn indices(key: &str, name: &str) -> Option<Vec<usize>> {
    let mut rest = key.strip_prefix(name)?;
    let mut out = Vec::new();
    while !rest.is_empty() {
        let body = rest.strip_prefix('[')?;
        let close = body.find(']')?;
        out.push(body[..close].parse().ok()?);
        rest = &body[close + 1..];
    }
    (!out.is_empty()).then_some(out)
}

/// Component sources keyed `name[i][j]` (symmetric, off-diagonal default `0`).
fn tensor(o: &mut Obj, name: &str, n: usize) -> Result<RiemannianMetricField> {
    let mut given: BTreeMap<(usize, usize), (&str, &Value)> = BTreeMap::new();
    for (key, v) in o.map {
        if !key.starts_with(&format!("{name}[")) {
            continue;
        }
        o.seen.insert(key.as_str());
        let idx = indices(key, name)
            .filter(|ix| ix.len() == 2)
            .ok_or_else(|| SchemaError::new(o.at(key), format!("malformed component key, expected \"{name}[i][j]\"")))?;
        let (i, j) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
        if j >= n {
            return Err(SchemaError::new(o.at(key), format!("index out of range for dimension {n}")));
        }
        if let Some((other, w)) = given.get(&(i, j)) {
            if *w != v {
                return Err(SchemaError::new(o.at(key), format!("conflicts with \"{other}\"")));
            }
        }
        given.insert((i, j), (key.as_str(), v));
    }
    if given.is_empty() {
        return Err(SchemaError::new(
            o.at(name),
            format!("missing required key \"{name}\" (components \"{name}[i][j]\")"),
        ));
    }
    let mut comps = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            comps.push(match given.get(&(i, j)) {
                Some((key, v)) => as_expr(v, &o.at(key), n)?,
                None if i == j => {
                    let key = format!("{name}[{i}][{i}]");
                    return Err(SchemaError::new(o.at(&key), format!("missing required key \"{key}\"")));
                }
                None => ScalarField::constant(0.0, n),
            });
        }
    }
    RiemannianMetricField::new(n, comps).map_err(|e| SchemaError::new(o.at(name), e.to_string()))
}

/// Component sources keyed `name[i]`, missing ones `0`.
fn covector(o: &mut Obj, name: &str, n: usize) -> Result<Vec<ScalarField>> {
    let mut comps: Vec<ScalarField> = (0..n).map(|_| ScalarField::constant(0.0, n)).collect();
    for (key, v) in o.map {
        if !key.starts_with(&format!("{name}[")) {
            continue;
        }
        o.seen.insert(key.as_str());
        let idx = indices(key, name)
            .filter(|ix| ix.len() == 1)
            .ok_or_else(|| SchemaError::new(o.at(key), format!("malformed component key, expected \"{name}[i]\"")))?;
        if idx[0] >= n {
            return Err(SchemaError::new(o.at(key), format!("index out of range for dimension {n}")));
        }
        comps[idx[0]] = as_expr(v, &o.at(key), n)?;
    }
    Ok(comps)
}

fn one_form(o: &mut Obj, name: &str, n: usize) -> Result<OneFormField> {
    let comps = covector(o, name, n)?;
    OneFormField::new(n, comps).map_err(|e| SchemaError::new(o.at(name), e.to_string()))
}

fn metric(root: &mut Obj, n: usize) -> Result<MetricSpec> {
    let present: Vec<&str> =
        ["randers", "stationary", "zermelo"].into_iter().filter(|k| root.map.contains_key(*k)).collect();
    if present.len() != 1 {
        return Err(SchemaError::new(
            if present.is_empty() { String::new() } else { root.at(present[1]) },
            "exactly one metric spec is required: \"randers\", \"stationary\" or \"zermelo\"",
        ));
    }
    let key = present[0];
    let v = root.req(key)?;
    let mut o = Obj::new(v, root.at(key))?;
    let spec = match key {
        "randers" => {
            let form = match o.choice("form", &["classical", "fermat"], "classical")? {
                "fermat" => RandersForm::Fermat,
                _ => RandersForm::Classical,
            };
            let g0 = tensor(&mut o, "g0", n)?;
            let omega = one_form(&mut o, "omega", n)?;
            let r = RandersData::new(g0, omega, form).map_err(|e| SchemaError::new(o.ptr.clone(), e.to_string()))?;
            MetricSpec::Randers(r)
        }
        "stationary" => {
            let g0 = tensor(&mut o, "g0", n)?;
            let omega = one_form(&mut o, "omega", n)?;
            let beta = o.opt_expr("beta", n)?.unwrap_or_else(|| ScalarField::constant(1.0, n));
            let phi = o.opt_expr("phi", n + 1)?;
            let sd = StationaryData::new(g0, omega, beta, phi)
                .map_err(|e| SchemaError::new(o.ptr.clone(), e.to_string()))?;
            MetricSpec::Stationary(sd)
        }
        _ => {
            let g = tensor(&mut o, "g", n)?;
            let w = covector(&mut o, "W", n)?;
            let z = ZermeloData::new(g, w).map_err(|e| SchemaError::new(o.ptr.clone(), e.to_string()))?;
            MetricSpec::Zermelo(z)
        }
    };
    o.finish()?;
    Ok(spec)
}

fn axis(v: &Value, ptr: String) -> Result<Axis> {
    let mut o = Obj::new(v, ptr)?;
    let min = o.f64("min")?;
    let max = o.f64("max")?;
    let nodes = as_u64(o.req("nodes")?, &o.at("nodes"))? as usize;
    let periodic = o.opt_bool("periodic")?.unwrap_or(false);
    o.finish()?;
    Ok(Axis { min, max, nodes, periodic })
}

fn domain(v: &Value, ptr: String, n: usize) -> Result<GridDomain> {
    let axes = match v.get("axes") {
        Some(_) => {
            let mut o = Obj::new(v, ptr.clone())?;
            let aptr = o.at("axes");
            let list = as_array(o.req("axes")?, &aptr)?;
            o.finish()?;
            if list.len() != n {
                return Err(SchemaError::new(aptr, format!("expected {n} axes, found {}", list.len())));
            }
            list.iter().enumerate().map(|(k, a)| axis(a, format!("{aptr}/{k}"))).collect::<Result<Vec<_>>>()?
        }
        None => {
            let a = axis(v, ptr.clone())?;
            vec![a; n]
        }
    };
    GridDomain::new(axes).map_err(|e| SchemaError::new(ptr, e.to_string()))
}

fn direction(o: &mut Obj) -> Result<Direction> {
    Ok(match o.choice("direction", &["forward", "backward"], "forward")? {
        "backward" => Direction::Backward,
        _ => Direction::Forward,
    })
}

fn time_direction(o: &mut Obj) -> Result<TimeDirection> {
    Ok(match o.choice("direction", &["future", "past"], "future")? {
        "past" => TimeDirection::Past,
        _ => TimeDirection::Future,
    })
}

fn f64_list(o: &mut Obj, key: &str) -> Result<Option<Vec<f64>>> {
    let ptr = o.at(key);
    o.get(key)
        .map(|v| as_array(v, &ptr)?.iter().enumerate().map(|(k, x)| as_f64(x, &format!("{ptr}/{k}"))).collect())
        .transpose()
}

fn task(v: &Value, ptr: String, n: usize) -> Result<TaskSpec> {
    let mut o = Obj::new(v, ptr)?;
    let id = as_str(o.req("id")?, &o.at("id"))?.to_string();
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(SchemaError::new(o.at("id"), "task ids must be non-empty and use only [A-Za-z0-9_-]"));
    }
    if id == "manifest" {
        return Err(SchemaError::new(o.at("id"), "task id \"manifest\" is reserved"));
    }
    let ty = as_str(o.req("type")?, &o.at("type"))?;
    let kind = match ty {
        "geodesic" => TaskKind::Geodesic {
            start: o.point("start", n)?,
            velocity: o.point("velocity", n)?,
            length: o.positive("length")?,
            step: o.opt_positive("step")?,
        },
        "connect" => TaskKind::Connect {
            from: o.point("from", n)?,
            to: o.point("to", n)?,
            multistart: o.opt_bool("multistart")?.unwrap_or(false),
            step: o.opt_positive("step")?,
        },
        "distance" => {
            let source = o.point("source", n)?;
            let direction = direction(&mut o)?;
            let tptr = o.at("targets");
            let targets = match o.get("targets") {
                Some(t) => as_array(t, &tptr)?
                    .iter()
                    .enumerate()
                    .map(|(k, p)| as_point(p, &format!("{tptr}/{k}"), n))
                    .collect::<Result<_>>()?,
                None => Vec::new(),
            };
            let bvp = o.opt_bool("bvp")?.unwrap_or(false);
            TaskKind::Distance { source, direction, targets, bvp }
        }
        "ball" => TaskKind::Ball {
            center: o.point("center", n)?,
            radius: o.positive("radius")?,
            direction: direction(&mut o)?,
        },
        "lightcone" => TaskKind::Lightcone {
            apex: o.point("apex", n)?,
            t0: o.opt_f64("t0")?.unwrap_or(0.0),
            times: o.times("times")?,
            direction: time_direction(&mut o)?,
        },
        "development" => TaskKind::Development {
            base: o.expr("base", n)?,
            t0: o.opt_f64("t0")?.unwrap_or(0.0),
            times: o.times("times")?,
            direction: time_direction(&mut o)?,
        },
        "horizon" => TaskKind::Horizon {
            base: o.expr("base", n)?,
            t0: o.opt_f64("t0")?.unwrap_or(0.0),
            direction: time_direction(&mut o)?,
        },
        "gauge" => TaskKind::Gauge { f: o.expr("f", n)? },
        "zermelo-convert" => TaskKind::ZermeloConvert,
        "lift" => TaskKind::Lift {
            start: o.point("start", n)?,
            velocity: o.point("velocity", n)?,
            length: o.positive("length")?,
            t0: o.opt_f64("t0")?.unwrap_or(0.0),
            step: o.opt_positive("step")?,
            closed: o.opt_bool("closed")?.unwrap_or(false),
        },
        "proper-time" => TaskKind::ProperTime {
            from: o.point("from", n)?,
            to: o.point("to", n)?,
            proper_time: o.f64("proper_time")?,
        },
        "diagnostics" => {
            let mut d = DiagnosticsOptions::default();
            if let Some(s) = f64_list(&mut o, "scales")? {
                if s.is_empty() || s.iter().any(|x| !(*x > 0.0)) {
                    return Err(SchemaError::new(o.at("scales"), "scales must be a non-empty list of positive numbers"));
                }
                d.scales = s;
            }
            if let Some(k) = o.opt_u64("growth_nodes")? {
                d.growth_nodes = k as usize;
            }
            if let Some(f) = o.opt_positive("flag_factor")? {
                d.flag_factor = f;
            }
            d.growth_bound = o.opt_f64("growth_bound")?;
            if let Some(r) = f64_list(&mut o, "ball_radii")? {
                d.ball_radii = r;
            }
            d.proper_function = o.opt_expr("proper_function", n)?;
            TaskKind::Diagnostics(d)
        }
        "busemann" => {
            let rptr = o.at("ray");
            let mut ray = Obj::new(o.req("ray")?, rptr)?;
            let point = ray.point("point", n)?;
            let direction = ray.point("direction", n)?;
            ray.finish()?;
            let s_max = o.positive("s_max")?;
            let shooting = o.choice("method", &["grid", "shooting"], "grid")? == "shooting";
            TaskKind::Busemann { point, direction, s_max, shooting }
        }
        "almost-isometry" => {
            let mptr = o.at("map");
            let list = as_array(o.req("map")?, &mptr)?;
            if list.len() != n {
                return Err(SchemaError::new(mptr, format!("expected {n} component expressions, found {}", list.len())));
            }
            let map = list.iter().enumerate().map(|(k, e)| as_expr(e, &format!("{mptr}/{k}"), n)).collect::<Result<_>>()?;
            let potential = o.opt_expr("potential", n)?.unwrap_or_else(|| ScalarField::constant(0.0, n));
            TaskKind::AlmostIsometry { map, potential }
        }
        other => {
            return Err(SchemaError::new(
                o.at("type"),
                format!("unknown task type \"{other}\", expected one of {TASK_TYPES:?}"),
            ))
        }
    };
    o.finish()?;
    Ok(TaskSpec { id, kind })
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| SchemaError::new("", format!("invalid JSON at line {} column {}: {e}", e.line(), e.column())))?;
        RunConfig::from_value(&doc)
    }

    pub fn from_value(doc: &Value) -> Result<RunConfig> {
        let mut root = Obj::new(doc, String::new())?;
        let scenario = as_str(root.req("scenario")?, "/scenario")?.to_string();
        let dimension = as_u64(root.req("dimension")?, "/dimension")? as usize;
        if dimension == 0 || dimension > MAX_DIM {
            return Err(SchemaError::new("/dimension", format!("dimension must be between 1 and {MAX_DIM}")));
        }
        let domain = domain(root.req("domain")?, "/domain".into(), dimension)?;
        let metric = metric(&mut root, dimension)?;
        let output_dir = root.opt_str("output_dir")?.map(str::to_string);
        let seed = root.opt_u64("seed")?.unwrap_or(0);

        let mut tolerances = Tolerances::default();
        if let Some(v) = root.get("tolerances") {
            let mut t = Obj::new(v, "/tolerances".into())?;
            tolerances.endpoint = t.opt_positive("endpoint")?.unwrap_or(tolerances.endpoint);
            tolerances.isometry = t.opt_positive("isometry")?.unwrap_or(tolerances.isometry);
            t.finish()?;
        }
        let mut validation = Validation::default();
        if let Some(v) = root.get("validation") {
            let mut t = Obj::new(v, "/validation".into())?;
            if let Some(k) = t.opt_u64("nodes_per_axis")? {
                if k < 2 {
                    return Err(SchemaError::new(t.at("nodes_per_axis"), "needs at least 2 nodes per axis"));
                }
                validation.nodes_per_axis = k as usize;
            }
            validation.directions = t.opt_u64("directions")?.map_or(validation.directions, |k| k as usize);
            t.finish()?;
        }

        let list = as_array(root.req("tasks")?, "/tasks")?;
        let tasks: Vec<TaskSpec> =
            list.iter().enumerate().map(|(k, t)| task(t, format!("/tasks/{k}"), dimension)).collect::<Result<_>>()?;
        let mut ids = BTreeSet::new();
        for (k, t) in tasks.iter().enumerate() {
            if !ids.insert(t.id.as_str()) {
                return Err(SchemaError::new(format!("/tasks/{k}/id"), format!("duplicate task id \"{}\"", t.id)));
            }
        }
        root.finish()?;
        Ok(RunConfig { scenario, dimension, domain, metric, tasks, output_dir, seed, tolerances, validation })
    }
}
