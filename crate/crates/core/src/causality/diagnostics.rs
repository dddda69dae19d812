use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::CausalityError;
use crate::distance::{grid_distance, pinching_check, Direction, DistanceError, Source, Stencil};
use crate::domain::{Axis, GridDomain};
use crate::fieldexpr::{ExprAst, ScalarField};
use crate::geometry::{one_form_norm, OneFormField, RandersData, RiemannianMetricField};
use crate::spacetime::{fermat_metric, StationaryData};

/// Bounded samples cannot decide global properties: only theorem-backed
/// inequalities get a hard verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub verdict: Verdict,
    /// Set when the evidence points against the property.
    pub flagged: bool,
    pub evidence: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub checks: Vec<Check>,
}

impl DiagnosticsReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `Fail` if any check fails, `Pass` if all pass, else `Indeterminate`.
    pub fn verdict(&self) -> Verdict {
        if self.checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if self.checks.iter().all(|c| c.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Indeterminate
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsOptions {
    /// Half-widths `L` of the nested domains `[c − L, c + L]ⁿ` for growth ratios.
    pub scales: Vec<f64>,
    /// Nodes per axis of each nested domain; 0 picks 201/41/15/9 by dimension.
    pub growth_nodes: usize,
    /// A ratio increase by more than this factor per doubling of `L` is flagged.
    pub flag_factor: f64,
    /// Analytic bound on the growth ratios; turns the verdict into pass/fail.
    pub growth_bound: Option<f64>,
    /// Radii of the `B⁺ ∩ B⁻` proxy; empty picks 1/4 and 1/2 of the smallest
    /// half-extent of the domain.
    pub ball_radii: Vec<f64>,
    /// User-supplied proper function for the product criteria.
    pub proper_function: Option<ScalarField>,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        DiagnosticsOptions {
            scales: alloc::vec![2.0, 4.0, 8.0],
            growth_nodes: 0,
            flag_factor: 1.5,
            growth_bound: None,
            ball_radii: Vec::new(),
            proper_function: None,
        }
    }
}

fn center(dom: &GridDomain) -> Vec<f64> {
    dom.axes().iter().map(|a| 0.5 * (a.min + a.max)).collect()
}

fn default_nodes(n: usize) -> usize {
    match n {
        1 => 201,
        2 => 41,
        3 => 15,
        _ => 9,
    }
}

/// `max_x num(x) / (1 + d_g(c, x))` on each nested domain.
fn growth_series(
    g: &RiemannianMetricField,
    c: &[f64],
    opts: &DiagnosticsOptions,
    num: impl Fn(&[f64]) -> Option<f64>,
) -> Result<Vec<f64>, CausalityError> {
    let n = c.len();
    let nodes = if opts.growth_nodes == 0 { default_nodes(n) } else { opts.growth_nodes };
    let riem = RandersData::riemannian(g.clone());
    let mut out = Vec::with_capacity(opts.scales.len());
    for &l in &opts.scales {
        let axes = c.iter().map(|ci| Axis::new(ci - l, ci + l, nodes)).collect();
        let dom = GridDomain::new(axes).map_err(|_| CausalityError::Degenerate("invalid growth scale"))?;
        let d = grid_distance(&riem, &dom, &Source::Point(c.to_vec()), Direction::Forward)?;
        let mut worst: f64 = 0.0;
        for i in 0..dom.node_count() {
            let x = dom.node_point(i);
            if let Some(v) = num(&x) {
                if d.values[i].is_finite() && v.is_finite() {
                    worst = worst.max(v / (1.0 + d.values[i]));
                }
            }
        }
        out.push(worst);
    }
    Ok(out)
}

fn growth_check(name: &'static str, ratios: &[f64], scales: &[f64], opts: &DiagnosticsOptions) -> Check {
    let mut flagged = false;
    for k in 1..ratios.len() {
        let doublings = crate::math::ln(scales[k] / scales[k - 1]) / core::f64::consts::LN_2;
        let factor = if ratios[k - 1] > 0.0 { ratios[k] / ratios[k - 1] } else if ratios[k] > 0.0 { f64::INFINITY } else { 1.0 };
        if doublings > 0.0 && factor > crate::math::pow(opts.flag_factor, doublings) {
            flagged = true;
        }
    }
    let verdict = match opts.growth_bound {
        Some(b) if ratios.iter().all(|r| *r <= b) => Verdict::Pass,
        Some(_) => Verdict::Fail,
        None => Verdict::Indeterminate,
    };
    let evidence = scales.iter().zip(ratios).map(|(l, r)| (format!("ratio_L{l}"), *r)).collect();
    Check { name, verdict, flagged, evidence }
}

/// Pinching inequalities (hard verdict), growth of `‖ω‖_{g0}` against
/// `d_{g0}` on nested domains, a `B⁺ ∩ B⁻` compactness proxy and, given a
/// proper function `f`, the growth of `‖df‖·‖ω‖` and `‖ω‖` against
/// `d_{g0 + df⊗df}`. Growth and ball checks are evidence only.
pub fn completeness_diagnostics(
    sd: &StationaryData,
    dom: &GridDomain,
    opts: &DiagnosticsOptions,
) -> Result<DiagnosticsReport, CausalityError> {
    let n = sd.dim();
    if dom.dim() != n {
        return Err(DistanceError::DimensionMismatch { metric: n, domain: dom.dim() }.into());
    }
    let r = fermat_metric(sd, &[]).map_err(|_| CausalityError::Degenerate("beta must be positive"))?;
    let (g0, omega) = (r.g0.clone(), r.omega.clone());
    let mut checks = Vec::new();

    let pin = pinching_check(&r, dom, &Stencil::default_for(n))?;
    checks.push(Check {
        name: "pinching",
        verdict: if pin.pass { Verdict::Pass } else { Verdict::Fail },
        flagged: !pin.pass,
        evidence: alloc::vec![
            (String::from("edges"), pin.edges as f64),
            (String::from("violations"), pin.violations as f64),
            (String::from("skipped"), pin.skipped as f64),
            (String::from("min_margin"), pin.min_margin),
        ],
    });

    let c = center(dom);
    let ratios = growth_series(&g0, &c, opts, |x| one_form_norm(&omega, &g0, x).ok())?;
    checks.push(growth_check("omega_growth", &ratios, &opts.scales, opts));

    let half = dom.axes().iter().map(|a| 0.5 * (a.max - a.min)).fold(f64::INFINITY, f64::min);
    let radii = if opts.ball_radii.is_empty() { alloc::vec![0.25 * half, 0.5 * half] } else { opts.ball_radii.clone() };
    let fwd = grid_distance(&r, dom, &Source::Point(c.clone()), Direction::Forward)?;
    let bwd = grid_distance(&r, dom, &Source::Point(c.clone()), Direction::Backward)?;
    let mut evidence = Vec::new();
    let mut flagged = false;
    for rad in &radii {
        let nodes: Vec<usize> =
            (0..dom.node_count()).filter(|&i| fwd.values[i] < *rad && bwd.values[i] < *rad).collect();
        let inside = nodes.iter().all(|&i| !dom.is_boundary_node(i));
        flagged |= !inside;
        evidence.push((format!("r{rad}_nodes"), nodes.len() as f64));
        evidence.push((format!("r{rad}_inside"), if inside { 1.0 } else { 0.0 }));
    }
    checks.push(Check { name: "ball_intersection", verdict: Verdict::Indeterminate, flagged, evidence });

    if let Some(f) = &opts.proper_function {
        let df = OneFormField::differential(f).map_err(|_| CausalityError::Degenerate("proper function"))?;
        let g_f = RiemannianMetricField::from_asts(n, |i, j| {
            ExprAst::add(
                g0.component(i, j).ast().clone(),
                ExprAst::mul(df.component(i).ast().clone(), df.component(j).ast().clone()),
            )
        })
        .map_err(|_| CausalityError::Degenerate("proper function"))?;
        let product = growth_series(&g_f, &c, opts, |x| {
            Some(one_form_norm(&df, &g0, x).ok()? * one_form_norm(&omega, &g0, x).ok()?)
        })?;
        checks.push(growth_check("proper_function_product", &product, &opts.scales, opts));
        let plain = growth_series(&g_f, &c, opts, |x| one_form_norm(&omega, &g0, x).ok())?;
        checks.push(growth_check("proper_function_omega", &plain, &opts.scales, opts));
    }
    Ok(DiagnosticsReport { checks })
}
