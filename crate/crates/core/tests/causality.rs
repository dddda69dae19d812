use proptest::prelude::*;
use randers_core::causality::{
    cauchy_development, cauchy_horizon, chronological_set, completeness_diagnostics, CausalityError,
    DevelopmentField, DiagnosticsOptions, TimeDirection, Verdict,
};
use randers_core::distance::{ball, distance_via_bvp, Direction};
use randers_core::domain::GridDomain;
use randers_core::geodesics::ConnectOptions;
use randers_core::geometry::{OneFormField, RandersData, RandersForm, RiemannianMetricField};
use randers_core::spacetime::StationaryData;
use randers_core::parse_field;

fn classical(omega: &[&str]) -> RandersData {
    RandersData::new(RiemannianMetricField::euclidean(2), OneFormField::parse(2, omega).unwrap(), RandersForm::Classical)
        .unwrap()
}

fn norm(x: &[f64]) -> f64 {
    (x[0] * x[0] + x[1] * x[1]).sqrt()
}

fn disc(dom: &GridDomain, rho: f64) -> Vec<bool> {
    (0..dom.node_count()).map(|i| norm(&dom.node_point(i)) < rho).collect()
}

#[test]
fn minkowski_light_cone() {
    let dom = GridDomain::uniform(2, -2.0, 2.0, 81).unwrap();
    let h = 0.05;
    let e = RandersData::euclidean(2);
    let times = [1.0, 1.5, 2.0, 2.5];
    let cone = chronological_set(&e, &dom, &[0.0, 0.0], 1.0, &times, TimeDirection::Future).unwrap();
    assert_eq!(cone.slices[0].node_count(), 0);
    for sl in &cone.slices {
        let s = sl.t - 1.0;
        for i in 0..dom.node_count() {
            let r = norm(&dom.node_point(i));
            if (r - s).abs() > h {
                assert_eq!(sl.mask[i], r < s, "t={} node {:?}", sl.t, dom.node_point(i));
            }
        }
    }
    for w in cone.slices.windows(2) {
        assert!(w[0].mask.iter().zip(&w[1].mask).all(|(a, b)| !a || *b));
    }
    assert!(matches!(
        chronological_set(&e, &dom, &[0.0, 0.0], 0.0, &[1.0, 0.5], TimeDirection::Future),
        Err(CausalityError::UnsortedTimes)
    ));
}

#[test]
fn drifting_cone_is_the_forward_ball() {
    let dom = GridDomain::uniform(2, -3.0, 3.0, 121).unwrap();
    let h = 0.05;
    let r = classical(&["0.5", "0"]);
    let cone = chronological_set(&r, &dom, &[0.0, 0.0], 0.0, &[1.0], TimeDirection::Future).unwrap();
    let b = ball(&r, &dom, &[0.0, 0.0], 1.0, Direction::Forward).unwrap();
    assert_eq!(cone.slices[0].mask, b.mask);
    for i in 0..dom.node_count() {
        let x = dom.node_point(i);
        let d = norm(&x) + 0.5 * x[0];
        if (d - 1.0).abs() > 1.5 * h {
            assert_eq!(cone.slices[0].mask[i], d < 1.0, "node {x:?}");
        }
    }
}

#[test]
fn past_is_reversed_future() {
    let dom = GridDomain::uniform(2, -1.0, 1.0, 41).unwrap();
    let r = RandersData::new(
        RiemannianMetricField::parse(2, &["1 + 0.3*x2^2", "0.1*x1", "1.2"]).unwrap(),
        OneFormField::parse(2, &["0.3*cos(x2)", "0.2*sin(x1)"]).unwrap(),
        RandersForm::Classical,
    )
    .unwrap();
    let t0 = 2.0;
    let ds = [0.2, 0.5, 0.9];
    let past_t: Vec<f64> = ds.iter().rev().map(|s| t0 - s).collect();
    let fut_t: Vec<f64> = ds.iter().map(|s| t0 + s).collect();
    let past = chronological_set(&r, &dom, &[0.1, -0.2], t0, &past_t, TimeDirection::Past).unwrap();
    let fut = chronological_set(&r.reversed(), &dom, &[0.1, -0.2], t0, &fut_t, TimeDirection::Future).unwrap();
    for (p, f) in past.slices.iter().rev().zip(&fut.slices) {
        assert_eq!(p.mask, f.mask);
    }
    assert!(past.slices[0].node_count() > past.slices[2].node_count());
}

#[test]
fn disc_development_and_horizon() {
    let dom = GridDomain::uniform(2, -2.0, 2.0, 81).unwrap();
    let h = 0.05;
    let e = RandersData::euclidean(2);
    let a = disc(&dom, 1.0);
    let times = [0.0, 0.25, 0.5, 0.75, 1.0 + 1e-9];
    let dev = cauchy_development(&e, &dom, &a, 0.0, TimeDirection::Future, &times).unwrap();
    assert_eq!(dev.slices[0].mask, a);
    assert_eq!(dev.slices[4].node_count(), 0);
    for sl in &dev.slices {
        for i in 0..dom.node_count() {
            let r = norm(&dom.node_point(i));
            let inside = r < 1.0 - sl.t;
            if ((1.0 - sl.t) - r).abs() > h {
                assert_eq!(sl.mask[i], inside, "t={} at {:?}", sl.t, dom.node_point(i));
            }
        }
    }
    let hz = cauchy_horizon(&e, &dom, &a, 0.0, TimeDirection::Future).unwrap();
    for i in 0..dom.node_count() {
        match hz.time(i) {
            Some(t) => {
                let r = norm(&dom.node_point(i));
                assert!((t - (1.0 - r)).abs() <= h, "at {:?}", dom.node_point(i));
            }
            None => assert!(!a[i]),
        }
    }
    // nodes of A next to the complement sit within one cell of t0
    for i in 0..dom.node_count() {
        if a[i] && (0..4).any(|k| {
            let off = [[1, 0], [-1, 0], [0, 1], [0, -1]][k];
            dom.offset_node(i, &off).is_some_and(|j| !a[j])
        }) {
            assert!(hz.time(i).unwrap() <= h * 2f64.sqrt());
        }
    }
    let full = vec![true; dom.node_count()];
    assert!(matches!(
        cauchy_development(&e, &dom, &full, 0.0, TimeDirection::Future, &[0.0]),
        Err(CausalityError::Degenerate(_))
    ));
    let none = vec![false; dom.node_count()];
    assert!(cauchy_horizon(&e, &dom, &none, 0.0, TimeDirection::Future).is_err());
}

#[test]
fn development_and_horizon_agree_exactly() {
    let dom = GridDomain::uniform(2, -2.0, 2.0, 61).unwrap();
    let r = classical(&["0.4*sin(x2)", "0.2"]);
    let a = disc(&dom, 1.3);
    for dir in [TimeDirection::Future, TimeDirection::Past] {
        let field = DevelopmentField::new(&r, &dom, &a, 1.0, dir).unwrap();
        let hz = field.horizon();
        let ts: Vec<f64> = (0..30).map(|k| 1.0 + 0.05 * k as f64 * if dir == TimeDirection::Past { -1.0 } else { 1.0 }).collect();
        for &t in &ts {
            let sl = field.slice(t);
            let elapsed = if dir == TimeDirection::Future { t - 1.0 } else { 1.0 - t };
            for i in 0..dom.node_count() {
                assert_eq!(sl.mask[i], hz.depth[i].is_some_and(|m| elapsed < m));
            }
        }
        if dir == TimeDirection::Past {
            let apex = hz.apex().unwrap();
            assert!(hz.time(apex).unwrap() < 1.0);
        }
    }
}

/// `inf_{|x| = 1} |y − x| + 0.5 (y1 − x1)` by dense sampling of the circle.
fn drift_depth(y: [f64; 2]) -> f64 {
    (0..3600)
        .map(|k| {
            let th = k as f64 * std::f64::consts::TAU / 3600.0;
            let (x0, x1) = (th.cos(), th.sin());
            ((y[0] - x0).powi(2) + (y[1] - x1).powi(2)).sqrt() + 0.5 * (y[0] - x0)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn tilted_horizon_apex() {
    let dom = GridDomain::uniform(2, -1.5, 1.5, 61).unwrap();
    let h = 0.05;
    let r = classical(&["0.5", "0"]);
    let hz = cauchy_horizon(&r, &dom, &disc(&dom, 1.0), 0.0, TimeDirection::Future).unwrap();
    let apex = dom.node_point(hz.apex().unwrap());

    // oracle apex on a fine lattice inside the disc
    let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
    for i in 0..=100 {
        for j in 0..=100 {
            let y = [-1.0 + 0.02 * i as f64, -1.0 + 0.02 * j as f64];
            if norm(&y) < 1.0 {
                let m = drift_depth(y);
                if m > best.1 {
                    best = (y, m);
                }
            }
        }
    }
    assert!(best.0[0] < -0.05, "apex should move against the drift: {:?}", best.0);
    assert!((apex[0] - best.0[0]).abs() <= 2.0 * h && (apex[1] - best.0[1]).abs() <= 2.0 * h, "{apex:?} vs {:?}", best.0);

    // the analytic depth agrees with shooting from boundary samples
    let y = best.0;
    let shot = (0..24)
        .map(|k| {
            let th = k as f64 * std::f64::consts::TAU / 24.0;
            distance_via_bvp(&r, &[th.cos(), th.sin()], &y, &ConnectOptions::direct(), None).unwrap().value
        })
        .fold(f64::INFINITY, f64::min);
    assert!(shot >= best.1 - 1e-9 && shot - best.1 < 0.01);
}

#[test]
fn diagnostics_euclidean_all_pass_evidence() {
    let dom = GridDomain::uniform(2, -10.0, 10.0, 41).unwrap();
    let rep = completeness_diagnostics(&StationaryData::minkowski(2), &dom, &DiagnosticsOptions::default()).unwrap();
    assert_eq!(rep.check("pinching").unwrap().verdict, Verdict::Pass);
    let growth = rep.check("omega_growth").unwrap();
    assert_eq!(growth.verdict, Verdict::Indeterminate);
    assert!(!growth.flagged);
    let balls = rep.check("ball_intersection").unwrap();
    assert!(!balls.flagged);
    assert!(rep.checks.iter().all(|c| !c.flagged));
    assert_eq!(rep.verdict(), Verdict::Indeterminate);

    let bounded = DiagnosticsOptions { growth_bound: Some(1.0), ..DiagnosticsOptions::default() };
    let rep = completeness_diagnostics(&StationaryData::minkowski(2), &dom, &bounded).unwrap();
    assert_eq!(rep.check("omega_growth").unwrap().verdict, Verdict::Pass);
}

fn stationary(omega: &[&str]) -> StationaryData {
    StationaryData::normalized(RiemannianMetricField::euclidean(2), OneFormField::parse(2, omega).unwrap())
}

#[test]
fn diagnostics_flag_superlinear_growth() {
    let dom = GridDomain::uniform(2, -2.0, 2.0, 21).unwrap();
    let quad = completeness_diagnostics(&stationary(&["x1^2", "0"]), &dom, &DiagnosticsOptions::default()).unwrap();
    let g = quad.check("omega_growth").unwrap();
    assert!(g.flagged, "{g:?}");
    assert!(g.evidence[2].1 > g.evidence[1].1 && g.evidence[1].1 > g.evidence[0].1);
    assert_eq!(quad.check("pinching").unwrap().verdict, Verdict::Pass);

    let lin = completeness_diagnostics(&stationary(&["0.3*x1", "0"]), &dom, &DiagnosticsOptions::default()).unwrap();
    assert!(!lin.check("omega_growth").unwrap().flagged);

    let bounded = DiagnosticsOptions { growth_bound: Some(1.0), ..DiagnosticsOptions::default() };
    let rep = completeness_diagnostics(&stationary(&["x1^2", "0"]), &dom, &bounded).unwrap();
    assert_eq!(rep.check("omega_growth").unwrap().verdict, Verdict::Fail);
    assert_eq!(rep.verdict(), Verdict::Fail);

    let with_f = DiagnosticsOptions {
        proper_function: Some(parse_field("x1^2 + x2^2", 2).unwrap()),
        ..DiagnosticsOptions::default()
    };
    let rep = completeness_diagnostics(&stationary(&["0.3*x1", "0"]), &dom, &with_f).unwrap();
    assert!(rep.check("proper_function_product").is_some());
    assert!(!rep.check("proper_function_omega").unwrap().flagged);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pinching_never_fails_on_stationary_data(c in [-1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64, -1.0..1.0f64]) {
        let sd = StationaryData::new(
            RiemannianMetricField::parse(2, &[&format!("1.2 + {}*sin(x2)", 0.2 * c[0]), "0.1", "1.5"]).unwrap(),
            OneFormField::parse(2, &[&format!("{}*x1^2", c[1]), &format!("{}*cos(x1)", 2.0 * c[3])]).unwrap(),
            parse_field(&format!("1 + {}*x2^2", c[2]), 2).unwrap(),
            None,
        ).unwrap();
        let dom = GridDomain::uniform(2, -2.0, 2.0, 11).unwrap();
        let opts = DiagnosticsOptions { scales: vec![1.0], growth_nodes: 5, ..DiagnosticsOptions::default() };
        let rep = completeness_diagnostics(&sd, &dom, &opts).unwrap();
        prop_assert_eq!(rep.check("pinching").unwrap().verdict, Verdict::Pass);
    }
}
