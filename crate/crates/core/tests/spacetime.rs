use rand::Rng;
use randers_core::domain::{Axis, GridDomain};
use randers_core::fieldexpr::parse_field;
use randers_core::geodesics::{
    connect, curve_length, integrate_geodesic, integrate_geodesic_in, ConnectOptions, Curve, GeodesicState,
};
use randers_core::geometry::{OneFormField, RandersData, RandersForm, RiemannianMetricField};
use randers_core::sampling;
use randers_core::spacetime::{
    almost_isometry_check, augmented_proper_time_metric, fermat_metric, gauge_transform, lift_closed_geodesic_in,
    lift_null_geodesic, null_defect, null_defect_scaled, proper_time_arrival, section_spacelike_check,
    SpacetimeError, StationaryData,
};
use randers_core::ScalarField;

fn randers(g0: &[&str], omega: &[&str], form: RandersForm) -> RandersData {
    let n = omega.len();
    RandersData::new(RiemannianMetricField::parse(n, g0).unwrap(), OneFormField::parse(n, omega).unwrap(), form)
        .unwrap()
}

fn field(s: &str, n: usize) -> ScalarField {
    parse_field(s, n).unwrap()
}

fn random_metric(rng: &mut impl Rng) -> RandersData {
    let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let g11 = format!("1 + {}*sin(x2)", 0.3 * c[0]);
    let g12 = format!("{}", 0.2 * c[1]);
    let w1 = format!("{}*cos(x2)", 0.4 * c[2]);
    let w2 = format!("{}*sin(x1)", 0.4 * c[3]);
    let form = if rng.gen_bool(0.5) { RandersForm::Fermat } else { RandersForm::Classical };
    randers(&[&g11, &g12, "1.2 + 0.2*cos(x1)"], &[&w1, &w2], form)
}

fn unit_start(rng: &mut impl Rng) -> GeodesicState {
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    GeodesicState::new(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], vec![th.cos(), th.sin()])
}

fn samples(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = sampling::rng(seed);
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect()
}

#[test]
fn fermat_metric_examples() {
    let g0 = RiemannianMetricField::parse(2, &["1 + x2^2", "0.1", "2"]).unwrap();
    let r = fermat_metric(&StationaryData::normalized(g0.clone(), OneFormField::zero(2)), &[]).unwrap();
    let x = [0.3, -0.7];
    let v = [0.4, 1.1];
    let direct = g0.eval(&x).unwrap().quad(&v).sqrt();
    assert!((r.local(&x).unwrap().value(&v) - direct).abs() < 1e-15);

    let sd = StationaryData::new(
        RiemannianMetricField::euclidean(2),
        OneFormField::zero(2),
        ScalarField::constant(4.0, 2),
        None,
    )
    .unwrap();
    let r = fermat_metric(&sd, &[]).unwrap();
    assert!((r.local(&[0.0, 0.0]).unwrap().value(&[1.0, 0.0]) - 0.5).abs() < 1e-15);

    let bad = StationaryData { beta: field("x1", 2), ..sd.clone() };
    assert!(matches!(fermat_metric(&bad, &[vec![-1.0, 0.0]]), Err(SpacetimeError::NonPositive { .. })));
    let neg = StationaryData { beta: ScalarField::constant(-1.0, 2), ..sd };
    assert!(fermat_metric(&neg, &[]).is_err());
}

#[test]
fn conformal_factor_is_ignored_bitwise() {
    let g0 = RiemannianMetricField::parse(2, &["1 + 0.2*x1^2", "0.1*x2", "1.5"]).unwrap();
    let w = OneFormField::parse(2, &["0.3*sin(x2)", "0.1"]).unwrap();
    let beta = field("1 + 0.5*cos(x1)^2", 2);
    let plain = StationaryData::new(g0.clone(), w.clone(), beta.clone(), None).unwrap();
    let conformal = StationaryData::new(g0, w, beta, Some(field("exp(x3)", 3))).unwrap();
    let s = samples(2, 10, 1);
    assert_eq!(fermat_metric(&plain, &s).unwrap(), fermat_metric(&conformal, &s).unwrap());
}

#[test]
fn general_beta_fermat_value() {
    let mut rng = sampling::rng(5);
    let sd = StationaryData::new(
        RiemannianMetricField::parse(2, &["1 + 0.2*x1^2", "0.1*x2", "1.5"]).unwrap(),
        OneFormField::parse(2, &["0.8*sin(x2)", "0.5"]).unwrap(),
        field("1 + 0.5*cos(x1)^2", 2),
        None,
    )
    .unwrap();
    let r = fermat_metric(&sd, &[]).unwrap();
    for _ in 0..200 {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let b = sd.beta.eval(&x).unwrap();
        let g = sd.g0.eval(&x).unwrap().quad(&v);
        let w = sd.omega.eval(&x).unwrap();
        let wv = w[0] * v[0] + w[1] * v[1];
        let f = (g / b + wv * wv / (b * b)).sqrt() + wv / b;
        assert!((r.local(&x).unwrap().value(&v) - f).abs() < 1e-12 * f.max(1.0));
        // F(v) solves the null condition of g0 + 2ω dt − β dt²
        assert!(sd.metric_value(&x, &v, f).unwrap().abs() < 1e-12 * (1.0 + g));
    }
}

#[test]
fn lift_examples() {
    let e = RandersData::euclidean(2);
    let base = integrate_geodesic(&e, &GeodesicState::new(vec![0.0, 0.0], vec![0.6, 0.8]), 2.5, None).unwrap();
    let lift = lift_null_geodesic(&e, &base, 3.0).unwrap();
    assert!((lift.arrival() - 2.5).abs() < 1e-12);
    assert!(lift.t.windows(2).all(|w| w[1] > w[0]));

    let r = randers(&["1", "0", "1"], &["0.5", "0"], RandersForm::Classical);
    let there = connect(&r, &[0.0, 0.0], &[1.0, 0.0], &ConnectOptions::default()).unwrap();
    let back = connect(&r, &[1.0, 0.0], &[0.0, 0.0], &ConnectOptions::default()).unwrap();
    let a = lift_null_geodesic(&r, &there.shortest().unwrap().curve, 0.0).unwrap();
    let b = lift_null_geodesic(&r, &back.shortest().unwrap().curve, 0.0).unwrap();
    assert!((a.arrival() - 1.5).abs() < 1e-8);
    assert!((b.arrival() - 0.5).abs() < 1e-8);

    let bent = randers(&["1 + x2^2", "0", "1"], &["0.2", "0"], RandersForm::Classical);
    let chord = Curve::segment(&[0.0, 0.3], &[1.0, 0.8], 50);
    assert!(matches!(lift_null_geodesic(&bent, &chord, 0.0), Err(SpacetimeError::NotGeodesic { .. })));
}

#[test]
fn random_lifts_are_null_and_arrive_at_fermat_length() {
    let mut rng = sampling::rng(11);
    for _ in 0..100 {
        let r = random_metric(&mut rng);
        let len = rng.gen_range(0.5..2.0);
        let base = integrate_geodesic(&r, &unit_start(&mut rng), len, None).unwrap();
        let lift = lift_null_geodesic(&r, &base, 0.0).unwrap();
        let sd = StationaryData::from_randers(&r);
        assert!(null_defect_scaled(&sd, &lift).unwrap() < 1e-8);
        let ell = curve_length(&r, &base).unwrap();
        assert!((lift.arrival() - ell).abs() < 1e-8 * ell, "{} vs {ell}", lift.arrival());
        // constant unit h-speed
        for (x, v) in lift.base.points.iter().zip(&lift.base.velocities) {
            assert!((r.local(x).unwrap().alpha(v) - 1.0).abs() < 1e-12);
        }
        assert!((lift.base.end()[0] - base.end()[0]).abs() < 1e-8);
    }
}

#[test]
fn null_defect_detects_non_null_curves() {
    let e = RandersData::euclidean(2);
    let sd = StationaryData::minkowski(2);
    let base = integrate_geodesic(&e, &GeodesicState::new(vec![0.0, 0.0], vec![1.0, 0.0]), 1.0, None).unwrap();
    let lift = lift_null_geodesic(&e, &base, 0.0).unwrap();
    assert!(null_defect(&sd, &lift).unwrap() < 1e-12);

    let mut late = lift.clone();
    for (t, s) in late.t.iter_mut().zip(&lift.base.params) {
        *t += 0.1 * s;
    }
    late.t_rate.iter_mut().for_each(|r| *r += 0.1);
    assert!(null_defect(&sd, &late).unwrap() > 0.1);

    let mut frozen = lift.clone();
    frozen.t.iter_mut().for_each(|t| *t = 0.0);
    frozen.t_rate.iter_mut().for_each(|r| *r = 0.0);
    assert!((null_defect(&sd, &frozen).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn section_check_examples() {
    let e = RandersData::euclidean(2);
    let s = samples(2, 20, 3);
    let check = |f: &str| section_spacelike_check(&e, &field(f, 2), &s, 64, 0).unwrap();
    assert!(!check("2*x1").pass);
    assert!(check("0.5*x1").pass);
    let edge = check("x1");
    assert!(!edge.pass && edge.min_margin.abs() < 1e-15);
    assert!(matches!(
        gauge_transform(&e, &field("2*x1", 2), &s),
        Err(SpacetimeError::NonSpacelikeSection { .. })
    ));
}

#[test]
fn gauge_examples() {
    let s = samples(2, 20, 4);
    let r = randers(&["1 + 0.1*x2^2", "0", "1"], &["0.2*cos(x1)", "0.1"], RandersForm::Fermat);
    let same = gauge_transform(&r, &ScalarField::constant(3.0, 2), &s).unwrap();
    for x in &s {
        for v in [[1.0, 0.3], [-0.2, 0.9]] {
            let a = r.local(x).unwrap().value(&v);
            assert!((same.local(x).unwrap().value(&v) - a).abs() < 1e-14);
        }
    }
    let e = RandersData::euclidean(2);
    let g = gauge_transform(&e, &field("0.5*x1", 2), &s).unwrap();
    assert!((g.local(&[0.0, 0.0]).unwrap().value(&[1.0, 0.0]) - 0.5).abs() < 1e-15);
    assert!((curve_length(&g, &Curve::segment(&[0.0, 0.0], &[1.0, 0.0], 5)).unwrap() - 0.5).abs() < 1e-14);
}

/// Five-point Gauss–Legendre on `panels` equal panels.
fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let nodes = [0.0, 0.5384693101056831, -0.5384693101056831, 0.906179845938664, -0.906179845938664];
    let weights =
        [0.5688888888888889, 0.47862867049936647, 0.47862867049936647, 0.23692688505618908, 0.23692688505618908];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let m = a + (k as f64 + 0.5) * h;
            nodes.iter().zip(&weights).map(|(x, w)| w * f(m + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

#[test]
fn gauge_length_identity_on_random_curves() {
    let mut rng = sampling::rng(12);
    let f = field("0.3*sin(x1) + 0.2*x1*x2", 2);
    for k in 0..100 {
        let mut r = random_metric(&mut rng);
        if k % 2 == 0 {
            r = r.to_form(RandersForm::Fermat);
        }
        let rf = gauge_transform(&r, &f, &[vec![0.0, 0.0]]).unwrap();
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let pos = |s: f64| [c[0] + c[1] * s + c[2] * s * s, c[3] + c[4] * s + c[5] * (3.0 * s).sin()];
        let vel = |s: f64| [c[1] + 2.0 * c[2] * s, c[4] + 3.0 * c[5] * (3.0 * s).cos()];
        let len = |m: &RandersData| quad(|s| m.local(&pos(s)).unwrap().value(&vel(s)), 0.0, 1.0, 200);
        let (lf, lg) = (len(&r), len(&rf));
        let jump = f.eval(&pos(0.0)).unwrap() - f.eval(&pos(1.0)).unwrap();
        assert!((lg - (lf + jump)).abs() < 1e-10 * lf.max(1.0), "{lg} vs {}", lf + jump);
    }
}

#[test]
fn gauge_keeps_trajectories_and_shifts_time() {
    let mut rng = sampling::rng(13);
    let f = field("0.2*sin(x1 + x2) + 0.1*x2", 2);
    for _ in 0..10 {
        let r = random_metric(&mut rng);
        let rf = gauge_transform(&r, &f, &[vec![0.0, 0.0]]).unwrap();
        let start = unit_start(&mut rng);
        let a = integrate_geodesic(&r, &start, 1.5, Some(2e-3)).unwrap();
        let b = integrate_geodesic(&rf, &start, 1.2, Some(2e-3)).unwrap();
        let la = lift_null_geodesic(&r, &a, 0.0).unwrap();
        let lb = lift_null_geodesic(&rf, &b, 0.0).unwrap();
        let f0 = f.eval(&start.x).unwrap();
        let common = la.base.params.last().unwrap().min(*lb.base.params.last().unwrap());
        for k in 0..=40 {
            let sigma = common * k as f64 / 40.0;
            let (xa, ta) = la.sample_at(sigma);
            let (xb, tb) = lb.sample_at(sigma);
            assert!((xa[0] - xb[0]).abs() < 1e-6 && (xa[1] - xb[1]).abs() < 1e-6);
            let shift = f.eval(&xa).unwrap() - f0;
            assert!((tb - (ta - shift)).abs() < 1e-8, "{tb} vs {}", ta - shift);
        }
    }
}

#[test]
fn augmented_metric() {
    let sd = StationaryData::minkowski(2);
    let aug = augmented_proper_time_metric(&sd, &[]).unwrap();
    let l = aug.local(&[0.3, 0.1, 5.0]).unwrap();
    assert!((l.value(&[3.0, 0.0, 4.0]) - 5.0).abs() < 1e-14);

    let stat = StationaryData::new(
        RiemannianMetricField::parse(2, &["1 + 0.2*x1^2", "0.1*x2", "1.5"]).unwrap(),
        OneFormField::parse(2, &["0.8*sin(x2)", "0.5"]).unwrap(),
        field("1 + 0.5*cos(x1)^2", 2),
        None,
    )
    .unwrap();
    let base = fermat_metric(&stat, &[]).unwrap();
    let aug = augmented_proper_time_metric(&stat, &[]).unwrap();
    let mut rng = sampling::rng(8);
    for _ in 0..100 {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let y: f64 = rng.gen_range(-1.0..1.0);
        let f = base.local(&x).unwrap().value(&v);
        assert_eq!(aug.local(&[x[0], x[1], 0.0]).unwrap().value(&[v[0], v[1], 0.0]), f);
        let a = aug.local(&[x[0], x[1], -3.0]).unwrap().value(&[v[0], v[1], y]);
        let b = aug.local(&[x[0], x[1], 7.0]).unwrap().value(&[v[0], v[1], y]);
        assert_eq!(a, b);
        let be = stat.beta.eval(&x).unwrap();
        let g = stat.g0.eval(&x).unwrap().quad(&v);
        let w = stat.omega.eval(&x).unwrap();
        let wv = w[0] * v[0] + w[1] * v[1];
        let direct = (g / be + y * y / be + wv * wv / (be * be)).sqrt() + wv / be;
        assert!((a - direct).abs() < 1e-12 * direct.max(1.0));
    }
}

#[test]
fn flat_proper_time_oracle() {
    let sd = StationaryData::minkowski(2);
    let t = proper_time_arrival(&sd, &[0.0, 0.0], &[1.0, 0.0], 1.0, &ConnectOptions::default()).unwrap();
    assert!((t.arrival - 2f64.sqrt()).abs() < 1e-6);
    let mut rng = sampling::rng(9);
    for _ in 0..10 {
        let x1 = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let tau: f64 = rng.gen_range(0.1..2.0);
        let t = proper_time_arrival(&sd, &[0.0, 0.0], &x1, tau, &ConnectOptions::default()).unwrap();
        let exact = (x1[0] * x1[0] + x1[1] * x1[1] + tau * tau).sqrt();
        assert!((t.arrival - exact).abs() < 1e-6);
    }
}

#[test]
fn closed_lifts_on_the_torus() {
    let torus = GridDomain::new(vec![Axis::periodic(0.0, 1.0, 20), Axis::periodic(0.0, 1.0, 20)]).unwrap();
    let loop_of = |r: &RandersData, dir: f64, len: f64| {
        let speed = r.local(&[0.5, 0.5]).unwrap().value(&[dir, 0.0]);
        let s0 = GeodesicState::new(vec![0.5, 0.5], vec![dir / speed, 0.0]);
        integrate_geodesic_in(r, Some(&torus), &s0, len, None).unwrap()
    };
    let e = RandersData::euclidean(2);
    let l = lift_closed_geodesic_in(&e, Some(&torus), &loop_of(&e, 1.0, 1.0), 0.0).unwrap();
    assert!((l.period - 1.0).abs() < 1e-10);

    let r = randers(&["1", "0", "1"], &["0.3", "0"], RandersForm::Classical);
    let fwd = lift_closed_geodesic_in(&r, Some(&torus), &loop_of(&r, 1.0, 1.3), 0.0).unwrap();
    let bwd = lift_closed_geodesic_in(&r, Some(&torus), &loop_of(&r, -1.0, 0.7), 2.0).unwrap();
    assert!((fwd.period - 1.3).abs() < 1e-10);
    assert!((bwd.period - 0.7).abs() < 1e-10);
    assert!((bwd.lift.t[bwd.lift.t.len() - 1] - 2.7).abs() < 1e-10);

    let open = loop_of(&r, 1.0, 0.9);
    assert!(matches!(lift_closed_geodesic_in(&r, Some(&torus), &open, 0.0), Err(SpacetimeError::NotClosed)));
}

#[test]
fn almost_isometries() {
    let s = samples(2, 100, 6);
    let ident = [field("x1", 2), field("x2", 2)];
    let zero = ScalarField::constant(0.0, 2);
    let e = RandersData::euclidean(2);
    assert!(almost_isometry_check(&e, &ident, &zero, &s, 16, 0, 1e-12).unwrap().pass);
    let shift = [field("x1 + 0.7", 2), field("x2 - 1.1", 2)];
    assert!(almost_isometry_check(&e, &shift, &zero, &s, 16, 0, 1e-12).unwrap().pass);

    let r = randers(&["1", "0", "1"], &["0.5", "0"], RandersForm::Classical);
    let slide = [field("x1 + 0.4", 2), field("x2", 2)];
    assert!(almost_isometry_check(&r, &slide, &zero, &s, 16, 0, 1e-12).unwrap().pass);
    let wrong = almost_isometry_check(&r, &ident, &field("0.3*x1", 2), &s, 16, 0, 1e-12).unwrap();
    assert!(!wrong.pass && wrong.max_residual > 0.1);

    // F = |v| + dg: a rotation φ is an almost isometry with potential g∘φ − g
    let g = "0.3*sin(x1) + 0.1*x2^2";
    let exact = randers(&["1", "0", "1"], &["0.3*cos(x1)", "0.2*x2"], RandersForm::Classical);
    let (c, sn) = (0.6, 0.8);
    let rot = [field(&format!("{c}*x1 - {sn}*x2"), 2), field(&format!("{sn}*x1 + {c}*x2"), 2)];
    let pot = format!("0.3*sin({c}*x1 - {sn}*x2) + 0.1*({sn}*x1 + {c}*x2)^2 - ({g})");
    let small: Vec<Vec<f64>> = s.iter().map(|x| vec![0.3 * x[0], 0.3 * x[1]]).collect();
    let rep = almost_isometry_check(&exact, &rot, &field(&pot, 2), &small, 16, 0, 1e-12).unwrap();
    assert!(rep.pass, "{rep:?}");
}
