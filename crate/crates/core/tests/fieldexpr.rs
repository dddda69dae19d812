use proptest::prelude::*;
use randers_core::fieldexpr::{parse_field, ExprAst, Func};

fn ast(dim: usize) -> impl Strategy<Value = ExprAst> {
    let leaf = prop_oneof![(-5.0..5.0f64).prop_map(ExprAst::Num), (0..dim).prop_map(ExprAst::Var)];
    leaf.prop_recursive(5, 40, 2, |inner| {
        let b = |a: ExprAst| Box::new(a);
        prop_oneof![
            inner.clone().prop_map(move |a| ExprAst::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| ExprAst::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| ExprAst::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| ExprAst::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| ExprAst::Div(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| ExprAst::Pow(b(x), b(y))),
            (0..Func::ALL.len(), inner).prop_map(move |(f, a)| ExprAst::Call(Func::ALL[f], b(a))),
        ]
    })
}

/// Random polynomial in two variables as source text.
fn polynomial() -> impl Strategy<Value = String> {
    prop::collection::vec((-3.0..3.0f64, 0u32..4, 0u32..4), 1..6).prop_map(|terms| {
        terms.iter().map(|(c, a, b)| format!("({c})*x1^{a}*x2^{b}")).collect::<Vec<_>>().join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn printing_then_parsing_rebuilds_the_tree(a in ast(3)) {
        let printed = a.to_string();
        let back = parse_field(&printed, 3).unwrap();
        prop_assert_eq!(back.ast(), &a, "{}", printed);
    }

    #[test]
    fn evaluation_is_pure(a in ast(2), x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let f = parse_field(&a.to_string(), 2).unwrap();
        let (p, q) = (f.eval(&[x, y]), f.eval(&[x, y]));
        match (p, q) {
            (Ok(p), Ok(q)) => prop_assert_eq!(p.to_bits(), q.to_bits()),
            (Err(p), Err(q)) => prop_assert_eq!(p, q),
            _ => prop_assert!(false),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partials_match_central_differences(src in polynomial(), x in -1.5..1.5f64, y in -1.5..1.5f64) {
        let f = parse_field(&src, 2).unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let exact = f.partial(&[x, y], i).unwrap();
            let mut p = [x, y];
            let mut m = [x, y];
            p[i] += h;
            m[i] -= h;
            let fd = (f.eval(&p).unwrap() - f.eval(&m).unwrap()) / (2.0 * h);
            prop_assert!((exact - fd).abs() < 1e-6 * (1.0 + exact.abs()), "{src}: {exact} vs {fd}");
        }
    }
}

#[test]
fn transcendental_partials_match_central_differences() {
    let f = parse_field("sin(x1)*exp(x2) + log(2 + x1^2) + sqrt(3 + x2) - tanh(x1*x2) + abs(x1 - 5)", 2).unwrap();
    let h = 1e-5;
    for &(x, y) in &[(0.3, -0.2), (1.1, 0.7), (-0.9, 1.4)] {
        for i in 0..2 {
            let mut p = [x, y];
            let mut m = [x, y];
            p[i] += h;
            m[i] -= h;
            let fd = (f.eval(&p).unwrap() - f.eval(&m).unwrap()) / (2.0 * h);
            let exact = f.partial(&[x, y], i).unwrap();
            assert!((exact - fd).abs() < 1e-8 * (1.0 + exact.abs()));
        }
    }
}
