use super::ast::{ExprAst, Func};

/// Symbolic partial derivative with respect to `x{axis+1}`.
///
/// Used where a derivative has to become a field of its own (the one-form
/// `df` of a gauge function). The result is only lightly folded.
pub(crate) fn derivative(node: &ExprAst, axis: usize) -> ExprAst {
    use ExprAst as E;
    match node {
        E::Num(_) => E::num(0.0),
        E::Var(i) => E::num(if *i == axis { 1.0 } else { 0.0 }),
        E::Neg(a) => E::neg(derivative(a, axis)),
        E::Add(a, b) => E::add(derivative(a, axis), derivative(b, axis)),
        E::Sub(a, b) => E::sub(derivative(a, axis), derivative(b, axis)),
        E::Mul(a, b) => E::add(
            E::mul(derivative(a, axis), (**b).clone()),
            E::mul((**a).clone(), derivative(b, axis)),
        ),
        E::Div(a, b) => E::div(
            E::sub(
                E::mul(derivative(a, axis), (**b).clone()),
                E::mul((**a).clone(), derivative(b, axis)),
            ),
            E::mul((**b).clone(), (**b).clone()),
        ),
        E::Pow(a, b) => {
            let da = derivative(a, axis);
            if b.is_constant() {
                // keep integer exponents integral so negative bases stay legal
                let lowered = match b.as_num() {
                    Some(n) => E::num(n - 1.0),
                    None => E::sub((**b).clone(), E::num(1.0)),
                };
                E::mul(E::mul((**b).clone(), E::pow((**a).clone(), lowered)), da)
            } else {
                let db = derivative(b, axis);
                E::mul(
                    node.clone(),
                    E::add(
                        E::mul(db, E::call(Func::Log, (**a).clone())),
                        E::div(E::mul((**b).clone(), da), (**a).clone()),
                    ),
                )
            }
        }
        E::Call(f, a) => {
            let da = derivative(a, axis);
            if da.as_num() == Some(0.0) {
                return E::num(0.0);
            }
            let arg = (**a).clone();
            let outer = match f {
                Func::Sin => E::call(Func::Cos, arg),
                Func::Cos => E::neg(E::call(Func::Sin, arg)),
                Func::Exp => E::call(Func::Exp, arg),
                Func::Log => E::div(E::num(1.0), arg),
                Func::Sqrt => E::div(E::num(1.0), E::mul(E::num(2.0), E::call(Func::Sqrt, arg))),
                Func::Tanh => E::sub(E::num(1.0), E::pow(E::call(Func::Tanh, arg), E::num(2.0))),
                Func::Abs => E::div(arg.clone(), E::call(Func::Abs, arg)),
            };
            E::mul(outer, da)
        }
    }
}
