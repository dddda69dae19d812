use alloc::string::ToString;

use super::ast::{ExprAst, Func};
use super::dual::Scalar;
use super::EvalError;
use crate::math;

fn domain(node: &ExprAst, reason: &'static str) -> EvalError {
    EvalError::Domain { expr: node.to_string(), reason }
}

/// Evaluates `node` with `vars[i]` bound to `x{i+1}`.
///
/// Any subexpression that produces a non-finite value (or derivative) is
/// reported as a domain error naming that subexpression.
pub(crate) fn eval<S: Scalar>(node: &ExprAst, vars: &[S]) -> Result<S, EvalError> {
    let out = match node {
        ExprAst::Num(v) => S::lift(*v),
        ExprAst::Var(i) => vars[*i],
        ExprAst::Neg(a) => -eval(a, vars)?,
        ExprAst::Add(a, b) => eval(a, vars)? + eval(b, vars)?,
        ExprAst::Sub(a, b) => eval(a, vars)? - eval(b, vars)?,
        ExprAst::Mul(a, b) => eval(a, vars)? * eval(b, vars)?,
        ExprAst::Div(a, b) => {
            let num = eval(a, vars)?;
            let den = eval(b, vars)?;
            if den.re() == 0.0 {
                return Err(domain(node, "division by zero"));
            }
            num / den
        }
        ExprAst::Pow(a, b) => {
            let base = eval(a, vars)?;
            let exponent = eval(b, vars)?;
            let e = exponent.re();
            if exponent.is_flat() && e == math::floor(e) && math::abs(e) <= i32::MAX as f64 {
                base.powi(e as i32)
            } else if base.re() < 0.0 {
                return Err(domain(node, "real power of a negative base"));
            } else if base.re() == 0.0 && !(exponent.is_flat() && e > 0.0) {
                return Err(domain(node, "power of zero with non-positive or variable exponent"));
            } else {
                base.powf(exponent)
            }
        }
        ExprAst::Call(f, a) => {
            let arg = eval(a, vars)?;
            match f {
                Func::Sin => arg.sin(),
                Func::Cos => arg.cos(),
                Func::Exp => arg.exp(),
                Func::Tanh => arg.tanh(),
                Func::Abs => arg.abs(),
                Func::Log => {
                    if arg.re() <= 0.0 {
                        return Err(domain(node, "logarithm of a non-positive number"));
                    }
                    arg.ln()
                }
                Func::Sqrt => {
                    if arg.re() < 0.0 {
                        return Err(domain(node, "square root of a negative number"));
                    }
                    arg.sqrt()
                }
            }
        }
    };
    if !out.is_finite() {
        return Err(domain(node, "non-finite value or derivative"));
    }
    Ok(out)
}
