//! Closed-form coordinate expressions with exact first derivatives.
//!
//! Metric components, one-form components, conformal factors and gauge
//! functions are all written as [`ScalarField`]s: a parsed [`ExprAst`] over
//! the coordinates `x1..xn` (aliases `x`, `y`, `z` when `n <= 3`). Values come
//! from a tree walk; partial derivatives come from the same walk over
//! forward-mode [`Dual`] numbers, one direction per call.

mod ast;
mod diff;
mod dual;
mod eval;
mod parser;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use ast::{ExprAst, Func};
pub use dual::Dual;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), found {found} (offset {offset})")]
    Arity { name: String, expected: usize, found: usize, offset: usize },
    #[error("variable `{name}` at offset {offset} exceeds dimension {dim}")]
    VariableOutOfRange { name: String, dim: usize, offset: usize },
    #[error("empty expression")]
    Empty,
    #[error("dimension must be at least 1")]
    InvalidDimension,
}

impl ParseError {
    /// Byte offset into the source, when the error has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. }
            | ParseError::VariableOutOfRange { offset, .. } => Some(*offset),
            ParseError::Empty | ParseError::InvalidDimension => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: &'static str },
    #[error("point has {found} coordinates but the field has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
}

/// A scalar function of `dim` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    ast: ExprAst,
    dim: usize,
}

/// Parses `source` as a field of `dim` coordinates.
pub fn parse_field(source: &str, dim: usize) -> Result<ScalarField, ParseError> {
    let ast = parser::parse(source, dim)?;
    Ok(ScalarField { ast, dim })
}

impl ScalarField {
    /// Wraps an already built tree. Fails if the tree references a variable
    /// beyond `dim`.
    pub fn from_ast(ast: ExprAst, dim: usize) -> Result<ScalarField, ParseError> {
        if dim == 0 {
            return Err(ParseError::InvalidDimension);
        }
        let arity = ast.arity();
        if arity > dim {
            return Err(ParseError::VariableOutOfRange {
                name: alloc::format!("x{arity}"),
                dim,
                offset: 0,
            });
        }
        Ok(ScalarField { ast, dim })
    }

    pub fn constant(value: f64, dim: usize) -> ScalarField {
        ScalarField { ast: ExprAst::Num(value), dim: dim.max(1) }
    }

    /// The coordinate function `x{axis+1}`.
    pub fn coordinate(axis: usize, dim: usize) -> ScalarField {
        assert!(axis < dim, "coordinate axis out of range");
        ScalarField { ast: ExprAst::Var(axis), dim }
    }

    pub fn ast(&self) -> &ExprAst {
        &self.ast
    }

    pub fn into_ast(self) -> ExprAst {
        self.ast
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_constant(&self) -> bool {
        self.ast.is_constant()
    }

    /// The same expression viewed as a field of `dim` coordinates.
    pub fn with_dim(&self, dim: usize) -> Result<ScalarField, ParseError> {
        ScalarField::from_ast(self.ast.clone(), dim)
    }

    fn check_point(&self, p: &[f64]) -> Result<(), EvalError> {
        if p.len() != self.dim {
            return Err(EvalError::DimensionMismatch { expected: self.dim, found: p.len() });
        }
        Ok(())
    }

    pub fn eval(&self, p: &[f64]) -> Result<f64, EvalError> {
        self.check_point(p)?;
        eval::eval(&self.ast, p)
    }

    /// Value and directional derivative along `dir`.
    pub fn eval_directional(&self, p: &[f64], dir: &[f64]) -> Result<Dual, EvalError> {
        self.check_point(p)?;
        self.check_point(dir)?;
        let mut vars = [Dual::constant(0.0); MAX_STACK_VARS];
        if p.len() <= MAX_STACK_VARS {
            for (slot, (&x, &d)) in vars.iter_mut().zip(p.iter().zip(dir)) {
                *slot = Dual::new(x, d);
            }
            eval::eval(&self.ast, &vars[..p.len()])
        } else {
            let vars: Vec<Dual> = p.iter().zip(dir).map(|(&x, &d)| Dual::new(x, d)).collect();
            eval::eval(&self.ast, &vars)
        }
    }

    /// Exact partial derivative along axis `i` (forward mode).
    pub fn partial(&self, p: &[f64], i: usize) -> Result<f64, EvalError> {
        self.value_and_partial(p, i).map(|d| d.eps)
    }

    pub fn value_and_partial(&self, p: &[f64], i: usize) -> Result<Dual, EvalError> {
        self.check_point(p)?;
        if i >= self.dim {
            return Err(EvalError::AxisOutOfRange { axis: i, dim: self.dim });
        }
        let mut vars = [Dual::constant(0.0); MAX_STACK_VARS];
        if p.len() <= MAX_STACK_VARS {
            for (k, (slot, &x)) in vars.iter_mut().zip(p).enumerate() {
                *slot = if k == i { Dual::variable(x) } else { Dual::constant(x) };
            }
            eval::eval(&self.ast, &vars[..p.len()])
        } else {
            let vars: Vec<Dual> = p
                .iter()
                .enumerate()
                .map(|(k, &x)| if k == i { Dual::variable(x) } else { Dual::constant(x) })
                .collect();
            eval::eval(&self.ast, &vars)
        }
    }

    /// Value plus the full gradient written into `grad`.
    pub fn value_and_gradient(&self, p: &[f64], grad: &mut [f64]) -> Result<f64, EvalError> {
        self.check_point(p)?;
        if self.ast.is_constant() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            return eval::eval(&self.ast, p);
        }
        let mut value = 0.0;
        for (i, g) in grad.iter_mut().enumerate().take(self.dim) {
            let d = self.value_and_partial(p, i)?;
            *g = d.eps;
            value = d.re;
        }
        Ok(value)
    }

    /// Symbolic derivative along axis `i` as a new field.
    pub fn derivative(&self, i: usize) -> ScalarField {
        ScalarField { ast: diff::derivative(&self.ast, i), dim: self.dim }
    }
}

const MAX_STACK_VARS: usize = 8;

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parses_and_evaluates_basic_examples() {
        let f = parse_field("x1^2 + sin(x2)", 2).unwrap();
        assert_eq!(f.eval(&[1.0, 0.0]).unwrap(), 1.0);
        let g = parse_field("x1*x2", 2).unwrap();
        assert_eq!(g.partial(&[2.0, 3.0], 0).unwrap(), 3.0);
        assert_eq!(parse_field("0.5", 3).unwrap().eval(&[1.0, 2.0, 3.0]).unwrap(), 0.5);
        assert_eq!(parse_field("exp(x1)", 1).unwrap().eval(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn syntax_error_reports_offset() {
        let err = parse_field("x1 +", 1).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 4, .. }), "{err:?}");
        assert_eq!(err.offset(), Some(4));
    }

    #[test]
    fn identifier_and_arity_errors() {
        assert!(matches!(parse_field("foo + 1", 1), Err(ParseError::UnknownIdentifier { offset: 0, .. })));
        assert!(matches!(parse_field("bar(x1)", 1), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse_field("sin(x1, x1)", 1), Err(ParseError::Arity { found: 2, .. })));
        assert!(matches!(parse_field("cos()", 1), Err(ParseError::Arity { found: 0, .. })));
        assert!(matches!(parse_field("x3", 2), Err(ParseError::VariableOutOfRange { dim: 2, .. })));
        assert!(matches!(parse_field("z", 2), Err(ParseError::VariableOutOfRange { .. })));
        assert!(matches!(parse_field("x0", 2), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse_field("y", 4), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse_field("  ", 1), Err(ParseError::Empty)));
        assert!(matches!(parse_field("x1", 0), Err(ParseError::InvalidDimension)));
        assert!(matches!(parse_field("x1 # 2", 1), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_field("(x1", 1), Err(ParseError::Syntax { offset: 3, .. })));
    }

    #[test]
    fn aliases_map_to_indexed_variables() {
        let a = parse_field("x*y + z", 3).unwrap();
        let b = parse_field("x1*x2 + x3", 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn power_is_right_associative_and_binds_tighter_than_unary_minus() {
        let f = parse_field("2^3^2", 1).unwrap();
        assert_eq!(f.eval(&[0.0]).unwrap(), 512.0);
        let g = parse_field("-x1^2", 1).unwrap();
        assert_eq!(g.eval(&[3.0]).unwrap(), -9.0);
        let h = parse_field("(-x1)^2", 1).unwrap();
        assert_eq!(h.eval(&[3.0]).unwrap(), 9.0);
        assert_eq!(parse_field("2^-1", 1).unwrap().eval(&[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let f = parse_field("1 + sqrt(x1)", 1).unwrap();
        match f.eval(&[-1.0]) {
            Err(EvalError::Domain { expr, .. }) => assert_eq!(expr, "sqrt(x1)"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_field("log(x1)", 1).unwrap().eval(&[0.0]).is_err());
        assert!(parse_field("x1^0.5", 1).unwrap().eval(&[-2.0]).is_err());
        assert_eq!(parse_field("x1^3", 1).unwrap().eval(&[-2.0]).unwrap(), -8.0);
        assert!(parse_field("1/x1", 1).unwrap().eval(&[0.0]).is_err());
        assert!(parse_field("x1", 2).unwrap().eval(&[0.0]).is_err());
    }

    #[test]
    fn partial_examples() {
        assert_eq!(parse_field("x1^3", 1).unwrap().partial(&[2.0], 0).unwrap(), 12.0);
        assert_eq!(parse_field("sin(x1)", 1).unwrap().partial(&[0.0], 0).unwrap(), 1.0);
        assert_eq!(parse_field("x2", 2).unwrap().partial(&[5.0, 7.0], 0).unwrap(), 0.0);
        // sqrt(x2) at x2 = 0 is fine along x1
        assert_eq!(parse_field("x1 + sqrt(x2)", 2).unwrap().partial(&[1.0, 0.0], 0).unwrap(), 1.0);
        assert!(parse_field("sqrt(x1)", 1).unwrap().partial(&[0.0], 0).is_err());
        assert!(parse_field("x1", 1).unwrap().partial(&[0.0], 1).is_err());
    }

    #[test]
    fn symbolic_derivative_matches_forward_mode() {
        let f = parse_field("x1^2*sin(x2) + exp(x1*x2)/(1 + x2^2) + sqrt(2 + x1) - tanh(x2)^3", 2).unwrap();
        let p = [0.7, -0.3];
        for i in 0..2 {
            let sym = f.derivative(i).eval(&p).unwrap();
            let fwd = f.partial(&p, i).unwrap();
            assert!((sym - fwd).abs() < 1e-13, "axis {i}: {sym} vs {fwd}");
        }
    }

    #[test]
    fn printing_round_trips() {
        for src in ["x1 - (x2 - 1)", "(x1^2)^3", "-(-x1)", "x1/(x2*3)", "2*-x1", "abs(x1 - x2)^-0.5"] {
            let f = parse_field(src, 2).unwrap();
            let again = parse_field(&f.to_string(), 2).unwrap();
            assert_eq!(f, again, "{src} -> {f}");
        }
    }

    #[test]
    fn pi_constant() {
        let f = parse_field("cos(pi)", 1).unwrap();
        assert_eq!(f.eval(&[0.0]).unwrap(), -1.0);
    }
}
