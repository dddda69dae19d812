use alloc::boxed::Box;
use core::fmt;

/// Elementary functions accepted by the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Tanh,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Expression tree over the coordinates `x1..xn`.
///
/// Variables are stored zero-based: `Var(0)` prints as `x1`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Var(usize),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, Box<ExprAst>),
    Call(Func, Box<ExprAst>),
}

// Binding strength used by both the parser and the printer.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

impl ExprAst {
    fn precedence(&self) -> u8 {
        match self {
            ExprAst::Add(..) | ExprAst::Sub(..) => PREC_SUM,
            ExprAst::Mul(..) | ExprAst::Div(..) => PREC_PRODUCT,
            ExprAst::Neg(_) => PREC_UNARY,
            ExprAst::Pow(..) => PREC_POWER,
            // a negative literal prints in parentheses
            ExprAst::Num(_) | ExprAst::Var(_) | ExprAst::Call(..) => PREC_ATOM,
        }
    }

    /// Largest variable index referenced plus one (0 for constants).
    pub fn arity(&self) -> usize {
        match self {
            ExprAst::Num(_) => 0,
            ExprAst::Var(i) => i + 1,
            ExprAst::Neg(a) | ExprAst::Call(_, a) => a.arity(),
            ExprAst::Add(a, b)
            | ExprAst::Sub(a, b)
            | ExprAst::Mul(a, b)
            | ExprAst::Div(a, b)
            | ExprAst::Pow(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.arity() == 0
    }

    pub fn node_count(&self) -> usize {
        match self {
            ExprAst::Num(_) | ExprAst::Var(_) => 1,
            ExprAst::Neg(a) | ExprAst::Call(_, a) => 1 + a.node_count(),
            ExprAst::Add(a, b)
            | ExprAst::Sub(a, b)
            | ExprAst::Mul(a, b)
            | ExprAst::Div(a, b)
            | ExprAst::Pow(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            ExprAst::Num(v) => Some(*v),
            _ => None,
        }
    }

    // Builders with trivial folding of 0 and 1. They keep generated trees
    // (derivatives, metric conversions) from growing needlessly.

    pub fn num(v: f64) -> ExprAst {
        ExprAst::Num(v)
    }

    pub fn var(i: usize) -> ExprAst {
        ExprAst::Var(i)
    }

    pub fn neg(a: ExprAst) -> ExprAst {
        match a {
            ExprAst::Num(v) if v == 0.0 => ExprAst::Num(0.0),
            ExprAst::Neg(inner) => *inner,
            a => ExprAst::Neg(Box::new(a)),
        }
    }

    pub fn add(a: ExprAst, b: ExprAst) -> ExprAst {
        match (a.as_num(), b.as_num()) {
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => ExprAst::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: ExprAst, b: ExprAst) -> ExprAst {
        match (a.as_num(), b.as_num()) {
            (_, Some(y)) if y == 0.0 => a,
            (Some(x), _) if x == 0.0 => ExprAst::neg(b),
            _ => ExprAst::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: ExprAst, b: ExprAst) -> ExprAst {
        match (a.as_num(), b.as_num()) {
            (Some(x), _) if x == 0.0 => ExprAst::Num(0.0),
            (_, Some(y)) if y == 0.0 => ExprAst::Num(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            _ => ExprAst::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: ExprAst, b: ExprAst) -> ExprAst {
        match (a.as_num(), b.as_num()) {
            (Some(x), _) if x == 0.0 => ExprAst::Num(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => ExprAst::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: ExprAst, b: ExprAst) -> ExprAst {
        match b.as_num() {
            Some(y) if y == 1.0 => a,
            Some(y) if y == 0.0 => ExprAst::Num(1.0),
            _ => ExprAst::Pow(Box::new(a), Box::new(b)),
        }
    }

    pub fn call(f: Func, a: ExprAst) -> ExprAst {
        ExprAst::Call(f, Box::new(a))
    }

    /// Sum of terms, `0` when empty.
    pub fn sum<I: IntoIterator<Item = ExprAst>>(terms: I) -> ExprAst {
        terms
            .into_iter()
            .fold(ExprAst::Num(0.0), ExprAst::add)
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints with the minimal parentheses needed for the parser to rebuild the
/// same tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Num(v) => {
                if v.is_sign_negative() {
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            ExprAst::Var(i) => write!(f, "x{}", i + 1),
            ExprAst::Neg(a) => {
                f.write_str("-")?;
                match **a {
                    // `-3` would read back as a negative literal
                    ExprAst::Num(v) if !v.is_sign_negative() => write!(f, "({v:?})"),
                    _ => a.fmt_child(f, PREC_UNARY),
                }
            }
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) => {
                a.fmt_child(f, PREC_SUM)?;
                f.write_str(if matches!(self, ExprAst::Add(..)) { " + " } else { " - " })?;
                b.fmt_child(f, PREC_PRODUCT)
            }
            ExprAst::Mul(a, b) | ExprAst::Div(a, b) => {
                a.fmt_child(f, PREC_PRODUCT)?;
                f.write_str(if matches!(self, ExprAst::Mul(..)) { "*" } else { "/" })?;
                b.fmt_child(f, PREC_UNARY)
            }
            ExprAst::Pow(a, b) => {
                a.fmt_child(f, PREC_ATOM)?;
                f.write_str("^")?;
                b.fmt_child(f, PREC_UNARY)
            }
            ExprAst::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
