use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::math;

/// Forward-mode dual number `re + eps·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub const fn new(re: f64, eps: f64) -> Dual {
        Dual { re, eps }
    }

    pub const fn constant(re: f64) -> Dual {
        Dual { re, eps: 0.0 }
    }

    pub const fn variable(re: f64) -> Dual {
        Dual { re, eps: 1.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.eps * o.re + self.re * o.eps)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.re / o.re;
        Dual::new(q, (self.eps - q * o.eps) / o.re)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}

/// Arithmetic the evaluator needs; implemented for plain `f64` and [`Dual`].
pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn lift(v: f64) -> Self;
    fn re(self) -> f64;
    /// False when the value carries a nonzero derivative.
    fn is_flat(self) -> bool;
    fn is_finite(self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn tanh(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    /// `self^e` for a positive base.
    fn powf(self, e: Self) -> Self;
}

impl Scalar for f64 {
    fn lift(v: f64) -> f64 {
        v
    }
    fn re(self) -> f64 {
        self
    }
    fn is_flat(self) -> bool {
        true
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn sin(self) -> f64 {
        math::sin(self)
    }
    fn cos(self) -> f64 {
        math::cos(self)
    }
    fn exp(self) -> f64 {
        math::exp(self)
    }
    fn ln(self) -> f64 {
        math::ln(self)
    }
    fn sqrt(self) -> f64 {
        math::sqrt(self)
    }
    fn tanh(self) -> f64 {
        math::tanh(self)
    }
    fn abs(self) -> f64 {
        math::abs(self)
    }
    fn powi(self, n: i32) -> f64 {
        math::powi(self, n)
    }
    fn powf(self, e: f64) -> f64 {
        math::pow(self, e)
    }
}

impl Scalar for Dual {
    fn lift(v: f64) -> Dual {
        Dual::constant(v)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn is_flat(self) -> bool {
        self.eps == 0.0
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.eps.is_finite()
    }
    fn sin(self) -> Dual {
        Dual::new(math::sin(self.re), self.eps * math::cos(self.re))
    }
    fn cos(self) -> Dual {
        Dual::new(math::cos(self.re), -self.eps * math::sin(self.re))
    }
    fn exp(self) -> Dual {
        let e = math::exp(self.re);
        Dual::new(e, self.eps * e)
    }
    fn ln(self) -> Dual {
        Dual::new(math::ln(self.re), self.eps / self.re)
    }
    fn sqrt(self) -> Dual {
        let s = math::sqrt(self.re);
        let d = if self.eps == 0.0 { 0.0 } else { self.eps / (2.0 * s) };
        Dual::new(s, d)
    }
    fn tanh(self) -> Dual {
        let t = math::tanh(self.re);
        Dual::new(t, self.eps * (1.0 - t * t))
    }
    fn abs(self) -> Dual {
        let sign = if self.re > 0.0 {
            1.0
        } else if self.re < 0.0 {
            -1.0
        } else {
            0.0
        };
        Dual::new(math::abs(self.re), self.eps * sign)
    }
    fn powi(self, n: i32) -> Dual {
        if n == 0 {
            return Dual::constant(1.0);
        }
        Dual::new(math::powi(self.re, n), self.eps * f64::from(n) * math::powi(self.re, n - 1))
    }
    fn powf(self, e: Dual) -> Dual {
        let v = math::pow(self.re, e.re);
        if self.eps == 0.0 && e.eps == 0.0 {
            return Dual::constant(v);
        }
        Dual::new(v, v * (e.eps * math::ln(self.re) + e.re * self.eps / self.re))
    }
}
