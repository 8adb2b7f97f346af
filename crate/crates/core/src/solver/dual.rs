//! Scalars for residual evaluation: plain `f64` and a forward-mode dual
//! number carrying a fixed-width gradient.
//!
//! A constraint touches at most three primitives of at most five variables
//! each, so [`MAX_LOCAL_VARS`] partials are enough to differentiate any
//! residual in one pass.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const MAX_LOCAL_VARS: usize = 15;

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(v: f64) -> Self;
    fn val(self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan2(self, x: Self) -> Self;

    fn abs(self) -> Self {
        if self.val() < 0.0 {
            -self
        } else {
            self
        }
    }

    fn scale(self, k: f64) -> Self {
        self * Self::cst(k)
    }

    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn val(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn hypot(self, other: Self) -> Self {
        f64::hypot(self, other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; MAX_LOCAL_VARS],
}

impl Dual {
    pub fn constant(v: f64) -> Self {
        Dual {
            v,
            d: [0.0; MAX_LOCAL_VARS],
        }
    }

    /// Seed variable `i` of the local block.
    pub fn variable(v: f64, i: usize) -> Self {
        let mut d = [0.0; MAX_LOCAL_VARS];
        d[i] = 1.0;
        Dual { v, d }
    }

    fn chain(self, v: f64, k: f64) -> Self {
        let mut d = self.d;
        for x in &mut d {
            *x *= k;
        }
        Dual { v, d }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(o.d) {
            *a += b;
        }
        Dual { v: self.v + o.v, d }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        let mut d = self.d;
        for (a, b) in d.iter_mut().zip(o.d) {
            *a -= b;
        }
        Dual { v: self.v - o.v, d }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let mut d = [0.0; MAX_LOCAL_VARS];
        for i in 0..MAX_LOCAL_VARS {
            d[i] = self.d[i] * o.v + o.d[i] * self.v;
        }
        Dual { v: self.v * o.v, d }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        let v = self.v * inv;
        let mut d = [0.0; MAX_LOCAL_VARS];
        for i in 0..MAX_LOCAL_VARS {
            d[i] = (self.d[i] - v * o.d[i]) * inv;
        }
        Dual { v, d }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        self.chain(-self.v, -1.0)
    }
}

impl Scalar for Dual {
    fn cst(v: f64) -> Self {
        Dual::constant(v)
    }
    fn val(self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r)
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn atan2(self, x: Self) -> Self {
        // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
        let den = x.v * x.v + self.v * self.v;
        let mut d = [0.0; MAX_LOCAL_VARS];
        for i in 0..MAX_LOCAL_VARS {
            d[i] = (x.v * self.d[i] - self.v * x.d[i]) / den;
        }
        Dual {
            v: self.v.atan2(x.v),
            d,
        }
    }
    fn scale(self, k: f64) -> Self {
        self.chain(self.v * k, k)
    }
    fn hypot(self, other: Self) -> Self {
        let h = self.v.hypot(other.v);
        let mut d = [0.0; MAX_LOCAL_VARS];
        for i in 0..MAX_LOCAL_VARS {
            d[i] = (self.v * self.d[i] + other.v * other.d[i]) / h;
        }
        Dual { v: h, d }
    }
}
