//! Second-order forward-mode differentiation in three variables.
//!
//! A [`Jet2`] carries a value together with its exact gradient and Hessian
//! with respect to `(x, y, z)`. Every elementary function propagates all
//! three through the chain rule
//! `H(f∘g) = f''(g) ∇g ∇gᵀ + f'(g) H(g)`, so a field written once against
//! [`Scalar`] yields its value, Jacobian and second derivatives without
//! truncation error.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed to evaluate a velocity or pressure expression.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    fn value(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
}

/// `v^p` using an integer power when `p` is integral, which keeps negative
/// bases valid for `x^2` and friends.
pub(crate) fn real_pow(v: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        v.powi(p as i32)
    } else {
        v.powf(p)
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        if self > 0.0 {
            f64::ln(self)
        } else {
            f64::NAN
        }
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        real_pow(self, p)
    }
}

/// Value, gradient and Hessian of a scalar function of `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl Jet2 {
    pub fn constant(c: f64) -> Self {
        Jet2 {
            v: c,
            g: [0.0; 3],
            h: [[0.0; 3]; 3],
        }
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn variable(i: usize, value: f64) -> Self {
        let mut j = Jet2::constant(value);
        j.g[i] = 1.0;
        j
    }

    /// Applies a scalar function with known first and second derivatives.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let mut out = Jet2::constant(f);
        for i in 0..3 {
            out.g[i] = df * self.g[i];
            for j in 0..3 {
                out.h[i][j] = d2f * (self.g[i] * self.g[j]) + df * self.h[i][j];
            }
        }
        out
    }

    fn scale(self, s: f64) -> Self {
        let mut out = self;
        out.v *= s;
        out.g.iter_mut().for_each(|g| *g *= s);
        out.h.iter_mut().flatten().for_each(|h| *h *= s);
        out
    }

    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        let mut out = self;
        out.v += o.v;
        for i in 0..3 {
            out.g[i] += o.g[i];
            for j in 0..3 {
                out.h[i][j] += o.h[i][j];
            }
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.v * o.v);
        for i in 0..3 {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for j in 0..3 {
                // the cross term is written symmetrically so h[i][j] == h[j][i] bitwise
                out.h[i][j] = self.h[i][j] * o.v
                    + self.v * o.h[i][j]
                    + (self.g[i] * o.g[j] + self.g[j] * o.g[i]);
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Scalar for Jet2 {
    fn constant(c: f64) -> Self {
        Jet2::constant(c)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.g.iter().all(|g| g.is_finite())
            && self.h.iter().flatten().all(|h| h.is_finite())
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }
    fn sinh(self) -> Self {
        let s = self.v.sinh();
        self.chain(s, self.v.cosh(), s)
    }
    fn cosh(self) -> Self {
        let c = self.v.cosh();
        self.chain(c, self.v.sinh(), c)
    }
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        if self.v <= 0.0 {
            return Jet2::constant(f64::NAN);
        }
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let d1 = 0.5 / s;
        self.chain(s, d1, -0.5 * d1 / self.v)
    }
    fn powf(self, p: f64) -> Self {
        let v = self.v;
        let f = real_pow(v, p);
        let d1 = if p == 0.0 { 0.0 } else { p * real_pow(v, p - 1.0) };
        let d2 = if p == 0.0 || p == 1.0 {
            0.0
        } else {
            p * (p - 1.0) * real_pow(v, p - 2.0)
        };
        self.chain(f, d1, d2)
    }
}
