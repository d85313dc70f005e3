use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::expr::HoloExpr;
use crate::error::{Error, Result};

/// Relative pole threshold: `|denominator| < POLE_EPS·(1 + |numerator|)`.
pub const POLE_EPS: f64 = 1e-12;

/// Value, first and second complex derivative of a holomorphic map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexJet2 {
    pub f0: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
}

impl ComplexJet2 {
    pub fn constant(c: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            f0: c,
            f1: zero,
            f2: zero,
        }
    }

    pub fn variable(z: Complex64) -> Self {
        Self {
            f0: z,
            f1: Complex64::new(1.0, 0.0),
            f2: Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.f0.is_finite() && self.f1.is_finite() && self.f2.is_finite()
    }

    fn checked(self) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::Overflow)
        }
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self {
            f0: self.f0 * k,
            f1: self.f1 * k,
            f2: self.f2 * k,
        }
    }

    pub fn try_div(self, den: ComplexJet2) -> Result<Self> {
        if den.f0.norm() < POLE_EPS * (1.0 + self.f0.norm()) {
            return Err(Error::PoleAtPoint);
        }
        let q0 = self.f0 / den.f0;
        let q1 = (self.f1 - q0 * den.f1) / den.f0;
        let q2 = (self.f2 - q1 * den.f1 * 2.0 - q0 * den.f2) / den.f0;
        Ok(Self {
            f0: q0,
            f1: q1,
            f2: q2,
        })
    }

    pub fn powi(self, n: i32) -> Result<Self> {
        match n {
            0 => Ok(Self::constant(Complex64::new(1.0, 0.0))),
            1 => Ok(self),
            n if n > 1 => {
                let nf = n as f64;
                let g0 = self.f0;
                let pm1 = g0.powi(n - 1);
                let pm2 = g0.powi(n - 2);
                Ok(Self {
                    f0: pm1 * g0,
                    f1: pm1 * self.f1 * nf,
                    f2: pm2 * self.f1 * self.f1 * (nf * (nf - 1.0)) + pm1 * self.f2 * nf,
                })
            }
            n => {
                if self.f0.norm() < POLE_EPS {
                    return Err(Error::PoleAtPoint);
                }
                let one = Self::constant(Complex64::new(1.0, 0.0));
                one.try_div(self.powi(n.checked_neg().ok_or(Error::Overflow)?)?)
            }
        }
    }

    pub fn exp(self) -> Self {
        let e = self.f0.exp();
        Self {
            f0: e,
            f1: e * self.f1,
            f2: e * (self.f2 + self.f1 * self.f1),
        }
    }
}

impl Add for ComplexJet2 {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self {
            f0: self.f0 + b.f0,
            f1: self.f1 + b.f1,
            f2: self.f2 + b.f2,
        }
    }
}

impl Sub for ComplexJet2 {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self {
            f0: self.f0 - b.f0,
            f1: self.f1 - b.f1,
            f2: self.f2 - b.f2,
        }
    }
}

impl Mul for ComplexJet2 {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        Self {
            f0: self.f0 * b.f0,
            f1: self.f1 * b.f0 + self.f0 * b.f1,
            f2: self.f2 * b.f0 + self.f1 * b.f1 * 2.0 + self.f0 * b.f2,
        }
    }
}

impl Neg for ComplexJet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            f0: -self.f0,
            f1: -self.f1,
            f2: -self.f2,
        }
    }
}

/// Evaluates `(h(z), h'(z), h''(z))` by forward propagation of 2-jets.
pub fn eval_jet2(expr: &HoloExpr, z: Complex64) -> Result<ComplexJet2> {
    let jet = match expr {
        HoloExpr::Var => ComplexJet2::variable(z),
        HoloExpr::Const(c) => ComplexJet2::constant(*c),
        HoloExpr::Add(a, b) => eval_jet2(a, z)? + eval_jet2(b, z)?,
        HoloExpr::Sub(a, b) => eval_jet2(a, z)? - eval_jet2(b, z)?,
        HoloExpr::Mul(a, b) => eval_jet2(a, z)? * eval_jet2(b, z)?,
        HoloExpr::Div(a, b) => eval_jet2(a, z)?.try_div(eval_jet2(b, z)?)?,
        HoloExpr::Neg(a) => -eval_jet2(a, z)?,
        HoloExpr::Pow(a, n) => eval_jet2(a, z)?.powi(*n)?,
        HoloExpr::Exp(a) => eval_jet2(a, z)?.exp(),
        HoloExpr::Mobius { a, b, c, d, arg } => {
            let w = eval_jet2(arg, z)?;
            let num = w.scale(*a) + ComplexJet2::constant(*b);
            let den = w.scale(*c) + ComplexJet2::constant(*d);
            num.try_div(den)?
        }
    };
    jet.checked()
}

/// Value only.
pub fn eval(expr: &HoloExpr, z: Complex64) -> Result<Complex64> {
    eval_jet2(expr, z).map(|j| j.f0)
}
