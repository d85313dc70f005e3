use std::fmt;

use num_complex::Complex64;

/// Syntax tree of a holomorphic expression in the single variable `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum HoloExpr {
    Var,
    Const(Complex64),
    Add(Box<HoloExpr>, Box<HoloExpr>),
    Sub(Box<HoloExpr>, Box<HoloExpr>),
    Mul(Box<HoloExpr>, Box<HoloExpr>),
    Div(Box<HoloExpr>, Box<HoloExpr>),
    Neg(Box<HoloExpr>),
    Pow(Box<HoloExpr>, i32),
    Exp(Box<HoloExpr>),
    /// `(a w + b) / (c w + d)` applied to the inner expression `w`.
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
        arg: Box<HoloExpr>,
    },
}

impl HoloExpr {
    pub fn constant(re: f64, im: f64) -> Self {
        HoloExpr::Const(Complex64::new(re, im))
    }

    pub fn pow(base: HoloExpr, n: i32) -> Self {
        HoloExpr::Pow(Box::new(base), n)
    }

    pub fn mul(a: HoloExpr, b: HoloExpr) -> Self {
        HoloExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64, arg: HoloExpr) -> Self {
        HoloExpr::Mobius {
            a,
            b,
            c,
            d,
            arg: Box::new(arg),
        }
    }

    /// Whether the expression depends on `z` at all.
    pub fn has_var(&self) -> bool {
        match self {
            HoloExpr::Var => true,
            HoloExpr::Const(_) => false,
            HoloExpr::Add(a, b)
            | HoloExpr::Sub(a, b)
            | HoloExpr::Mul(a, b)
            | HoloExpr::Div(a, b) => a.has_var() || b.has_var(),
            HoloExpr::Neg(a) | HoloExpr::Pow(a, _) | HoloExpr::Exp(a) => a.has_var(),
            HoloExpr::Mobius { arg, .. } => arg.has_var(),
        }
    }

    /// Composition `self ∘ inner`: every occurrence of `z` is replaced by `inner`.
    pub fn substitute(&self, inner: &HoloExpr) -> HoloExpr {
        let sub = |e: &HoloExpr| Box::new(e.substitute(inner));
        match self {
            HoloExpr::Var => inner.clone(),
            HoloExpr::Const(c) => HoloExpr::Const(*c),
            HoloExpr::Add(a, b) => HoloExpr::Add(sub(a), sub(b)),
            HoloExpr::Sub(a, b) => HoloExpr::Sub(sub(a), sub(b)),
            HoloExpr::Mul(a, b) => HoloExpr::Mul(sub(a), sub(b)),
            HoloExpr::Div(a, b) => HoloExpr::Div(sub(a), sub(b)),
            HoloExpr::Neg(a) => HoloExpr::Neg(sub(a)),
            HoloExpr::Pow(a, n) => HoloExpr::Pow(sub(a), *n),
            HoloExpr::Exp(a) => HoloExpr::Exp(sub(a)),
            HoloExpr::Mobius { a, b, c, d, arg } => HoloExpr::Mobius {
                a: *a,
                b: *b,
                c: *c,
                d: *d,
                arg: sub(arg),
            },
        }
    }
}

fn fmt_real(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if x < 0.0 {
        write!(f, "(-{})", -x)
    } else {
        write!(f, "{}", x.abs())
    }
}

/// Prints a literal so that re-parsing yields a tree that prints identically.
pub(crate) fn fmt_complex(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (re, im) = (c.re, c.im);
    if im == 0.0 {
        return fmt_real(re, f);
    }
    if re == 0.0 {
        return if im < 0.0 {
            write!(f, "(-{}i)", -im)
        } else {
            write!(f, "{}i", im)
        };
    }
    write!(f, "(")?;
    fmt_real(re, f)?;
    if im < 0.0 {
        write!(f, " - {}i)", -im)
    } else {
        write!(f, " + {}i)", im)
    }
}

struct Lit(Complex64);

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(self.0, f)
    }
}

/// Canonical, fully parenthesised form.
impl fmt::Display for HoloExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HoloExpr::Var => write!(f, "z"),
            HoloExpr::Const(c) => fmt_complex(*c, f),
            HoloExpr::Add(a, b) => write!(f, "({a} + {b})"),
            HoloExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            HoloExpr::Mul(a, b) => write!(f, "({a}*{b})"),
            HoloExpr::Div(a, b) => write!(f, "({a}/{b})"),
            HoloExpr::Neg(a) => write!(f, "(-{a})"),
            HoloExpr::Pow(a, n) => write!(f, "({a}^{n})"),
            HoloExpr::Exp(a) => write!(f, "exp({a})"),
            HoloExpr::Mobius { a, b, c, d, arg } => write!(
                f,
                "mobius({}, {}, {}, {}, {arg})",
                Lit(*a),
                Lit(*b),
                Lit(*c),
                Lit(*d)
            ),
        }
    }
}
