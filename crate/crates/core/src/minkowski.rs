//! Coordinates in the Minkowski spaces R^{4,1} and R^{4,2}.
//!
//! Vectors are stored against the fixed basis `(o, ∞, q, e1, e2)` of R^{4,1},
//! extended by a timelike `p` for R^{4,2}. The pair `(o, ∞)` is
//! pseudo-orthonormal, `(o, ∞) = -1`, `q` is a unit spacelike vector and
//! `e1, e2` span the plane identified with ℂ. Euclidean 3-space is
//! `⟨q⟩ ⊕ ℂ`; a [`Point3`] stores its q-coordinate first.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for accepting a vector as null: `|(v,v)| ≤ NULL_TOL·‖v‖²`.
pub const NULL_TOL: f64 = 1e-9;
/// Lower bound on `|r|` accepted by [`sphere_lift`].
pub const RADIUS_EPS: f64 = 1e-14;
/// Relative bound on `|(v,∞)|` below which a null vector is the point at infinity.
pub const INFINITY_EPS: f64 = 1e-12;
/// Relative bound on the Gram determinant for [`null_directions_in_plane`].
pub const PLANE_EPS: f64 = 1e-12;

/// A point of Euclidean 3-space `⟨q⟩ ⊕ ℂ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub height: f64,
    pub u: f64,
    pub v: f64,
}

impl Point3 {
    pub const fn new(height: f64, u: f64, v: f64) -> Self {
        Self { height, u, v }
    }

    pub fn from_height_complex(height: f64, w: Complex64) -> Self {
        Self::new(height, w.re, w.im)
    }

    pub fn planar(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.height * self.height + self.u * self.u + self.v * self.v
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        Point3::new(
            self.height - other.height,
            self.u - other.u,
            self.v - other.v,
        )
        .norm_sqr()
        .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.height.is_finite() && self.u.is_finite() && self.v.is_finite()
    }
}

/// Vector of R^{4,1} in the basis `(o, ∞, q, e1, e2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec41 {
    pub co: f64,
    pub cinf: f64,
    pub cq: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Vec41 {
    pub const ZERO: Vec41 = Vec41::new(0.0, 0.0, 0.0, 0.0, 0.0);
    pub const O: Vec41 = Vec41::new(1.0, 0.0, 0.0, 0.0, 0.0);
    pub const INF: Vec41 = Vec41::new(0.0, 1.0, 0.0, 0.0, 0.0);
    pub const Q: Vec41 = Vec41::new(0.0, 0.0, 1.0, 0.0, 0.0);
    pub const E1: Vec41 = Vec41::new(0.0, 0.0, 0.0, 1.0, 0.0);
    pub const E2: Vec41 = Vec41::new(0.0, 0.0, 0.0, 0.0, 1.0);

    pub const fn new(co: f64, cinf: f64, cq: f64, cx: f64, cy: f64) -> Self {
        Self {
            co,
            cinf,
            cq,
            cx,
            cy,
        }
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.co, self.cinf, self.cq, self.cx, self.cy]
    }

    /// The Minkowski inner product; see [`inner41`].
    pub fn dot(&self, other: &Vec41) -> f64 {
        inner41(self, other)
    }

    /// Euclidean norm of the coordinate tuple (a scale, not a Minkowski quantity).
    pub fn norm_euclid(&self) -> f64 {
        self.to_array().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// The metric-lowered coordinates: `(w, v)` equals the Euclidean dot of
    /// `w.lowered()` with `v`.
    pub fn lowered(&self) -> [f64; 5] {
        [-self.cinf, -self.co, self.cq, self.cx, self.cy]
    }
}

impl Add for Vec41 {
    type Output = Vec41;
    fn add(self, b: Vec41) -> Vec41 {
        Vec41::new(
            self.co + b.co,
            self.cinf + b.cinf,
            self.cq + b.cq,
            self.cx + b.cx,
            self.cy + b.cy,
        )
    }
}

impl Sub for Vec41 {
    type Output = Vec41;
    fn sub(self, b: Vec41) -> Vec41 {
        Vec41::new(
            self.co - b.co,
            self.cinf - b.cinf,
            self.cq - b.cq,
            self.cx - b.cx,
            self.cy - b.cy,
        )
    }
}

impl Mul<f64> for Vec41 {
    type Output = Vec41;
    fn mul(self, k: f64) -> Vec41 {
        Vec41::new(
            self.co * k,
            self.cinf * k,
            self.cq * k,
            self.cx * k,
            self.cy * k,
        )
    }
}

impl Mul<Vec41> for f64 {
    type Output = Vec41;
    fn mul(self, v: Vec41) -> Vec41 {
        v * self
    }
}

impl Div<f64> for Vec41 {
    type Output = Vec41;
    fn div(self, k: f64) -> Vec41 {
        self * (1.0 / k)
    }
}

impl Neg for Vec41 {
    type Output = Vec41;
    fn neg(self) -> Vec41 {
        self * -1.0
    }
}

/// Vector of R^{4,2} = ⟨p⟩ ⊕ R^{4,1} with `(p,p) = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec42 {
    pub cp: f64,
    pub rest: Vec41,
}

impl Vec42 {
    pub const P: Vec42 = Vec42 {
        cp: 1.0,
        rest: Vec41::ZERO,
    };

    pub const fn new(cp: f64, rest: Vec41) -> Self {
        Self { cp, rest }
    }

    /// Coordinates in the order `(o, ∞, q, e1, e2, p)`.
    pub fn to_array(self) -> [f64; 6] {
        let r = self.rest;
        [r.co, r.cinf, r.cq, r.cx, r.cy, self.cp]
    }

    pub fn norm_euclid(&self) -> f64 {
        self.to_array().iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

impl From<Vec41> for Vec42 {
    fn from(v: Vec41) -> Self {
        Vec42::new(0.0, v)
    }
}

impl Add for Vec42 {
    type Output = Vec42;
    fn add(self, b: Vec42) -> Vec42 {
        Vec42::new(self.cp + b.cp, self.rest + b.rest)
    }
}

impl Sub for Vec42 {
    type Output = Vec42;
    fn sub(self, b: Vec42) -> Vec42 {
        Vec42::new(self.cp - b.cp, self.rest - b.rest)
    }
}

impl Mul<f64> for Vec42 {
    type Output = Vec42;
    fn mul(self, k: f64) -> Vec42 {
        Vec42::new(self.cp * k, self.rest * k)
    }
}

/// `(a,b) = -(a_o b_∞ + a_∞ b_o) + a_q b_q + a_x b_x + a_y b_y`.
pub fn inner41(a: &Vec41, b: &Vec41) -> f64 {
    -(a.co * b.cinf + a.cinf * b.co) + a.cq * b.cq + a.cx * b.cx + a.cy * b.cy
}

/// `(a,b) = -a_p b_p + inner41(a, b)`.
pub fn inner42(a: &Vec42, b: &Vec42) -> f64 {
    -a.cp * b.cp + inner41(&a.rest, &b.rest)
}

/// Parabolic light-cone lift `o + y + |y|²/2 ∞` of a Euclidean point.
pub fn euclidean_lift(y: &Point3) -> Vec41 {
    Vec41::new(1.0, 0.5 * y.norm_sqr(), y.height, y.u, y.v)
}

/// Unit lift `1/r (o + c + (|c|² - r²)/2 ∞)` of the sphere with centre `c`
/// and signed radius `r`. A negative radius reverses the orientation.
pub fn sphere_lift(centre: &Point3, r: f64) -> Result<Vec41> {
    if !(r.abs() > RADIUS_EPS) {
        return Err(Error::ZeroRadius(r));
    }
    let v = Vec41::new(
        1.0,
        0.5 * (centre.norm_sqr() - r * r),
        centre.height,
        centre.u,
        centre.v,
    );
    Ok(v / r)
}

/// Inverse of [`euclidean_lift`] on the projectivised light cone.
pub fn project_null_point(v: &Vec41) -> Result<Point3> {
    let n2 = v.norm_euclid().powi(2);
    let vv = inner41(v, v);
    if vv.abs() > NULL_TOL * n2 {
        return Err(Error::NotNull(vv));
    }
    // (v, ∞) = -co
    if v.co.abs() < INFINITY_EPS * n2.sqrt() || v.co == 0.0 {
        return Err(Error::PointAtInfinity);
    }
    let scale = 1.0 / v.co;
    Ok(Point3::new(v.cq * scale, v.cx * scale, v.cy * scale))
}

/// Returns the two null lines of a plane of signature (1,1), each as a
/// representative of unit coordinate norm.
pub fn null_directions_in_plane(u1: &Vec41, u2: &Vec41) -> Result<(Vec41, Vec41)> {
    let a = inner41(u1, u1);
    let b = inner41(u1, u2);
    let c = inner41(u2, u2);
    let det = a * c - b * b;
    let scale = u1.norm_euclid().powi(2) * u2.norm_euclid().powi(2);
    if !(det < -PLANE_EPS * scale) {
        return Err(Error::DegeneratePlane(det));
    }
    // roots of a α² + 2b αβ + c β² = 0 in homogeneous form, avoiding cancellation
    let disc = (b * b - a * c).sqrt();
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let qq = -(b + sign * disc);
    let n1 = *u1 * qq + *u2 * a;
    let n2 = *u1 * c + *u2 * qq;
    // if a or c vanish one pair degenerates to zero; the basis vector itself is null then
    let pick = |v: Vec41, fallback: Vec41| {
        if v.norm_euclid() > 0.0 {
            v
        } else {
            fallback
        }
    };
    let n1 = pick(n1, *u1);
    let n2 = pick(n2, *u2);
    Ok((n1 / n1.norm_euclid(), n2 / n2.norm_euclid()))
}
