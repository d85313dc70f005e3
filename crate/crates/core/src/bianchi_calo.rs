//! Integration-free construction of Bryant-type linear Weingarten surfaces.
//!
//! Given a holomorphic hyperbolic Gauss map `h` and a parameter `μ`, the
//! horospheres with Euclidean centre `(r, h(z))` and radius
//! `r = (1 - μ|z|²)|h'(z)|/2` form a congruence whose second envelope is the
//! surface. Everything is pointwise: the congruence lift `s` and its partials
//! come from the 2-jet of `h`, and the envelope is the second null line of the
//! normal plane `span{s, s_x, s_y}^⊥`, the first one being `h + ... = s + q`.
//!
//! Half-space coordinates `(height, ℂ)` measure height along `-q`, so that a
//! horosphere of radius `r > 0` sits above the ideal plane at height `r`.

use nalgebra::{Matrix3, Matrix5, Vector3, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::holomorphic::{eval_jet2, ComplexJet2, HoloExpr};
use crate::meshio::GridSpec;
use crate::minkowski::{inner41, null_directions_in_plane, project_null_point, Point3, Vec41};

/// Smallest-to-largest singular value ratio below which `s` fails to immerse.
pub const RANK_TOL: f64 = 1e-8;
/// Scale of the degenerate-radius band, `|r| <= R_EPS·(|h'| + 1)`.
pub const R_EPS: f64 = 1e-6;
/// Bound on `|(f₀, q)|` for a unit-norm null direction `f₀`.
pub const IDEAL_EPS: f64 = 1e-10;

/// Input of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BCData {
    pub h: HoloExpr,
    pub mu: f64,
    pub domain: GridSpec,
    /// Multiplies the radius function. Anything but 1 breaks the construction
    /// and exists to exercise the failure direction of the checks.
    pub r_scale: f64,
}

impl BCData {
    pub fn new(h: HoloExpr, mu: f64, domain: GridSpec) -> Self {
        Self {
            h,
            mu,
            domain,
            r_scale: 1.0,
        }
    }

    pub fn with_r_scale(mut self, k: f64) -> Self {
        self.r_scale = k;
        self
    }

    pub fn jet(&self, z: Complex64) -> Result<ComplexJet2> {
        eval_jet2(&self.h, z)
    }

    pub fn radius_at(&self, z: Complex64) -> Result<f64> {
        Ok(self.r_scale * radius(z, self.mu, self.jet(z)?.f1))
    }
}

/// Point of the congruence with its lift and analytic first partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSample {
    pub z: Complex64,
    pub r: f64,
    pub centre: Point3,
    pub s: Vec41,
    pub s_x: Vec41,
    pub s_y: Vec41,
    pub jet: ComplexJet2,
}

impl SphereSample {
    /// Lift `s + q` of the ideal envelope point `h(z)`.
    pub fn hlift(&self) -> Vec41 {
        self.s + Vec41::Q
    }
}

/// Point of the second envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSample {
    pub z: Complex64,
    /// Null lift normalised to `(f, q) = -1`.
    pub f: Vec41,
    /// Position in half-space coordinates.
    pub position: Point3,
    /// Tangent plane map `s - f`.
    pub t: Vec41,
    pub hlift: Vec41,
    /// Sine of the angle between the discarded null direction and `s + q`.
    pub discard_angle: f64,
}

/// `(1 - μ|z|²)|h'|/2`; zero or negative values are returned as is.
pub fn radius(z: Complex64, mu: f64, h1: Complex64) -> f64 {
    (1.0 - mu * z.norm_sqr()) * h1.norm() / 2.0
}

/// Euclidean centre `(r, h(z))` in half-space coordinates.
pub fn centre(z: Complex64, data: &BCData) -> Result<Point3> {
    let jet = data.jet(z)?;
    let r = data.r_scale * radius(z, data.mu, jet.f1);
    Ok(Point3::from_height_complex(r, jet.f0))
}

/// Flips between half-space coordinates and the q-oriented Euclidean
/// coordinates of the light-cone model (an involution).
pub fn to_half_space(p: Point3) -> Point3 {
    Point3::new(-p.height, p.u, p.v)
}

/// Parabolic lift `o + w + |w|²/2 ∞` of a point of the ideal plane.
fn boundary_lift(w: Complex64) -> Vec41 {
    Vec41::new(1.0, 0.5 * w.norm_sqr(), 0.0, w.re, w.im)
}

/// `s = 1/r (o + h - r q + |h|²/2 ∞)` with partials from the jet of `h`.
pub fn horosphere_lift(z: Complex64, data: &BCData) -> Result<SphereSample> {
    let jet = data.jet(z)?;
    let h1 = jet.f1;
    let abs_h1 = h1.norm();
    let conf = 1.0 - data.mu * z.norm_sqr();
    let r = data.r_scale * conf * abs_h1 / 2.0;
    if !(r.abs() > R_EPS * (abs_h1 + 1.0)) {
        return Err(Error::DegenerateSphere(r));
    }
    // ∂|h'| = |h'|·(Re, -Im)(h''/h'), nonzero h' guaranteed by the band above
    let log_deriv = jet.f2 / h1;
    let r_x = data.r_scale * (-data.mu * z.re * abs_h1 + 0.5 * conf * abs_h1 * log_deriv.re);
    let r_y = data.r_scale * (-data.mu * z.im * abs_h1 - 0.5 * conf * abs_h1 * log_deriv.im);

    let lift = boundary_lift(jet.f0);
    let s = lift / r - Vec41::Q;
    let lift_d = |dh: Complex64| Vec41::new(0.0, (jet.f0.conj() * dh).re, 0.0, dh.re, dh.im);
    let s_x = lift_d(h1) / r - lift * (r_x / (r * r));
    let s_y = lift_d(h1 * Complex64::i()) / r - lift * (r_y / (r * r));

    Ok(SphereSample {
        z,
        r,
        centre: Point3::from_height_complex(r, jet.f0),
        s,
        s_x,
        s_y,
        jet,
    })
}

/// Central-difference partials of `s`, for cross-checking the analytic ones.
pub fn horosphere_partials_fd(z: Complex64, data: &BCData, step: f64) -> Result<(Vec41, Vec41)> {
    let at = |dz: Complex64| horosphere_lift(z + dz, data).map(|x| x.s);
    let dx = Complex64::new(step, 0.0);
    let dy = Complex64::new(0.0, step);
    let s_x = (at(dx)? - at(-dx)?) / (2.0 * step);
    let s_y = (at(dy)? - at(-dy)?) / (2.0 * step);
    Ok((s_x, s_y))
}

fn coords_dot(a: &Vec41, b: &Vec41) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| x * y)
        .sum()
}

/// Sine of the coordinate angle between two lines, as the norm of the
/// rejection of one unit vector from the other (accurate for small angles).
fn line_sine(a: &Vec41, b: &Vec41) -> f64 {
    let a = *a / a.norm_euclid();
    let b = *b / b.norm_euclid();
    (a - b * coords_dot(&a, &b)).norm_euclid()
}

/// One step of iterative refinement of the SVD null direction: project out
/// the components along `s, s_x, s_y`, then restore nullness by sliding along
/// `hlift`, which is null, orthogonal to all three and to `q`, and rescale to
/// `(f, q) = -1`.
fn refine_null_normal(f: Vec41, sample: &SphereSample, hlift: &Vec41) -> Vec41 {
    let span = [sample.s, sample.s_x, sample.s_y];
    let gram = Matrix3::from_fn(|i, j| inner41(&span[i], &span[j]));
    let rhs = Vector3::from_fn(|i, _| inner41(&f, &span[i]));
    let Some(c) = gram.lu().solve(&rhs) else {
        return f;
    };
    let f = f - span[0] * c[0] - span[1] * c[1] - span[2] * c[2];
    let fh = inner41(&f, hlift);
    let f = if fh != 0.0 {
        f - *hlift * (inner41(&f, &f) / (2.0 * fh))
    } else {
        f
    };
    f * (-1.0 / inner41(&f, &Vec41::Q))
}

/// Extracts the second envelope of the congruence at one sample.
pub fn second_envelope(sample: &SphereSample) -> Result<EnvelopeSample> {
    let mut m = Matrix5::<f64>::zeros();
    for (row, v) in [sample.s, sample.s_x, sample.s_y].iter().enumerate() {
        for (col, c) in v.lowered().iter().enumerate() {
            m[(row, col)] = *c;
        }
    }
    let svd = SVD::new(m, false, true);
    let v_t = svd.v_t.ok_or(Error::DegenerateNormalPlane)?;
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = |k: usize| svd.singular_values[order[k]];
    let ratio = sv(2) / sv(0);
    if !(ratio >= RANK_TOL) {
        return Err(Error::NotImmersed(ratio));
    }
    let basis = |k: usize| {
        let row = v_t.row(order[k]);
        Vec41::new(row[0], row[1], row[2], row[3], row[4])
    };
    let (n1, n2) =
        null_directions_in_plane(&basis(3), &basis(4)).map_err(|_| Error::DegenerateNormalPlane)?;

    let hlift = sample.hlift();
    let (a1, a2) = (line_sine(&n1, &hlift), line_sine(&n2, &hlift));
    let (f0, discard_angle) = if a1 <= a2 { (n2, a1) } else { (n1, a2) };
    if a1.max(a2) < 1e-9 {
        return Err(Error::AmbiguousNullSplit);
    }
    let fq = inner41(&f0, &Vec41::Q);
    if fq.abs() < IDEAL_EPS {
        return Err(Error::IdealEnvelopePoint);
    }
    let f = refine_null_normal(f0 * (-1.0 / fq), sample, &hlift);
    let position = to_half_space(project_null_point(&f)?);
    Ok(EnvelopeSample {
        z: sample.z,
        f,
        position,
        t: sample.s - f,
        hlift,
        discard_angle,
    })
}

/// Congruence and envelope at one parameter value.
pub fn envelope_at(z: Complex64, data: &BCData) -> Result<(SphereSample, EnvelopeSample)> {
    let sample = horosphere_lift(z, data)?;
    let env = second_envelope(&sample)?;
    Ok((sample, env))
}

/// Member of the parallel family: `μ e^{-2ρ}` and `h(e^{-ρ} z̃)` on the
/// domain scaled by `e^ρ`.
pub fn parallel_family(data: &BCData, rho: f64) -> BCData {
    if rho == 0.0 {
        return data.clone();
    }
    let shrink = HoloExpr::mul(HoloExpr::constant((-rho).exp(), 0.0), HoloExpr::Var);
    BCData {
        h: data.h.substitute(&shrink),
        mu: data.mu * (-2.0 * rho).exp(),
        domain: data.domain.scaled(rho.exp()),
        r_scale: data.r_scale,
    }
}

/// Precomposes `h` with `z̃ ↦ (a z̃ + b)/(c z̃ + d)`, keeping `μ` and the domain.
pub fn mobius_reparam(
    data: &BCData,
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> Result<BCData> {
    let det = a * d - b * c;
    if det.norm() < 1e-12 {
        return Err(Error::SingularMobius(det.norm()));
    }
    let zero = Complex64::new(0.0, 0.0);
    if b == zero && c == zero && a == d {
        return Ok(data.clone());
    }
    Ok(BCData {
        h: data
            .h
            .substitute(&HoloExpr::mobius(a, b, c, d, HoloExpr::Var)),
        ..data.clone()
    })
}

/// Largest `|r̃(z̃)/r(z(z̃)) - 1|` over the nodes of `data.domain`, read as
/// z̃-values, where `r̃` belongs to `h ∘ reparam`.
pub fn isometric_reparam_check(data: &BCData, reparam: &HoloExpr) -> Result<f64> {
    let moved = BCData {
        h: data.h.substitute(reparam),
        ..data.clone()
    };
    let mut worst = 0.0f64;
    for zt in data.domain.nodes() {
        let z = crate::holomorphic::eval(reparam, zt)?;
        let r_new = moved.radius_at(zt)?;
        let r_old = data.radius_at(z)?;
        if !(r_old.abs() > R_EPS) {
            return Err(Error::DegenerateSphere(r_old));
        }
        worst = worst.max((r_new / r_old - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holomorphic::parse_holomorphic;
    use crate::minkowski::sphere_lift;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn data(h: &str, mu: f64) -> BCData {
        BCData::new(
            parse_holomorphic(h).unwrap(),
            mu,
            GridSpec::rectangle(0.1, 0.45, 0.1, 0.45, 6, 6),
        )
    }

    #[test]
    fn radius_examples() {
        assert_eq!(radius(c(0.0, 1.0), -1.0, c(1.0, 0.0)), 1.0);
        assert_eq!(radius(c(0.0, 0.0), -1.0, c(1.0, 0.0)), 0.5);
        assert_eq!(radius(c(0.5, 0.0), 1.0, c(1.0, 0.0)), 0.375);
    }

    #[test]
    fn centre_examples() {
        assert_eq!(
            centre(c(0.0, 0.0), &data("z", -1.0)).unwrap(),
            Point3::new(0.5, 0.0, 0.0)
        );
        assert_eq!(
            centre(c(0.5, 0.0), &data("z^2", 1.0)).unwrap(),
            Point3::new(0.375, 0.25, 0.0)
        );
        assert_eq!(
            centre(c(0.0, 0.0), &data("1/z", -1.0)),
            Err(Error::PoleAtPoint)
        );
    }

    #[test]
    fn horosphere_at_origin() {
        let s = horosphere_lift(c(0.0, 0.0), &data("z", -1.0)).unwrap();
        assert_eq!(s.s, Vec41::O * 2.0 - Vec41::Q);
        assert_eq!(inner41(&s.s, &s.s), 1.0);
        assert_eq!(inner41(&s.s, &Vec41::Q), -1.0);
        assert_eq!(s.hlift(), Vec41::O * 2.0);
        assert_eq!(inner41(&s.hlift(), &s.hlift()), 0.0);
    }

    #[test]
    fn horosphere_matches_sphere_lift_of_reflected_centre() {
        let d = data("z^3 + z", 2.0);
        let smp = horosphere_lift(c(0.3, -0.2), &d).unwrap();
        let expect = sphere_lift(&to_half_space(smp.centre), smp.r).unwrap();
        for (a, b) in smp.s.to_array().iter().zip(expect.to_array()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        assert_eq!(smp.s.cq, -1.0);
    }

    #[test]
    fn zero_radius_locus() {
        assert!(matches!(
            horosphere_lift(c(1.0, 0.0), &data("z^2", 1.0)),
            Err(Error::DegenerateSphere(_))
        ));
        assert!(matches!(
            horosphere_lift(c(0.0, 0.0), &data("z^2", 1.0)),
            Err(Error::DegenerateSphere(_))
        ));
    }

    #[test]
    fn constant_congruence_does_not_immerse() {
        let smp = horosphere_lift(c(0.0, 0.0), &data("z", -1.0)).unwrap();
        let flat = SphereSample {
            s_x: Vec41::ZERO,
            s_y: Vec41::ZERO,
            ..smp
        };
        assert!(matches!(second_envelope(&flat), Err(Error::NotImmersed(_))));
    }

    #[test]
    fn envelope_normalisation() {
        for (h, mu, z) in [
            ("z", -1.0, c(0.0, 0.0)),
            ("z^2", 1.0, c(0.4, 0.3)),
            ("exp(z)", -1.0, c(0.2, -0.1)),
        ] {
            let (smp, env) = envelope_at(z, &data(h, mu)).unwrap();
            let f = env.f;
            assert_abs_diff_eq!(inner41(&f, &f), 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(inner41(&f, &Vec41::Q), -1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(inner41(&f, &smp.s), 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(inner41(&env.t, &env.t), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(inner41(&env.hlift, &f), -1.0, epsilon = 1e-9);
            assert!(env.discard_angle < 1e-9);
        }
    }

    #[test]
    fn parallel_family_examples() {
        let d = data("z^2", 1.0);
        let m = parallel_family(&d, 2f64.ln());
        assert_abs_diff_eq!(m.mu, 0.25, epsilon = 1e-15);
        assert_eq!(parallel_family(&d, 0.0), d);
        let z = c(0.3, 0.2);
        let rho = 0.7;
        let m = parallel_family(&d, rho);
        let lhs = m.radius_at(z * rho.exp()).unwrap();
        let rhs = (-rho).exp() * d.radius_at(z).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-15);
    }

    #[test]
    fn mobius_examples() {
        let d = data("z^2", 1.0);
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert_eq!(mobius_reparam(&d, one, zero, zero, one).unwrap(), d);
        assert!(matches!(
            mobius_reparam(&d, one, one, one, one),
            Err(Error::SingularMobius(_))
        ));

        let (a, b, cc, dd) = (c(1.0, 0.5), c(0.2, 0.0), c(0.3, -0.1), c(1.0, 0.0));
        let m = mobius_reparam(&d, a, b, cc, dd).unwrap();
        let zt = c(0.25, 0.4);
        let w = (a * zt + b) / (cc * zt + dd);
        assert_abs_diff_eq!((m.jet(zt).unwrap().f0 - w * w).norm(), 0.0, epsilon = 1e-14);

        let inv = mobius_reparam(&data("z", -1.0), zero, one, one, zero).unwrap();
        assert_eq!(inv.jet(zero), Err(Error::PoleAtPoint));
        assert_abs_diff_eq!(
            (inv.jet(c(2.0, 0.0)).unwrap().f0 - c(0.5, 0.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn rotations_are_isometric() {
        let rot = HoloExpr::mul(
            HoloExpr::Const(Complex64::from_polar(1.0, 0.9)),
            HoloExpr::Var,
        );
        for mu in [-1.0, 0.0, 1.0, 2.0] {
            let worst = isometric_reparam_check(&data("z^3 + z", mu), &rot).unwrap();
            assert!(worst < 1e-12, "mu={mu}: {worst}");
        }
        let dbl = HoloExpr::mul(HoloExpr::constant(2.0, 0.0), HoloExpr::Var);
        let worst = isometric_reparam_check(&data("z^3 + z", -1.0), &dbl).unwrap();
        assert!(worst > 0.5);
    }
}
