//! Numerical checks of the identities behind the construction.
//!
//! Derivatives of the envelope `f` and its tangent plane map `t` are central
//! differences over a five-point stencil; the congruence `s` has analytic
//! partials, and only the Brioschi formula differentiates its metric
//! numerically.

use num_complex::Complex64;
use serde::Serialize;

use crate::bianchi_calo::{envelope_at, BCData, EnvelopeSample, SphereSample};
use crate::error::{Error, Result};
use crate::holomorphic::ComplexJet2;
use crate::minkowski::{inner41, Vec41, Vec42};

/// Negative discriminants `H² - K` down to `-UMBILIC_CLAMP` are roundoff.
pub const UMBILIC_CLAMP: f64 = 1e-12;
/// `det I <= IMMERSION_TOL·(tr I)²` marks a rank-deficient first form.
pub const IMMERSION_TOL: f64 = 1e-10;
/// Stencil differences below this fraction of `‖f‖` are roundoff.
pub const IMMERSION_NOISE: f64 = 1e-9;

/// First fundamental form coefficients w.r.t. `z = x + iy`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Metric2 {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl Metric2 {
    pub const fn new(e: f64, f: f64, g: f64) -> Self {
        Self { e, f, g }
    }

    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    fn max_abs(&self) -> f64 {
        self.e.abs().max(self.f.abs()).max(self.g.abs())
    }
}

/// Centre value and its four axis neighbours at distance `step`.
#[derive(Debug, Clone, Copy)]
pub struct Stencil5<T> {
    pub centre: T,
    pub xp: T,
    pub xm: T,
    pub yp: T,
    pub ym: T,
    pub step: f64,
}

impl<T> Stencil5<T> {
    fn d_x<V>(&self, get: impl Fn(&T) -> V) -> V
    where
        V: std::ops::Sub<Output = V> + std::ops::Mul<f64, Output = V>,
    {
        (get(&self.xp) - get(&self.xm)) * (0.5 / self.step)
    }

    fn d_y<V>(&self, get: impl Fn(&T) -> V) -> V
    where
        V: std::ops::Sub<Output = V> + std::ops::Mul<f64, Output = V>,
    {
        (get(&self.yp) - get(&self.ym)) * (0.5 / self.step)
    }
}

/// The three fundamental forms `(df,df)`, `-(dt,df)` and `(dt,dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalForms {
    pub first: Metric2,
    pub second: Metric2,
    pub third: Metric2,
    /// `|(t_x,f_y) - (t_y,f_x)|`, zero for a genuine surface.
    pub symmetry_defect: f64,
}

/// Forms from the partials of the Killing lift and the tangent plane map.
pub fn forms_from_partials(f_x: &Vec41, f_y: &Vec41, t_x: &Vec41, t_y: &Vec41) -> FundamentalForms {
    let first = Metric2::new(inner41(f_x, f_x), inner41(f_x, f_y), inner41(f_y, f_y));
    let m1 = -inner41(t_x, f_y);
    let m2 = -inner41(t_y, f_x);
    let second = Metric2::new(-inner41(t_x, f_x), 0.5 * (m1 + m2), -inner41(t_y, f_y));
    let third = Metric2::new(inner41(t_x, t_x), inner41(t_x, t_y), inner41(t_y, t_y));
    FundamentalForms {
        first,
        second,
        third,
        symmetry_defect: (m1 - m2).abs(),
    }
}

pub fn fundamental_forms(stencil: &Stencil5<EnvelopeSample>) -> Result<FundamentalForms> {
    let f_x = stencil.d_x(|e| e.f);
    let f_y = stencil.d_y(|e| e.f);
    let t_x = stencil.d_x(|e| e.t);
    let t_y = stencil.d_y(|e| e.t);
    let forms = forms_from_partials(&f_x, &f_y, &t_x, &t_y);
    let det = forms.first.det();
    let trace = forms.first.e + forms.first.g;
    // differences at roundoff level mean the envelope is (locally) a point
    let spread = (f_x.norm_euclid() + f_y.norm_euclid()) * stencil.step;
    if spread <= IMMERSION_NOISE * stencil.centre.f.norm_euclid()
        || !(det > IMMERSION_TOL * trace * trace && forms.first.e > 0.0)
    {
        return Err(Error::NonImmersed(det));
    }
    Ok(forms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Curvatures {
    pub h: f64,
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
}

/// Mean, extrinsic Gauss and principal curvatures from `I` and `II`.
pub fn mean_gauss(first: &Metric2, second: &Metric2) -> Result<Curvatures> {
    let det = first.det();
    if !(det > 0.0) {
        return Err(Error::NonImmersed(det));
    }
    let k = second.det() / det;
    let h = (first.e * second.g - 2.0 * first.f * second.f + first.g * second.e) / (2.0 * det);
    let disc = h * h - k;
    if disc < -UMBILIC_CLAMP * (1.0 + h * h) {
        return Err(Error::ComplexPrincipalCurvatures(disc));
    }
    let root = disc.max(0.0).sqrt();
    Ok(Curvatures {
        h,
        k,
        k1: h + root,
        k2: h - root,
    })
}

/// Least-squares `(H, K)` from `(dt,dt) + 2H (dt,df) + K (df,df) = 0`,
/// with the off-diagonal equation weighted twice as it appears twice.
pub fn cayley_hamilton_fit(forms: &FundamentalForms) -> Result<(f64, f64)> {
    let (i, ii, iii) = (forms.first, forms.second, forms.third);
    let w = std::f64::consts::SQRT_2;
    // (dt,df) = -II, unknowns (H, K)
    let rows = [
        ([-2.0 * ii.e, i.e], -iii.e),
        ([-2.0 * ii.f * w, i.f * w], -iii.f * w),
        ([-2.0 * ii.g, i.g], -iii.g),
    ];
    let mut ata = [[0.0; 2]; 2];
    let mut atb = [0.0; 2];
    for (a, b) in rows {
        for r in 0..2 {
            atb[r] += a[r] * b;
            for c in 0..2 {
                ata[r][c] += a[r] * a[c];
            }
        }
    }
    let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
    if det.abs() <= f64::EPSILON * (ata[0][0] * ata[1][1]).abs() {
        return Err(Error::NonImmersed(det));
    }
    let h = (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det;
    let k = (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det;
    Ok((h, k))
}

/// Largest component of `III - 2H II + K I` relative to the largest of `III`.
pub fn cayley_hamilton_residual(forms: &FundamentalForms, h: f64, k: f64) -> f64 {
    let (i, ii, iii) = (forms.first, forms.second, forms.third);
    let res = Metric2::new(
        iii.e - 2.0 * h * ii.e + k * i.e,
        iii.f - 2.0 * h * ii.f + k * i.f,
        iii.g - 2.0 * h * ii.g + k * i.g,
    );
    res.max_abs() / iii.max_abs().max(f64::MIN_POSITIVE)
}

/// `(μ+1) K - 2μ H + (μ-1)`.
pub fn weingarten_residual(h: f64, k: f64, mu: f64) -> f64 {
    (mu + 1.0) * k - 2.0 * mu * h + (mu - 1.0)
}

/// The residual scaled by `1 + |K| + |H|`.
pub fn weingarten_normalized(h: f64, k: f64, mu: f64) -> f64 {
    weingarten_residual(h, k, mu).abs() / (1.0 + k.abs() + h.abs())
}

/// Normalised off-diagonal part of the shape operator `I⁻¹ II`.
pub fn rodrigues_offdiag(first: &Metric2, second: &Metric2) -> Result<f64> {
    let det = first.det();
    if !(det > 0.0) {
        return Err(Error::NonImmersed(det));
    }
    let (e, f, g) = (first.e, first.f, first.g);
    let (l, m, n) = (second.e, second.f, second.g);
    let s11 = (g * l - f * m) / det;
    let s12 = (g * m - f * n) / det;
    let s21 = (e * m - f * l) / det;
    let s22 = (e * n - f * m) / det;
    let norm = (s11 * s11 + s12 * s12 + s21 * s21 + s22 * s22).sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok((s12 * s12 + s21 * s21).sqrt() / norm)
}

/// `(ds,ds)` of the congruence together with the constant curvature target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InducedMetric {
    pub metric: Metric2,
    pub target: Metric2,
    pub mismatch: f64,
}

pub fn induced_metric_s(sample: &SphereSample, mu: f64) -> InducedMetric {
    let metric = Metric2::new(
        inner41(&sample.s_x, &sample.s_x),
        inner41(&sample.s_x, &sample.s_y),
        inner41(&sample.s_y, &sample.s_y),
    );
    let lambda = 4.0 / (1.0 - mu * sample.z.norm_sqr()).powi(2);
    let target = Metric2::new(lambda, 0.0, lambda);
    let mismatch = (metric.e - lambda)
        .abs()
        .max(metric.f.abs())
        .max((metric.g - lambda).abs())
        / lambda;
    InducedMetric {
        metric,
        target,
        mismatch,
    }
}

/// `max |(dh,dh) - r²(ds,ds)| / |h'|²` over the metric components.
pub fn conformal_factor_residual(sample: &SphereSample, jet: &ComplexJet2) -> f64 {
    let h1 = jet.f1.norm_sqr();
    let r2 = sample.r * sample.r;
    let ds = Metric2::new(
        inner41(&sample.s_x, &sample.s_x),
        inner41(&sample.s_x, &sample.s_y),
        inner41(&sample.s_y, &sample.s_y),
    );
    (h1 - r2 * ds.e)
        .abs()
        .max((r2 * ds.f).abs())
        .max((h1 - r2 * ds.g).abs())
        / h1
}

/// Intrinsic Gauss curvature at the centre of a 3×3 stencil of metrics,
/// `metrics[a][b]` sitting at offset `((a-1)·step, (b-1)·step)`.
pub fn brioschi_curvature(metrics: &[[Metric2; 3]; 3], step: f64) -> Result<f64> {
    let c = metrics[1][1];
    if !(c.det() > 0.0) {
        return Err(Error::StencilDegenerate(format!(
            "metric determinant {:e}",
            c.det()
        )));
    }
    let h = step;
    let d_u = |get: fn(&Metric2) -> f64| (get(&metrics[2][1]) - get(&metrics[0][1])) / (2.0 * h);
    let d_v = |get: fn(&Metric2) -> f64| (get(&metrics[1][2]) - get(&metrics[1][0])) / (2.0 * h);
    let e = |m: &Metric2| m.e;
    let f = |m: &Metric2| m.f;
    let g = |m: &Metric2| m.g;
    let (e_u, e_v) = (d_u(e), d_v(e));
    let (f_u, f_v) = (d_u(f), d_v(f));
    let (g_u, g_v) = (d_u(g), d_v(g));
    let e_vv = (metrics[1][2].e - 2.0 * c.e + metrics[1][0].e) / (h * h);
    let g_uu = (metrics[2][1].g - 2.0 * c.g + metrics[0][1].g) / (h * h);
    let f_uv =
        (metrics[2][2].f - metrics[2][0].f - metrics[0][2].f + metrics[0][0].f) / (4.0 * h * h);

    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = det3([
        [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
        [f_v - 0.5 * g_u, c.e, c.f],
        [0.5 * g_v, c.f, c.g],
    ]);
    let b = det3([
        [0.0, 0.5 * e_v, 0.5 * g_u],
        [0.5 * e_v, c.e, c.f],
        [0.5 * g_u, c.f, c.g],
    ]);
    Ok((a - b) / (c.det() * c.det()))
}

/// Analytic `(ds,ds)` on the 3×3 stencil around `z`.
pub fn congruence_metric_stencil(
    data: &BCData,
    z: Complex64,
    step: f64,
) -> Result<[[Metric2; 3]; 3]> {
    let mut out = [[Metric2::default(); 3]; 3];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let w = z + Complex64::new((a as f64 - 1.0) * step, (b as f64 - 1.0) * step);
            let sample = crate::bianchi_calo::horosphere_lift(w, data)
                .map_err(|e| Error::StencilDegenerate(e.code().into()))?;
            *slot = induced_metric_s(&sample, data.mu).metric;
        }
    }
    Ok(out)
}

/// Brioschi curvature of the congruence at `z`, plain and Richardson-extrapolated
/// over the steps `step` and `step/2`.
pub fn brioschi_at(data: &BCData, z: Complex64, step: f64) -> Result<(f64, f64)> {
    let coarse = brioschi_curvature(&congruence_metric_stencil(data, z, step)?, step)?;
    let fine = brioschi_curvature(&congruence_metric_stencil(data, z, step / 2.0)?, step / 2.0)?;
    Ok((coarse, (4.0 * fine - coarse) / 3.0))
}

/// Element of `Λ²R^{4,2}`, components `w_ij` for `i < j` in the coordinate
/// order `(o, ∞, q, e1, e2, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda2Vec42 {
    pub w: [f64; 15],
}

impl Lambda2Vec42 {
    pub fn wedge(a: &Vec42, b: &Vec42) -> Self {
        let (a, b) = (a.to_array(), b.to_array());
        let mut w = [0.0; 15];
        let mut k = 0;
        for i in 0..6 {
            for j in (i + 1)..6 {
                w[k] = a[i] * b[j] - a[j] * b[i];
                k += 1;
            }
        }
        Self { w }
    }

    pub fn sup_norm(&self) -> f64 {
        self.w.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl std::ops::Sub for Lambda2Vec42 {
    type Output = Self;
    fn sub(mut self, b: Self) -> Self {
        for (x, y) in self.w.iter_mut().zip(b.w) {
            *x -= y;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeReport {
    pub wedge: Lambda2Vec42,
    pub normalized: f64,
}

/// The Legendre pair `σ⁺ = p + s`, `σ⁻ = (1+μ)/2 σ⁺ - f` of one node.
pub fn sigma_pair(sample: &SphereSample, env: &EnvelopeSample, mu: f64) -> (Vec42, Vec42) {
    let plus = Vec42::P + Vec42::from(sample.s);
    let minus = plus * (0.5 * (1.0 + mu)) - Vec42::from(env.f);
    (plus, minus)
}

/// `σ⁺_x ∧ σ⁻_y - σ⁺_y ∧ σ⁻_x` from central differences. Both factors are
/// differenced on the same stencil so their truncation errors largely cancel;
/// mixing analytic `s`-partials with differenced `f` is markedly worse.
pub fn sigma_wedge(stencil: &Stencil5<(SphereSample, EnvelopeSample)>, mu: f64) -> WedgeReport {
    let plus = |n: &(SphereSample, EnvelopeSample)| sigma_pair(&n.0, &n.1, mu).0;
    let minus = |n: &(SphereSample, EnvelopeSample)| sigma_pair(&n.0, &n.1, mu).1;
    let (px, py) = (stencil.d_x(plus), stencil.d_y(plus));
    let (mx, my) = (stencil.d_x(minus), stencil.d_y(minus));
    let wedge = Lambda2Vec42::wedge(&px, &my) - Lambda2Vec42::wedge(&py, &mx);
    let scale = px.norm_euclid() * my.norm_euclid() + py.norm_euclid() * mx.norm_euclid();
    WedgeReport {
        wedge,
        normalized: wedge.sup_norm() / scale,
    }
}

/// Largest deviation among the normalisation identities of one node.
pub fn structural_residual(sample: &SphereSample, env: &EnvelopeSample) -> f64 {
    let q = Vec41::Q;
    let (s, f, t, h) = (sample.s, env.f, env.t, env.hlift);
    [
        inner41(&s, &s) - 1.0,
        inner41(&s, &q) + 1.0,
        inner41(&h, &h),
        inner41(&h, &q),
        inner41(&f, &f),
        inner41(&f, &q) + 1.0,
        inner41(&f, &s),
        inner41(&t, &t) - 1.0,
        inner41(&t, &q),
        inner41(&t, &f),
        inner41(&h, &f) + 1.0,
    ]
    .iter()
    .fold(0.0, |m, x| m.max(x.abs()))
}

/// `max |(f, s_x)|, |(f, s_y)|` relative to `‖f‖·‖s_•‖`.
pub fn envelope_condition(sample: &SphereSample, env: &EnvelopeSample) -> f64 {
    let nf = env.f.norm_euclid();
    let a = inner41(&env.f, &sample.s_x).abs() / (nf * sample.s_x.norm_euclid());
    let b = inner41(&env.f, &sample.s_y).abs() / (nf * sample.s_y.norm_euclid());
    a.max(b)
}

/// Steps used by [`evaluate_node`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct LabSteps {
    pub fd_step: f64,
    pub brioschi_step: f64,
}

impl Default for LabSteps {
    fn default() -> Self {
        Self {
            fd_step: 1e-4,
            brioschi_step: 1e-3,
        }
    }
}

/// Everything measured at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureReport {
    #[serde(skip)]
    pub z: Complex64,
    pub r: f64,
    pub h: f64,
    pub k_ext: f64,
    pub k1: f64,
    pub k2: f64,
    /// `|(μ+1)K - 2μH + (μ-1)| / (1 + |K| + |H|)`.
    pub weingarten_residual: f64,
    pub cayley_hamilton_residual: f64,
    pub metric_mismatch: f64,
    pub conformal_mismatch: f64,
    pub wedge_norm: f64,
    /// `|K_int + μ|` from the Brioschi formula at the configured step.
    pub brioschi_defect: f64,
    pub rodrigues_offdiag: f64,
    pub structural: f64,
}

/// The full pipeline and every check at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct NodeEvaluation {
    pub sphere: SphereSample,
    pub envelope: EnvelopeSample,
    pub forms: FundamentalForms,
    pub report: CurvatureReport,
}

fn neighbour(data: &BCData, z: Complex64) -> Result<(SphereSample, EnvelopeSample)> {
    envelope_at(z, data).map_err(|e| Error::StencilDegenerate(e.code().into()))
}

pub fn node_stencil(
    data: &BCData,
    z: Complex64,
    step: f64,
) -> Result<Stencil5<(SphereSample, EnvelopeSample)>> {
    let centre = envelope_at(z, data)?;
    Ok(Stencil5 {
        centre,
        xp: neighbour(data, z + Complex64::new(step, 0.0))?,
        xm: neighbour(data, z - Complex64::new(step, 0.0))?,
        yp: neighbour(data, z + Complex64::new(0.0, step))?,
        ym: neighbour(data, z - Complex64::new(0.0, step))?,
        step,
    })
}

pub fn evaluate_node(data: &BCData, z: Complex64, steps: &LabSteps) -> Result<NodeEvaluation> {
    let stencil = node_stencil(data, z, steps.fd_step)?;
    let (sphere, envelope) = stencil.centre;
    let env_stencil = Stencil5 {
        centre: stencil.centre.1,
        xp: stencil.xp.1,
        xm: stencil.xm.1,
        yp: stencil.yp.1,
        ym: stencil.ym.1,
        step: stencil.step,
    };
    let forms = fundamental_forms(&env_stencil)?;
    let curv = mean_gauss(&forms.first, &forms.second)?;
    let wedge = sigma_wedge(&stencil, data.mu);
    let k_int = brioschi_curvature(
        &congruence_metric_stencil(data, z, steps.brioschi_step)?,
        steps.brioschi_step,
    )?;
    let report = CurvatureReport {
        z,
        r: sphere.r,
        h: curv.h,
        k_ext: curv.k,
        k1: curv.k1,
        k2: curv.k2,
        weingarten_residual: weingarten_normalized(curv.h, curv.k, data.mu),
        cayley_hamilton_residual: cayley_hamilton_residual(&forms, curv.h, curv.k),
        metric_mismatch: induced_metric_s(&sphere, data.mu).mismatch,
        conformal_mismatch: conformal_factor_residual(&sphere, &sphere.jet),
        wedge_norm: wedge.normalized,
        brioschi_defect: (k_int + data.mu).abs(),
        rodrigues_offdiag: rodrigues_offdiag(&forms.first, &forms.second)?,
        structural: structural_residual(&sphere, &envelope),
    };
    Ok(NodeEvaluation {
        sphere,
        envelope,
        forms,
        report,
    })
}
