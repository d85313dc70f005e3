//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if a criterion fails that is expected to pass.
//!
//! One criterion is known not to be attainable as stated, see
//! `KNOWN_UNATTAINABLE`: the check is still run in full and reported as FAIL,
//! and the run insists that it fails for exactly the documented reason.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;

use bianchi_calo::bianchi_calo::{
    envelope_at, horosphere_lift, horosphere_partials_fd, isometric_reparam_check, mobius_reparam,
    parallel_family, BCData,
};
use bianchi_calo::curvature::{brioschi_at, cayley_hamilton_fit, LabSteps, NodeEvaluation};
use bianchi_calo::holomorphic::{eval_jet2, parse_holomorphic, HoloExpr};
use bianchi_calo::meshio::{evaluate_grid, profile_curve, GridField, GridSpec, Ray};
use bianchi_calo::Error;
use num_complex::Complex64;

const N: usize = 32;
const FD_STEP: f64 = 1e-4;
const BRIOSCHI_STEP: f64 = 1e-3;

const TOL_WEINGARTEN: f64 = 1e-5;
const TOL_SPECIAL: f64 = 1e-6;
const TOL_CONFORMAL: f64 = 1e-9;
const TOL_METRIC: f64 = 1e-8;
const TOL_BRIOSCHI: f64 = 1e-3;
const TOL_BRIOSCHI_RICHARDSON: f64 = 1e-5;
const TOL_WEDGE: f64 = 1e-6;
const PERTURBATION_SCALE: f64 = 1.01;
const PERTURBATION_FLOOR: f64 = 1e-3;
const PERTURBATION_COVERAGE: f64 = 0.9;
const TOL_RADIUS_LAW: f64 = 1e-12;
const TOL_ISOMETRY: f64 = 1e-9;
const TOL_REVOLUTION: f64 = 1e-8;
const TOL_STRUCTURAL: f64 = 1e-9;
const TOL_S_PARTIALS: f64 = 1e-7;
const TOL_CAYLEY_HAMILTON: f64 = 1e-8;
const TOL_JET: f64 = 1e-8;
const FD_ORACLE_STEP: f64 = 1e-5;

/// Criterion 6 asks the 1% radius perturbation to be visible in the wedge
/// and the Weingarten residual at 90% of the nodes of every pair. For μ = 0
/// the perturbed congruence is again a flat-front congruence (its curvature
/// is -1.01²μ = 0), so both quantities stay at roundoff level there.
const KNOWN_UNATTAINABLE: &[u32] = &[6];

struct Pair {
    h: &'static str,
    mu: f64,
    grid: GridSpec,
}

impl Pair {
    fn data(&self) -> BCData {
        BCData::new(
            parse_holomorphic(self.h).unwrap(),
            self.mu,
            self.grid.clone(),
        )
    }

    fn label(&self) -> String {
        format!("({}, {})", self.h, self.mu)
    }
}

fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> GridSpec {
    GridSpec::rectangle(x0, x1, y0, y1, N, N)
}

/// The immersed part of the suite; `(z, -1)` is handled separately.
fn suite() -> Vec<Pair> {
    vec![
        Pair {
            h: "z^2",
            mu: 1.0,
            grid: rect(0.55, 0.85, 0.05, 0.3),
        },
        Pair {
            h: "z^2",
            mu: 0.0,
            grid: rect(1.1, 1.5, -0.2, 0.2),
        },
        Pair {
            h: "z^3 + z",
            mu: -1.0,
            grid: rect(0.5, 0.8, -0.2, 0.2),
        },
        Pair {
            h: "z^3 + z",
            mu: 2.0,
            grid: rect(0.3, 0.55, 0.05, 0.3),
        },
        Pair {
            h: "exp(z)",
            mu: -1.0,
            grid: rect(-0.5, 0.5, -0.5, 0.5),
        },
    ]
}

fn steps() -> LabSteps {
    LabSteps {
        fd_step: FD_STEP,
        brioschi_step: BRIOSCHI_STEP,
    }
}

struct Run {
    pair: Pair,
    data: BCData,
    field: GridField<NodeEvaluation>,
}

impl Run {
    fn new(pair: Pair) -> Run {
        let data = pair.data();
        let field = evaluate_grid(&data, &pair.grid, &steps()).unwrap();
        Run { pair, data, field }
    }

    fn all_valid(&self) -> Result<(), String> {
        let n = self.field.values.len() - self.field.valid_count();
        if n == 0 {
            Ok(())
        } else {
            let first = self
                .field
                .values
                .iter()
                .find(|v| !v.is_valid())
                .unwrap()
                .status();
            Err(format!(
                "{}: {n} invalid nodes (first: {first})",
                self.pair.label()
            ))
        }
    }

    fn max(&self, get: impl Fn(&NodeEvaluation) -> f64) -> f64 {
        self.field
            .iter_valid()
            .map(|(_, e)| get(e))
            .fold(
                0.0,
                |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) },
            )
    }
}

struct Report {
    failed: Vec<u32>,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} {name}: {detail}"),
            Err(detail) => {
                println!("FAIL criterion {id:>2} {name}: {detail}");
                self.failed.push(id);
            }
        }
    }
}

fn check(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Every node of `(z, -1)` fails as non-immersed: all horospheres pass
/// through the point at height 1 above the origin, so the envelope is that
/// point. Returns a description if (and only if) this is what happens.
fn plane_cmc1_is_degenerate() -> Result<String, String> {
    let data = BCData::new(
        parse_holomorphic("z").unwrap(),
        -1.0,
        rect(-0.5, 0.5, -0.5, 0.5),
    );
    for z in data.domain.nodes() {
        let s = horosphere_lift(z, &data).unwrap();
        let c = s.centre;
        let d = ((c.height - 1.0).powi(2) + c.planar().norm_sqr()).sqrt();
        if (d - s.r.abs()).abs() > 1e-12 {
            return Err(format!("horosphere at {z} misses the common point"));
        }
    }
    let field = evaluate_grid(&data, &data.domain, &steps()).unwrap();
    let all_flat = field.values.iter().all(|v| {
        matches!(
            v,
            bianchi_calo::meshio::NodeOutcome::Failed(
                Error::NotImmersed(_) | Error::NonImmersed(_) | Error::StencilDegenerate(_)
            )
        )
    });
    check(
        all_flat,
        "(z, -1) has no immersed node: every horosphere meets (1, 0)".into(),
    )
}

fn criterion_weingarten(
    runs: &[Run],
    degenerate: &Result<String, String>,
) -> Result<String, String> {
    let mut parts = Vec::new();
    let mut ok = degenerate.is_ok();
    for r in runs {
        if let Err(e) = r.all_valid() {
            ok = false;
            parts.push(e);
        }
        let w = r.max(|e| e.report.weingarten_residual);
        ok &= w <= TOL_WEINGARTEN;
        parts.push(format!("{} {w:.1e}", r.pair.label()));
    }
    parts.push(match degenerate {
        Ok(_) => "(z, -1) vacuous".into(),
        Err(e) => e.clone(),
    });
    check(
        ok,
        format!(
            "max normalised residual <= {TOL_WEINGARTEN:e}: {}",
            parts.join(", ")
        ),
    )
}

fn criterion_specializations(
    runs: &[Run],
    degenerate: &Result<String, String>,
) -> Result<String, String> {
    let mut parts = Vec::new();
    let mut ok = degenerate.is_ok();
    for r in runs {
        let mu = r.pair.mu;
        let d = if mu == -1.0 {
            r.max(|e| (e.report.h - 1.0).abs())
        } else if mu == 0.0 {
            r.max(|e| (e.report.k_ext - 1.0).abs())
        } else if mu == 1.0 {
            r.max(|e| (e.report.k_ext - e.report.h).abs())
        } else {
            continue;
        };
        ok &= d <= TOL_SPECIAL;
        parts.push(format!("{} {d:.1e}", r.pair.label()));
    }
    check(ok, format!("<= {TOL_SPECIAL:e}: {}", parts.join(", ")))
}

fn criterion_max(
    runs: &[Run],
    tol: f64,
    get: impl Fn(&NodeEvaluation) -> f64,
) -> Result<String, String> {
    let worst = runs.iter().map(|r| r.max(&get)).fold(0.0, f64::max);
    check(worst <= tol, format!("max {worst:.1e} <= {tol:e}"))
}

fn criterion_brioschi(runs: &[Run]) -> Result<String, String> {
    let mut plain = 0.0f64;
    let mut rich = 0.0f64;
    for r in runs {
        for (z, _) in r.field.iter_valid() {
            let (k, kr) = brioschi_at(&r.data, z, BRIOSCHI_STEP).unwrap();
            plain = plain.max((k + r.pair.mu).abs());
            rich = rich.max((kr + r.pair.mu).abs());
        }
    }
    check(
        plain <= TOL_BRIOSCHI && rich <= TOL_BRIOSCHI_RICHARDSON,
        format!("step {BRIOSCHI_STEP:e}: {plain:.1e} <= {TOL_BRIOSCHI:e}; Richardson: {rich:.1e} <= {TOL_BRIOSCHI_RICHARDSON:e}"),
    )
}

fn criterion_wedge(runs: &[Run]) -> Result<String, String> {
    let wedge = runs
        .iter()
        .map(|r| r.max(|e| e.report.wedge_norm))
        .fold(0.0, f64::max);
    let mut ok = wedge <= TOL_WEDGE;
    let mut parts = vec![format!("constructed {wedge:.1e} <= {TOL_WEDGE:e}")];
    for r in runs {
        let bad = r.data.clone().with_r_scale(PERTURBATION_SCALE);
        let field = evaluate_grid(&bad, &r.pair.grid, &steps()).unwrap();
        let hits = field
            .iter_valid()
            .filter(|(_, e)| {
                e.report.wedge_norm >= PERTURBATION_FLOOR
                    && e.report.weingarten_residual >= PERTURBATION_FLOOR
            })
            .count();
        let frac = hits as f64 / field.values.len() as f64;
        ok &= frac >= PERTURBATION_COVERAGE;
        parts.push(format!("perturbed {} {:.0}%", r.pair.label(), 100.0 * frac));
    }
    check(ok, parts.join(", "))
}

/// Coverage of the perturbation check for the `μ = 0` pair only.
fn flat_front_perturbation_coverage(runs: &[Run]) -> f64 {
    let r = runs.iter().find(|r| r.pair.mu == 0.0).unwrap();
    let bad = r.data.clone().with_r_scale(PERTURBATION_SCALE);
    let field = evaluate_grid(&bad, &r.pair.grid, &steps()).unwrap();
    let hits = field
        .iter_valid()
        .filter(|(_, e)| {
            e.report.wedge_norm >= PERTURBATION_FLOOR
                && e.report.weingarten_residual >= PERTURBATION_FLOOR
        })
        .count();
    hits as f64 / field.values.len() as f64
}

fn criterion_family() -> Result<String, String> {
    let base = BCData::new(
        parse_holomorphic("z^2").unwrap(),
        1.0,
        rect(0.5, 0.7, 0.05, 0.3),
    );
    let mut ok = true;
    let mut parts = Vec::new();
    for rho in [0.0, LN_2, -LN_2] {
        let member = parallel_family(&base, rho);
        let mut law = 0.0f64;
        for z in base.domain.nodes() {
            let r = base.radius_at(z).unwrap();
            let rt = member.radius_at(z * rho.exp()).unwrap();
            law = law.max((rt - (-rho).exp() * r).abs());
        }
        let field = evaluate_grid(&member, &member.domain, &steps()).unwrap();
        let valid = field.valid_count() == field.values.len();
        let w = field
            .iter_valid()
            .map(|(_, e)| e.report.weingarten_residual)
            .fold(0.0, f64::max);
        ok &= valid && law <= TOL_RADIUS_LAW && w <= TOL_WEINGARTEN;
        parts.push(format!(
            "rho {rho:+.3}: mu~ {:.2}, radius law {law:.1e}, weingarten {w:.1e}",
            member.mu
        ));
    }
    check(ok, parts.join("; "))
}

fn max_position_gap(
    data: &BCData,
    moved: &BCData,
    grid: &GridSpec,
    map: &HoloExpr,
) -> Result<f64, String> {
    let mut gap = 0.0f64;
    for zt in grid.nodes() {
        let z = bianchi_calo::holomorphic::eval(map, zt).map_err(|e| e.to_string())?;
        let (_, a) = envelope_at(z, data).map_err(|e| format!("{z}: {e}"))?;
        let (_, b) = envelope_at(zt, moved).map_err(|e| format!("{zt}: {e}"))?;
        gap = gap.max(a.position.distance(&b.position) / (1.0 + a.position.norm_sqr().sqrt()));
    }
    Ok(gap)
}

fn criterion_isometries(runs: &[Run]) -> Result<String, String> {
    let mut worst = 0.0f64;
    // rotations z = e^{iα} z̃, on every pair, compared on the pair's own nodes
    for r in runs {
        for alpha in [0.3, 1.9, 4.4] {
            let turn = Complex64::from_polar(1.0, alpha);
            let rot = HoloExpr::mul(HoloExpr::Const(turn), HoloExpr::Var);
            let moved = BCData {
                h: r.data.h.substitute(&rot),
                ..r.data.clone()
            };
            for z in r.pair.grid.nodes().into_iter().step_by(7) {
                let (_, a) = envelope_at(z, &r.data).map_err(|e| e.to_string())?;
                let (_, b) = envelope_at(z / turn, &moved).map_err(|e| e.to_string())?;
                worst = worst
                    .max(a.position.distance(&b.position) / (1.0 + a.position.norm_sqr().sqrt()));
            }
        }
    }
    let rotations = worst;

    // z = (z̃ cos α + sin α)/(-z̃ sin α + cos α) preserves 4|dz|²/(1+|z|²)²
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    let map = HoloExpr::mobius(
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(c, 0.0),
        HoloExpr::Var,
    );
    let mut sphere = 0.0f64;
    let mut ratio = 0.0f64;
    for r in runs.iter().filter(|r| r.pair.mu == -1.0) {
        let grid = rect(-0.3, 0.3, -0.3, 0.3);
        let moved = mobius_reparam(
            &r.data,
            Complex64::new(c, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(c, 0.0),
        )
        .map_err(|e| e.to_string())?;
        let on_grid = BCData {
            domain: grid.clone(),
            ..r.data.clone()
        };
        ratio = ratio.max(isometric_reparam_check(&on_grid, &map).map_err(|e| e.to_string())?);
        sphere = sphere.max(max_position_gap(&r.data, &moved, &grid, &map)?);
    }
    check(
        rotations <= TOL_ISOMETRY && sphere <= TOL_ISOMETRY && ratio <= TOL_ISOMETRY,
        format!("rotations {rotations:.1e}, mu = -1 rotation of the sphere {sphere:.1e} (radius ratio {ratio:.1e}) <= {TOL_ISOMETRY:e}"),
    )
}

fn criterion_fig1() -> Result<String, String> {
    let data = BCData::new(
        parse_holomorphic("z^2").unwrap(),
        1.0,
        rect(0.1, 0.2, 0.1, 0.2),
    );
    let ray = |theta| Ray {
        theta,
        t_min: 0.15,
        t_max: 0.45,
        n: 31,
    };
    let base = profile_curve(&data, &ray(0.0));
    let mut gap = 0.0f64;
    for k in 1..8 {
        for ((_, a), (_, b)) in base
            .iter()
            .zip(profile_curve(&data, &ray(k as f64 * PI / 4.0)))
        {
            let (a, b) = (
                a.as_ref().map_err(|e| e.to_string())?,
                b.map_err(|e| e.to_string())?,
            );
            gap = gap
                .max((a.height - b.height).abs())
                .max((a.planar().norm() - b.planar().norm()).abs());
        }
    }
    let grid = rect(0.05, 0.3, 0.05, 0.3);
    let plain = BCData {
        domain: grid.clone(),
        ..data
    };
    let moved = mobius_reparam(
        &plain,
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
    )
    .map_err(|e| e.to_string())?;
    let field = evaluate_grid(&moved, &grid, &steps()).unwrap();
    let w = field
        .iter_valid()
        .map(|(_, e)| e.report.weingarten_residual)
        .fold(0.0, f64::max);
    let special = field
        .iter_valid()
        .map(|(_, e)| (e.report.k_ext - e.report.h).abs())
        .fold(0.0, f64::max);
    let all = field.valid_count() == field.values.len();
    check(
        gap <= TOL_REVOLUTION && all && w <= TOL_WEINGARTEN && special <= TOL_SPECIAL,
        format!("8 rays agree to {gap:.1e}; Moebius-reparametrized z^2: weingarten {w:.1e}, |K-H| {special:.1e}"),
    )
}

fn criterion_oracles(runs: &[Run]) -> Result<String, String> {
    let mut partials = 0.0f64;
    let mut ch = 0.0f64;
    let mut jets = 0.0f64;
    let d = FD_ORACLE_STEP;
    for r in runs {
        for (z, e) in r.field.iter_valid() {
            let (fx, fy) = horosphere_partials_fd(z, &r.data, d).map_err(|e| e.to_string())?;
            partials = partials
                .max((fx - e.sphere.s_x).norm_euclid() / e.sphere.s_x.norm_euclid())
                .max((fy - e.sphere.s_y).norm_euclid() / e.sphere.s_y.norm_euclid());

            let (h, k) = cayley_hamilton_fit(&e.forms).map_err(|e| e.to_string())?;
            ch = ch
                .max((h - e.report.h).abs() / (1.0 + e.report.h.abs()))
                .max((k - e.report.k_ext).abs() / (1.0 + e.report.k_ext.abs()));

            let j = eval_jet2(&r.data.h, z).unwrap();
            let at = |w: Complex64| eval_jet2(&r.data.h, w).unwrap();
            let (dx, dy) = (Complex64::new(d, 0.0), Complex64::new(0.0, d));
            let f1x = (at(z + dx).f0 - at(z - dx).f0) / (2.0 * d);
            let f1y = (at(z + dy).f0 - at(z - dy).f0) / (2.0 * d) / Complex64::i();
            let f2x = (at(z + dx).f1 - at(z - dx).f1) / (2.0 * d);
            jets = jets
                .max((f1x - j.f1).norm() / j.f1.norm())
                .max((f1y - j.f1).norm() / j.f1.norm())
                .max((f2x - j.f2).norm() / j.f2.norm().max(j.f1.norm()));
        }
    }
    check(
        partials <= TOL_S_PARTIALS && ch <= TOL_CAYLEY_HAMILTON && jets <= TOL_JET,
        format!(
            "s-partials {partials:.1e} <= {TOL_S_PARTIALS:e}; Cayley-Hamilton fit {ch:.1e} <= {TOL_CAYLEY_HAMILTON:e}; jets {jets:.1e} <= {TOL_JET:e}"
        ),
    )
}

fn main() -> ExitCode {
    let started = std::time::Instant::now();
    let runs: Vec<Run> = suite().into_iter().map(Run::new).collect();
    let degenerate = plane_cmc1_is_degenerate();
    let mut report = Report { failed: Vec::new() };

    report.line(
        1,
        "Weingarten identity",
        criterion_weingarten(&runs, &degenerate),
    );
    report.line(
        2,
        "specializations",
        criterion_specializations(&runs, &degenerate),
    );
    report.line(
        3,
        "conformal factor",
        criterion_max(&runs, TOL_CONFORMAL, |e| e.report.conformal_mismatch),
    );
    report.line(
        4,
        "isothermic metric",
        criterion_max(&runs, TOL_METRIC, |e| e.report.metric_mismatch),
    );
    report.line(5, "intrinsic curvature", criterion_brioschi(&runs));
    report.line(6, "wedge characterization", criterion_wedge(&runs));
    report.line(7, "parallel family", criterion_family());
    report.line(
        8,
        "isometric reparametrization",
        criterion_isometries(&runs),
    );
    report.line(9, "surface of revolution", criterion_fig1());
    report.line(
        10,
        "structural invariants",
        criterion_max(&runs, TOL_STRUCTURAL, |e| e.report.structural),
    );
    report.line(11, "oracle cross-checks", criterion_oracles(&runs));
    println!(
        "acceptance suite finished in {:.1} s",
        started.elapsed().as_secs_f64()
    );

    let unexpected: Vec<u32> = report
        .failed
        .iter()
        .copied()
        .filter(|id| !KNOWN_UNATTAINABLE.contains(id))
        .collect();
    let mut ok = unexpected.is_empty();
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
    }
    // the known failure must be the flat-front blind spot and nothing else
    if report.failed.contains(&6) {
        let flat = flat_front_perturbation_coverage(&runs);
        let others_ok = {
            let rest: Vec<Run> = suite()
                .into_iter()
                .filter(|p| p.mu != 0.0)
                .map(Run::new)
                .collect();
            criterion_wedge(&rest).is_ok()
        };
        println!(
            "criterion 6 is known to fail on (z^2, 0) only: coverage there {:.0}%, other pairs {}",
            100.0 * flat,
            if others_ok { "pass" } else { "FAIL" }
        );
        ok &= flat < PERTURBATION_COVERAGE && others_ok;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
