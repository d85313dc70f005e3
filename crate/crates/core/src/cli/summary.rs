use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::config::Tolerances;
use crate::curvature::{CurvatureReport, NodeEvaluation};
use crate::meshio::{GridField, NodeOutcome};

/// Worst value of one identity over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub identity: &'static str,
    pub max: f64,
    /// Parameter `[re, im]` of the first node attaining the maximum.
    pub argmax: Option<[f64; 2]>,
    /// `None` for diagnostics reported without a pass criterion.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

/// Running maximum; the first node wins ties and NaN beats everything.
#[derive(Debug, Clone, Copy)]
pub struct MaxTracker {
    pub max: f64,
    pub argmax: Option<Complex64>,
}

impl Default for MaxTracker {
    fn default() -> Self {
        Self {
            max: 0.0,
            argmax: None,
        }
    }
}

impl MaxTracker {
    pub fn push(&mut self, z: Complex64, v: f64) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if self.argmax.is_none() || v > self.max {
            self.max = v;
            self.argmax = Some(z);
        }
    }

    fn finish(self, identity: &'static str, tolerance: Option<f64>) -> IdentitySummary {
        IdentitySummary {
            identity,
            max: self.max,
            argmax: self.argmax.map(|z| [z.re, z.im]),
            tolerance,
            pass: tolerance.is_none_or(|t| self.max <= t),
        }
    }
}

const SPECIAL_EPS: f64 = 1e-12;

/// `μ ∈ {-1, 0, 1}`, where the Weingarten relation reduces to a classical one.
pub fn is_special(mu: f64) -> bool {
    [-1.0, 0.0, 1.0]
        .iter()
        .any(|m| (mu - m).abs() < SPECIAL_EPS)
}

/// `|H - 1|`, `|K - 1|`, `|K - H|` on the special lines, `None` elsewhere.
pub fn specialization_defect(mu: f64, r: &CurvatureReport) -> Option<f64> {
    const EPS: f64 = SPECIAL_EPS;
    if (mu + 1.0).abs() < EPS {
        Some((r.h - 1.0).abs())
    } else if mu.abs() < EPS {
        Some((r.k_ext - 1.0).abs())
    } else if (mu - 1.0).abs() < EPS {
        Some((r.k_ext - r.h).abs())
    } else {
        None
    }
}

/// Verification result of one `(h, μ)` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub h: String,
    pub mu: f64,
    pub r_scale: f64,
    pub nodes: usize,
    pub valid: usize,
    pub excluded: usize,
    /// Failure count per error code.
    pub failures: BTreeMap<&'static str, usize>,
    pub identities: Vec<IdentitySummary>,
    /// Set when the run could not produce any node to check.
    pub error: Option<String>,
    pub pass: bool,
}

impl RunSummary {
    pub fn from_field(
        h: String,
        mu: f64,
        r_scale: f64,
        field: &GridField<NodeEvaluation>,
        tol: &Tolerances,
    ) -> Self {
        let mut failures = BTreeMap::new();
        let mut excluded = 0;
        for v in &field.values {
            match v {
                NodeOutcome::Failed(e) => *failures.entry(e.code()).or_insert(0) += 1,
                NodeOutcome::Excluded => excluded += 1,
                NodeOutcome::Valid(_) => {}
            }
        }

        let gated: [(&'static str, f64, fn(&CurvatureReport) -> f64); 6] = [
            ("weingarten", tol.weingarten, |r| r.weingarten_residual),
            ("metric", tol.metric, |r| r.metric_mismatch),
            ("conformal", tol.conformal, |r| r.conformal_mismatch),
            ("wedge", tol.wedge, |r| r.wedge_norm),
            ("brioschi", tol.brioschi, |r| r.brioschi_defect),
            ("structural", tol.structural, |r| r.structural),
        ];
        let diagnostics: [(&'static str, fn(&CurvatureReport) -> f64); 2] = [
            ("cayley_hamilton", |r| r.cayley_hamilton_residual),
            ("rodrigues_offdiag", |r| r.rodrigues_offdiag),
        ];

        let reports: Vec<(Complex64, &CurvatureReport)> =
            field.iter_valid().map(|(z, ev)| (z, &ev.report)).collect();
        let track = |get: &dyn Fn(&CurvatureReport) -> Option<f64>| {
            let mut t = MaxTracker::default();
            for (z, r) in &reports {
                if let Some(v) = get(r) {
                    t.push(*z, v);
                }
            }
            t
        };

        let mut identities = Vec::new();
        for (name, t, get) in gated {
            identities.push(track(&|r| Some(get(r))).finish(name, Some(t)));
        }
        if is_special(mu) {
            identities.push(
                track(&|r| specialization_defect(mu, r))
                    .finish("specialization", Some(tol.specialization)),
            );
        }
        for (name, get) in diagnostics {
            identities.push(track(&|r| Some(get(r))).finish(name, None));
        }

        let valid = reports.len();
        let error = (valid == 0).then(|| "no valid node to check".to_string());
        let pass = error.is_none() && identities.iter().all(|i| i.pass);
        RunSummary {
            h,
            mu,
            r_scale,
            nodes: field.values.len(),
            valid,
            excluded,
            failures,
            identities,
            error,
            pass,
        }
    }

    /// A run that never reached the grid.
    pub fn failed(h: String, mu: f64, r_scale: f64, error: String) -> Self {
        RunSummary {
            h,
            mu,
            r_scale,
            nodes: 0,
            valid: 0,
            excluded: 0,
            failures: BTreeMap::new(),
            identities: Vec::new(),
            error: Some(error),
            pass: false,
        }
    }

    pub fn identity(&self, name: &str) -> Option<&IdentitySummary> {
        self.identities.iter().find(|i| i.identity == name)
    }

    /// Names of the gated identities that failed.
    pub fn failing(&self) -> Vec<&'static str> {
        self.identities
            .iter()
            .filter(|i| !i.pass)
            .map(|i| i.identity)
            .collect()
    }

    /// Human-readable block, one line per identity.
    pub fn render(&self) -> String {
        let mut out = format!(
            "h = {}, mu = {}{}: {} of {} nodes valid, {}\n",
            self.h,
            self.mu,
            if self.r_scale != 1.0 {
                format!(" (r_scale {})", self.r_scale)
            } else {
                String::new()
            },
            self.valid,
            self.nodes,
            if self.pass { "PASS" } else { "FAIL" }
        );
        if let Some(e) = &self.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        for i in &self.identities {
            let verdict = match i.tolerance {
                Some(t) => format!("<= {t:e} {}", if i.pass { "ok" } else { "FAILED" }),
                None => "(diagnostic)".into(),
            };
            let at = i
                .argmax
                .map(|[x, y]| format!(" at ({x:.6}, {y:.6})"))
                .unwrap_or_default();
            out.push_str(&format!(
                "  {:<18} max {:.3e}{at} {verdict}\n",
                i.identity, i.max
            ));
        }
        if !self.failures.is_empty() {
            let list: Vec<String> = self
                .failures
                .iter()
                .map(|(k, n)| format!("{k} x{n}"))
                .collect();
            out.push_str(&format!("  flagged nodes: {}\n", list.join(", ")));
        }
        out
    }
}
