use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bianchi_calo::{mobius_reparam, BCData};
use crate::curvature::LabSteps;
use crate::error::{Error, Result};
use crate::holomorphic::{parse_complex, parse_holomorphic};
use crate::meshio::{FaceMode, GridSpec};

/// Pass thresholds for the per-node identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Weingarten residual scaled by `1 + |K| + |H|`.
    pub weingarten: f64,
    /// `|H - 1|`, `|K - 1|` or `|K - H|` on the lines `μ = -1, 0, 1`.
    pub specialization: f64,
    /// `(ds,ds)` against the constant curvature metric, relative.
    pub metric: f64,
    /// `(dh,dh) = r²(ds,ds)`, relative.
    pub conformal: f64,
    pub wedge: f64,
    /// `|K_int + μ|` from the Brioschi formula.
    pub brioschi: f64,
    /// Normalisation identities of the envelope lift.
    pub structural: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            weingarten: 1e-5,
            specialization: 1e-6,
            metric: 1e-8,
            conformal: 1e-9,
            wedge: 1e-6,
            brioschi: 1e-3,
            structural: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "weingarten" => &mut self.weingarten,
            "specialization" => &mut self.specialization,
            "metric" => &mut self.metric,
            "conformal" => &mut self.conformal,
            "wedge" => &mut self.wedge,
            "brioschi" => &mut self.brioschi,
            "structural" => &mut self.structural,
            _ => return Err(Error::Config(format!("unknown tolerance `{name}`"))),
        };
        *slot = value;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let all = [
            ("weingarten", self.weingarten),
            ("specialization", self.specialization),
            ("metric", self.metric),
            ("conformal", self.conformal),
            ("wedge", self.wedge),
            ("brioschi", self.brioschi),
            ("structural", self.structural),
        ];
        for (name, v) in all {
            // zero is allowed: it is the canonical way to force a failing run
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "tolerances.{name} must be a non-negative number, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// `.obj` or `.ply`, chosen by extension.
    pub mesh: Option<PathBuf>,
    /// Mesh of horosphere centres.
    pub centres: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    /// JSON summary.
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub faces: FaceMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub rho: Vec<f64>,
}

/// Möbius coefficients as complex literals, e.g. `a = "1 + 2i"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReparamSpec {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

impl ReparamSpec {
    pub fn coefficients(&self) -> Result<[Complex64; 4]> {
        let p = |name: &str, s: &str| {
            parse_complex(s).map_err(|e| Error::Config(format!("reparam.{name}: {e}")))
        };
        Ok([
            p("a", &self.a)?,
            p("b", &self.b)?,
            p("c", &self.c)?,
            p("d", &self.d)?,
        ])
    }
}

/// One `(h, μ)` pair of a sweep; the grid falls back to the top-level one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepItem {
    pub h: String,
    pub mu: f64,
    pub grid: Option<GridSpec>,
}

/// Contents of a run configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub h: Option<String>,
    pub mu: Option<f64>,
    pub grid: Option<GridSpec>,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_brioschi_step")]
    pub brioschi_step: f64,
    /// Debug only: multiplies the radius function.
    #[serde(default = "one")]
    pub r_scale: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
    pub family: Option<FamilySpec>,
    pub reparam: Option<ReparamSpec>,
    pub sweep: Option<Vec<SweepItem>>,
}

fn default_fd_step() -> f64 {
    LabSteps::default().fd_step
}

fn default_brioschi_step() -> f64 {
    LabSteps::default().brioschi_step
}

fn one() -> f64 {
    1.0
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        for (name, v) in [
            ("fd_step", self.fd_step),
            ("brioschi_step", self.brioschi_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.r_scale.is_finite() && self.r_scale != 0.0) {
            return Err(Error::Config(format!(
                "r_scale must be finite and non-zero, got {}",
                self.r_scale
            )));
        }
        if let Some(g) = &self.grid {
            g.validate()
                .map_err(|e| Error::Config(format!("grid: {e}")))?;
        }
        if let Some(h) = &self.h {
            parse_holomorphic(h).map_err(|e| Error::Config(format!("h: {e}")))?;
        }
        if let Some(r) = &self.reparam {
            r.coefficients()?;
        }
        if let Some(items) = &self.sweep {
            for (k, it) in items.iter().enumerate() {
                parse_holomorphic(&it.h)
                    .map_err(|e| Error::Config(format!("sweep[{k}].h: {e}")))?;
                if let Some(g) = &it.grid {
                    g.validate()
                        .map_err(|e| Error::Config(format!("sweep[{k}].grid: {e}")))?;
                }
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> LabSteps {
        LabSteps {
            fd_step: self.fd_step,
            brioschi_step: self.brioschi_step,
        }
    }

    fn require_grid(&self) -> Result<GridSpec> {
        self.grid
            .clone()
            .ok_or_else(|| Error::Config("missing field `grid`".into()))
    }

    /// The construction input of a single-pair run, reparametrized if asked.
    pub fn data(&self) -> Result<BCData> {
        let h = self
            .h
            .as_deref()
            .ok_or_else(|| Error::Config("missing field `h`".into()))?;
        let mu = self
            .mu
            .ok_or_else(|| Error::Config("missing field `mu`".into()))?;
        self.pair_data(h, mu, self.require_grid()?)
    }

    fn pair_data(&self, h: &str, mu: f64, grid: GridSpec) -> Result<BCData> {
        let expr = parse_holomorphic(h).map_err(|e| Error::Config(format!("h: {e}")))?;
        let data = BCData::new(expr, mu, grid).with_r_scale(self.r_scale);
        match &self.reparam {
            Some(r) => {
                let [a, b, c, d] = r.coefficients()?;
                mobius_reparam(&data, a, b, c, d)
                    .map_err(|e| Error::Config(format!("reparam: {e}")))
            }
            None => Ok(data),
        }
    }

    /// Data for every sweep item.
    pub fn sweep_data(&self) -> Result<Vec<BCData>> {
        let items = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Config("missing field `sweep`".into()))?;
        if items.is_empty() {
            return Err(Error::Config("sweep list is empty".into()));
        }
        items
            .iter()
            .map(|it| {
                let grid = match &it.grid {
                    Some(g) => g.clone(),
                    None => self.require_grid()?,
                };
                self.pair_data(&it.h, it.mu, grid)
            })
            .collect()
    }

    pub fn rhos(&self) -> Result<Vec<f64>> {
        match &self.family {
            Some(f) if !f.rho.is_empty() => {
                if let Some(bad) = f.rho.iter().find(|r| !r.is_finite()) {
                    return Err(Error::Config(format!("family.rho contains {bad}")));
                }
                Ok(f.rho.clone())
            }
            Some(_) => Err(Error::Config("family.rho is empty".into())),
            None => Err(Error::Config("missing field `family`".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
h = "z^2"
mu = 1.0
[grid]
shape = "rectangle"
x_min = 0.1
x_max = 0.4
y_min = 0.1
y_max = 0.4
nx = 4
ny = 4
"#;

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(c.fd_step, 1e-4);
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.data().unwrap().mu, 1.0);
    }

    #[test]
    fn missing_mu_is_named() {
        let c = RunConfig::from_toml(&BASE.replace("mu = 1.0", "")).unwrap();
        let e = c.data().unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("`mu`")), "{e}");
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml(&BASE.replace("z^2", "sin(z)")).is_err());
        assert!(RunConfig::from_toml(&BASE.replace("nx = 4", "nx = 1")).is_err());
        assert!(RunConfig::from_toml(&format!("{BASE}\n[tolerances]\nwedge = -1.0\n")).is_err());
        assert!(RunConfig::from_toml(&format!("{BASE}\n[tolerances]\nwedge = 0.0\n")).is_ok());
        assert!(RunConfig::from_toml(&format!("bogus = 1\n{BASE}")).is_err());
    }

    #[test]
    fn empty_sweep_is_a_config_error() {
        let c = RunConfig::from_toml(&format!("sweep = []\n{BASE}")).unwrap();
        assert!(matches!(c.sweep_data(), Err(Error::Config(_))));
    }
}
