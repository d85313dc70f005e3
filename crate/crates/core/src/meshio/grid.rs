use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter domain in the z-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Domain {
    Rectangle {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
    /// Polar grid; `nx` counts radii and `ny` angles. A full turn in
    /// `[theta_min, theta_max]` wraps around without repeating the seam.
    Annulus {
        r_min: f64,
        r_max: f64,
        #[serde(default)]
        theta_min: f64,
        #[serde(default = "full_turn")]
        theta_max: f64,
    },
}

fn full_turn() -> f64 {
    TAU
}

/// Nodes matching any exclusion are flagged without evaluating the pipeline.
/// Degenerate radii and poles are caught by the pipeline itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exclusion {
    /// `|z - centre| <= radius`.
    Disk { centre: [f64; 2], radius: f64 },
    /// `|h'(z)| <= eps`.
    BranchPoint { eps: f64 },
    /// `|r(z)| <= eps`.
    RadiusBand { eps: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(flatten)]
    pub shape: Domain,
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub exclusions: Vec<Exclusion>,
}

impl GridSpec {
    pub fn rectangle(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Self {
        Self {
            shape: Domain::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            },
            nx,
            ny,
            exclusions: Vec::new(),
        }
    }

    pub fn annulus(r_min: f64, r_max: f64, nx: usize, ny: usize) -> Self {
        Self {
            shape: Domain::Annulus {
                r_min,
                r_max,
                theta_min: 0.0,
                theta_max: TAU,
            },
            nx,
            ny,
            exclusions: Vec::new(),
        }
    }

    pub fn with_exclusion(mut self, e: Exclusion) -> Self {
        self.exclusions.push(e);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Config(format!(
                "grid counts must be at least 2, got {}x{}",
                self.nx, self.ny
            )));
        }
        let ordered = match self.shape {
            Domain::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => x_min < x_max && y_min < y_max,
            Domain::Annulus {
                r_min,
                r_max,
                theta_min,
                theta_max,
            } => 0.0 <= r_min && r_min < r_max && theta_min < theta_max,
        };
        if !ordered {
            return Err(Error::Config("grid bounds are not ordered".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the angular direction closes up (full-turn annulus).
    pub fn wraps(&self) -> bool {
        match self.shape {
            Domain::Annulus {
                theta_min,
                theta_max,
                ..
            } => ((theta_max - theta_min) - TAU).abs() < 1e-12,
            Domain::Rectangle { .. } => false,
        }
    }

    /// Node `(i, j)` with `i < nx`, `j < ny`; row-major index is `j * nx + i`.
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let frac = |k: usize, n: usize| k as f64 / (n - 1) as f64;
        match self.shape {
            Domain::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => Complex64::new(
                x_min + (x_max - x_min) * frac(i, self.nx),
                y_min + (y_max - y_min) * frac(j, self.ny),
            ),
            Domain::Annulus {
                r_min,
                r_max,
                theta_min,
                theta_max,
            } => {
                let rad = r_min + (r_max - r_min) * frac(i, self.nx);
                let theta = if self.wraps() {
                    theta_min + TAU * j as f64 / self.ny as f64
                } else {
                    theta_min + (theta_max - theta_min) * frac(j, self.ny)
                };
                Complex64::from_polar(rad, theta)
            }
        }
    }

    pub fn nodes(&self) -> Vec<Complex64> {
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| (i, j)))
            .map(|(i, j)| self.node(i, j))
            .collect()
    }

    /// The same grid after `z ↦ k z` for real `k > 0`.
    pub fn scaled(&self, k: f64) -> GridSpec {
        let shape = match self.shape {
            Domain::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => Domain::Rectangle {
                x_min: x_min * k,
                x_max: x_max * k,
                y_min: y_min * k,
                y_max: y_max * k,
            },
            Domain::Annulus {
                r_min,
                r_max,
                theta_min,
                theta_max,
            } => Domain::Annulus {
                r_min: r_min * k,
                r_max: r_max * k,
                theta_min,
                theta_max,
            },
        };
        let exclusions = self
            .exclusions
            .iter()
            .map(|e| match *e {
                Exclusion::Disk { centre, radius } => Exclusion::Disk {
                    centre: [centre[0] * k, centre[1] * k],
                    radius: radius * k,
                },
                ref other => other.clone(),
            })
            .collect();
        GridSpec {
            shape,
            nx: self.nx,
            ny: self.ny,
            exclusions,
        }
    }
}
