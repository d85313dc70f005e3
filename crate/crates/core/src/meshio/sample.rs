use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{Exclusion, GridSpec};
use crate::bianchi_calo::{envelope_at, BCData, EnvelopeSample, SphereSample};
use crate::curvature::{evaluate_node, LabSteps, NodeEvaluation};
use crate::error::{Error, Result};
use crate::minkowski::Point3;

/// What happened at one grid node.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeOutcome<T> {
    Valid(T),
    /// Matched one of the grid's exclusion predicates; nothing was evaluated.
    Excluded,
    Failed(Error),
}

impl<T> NodeOutcome<T> {
    pub fn valid(&self) -> Option<&T> {
        match self {
            NodeOutcome::Valid(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, NodeOutcome::Valid(_))
    }

    /// `"ok"`, `"excluded"` or the error code.
    pub fn status(&self) -> &'static str {
        match self {
            NodeOutcome::Valid(_) => "ok",
            NodeOutcome::Excluded => "excluded",
            NodeOutcome::Failed(e) => e.code(),
        }
    }

    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => NodeOutcome::Valid(v),
            Err(e) => NodeOutcome::Failed(e),
        }
    }
}

/// Per-node results over a grid, row-major (`j * nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    pub grid: GridSpec,
    pub nodes: Vec<Complex64>,
    pub values: Vec<NodeOutcome<T>>,
}

impl<T> GridField<T> {
    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_valid()).count()
    }

    pub fn iter_valid(&self) -> impl Iterator<Item = (Complex64, &T)> {
        self.nodes
            .iter()
            .zip(&self.values)
            .filter_map(|(z, v)| v.valid().map(|v| (*z, v)))
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> GridField<U> {
        GridField {
            grid: self.grid.clone(),
            nodes: self.nodes.clone(),
            values: self
                .values
                .iter()
                .map(|v| match v {
                    NodeOutcome::Valid(x) => NodeOutcome::Valid(f(x)),
                    NodeOutcome::Excluded => NodeOutcome::Excluded,
                    NodeOutcome::Failed(e) => NodeOutcome::Failed(e.clone()),
                })
                .collect(),
        }
    }
}

fn is_excluded(data: &BCData, z: Complex64, exclusions: &[Exclusion]) -> Result<bool> {
    for e in exclusions {
        let hit = match *e {
            Exclusion::Disk { centre, radius } => {
                (z - Complex64::new(centre[0], centre[1])).norm() <= radius
            }
            Exclusion::BranchPoint { eps } => data.jet(z)?.f1.norm() <= eps,
            Exclusion::RadiusBand { eps } => data.radius_at(z)?.abs() <= eps,
        };
        if hit {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Runs `eval` at every node in parallel. Each node is independent, so the
/// field is identical whatever the thread count.
fn sample_with<T: Send>(
    data: &BCData,
    grid: &GridSpec,
    eval: impl Fn(Complex64) -> Result<T> + Sync,
) -> Result<GridField<T>> {
    grid.validate()?;
    let nodes = grid.nodes();
    let values: Vec<NodeOutcome<T>> = nodes
        .par_iter()
        .map(|&z| match is_excluded(data, z, &grid.exclusions) {
            Ok(true) => NodeOutcome::Excluded,
            Ok(false) => NodeOutcome::from_result(eval(z)),
            Err(e) => NodeOutcome::Failed(e),
        })
        .collect();
    if values.iter().all(|v| matches!(v, NodeOutcome::Excluded)) {
        return Err(Error::EmptyGrid);
    }
    Ok(GridField {
        grid: grid.clone(),
        nodes,
        values,
    })
}

/// Congruence and envelope at every node of `grid`.
pub fn sample_grid(
    data: &BCData,
    grid: &GridSpec,
) -> Result<GridField<(SphereSample, EnvelopeSample)>> {
    sample_with(data, grid, |z| envelope_at(z, data))
}

/// Full pipeline including curvatures and every identity check.
pub fn evaluate_grid(
    data: &BCData,
    grid: &GridSpec,
    steps: &LabSteps,
) -> Result<GridField<NodeEvaluation>> {
    sample_with(data, grid, |z| evaluate_node(data, z, steps))
}

/// A ray `z = t e^{iθ}` in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Ray {
    pub theta: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl Ray {
    pub fn params(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.t_min],
            n => (0..n)
                .map(|k| self.t_min + (self.t_max - self.t_min) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Envelope positions along a ray, one entry per sample parameter `t`.
pub fn profile_curve(data: &BCData, ray: &Ray) -> Vec<(f64, Result<Point3>)> {
    ray.params()
        .into_iter()
        .map(|t| {
            let z = Complex64::from_polar(t, ray.theta);
            (t, envelope_at(z, data).map(|(_, env)| env.position))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holomorphic::parse_holomorphic;

    fn data(h: &str, mu: f64, grid: GridSpec) -> BCData {
        BCData::new(parse_holomorphic(h).unwrap(), mu, grid)
    }

    #[test]
    fn pole_is_flagged_and_grid_proceeds() {
        let g = GridSpec::rectangle(-1.0, 1.0, -1.0, 1.0, 5, 5);
        let d = data("1/z", 0.0, g.clone());
        let field = sample_grid(&d, &g).unwrap();
        let centre = 2 * 5 + 2;
        assert_eq!(field.nodes[centre], Complex64::new(0.0, 0.0));
        assert_eq!(
            field.values[centre],
            NodeOutcome::Failed(Error::PoleAtPoint)
        );
        assert!(field.valid_count() > 20);
    }

    #[test]
    fn zero_radius_circle_is_flagged() {
        // the diagonal of the square passes through |z| = 1 at i = j = 7
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g = GridSpec::rectangle(s - 0.35, s + 0.35, s - 0.35, s + 0.35, 15, 15);
        let d = data("z^2", 1.0, g.clone());
        let field = sample_grid(&d, &g).unwrap();
        assert!(matches!(
            field.values[7 * 15 + 7],
            NodeOutcome::Failed(Error::DegenerateSphere(_))
        ));
    }

    #[test]
    fn all_excluded_is_empty() {
        let g = GridSpec::rectangle(0.1, 0.2, 0.1, 0.2, 3, 3).with_exclusion(Exclusion::Disk {
            centre: [0.15, 0.15],
            radius: 1.0,
        });
        let d = data("z^2", 1.0, g.clone());
        assert_eq!(sample_grid(&d, &g), Err(Error::EmptyGrid));
    }

    #[test]
    fn exclusions_apply() {
        let g = GridSpec::rectangle(-0.5, 0.5, -0.5, 0.5, 3, 3)
            .with_exclusion(Exclusion::BranchPoint { eps: 1e-3 });
        let d = data("z^2", 0.0, g.clone());
        let field = sample_grid(&d, &g).unwrap();
        assert_eq!(field.values[4], NodeOutcome::Excluded);
        assert_eq!(field.values[4].status(), "excluded");
    }

    #[test]
    fn single_point_ray() {
        let g = GridSpec::rectangle(0.1, 0.2, 0.1, 0.2, 3, 3);
        let d = data("z^2", 1.0, g);
        let ray = Ray {
            theta: 0.3,
            t_min: 0.4,
            t_max: 0.6,
            n: 1,
        };
        let pts = profile_curve(&d, &ray);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].0, 0.4);
        assert!(pts[0].1.is_ok());
    }

    #[test]
    fn ray_through_unit_circle_has_a_gap() {
        let g = GridSpec::rectangle(0.1, 0.2, 0.1, 0.2, 3, 3);
        let d = data("z^2", 1.0, g);
        let ray = Ray {
            theta: 0.0,
            t_min: 0.6,
            t_max: 1.4,
            n: 9,
        };
        let pts = profile_curve(&d, &ray);
        assert!(matches!(pts[4].1, Err(Error::DegenerateSphere(_))));
        assert!(pts[3].1.is_ok() && pts[5].1.is_ok());
    }
}
