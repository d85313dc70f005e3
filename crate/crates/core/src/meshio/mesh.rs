use serde::{Deserialize, Serialize};

use super::sample::{GridField, NodeOutcome};
use crate::bianchi_calo::{EnvelopeSample, SphereSample};
use crate::curvature::{CurvatureReport, NodeEvaluation};
use crate::error::{Error, Result};
use crate::minkowski::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceMode {
    #[default]
    Quads,
    /// Each quad split along its `(i,j)–(i+1,j+1)` diagonal.
    Triangles,
}

/// Vertex state of a grid node.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexFlag {
    Valid,
    Excluded,
    Failed(Error),
}

/// Polygon mesh over the valid nodes of a sampled grid.
///
/// Only valid nodes become vertices; `node_vertex` maps each grid node to its
/// vertex index, if any. Faces are 0-based and never touch an invalid node.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<Vec<usize>>,
    pub flags: Vec<VertexFlag>,
    pub node_vertex: Vec<Option<usize>>,
    /// Per-vertex report when the mesh was built from a full evaluation.
    pub reports: Vec<CurvatureReport>,
}

impl SurfaceMesh {
    /// Builds a mesh from any per-node position. Quads with an invalid corner
    /// are dropped; a full-turn annulus is closed across the seam.
    pub fn from_field<T>(
        field: &GridField<T>,
        position: impl Fn(&T) -> Point3,
        mode: FaceMode,
    ) -> Self {
        let (nx, ny) = (field.grid.nx, field.grid.ny);
        let mut vertices = Vec::new();
        let mut node_vertex = Vec::with_capacity(field.values.len());
        let mut flags = Vec::with_capacity(field.values.len());
        for v in &field.values {
            match v {
                NodeOutcome::Valid(x) => {
                    node_vertex.push(Some(vertices.len()));
                    vertices.push(position(x));
                    flags.push(VertexFlag::Valid);
                }
                NodeOutcome::Excluded => {
                    node_vertex.push(None);
                    flags.push(VertexFlag::Excluded);
                }
                NodeOutcome::Failed(e) => {
                    node_vertex.push(None);
                    flags.push(VertexFlag::Failed(e.clone()));
                }
            }
        }

        let rows = if field.grid.wraps() { ny } else { ny - 1 };
        let mut faces = Vec::new();
        for j in 0..rows {
            let j1 = (j + 1) % ny;
            for i in 0..nx - 1 {
                let corners = [j * nx + i, j * nx + i + 1, j1 * nx + i + 1, j1 * nx + i];
                let Some(q) = corners
                    .iter()
                    .map(|&n| node_vertex[n])
                    .collect::<Option<Vec<usize>>>()
                else {
                    continue;
                };
                match mode {
                    FaceMode::Quads => faces.push(q),
                    FaceMode::Triangles => {
                        faces.push(vec![q[0], q[1], q[2]]);
                        faces.push(vec![q[0], q[2], q[3]]);
                    }
                }
            }
        }

        SurfaceMesh {
            vertices,
            faces,
            flags,
            node_vertex,
            reports: Vec::new(),
        }
    }

    /// The second envelope (the surface itself).
    pub fn envelope(field: &GridField<(SphereSample, EnvelopeSample)>, mode: FaceMode) -> Self {
        Self::from_field(field, |(_, env)| env.position, mode)
    }

    /// Centres of the horosphere congruence.
    pub fn centres(field: &GridField<(SphereSample, EnvelopeSample)>, mode: FaceMode) -> Self {
        Self::from_field(field, |(sph, _)| sph.centre, mode)
    }

    /// The envelope with its per-vertex curvature reports attached.
    pub fn evaluated(field: &GridField<NodeEvaluation>, mode: FaceMode) -> Self {
        let mut mesh = Self::from_field(field, |ev| ev.envelope.position, mode);
        mesh.reports = field.iter_valid().map(|(_, ev)| ev.report).collect();
        mesh
    }

    /// Face indices in range and referencing valid vertices only.
    pub fn check(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.faces.iter().flatten().any(|&i| i >= n) {
            return Err(Error::Config("face index out of range".into()));
        }
        if !self.reports.is_empty() && self.reports.len() != n {
            return Err(Error::Config(
                "report count differs from vertex count".into(),
            ));
        }
        Ok(())
    }
}
