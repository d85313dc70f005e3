//! Python bindings: surfaces from a holomorphic map, envelope points, curvature
//! reports and mesh export.

use bianchi_calo::bianchi_calo::{envelope_at, mobius_reparam, parallel_family, BCData};
use bianchi_calo::curvature::{evaluate_node, CurvatureReport, LabSteps};
use bianchi_calo::holomorphic::{eval_jet2, parse_holomorphic, HoloExpr};
use bianchi_calo::meshio::{evaluate_grid, export_obj, export_ply, sample_grid, FaceMode, GridSpec, SurfaceMesh};
use bianchi_calo::Error;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Syntax { .. } | Error::UnsupportedFunction(_) | Error::Config(_) | Error::SingularMobius(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(format!("{}: {e}", e.code())),
    }
}

/// A parsed holomorphic expression in `z`.
#[pyclass(name = "Holomorphic", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyHolomorphic {
    expr: HoloExpr,
}

#[pymethods]
impl PyHolomorphic {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            expr: parse_holomorphic(text).map_err(to_py)?,
        })
    }

    /// `(h, h', h'')` at `z`.
    fn jet(&self, z: Complex64) -> PyResult<(Complex64, Complex64, Complex64)> {
        let j = eval_jet2(&self.expr, z).map_err(to_py)?;
        Ok((j.f0, j.f1, j.f2))
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.jet(z).map(|j| j.0)
    }

    fn __str__(&self) -> String {
        self.expr.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Holomorphic('{}')", self.expr)
    }
}

/// Grid of parameter values.
#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid {
    spec: GridSpec,
}

#[pymethods]
impl PyGrid {
    #[staticmethod]
    fn rectangle(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> PyResult<Self> {
        let spec = GridSpec::rectangle(x_min, x_max, y_min, y_max, nx, ny);
        spec.validate().map_err(to_py)?;
        Ok(Self { spec })
    }

    #[staticmethod]
    fn annulus(r_min: f64, r_max: f64, nr: usize, ntheta: usize) -> PyResult<Self> {
        let spec = GridSpec::annulus(r_min, r_max, nr, ntheta);
        spec.validate().map_err(to_py)?;
        Ok(Self { spec })
    }

    fn nodes(&self) -> Vec<Complex64> {
        self.spec.nodes()
    }

    fn __len__(&self) -> usize {
        self.spec.len()
    }
}

fn report_dict<'py>(py: Python<'py>, r: &CurvatureReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("z", r.z)?;
    d.set_item("r", r.r)?;
    d.set_item("H", r.h)?;
    d.set_item("K_ext", r.k_ext)?;
    d.set_item("k1", r.k1)?;
    d.set_item("k2", r.k2)?;
    d.set_item("weingarten_residual", r.weingarten_residual)?;
    d.set_item("cayley_hamilton_residual", r.cayley_hamilton_residual)?;
    d.set_item("metric_mismatch", r.metric_mismatch)?;
    d.set_item("conformal_mismatch", r.conformal_mismatch)?;
    d.set_item("wedge_norm", r.wedge_norm)?;
    d.set_item("brioschi_defect", r.brioschi_defect)?;
    d.set_item("rodrigues_offdiag", r.rodrigues_offdiag)?;
    d.set_item("structural", r.structural)?;
    Ok(d)
}

/// Linear Weingarten surface built from `h` and `mu` over a grid.
#[pyclass(name = "Surface", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySurface {
    data: BCData,
    steps: LabSteps,
}

#[pymethods]
impl PySurface {
    #[new]
    #[pyo3(signature = (h, mu, grid, fd_step = 1e-4, brioschi_step = 1e-3))]
    fn new(h: &str, mu: f64, grid: &PyGrid, fd_step: f64, brioschi_step: f64) -> PyResult<Self> {
        if !mu.is_finite() {
            return Err(PyValueError::new_err("mu must be finite"));
        }
        if !(fd_step > 0.0 && brioschi_step > 0.0) {
            return Err(PyValueError::new_err("steps must be positive"));
        }
        Ok(Self {
            data: BCData::new(parse_holomorphic(h).map_err(to_py)?, mu, grid.spec.clone()),
            steps: LabSteps { fd_step, brioschi_step },
        })
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.data.mu
    }

    #[getter]
    fn h(&self) -> String {
        self.data.h.to_string()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            spec: self.data.domain.clone(),
        }
    }

    /// Signed horosphere radius at `z`.
    fn radius(&self, z: Complex64) -> PyResult<f64> {
        self.data.radius_at(z).map_err(to_py)
    }

    /// Envelope point `(height, u, v)` in the upper half-space.
    fn point(&self, z: Complex64) -> PyResult<(f64, f64, f64)> {
        let (_, env) = envelope_at(z, &self.data).map_err(to_py)?;
        Ok((env.position.height, env.position.u, env.position.v))
    }

    /// Curvatures and every identity residual at `z`.
    fn evaluate<'py>(&self, py: Python<'py>, z: Complex64) -> PyResult<Bound<'py, PyDict>> {
        let e = evaluate_node(&self.data, z, &self.steps).map_err(to_py)?;
        report_dict(py, &e.report)
    }

    /// One entry per node: a report dict, or the failure code as a string.
    fn evaluate_grid<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let field = py
            .detach(|| evaluate_grid(&self.data, &self.data.domain, &self.steps))
            .map_err(to_py)?;
        field
            .values
            .iter()
            .map(|v| match v.valid() {
                Some(e) => report_dict(py, &e.report).map(Bound::into_any),
                None => Ok(v.status().into_pyobject(py)?.into_any()),
            })
            .collect()
    }

    fn parallel(&self, rho: f64) -> Self {
        Self {
            data: parallel_family(&self.data, rho),
            steps: self.steps,
        }
    }

    /// Precomposes `h` with `(a z + b) / (c z + d)`.
    fn reparametrize(&self, a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> PyResult<Self> {
        Ok(Self {
            data: mobius_reparam(&self.data, a, b, c, d).map_err(to_py)?,
            steps: self.steps,
        })
    }

    /// Writes the envelope mesh; the format follows the extension (`.obj` or `.ply`).
    #[pyo3(signature = (path, triangles = false))]
    fn export(&self, py: Python<'_>, path: std::path::PathBuf, triangles: bool) -> PyResult<usize> {
        let mode = if triangles { FaceMode::Triangles } else { FaceMode::Quads };
        py.detach(|| {
            let field = sample_grid(&self.data, &self.data.domain)?;
            let mesh = SurfaceMesh::envelope(&field, mode);
            match path.extension().and_then(|e| e.to_str()) {
                Some("ply") => export_ply(&mesh, &path)?,
                _ => export_obj(&mesh, &path)?,
            }
            Ok(mesh.vertices.len())
        })
        .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Surface('{}', mu={})", self.data.h, self.data.mu)
    }
}

#[pymodule]
fn pybianchi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHolomorphic>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PySurface>()?;
    Ok(())
}
