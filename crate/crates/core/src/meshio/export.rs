//! Text serializations. Every float is written as `{:.16e}` (17 significant
//! digits), which round-trips through `f64` parsing and keeps files
//! byte-identical between runs.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use num_complex::Complex64;

use super::mesh::SurfaceMesh;
use super::sample::{GridField, NodeOutcome};
use crate::curvature::CurvatureReport;
use crate::error::{Error, Result};
use crate::minkowski::Point3;

pub const CSV_HEADER: [&str; 15] = [
    "z_re",
    "z_im",
    "r",
    "H",
    "K_ext",
    "k1",
    "k2",
    "weingarten_residual",
    "cayley_hamilton_residual",
    "metric_mismatch",
    "conformal_mismatch",
    "wedge_norm",
    "brioschi_defect",
    "rodrigues_offdiag",
    "status",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Vertices are written as `v u v height`: the ideal plane is `xy` and the
/// half-space height is `z`.
pub fn obj_string(mesh: &SurfaceMesh) -> String {
    let mut out = String::new();
    for p in &mesh.vertices {
        let _ = writeln!(
            out,
            "v {} {} {}",
            fmt_f64(p.u),
            fmt_f64(p.v),
            fmt_f64(p.height)
        );
    }
    for f in &mesh.faces {
        out.push('f');
        for i in f {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}

/// ASCII PLY with the same vertex convention as [`obj_string`].
pub fn ply_string(mesh: &SurfaceMesh) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.faces.len()
    );
    for p in &mesh.vertices {
        let _ = writeln!(
            out,
            "{} {} {}",
            fmt_f64(p.u),
            fmt_f64(p.v),
            fmt_f64(p.height)
        );
    }
    for f in &mesh.faces {
        let _ = write!(out, "{}", f.len());
        for i in f {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    out
}

pub fn export_obj(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    mesh.check()?;
    fs::write(path, obj_string(mesh)).map_err(Error::from)
}

pub fn export_ply(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    mesh.check()?;
    fs::write(path, ply_string(mesh)).map_err(Error::from)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One row per grid node; failed and excluded nodes keep their coordinates
/// but leave the numeric columns empty.
pub fn write_report_csv<W: io::Write>(field: &GridField<CurvatureReport>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for (z, v) in field.nodes.iter().zip(&field.values) {
        let mut row = vec![fmt_f64(z.re), fmt_f64(z.im)];
        match v {
            NodeOutcome::Valid(r) => row.extend(
                [
                    r.r,
                    r.h,
                    r.k_ext,
                    r.k1,
                    r.k2,
                    r.weingarten_residual,
                    r.cayley_hamilton_residual,
                    r.metric_mismatch,
                    r.conformal_mismatch,
                    r.wedge_norm,
                    r.brioschi_defect,
                    r.rodrigues_offdiag,
                ]
                .map(fmt_f64),
            ),
            _ => row.extend(std::iter::repeat_n(String::new(), 12)),
        }
        row.push(v.status().to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_report_csv(field: &GridField<CurvatureReport>, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_report_csv(field, &mut buf)?;
    fs::write(path, buf).map_err(Error::from)
}

/// `t, z_re, z_im, height, u, v, radial, status` per profile sample.
pub fn write_profile_csv<W: io::Write>(
    theta: f64,
    samples: &[(f64, Result<Point3>)],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "z_re", "z_im", "height", "u", "v", "radial", "status"])
        .map_err(csv_err)?;
    for (t, p) in samples {
        let z = Complex64::from_polar(*t, theta);
        let mut row = vec![fmt_f64(*t), fmt_f64(z.re), fmt_f64(z.im)];
        match p {
            Ok(p) => {
                row.extend([p.height, p.u, p.v, p.planar().norm()].map(fmt_f64));
                row.push("ok".into());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 4));
                row.push(e.code().into());
            }
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
