//! Grid sampling, mesh assembly and file output.

mod export;
mod grid;
mod mesh;
mod sample;

pub use export::{
    export_obj, export_ply, export_report_csv, fmt_f64, obj_string, ply_string, write_profile_csv,
    write_report_csv, CSV_HEADER,
};
pub use grid::{Domain, Exclusion, GridSpec};
pub use mesh::{FaceMode, SurfaceMesh, VertexFlag};
pub use sample::{evaluate_grid, profile_curve, sample_grid, GridField, NodeOutcome, Ray};
