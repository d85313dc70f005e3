//! Command-line front end: `generate`, `verify`, `family` and `sweep`, each
//! driven by a TOML run configuration.
//!
//! Exit codes: 0 when every check passes, 1 when checks ran and at least one
//! failed, 2 when the run could not happen (configuration, I/O, empty grid).

mod config;
mod summary;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::{FamilySpec, Outputs, ReparamSpec, RunConfig, SweepItem, Tolerances};
pub use summary::{is_special, specialization_defect, IdentitySummary, MaxTracker, RunSummary};

use crate::bianchi_calo::{parallel_family, BCData};
use crate::curvature::NodeEvaluation;
use crate::error::{Error, Result};
use crate::meshio::{
    evaluate_grid, export_obj, export_ply, export_report_csv, sample_grid, GridField, SurfaceMesh,
};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

/// Tolerance for the parallel-family radius law `r̃(e^ρ z) = e^{-ρ} r(z)`.
pub const RADIUS_LAW_TOL: f64 = 1e-12;

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Directory for every output; configured file names are kept.
    pub out: Option<PathBuf>,
    pub fd_step: Option<f64>,
    pub r_scale: Option<f64>,
    pub tolerances: Vec<(String, f64)>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(h) = self.fd_step {
            cfg.fd_step = h;
        }
        if let Some(k) = self.r_scale {
            cfg.r_scale = k;
        }
        for (name, v) in &self.tolerances {
            cfg.tolerances.set(name, *v)?;
        }
        cfg.validate()
    }
}

/// What a subcommand did.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub exit_code: u8,
    pub summaries: Vec<RunSummary>,
    pub written: Vec<PathBuf>,
}

impl RunOutcome {
    fn from_summaries(summaries: Vec<RunSummary>, written: Vec<PathBuf>) -> Self {
        let exit_code = if summaries.iter().all(|s| s.pass) {
            EXIT_PASS
        } else {
            EXIT_FAIL
        };
        RunOutcome {
            exit_code,
            summaries,
            written,
        }
    }
}

/// A loaded configuration plus where its outputs go.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: RunConfig,
    pub stem: String,
    pub out: Option<PathBuf>,
}

impl Job {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Job> {
        let mut config = RunConfig::load(path)?;
        overrides.apply(&mut config)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());
        Ok(Job {
            config,
            stem,
            out: overrides.out.clone(),
        })
    }

    pub fn from_config(config: RunConfig, stem: &str, out: Option<PathBuf>) -> Result<Job> {
        config.validate()?;
        Ok(Job {
            config,
            stem: stem.into(),
            out,
        })
    }

    /// Configured path, redirected into `--out` if given. `default` names the
    /// file when only `--out` (or `always`) asks for it.
    fn target(&self, configured: &Option<PathBuf>, default: &str, always: bool) -> Option<PathBuf> {
        let name = || {
            configured
                .as_ref()
                .and_then(|p| p.file_name().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(format!("{}{default}", self.stem)))
        };
        match (&self.out, configured) {
            (Some(dir), _) => Some(dir.join(name())),
            (None, Some(p)) => Some(p.clone()),
            (None, None) if always => Some(Path::new("out").join(name())),
            (None, None) => None,
        }
    }

    fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let ext = path
            .extension()
            .map(|e| format!(".{}", e.to_string_lossy()))
            .unwrap_or_default();
        path.with_file_name(format!("{stem}{suffix}{ext}"))
    }
}

fn prepare(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    Ok(())
}

fn write_mesh(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    prepare(path)?;
    let is_ply = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("ply"));
    let res = if is_ply {
        export_ply(mesh, path)
    } else {
        export_obj(mesh, path)
    };
    res.map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_csv(field: &GridField<NodeEvaluation>, path: &Path) -> Result<()> {
    prepare(path)?;
    export_report_csv(&field.map(|ev| ev.report), path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    prepare(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Evaluates every node; a grid without a single valid node cannot be checked.
fn evaluate(data: &BCData, job: &Job) -> Result<GridField<NodeEvaluation>> {
    let field = evaluate_grid(data, &data.domain, &job.config.steps())?;
    if field.valid_count() == 0 {
        return Err(Error::EmptyGrid);
    }
    Ok(field)
}

fn summarize(data: &BCData, field: &GridField<NodeEvaluation>, job: &Job) -> RunSummary {
    RunSummary::from_field(
        data.h.to_string(),
        data.mu,
        data.r_scale,
        field,
        &job.config.tolerances,
    )
}

/// Writes the envelope mesh and the per-node CSV (plus the centre mesh and a
/// JSON summary when configured). Passes as soon as any geometry exists.
pub fn run_generate(job: &Job) -> Result<RunOutcome> {
    let data = job.config.data()?;
    let field = evaluate(&data, job)?;
    let outputs = &job.config.outputs;
    let mut written = Vec::new();

    let mesh_path = job.target(&outputs.mesh, ".obj", true).expect("always set");
    write_mesh(&SurfaceMesh::evaluated(&field, outputs.faces), &mesh_path)?;
    written.push(mesh_path);
    if let Some(p) = job.target(&outputs.centres, "_centres.obj", false) {
        let spheres = sample_grid(&data, &data.domain)?;
        write_mesh(&SurfaceMesh::centres(&spheres, outputs.faces), &p)?;
        written.push(p);
    }
    let csv_path = job.target(&outputs.csv, ".csv", true).expect("always set");
    write_csv(&field, &csv_path)?;
    written.push(csv_path);

    let summary = summarize(&data, &field, job);
    if let Some(p) = job.target(&outputs.report, ".json", false) {
        write_json(&summary, &p)?;
        written.push(p);
    }
    Ok(RunOutcome {
        exit_code: EXIT_PASS,
        summaries: vec![summary],
        written,
    })
}

/// Checks every identity over the grid against the configured tolerances.
pub fn run_verify(job: &Job) -> Result<RunOutcome> {
    let data = job.config.data()?;
    let field = evaluate(&data, job)?;
    let summary = summarize(&data, &field, job);
    let mut written = Vec::new();
    if let Some(p) = job.target(&job.config.outputs.csv, ".csv", false) {
        write_csv(&field, &p)?;
        written.push(p);
    }
    if let Some(p) = job.target(&job.config.outputs.report, ".json", false) {
        write_json(&summary, &p)?;
        written.push(p);
    }
    Ok(RunOutcome::from_summaries(vec![summary], written))
}

/// Largest `|r̃(e^ρ z) - e^{-ρ} r(z)|` over the base grid.
pub fn radius_law_defect(base: &BCData, member: &BCData, rho: f64) -> MaxTracker {
    let mut t = MaxTracker::default();
    let (grow, shrink) = (rho.exp(), (-rho).exp());
    for z in base.domain.nodes() {
        if let (Ok(r), Ok(rt)) = (base.radius_at(z), member.radius_at(z * grow)) {
            t.push(z * grow, (rt - shrink * r).abs());
        }
    }
    t
}

/// Verifies each parallel-family member with its own `μ e^{-2ρ}` and writes
/// one mesh per member.
pub fn run_family(job: &Job) -> Result<RunOutcome> {
    let base = job.config.data()?;
    let rhos = job.config.rhos()?;
    let mesh_base = job
        .target(&job.config.outputs.mesh, ".obj", true)
        .expect("always set");
    let mut summaries = Vec::new();
    let mut written = Vec::new();
    for (k, &rho) in rhos.iter().enumerate() {
        let member = parallel_family(&base, rho);
        let law = radius_law_defect(&base, &member, rho);
        let mut summary = match evaluate(&member, job) {
            Ok(field) => {
                let p = Job::with_suffix(&mesh_base, &format!("_member{k}"));
                write_mesh(
                    &SurfaceMesh::evaluated(&field, job.config.outputs.faces),
                    &p,
                )?;
                written.push(p);
                summarize(&member, &field, job)
            }
            Err(e) => RunSummary::failed(
                member.h.to_string(),
                member.mu,
                member.r_scale,
                e.to_string(),
            ),
        };
        let law = IdentitySummary {
            identity: "radius_law",
            max: law.max,
            argmax: law.argmax.map(|z| [z.re, z.im]),
            tolerance: Some(RADIUS_LAW_TOL),
            pass: law.argmax.is_some() && law.max <= RADIUS_LAW_TOL,
        };
        summary.pass &= law.pass;
        summary.identities.push(law);
        summaries.push(summary);
    }
    if let Some(p) = job.target(&job.config.outputs.report, ".json", false) {
        write_json(
            &FamilyReport {
                rho: &rhos,
                members: &summaries,
            },
            &p,
        )?;
        written.push(p);
    }
    Ok(RunOutcome::from_summaries(summaries, written))
}

#[derive(Serialize)]
struct FamilyReport<'a> {
    rho: &'a [f64],
    members: &'a [RunSummary],
}

/// `run_verify` for each sweep item. An item that cannot be evaluated counts
/// as a failed check rather than aborting the sweep.
pub fn run_sweep(job: &Job) -> Result<RunOutcome> {
    let items = job.config.sweep_data()?;
    let summaries: Vec<RunSummary> = items
        .iter()
        .map(|data| match evaluate(data, job) {
            Ok(field) => summarize(data, &field, job),
            Err(e) => RunSummary::failed(data.h.to_string(), data.mu, data.r_scale, e.to_string()),
        })
        .collect();
    let mut written = Vec::new();
    if let Some(p) = job.target(&job.config.outputs.report, ".json", false) {
        write_json(&summaries, &p)?;
        written.push(p);
    }
    Ok(RunOutcome::from_summaries(summaries, written))
}

#[derive(Debug, Parser)]
#[command(
    name = "bianchi-calo",
    version,
    about = "Bryant-type linear Weingarten surfaces from a hyperbolic Gauss map"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the surface mesh and the per-node report table.
    Generate(CommonArgs),
    /// Check every identity against its tolerance.
    Verify(CommonArgs),
    /// Generate and verify the members of a parallel family.
    Family(CommonArgs),
    /// Verify a list of (h, mu) pairs.
    Sweep(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Generate(a) | Command::Verify(a) | Command::Family(a) | Command::Sweep(a) => a,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    pub config: PathBuf,
    /// Directory for all outputs.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Central-difference step.
    #[arg(long = "fd-step")]
    pub fd_step: Option<f64>,
    /// Debug: multiply the radius function (breaks the construction on purpose).
    #[arg(long = "r-scale")]
    pub r_scale: Option<f64>,
    #[arg(long = "tolerance.weingarten", value_name = "TOL")]
    pub tol_weingarten: Option<f64>,
    #[arg(long = "tolerance.specialization", value_name = "TOL")]
    pub tol_specialization: Option<f64>,
    #[arg(long = "tolerance.metric", value_name = "TOL")]
    pub tol_metric: Option<f64>,
    #[arg(long = "tolerance.conformal", value_name = "TOL")]
    pub tol_conformal: Option<f64>,
    #[arg(long = "tolerance.wedge", value_name = "TOL")]
    pub tol_wedge: Option<f64>,
    #[arg(long = "tolerance.brioschi", value_name = "TOL")]
    pub tol_brioschi: Option<f64>,
    #[arg(long = "tolerance.structural", value_name = "TOL")]
    pub tol_structural: Option<f64>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        let tolerances = [
            ("weingarten", self.tol_weingarten),
            ("specialization", self.tol_specialization),
            ("metric", self.tol_metric),
            ("conformal", self.tol_conformal),
            ("wedge", self.tol_wedge),
            ("brioschi", self.tol_brioschi),
            ("structural", self.tol_structural),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| (n.to_string(), v)))
        .collect();
        Overrides {
            out: self.out.clone(),
            fd_step: self.fd_step,
            r_scale: self.r_scale,
            tolerances,
        }
    }
}

/// Runs one parsed command line, printing summaries to stdout and problems to
/// stderr; returns the exit code.
pub fn execute(cli: &Cli) -> u8 {
    let args = cli.command.args();
    let result = Job::load(&args.config, &args.overrides()).and_then(|job| match &cli.command {
        Command::Generate(_) => run_generate(&job),
        Command::Verify(_) => run_verify(&job),
        Command::Family(_) => run_family(&job),
        Command::Sweep(_) => run_sweep(&job),
    });
    match result {
        Ok(outcome) => {
            for s in &outcome.summaries {
                print!("{}", s.render());
            }
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            EXIT_ERROR
        }
    }
}

/// Entry point for argument lists; usage errors exit with 2, `--help` with 0.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            code
        }
    }
}
