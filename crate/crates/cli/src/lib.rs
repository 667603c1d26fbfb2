//! Reproducible command-line experiments over polynomial threshold functions.
//!
//! The binary is a thin wrapper around [`execute`], which turns parsed
//! arguments into a rendered report and an exit code.

mod args;
mod report;

use std::path::Path;

use ptfsense_core::bounds::{radial_bound, wiggle_bound, BoundName, BoundReport};
use ptfsense_core::estimators::{plan_surface_samples, DEFAULT_SURFACE_GRID};
use ptfsense_core::{
    estimate_expected_sign_changes, estimate_gns, estimate_radial, estimate_surface_crossing,
    estimate_wiggle, gns_bound, surface_bound, CorrelationSpec, FamilySpec, McConfig, Polynomial, Ptf,
};
use thiserror::Error;

pub use args::{Cli, Command, CommonArgs, Format};
pub use report::SweepRow;
use report::{EstimateReport, SignChangeOutput, SurfaceReport, VerifyOutput};

/// Environment variable supplying the default worker count.
pub const WORKERS_ENV: &str = "PTFSENSE_WORKERS";

/// Expected crossings required at the smallest eps of a surface run.
pub const SURFACE_TARGET_CROSSINGS: u64 = 100;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("sample budget error: {0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => EXIT_INPUT,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl From<ptfsense_core::Error> for CliError {
    fn from(e: ptfsense_core::Error) -> Self {
        use ptfsense_core::Error as E;
        match e {
            E::BudgetExceeded { .. } | E::InsufficientResolution { .. } => CliError::Budget(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// A rendered report together with the process exit code it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub body: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self {
            body,
            exit_code: EXIT_OK,
        }
    }
}

/// The function under study and a printable description of where it came from.
pub struct Source {
    pub label: String,
    pub ptf: Ptf,
}

pub fn load_source(common: &CommonArgs) -> Result<Source, CliError> {
    match (&common.poly, &common.family) {
        (Some(path), None) => Ok(Source {
            label: path.display().to_string(),
            ptf: read_poly_file(path)?,
        }),
        (None, Some(spec)) => {
            let family: FamilySpec = spec.parse()?;
            Ok(Source {
                label: family.to_string(),
                ptf: family.build()?,
            })
        }
        _ => Err(CliError::Input("exactly one of --poly or --family is required".into())),
    }
}

fn read_poly_file(path: &Path) -> Result<Ptf, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let poly = Polynomial::from_json(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ptf::new(poly).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn check_samples(common: &CommonArgs) -> Result<(), CliError> {
    if common.samples < 1000 {
        return Err(CliError::Budget(format!(
            "--samples must be at least 1000, got {}",
            common.samples
        )));
    }
    Ok(())
}

fn require_eps(common: &CommonArgs) -> Result<f64, CliError> {
    common
        .eps
        .ok_or_else(|| CliError::Input("--eps is required for this subcommand".into()))
}

fn require_grid(common: &CommonArgs) -> Result<Vec<f64>, CliError> {
    let grid = common
        .eps_grid
        .clone()
        .ok_or_else(|| CliError::Input("--eps-grid is required for this subcommand".into()))?;
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(CliError::Input("--eps-grid must be non-empty and strictly decreasing".into()));
    }
    Ok(grid)
}

/// Runs a parsed command on a thread pool sized by `--workers`.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let common = cli.command.common();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = common.workers {
        pool = pool.num_threads(w.max(1));
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Input(format!("cannot start workers: {e}")))?;
    pool.install(|| dispatch(&cli.command))
}

fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    let common = command.common();
    check_samples(common)?;
    let source = load_source(common)?;
    let f = &source.ptf;
    let d = f.degree();
    let n = f.n();
    let cfg = McConfig::new(common.samples, common.seed);
    let format = common.format;

    match command {
        Command::EstimateGns(_) => {
            let eps = require_eps(common)?;
            let spec = CorrelationSpec::new(eps)?;
            let result = estimate_gns(f, &spec, &cfg)?;
            let bound = gns_bound(d.max(1), eps)?;
            let r = EstimateReport::new("estimate-gns", &source, eps, bound, result);
            Ok(Outcome::ok(report::render_estimate(&r, format)?))
        }
        Command::EstimateRadial(_) => {
            let eps = require_eps(common)?;
            let result = estimate_radial(f, eps, &cfg)?;
            let r = EstimateReport::new("estimate-radial", &source, eps, radial_bound(d, eps, n), result);
            Ok(Outcome::ok(report::render_estimate(&r, format)?))
        }
        Command::EstimateWiggle(_) => {
            let eps = require_eps(common)?;
            let result = estimate_wiggle(f, eps, &cfg)?;
            let r = EstimateReport::new("estimate-wiggle", &source, eps, wiggle_bound(d, eps, n), result);
            Ok(Outcome::ok(report::render_estimate(&r, format)?))
        }
        Command::EstimateSurface(_) => {
            let grid = common
                .eps_grid
                .clone()
                .unwrap_or_else(|| DEFAULT_SURFACE_GRID.to_vec());
            let surface = run_surface(f, &grid, common.samples, common.seed)?;
            let r = SurfaceReport::new(&source, surface_bound(d), surface);
            Ok(Outcome::ok(report::render_surface(&r, format)?))
        }
        Command::SignChanges(args) => {
            let summary = estimate_expected_sign_changes(f, &cfg)?;
            let audit = report::audit_circles(f, args.audit, common.seed)?;
            let out = SignChangeOutput::new(&source, summary, audit);
            Ok(Outcome::ok(report::render_sign_changes(&out, format)?))
        }
        Command::VerifyBounds(_) => {
            let eps = require_eps(common)?;
            let spec = CorrelationSpec::new(eps)?;
            let mut reports = vec![
                BoundReport::new(BoundName::Gns, d, n, eps, gns_bound(d.max(1), eps)?, estimate_gns(f, &spec, &cfg)?),
                BoundReport::new(BoundName::Radial, d, n, eps, radial_bound(d, eps, n), estimate_radial(f, eps, &cfg)?),
                BoundReport::new(BoundName::Wiggle, d, n, eps, wiggle_bound(d, eps, n), estimate_wiggle(f, eps, &cfg)?),
            ];
            if common.eps_grid.is_some() {
                let grid = require_grid(common)?;
                let surface = run_surface(f, &grid, common.samples, common.seed)?;
                reports.push(report::surface_bound_report(d, n, &surface));
            }
            let out = VerifyOutput::new(&source, reports);
            let exit_code = if out.all_satisfied { EXIT_OK } else { EXIT_VIOLATION };
            Ok(Outcome {
                body: report::render_verify(&out, format)?,
                exit_code,
            })
        }
        Command::Sweep(_) => {
            let grid = require_grid(common)?;
            let rows = sweep(f, &grid, &cfg)?;
            Ok(Outcome::ok(report::render_sweep(&rows, format)?))
        }
    }
}

fn run_surface(
    f: &Ptf,
    grid: &[f64],
    samples: u64,
    seed: u64,
) -> Result<ptfsense_core::SurfaceEstimate, CliError> {
    let per_eps = plan_surface_samples(f, grid, SURFACE_TARGET_CROSSINGS, samples, samples, seed)?;
    Ok(estimate_surface_crossing(f, grid, per_eps, seed)?)
}

/// Noise sensitivity against its bound on each eps of a decreasing grid.
pub fn sweep(f: &Ptf, grid: &[f64], cfg: &McConfig) -> Result<Vec<SweepRow>, CliError> {
    let d = f.degree().max(1);
    grid.iter()
        .map(|&eps| {
            let spec = CorrelationSpec::new(eps)?;
            let r = estimate_gns(f, &spec, cfg)?;
            let bound = gns_bound(d, eps)?;
            Ok(SweepRow {
                eps,
                estimate: r.estimate,
                std_error: r.std_error,
                bound,
                ratio: r.estimate / bound,
            })
        })
        .collect()
}

/// Writes the report to `--out` (or stdout) and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(outcome) => {
            let written = match &cli.command.common().out {
                Some(path) => std::fs::write(path, &outcome.body),
                None => {
                    print!("{}", outcome.body);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write report: {e}");
                return EXIT_INPUT;
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
