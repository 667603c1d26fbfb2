use ptfsense_core::bounds::{BoundName, BoundReport};
use ptfsense_core::{
    count_sign_changes, surface_bound, EstimateResult, Ptf, SeededStream, SignChangeReport,
    SignChangeSummary, SurfaceEstimate,
};
use serde::Serialize;

use crate::{CliError, Format, Source};

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv<R: Serialize>(rows: &[R]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub command: &'static str,
    pub function: String,
    pub n: usize,
    pub d: u32,
    pub eps: f64,
    pub bound: f64,
    #[serde(flatten)]
    pub result: EstimateResult,
}

impl EstimateReport {
    pub fn new(command: &'static str, source: &Source, eps: f64, bound: f64, result: EstimateResult) -> Self {
        Self {
            command,
            function: source.label.clone(),
            n: source.ptf.n(),
            d: source.ptf.degree(),
            eps,
            bound,
            result,
        }
    }
}

#[derive(Serialize)]
struct EstimateCsvRow {
    eps: f64,
    estimate: f64,
    std_error: f64,
    ci_low: f64,
    ci_high: f64,
    samples: u64,
    seed: u64,
    bound: f64,
}

pub fn render_estimate(r: &EstimateReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => to_csv(&[EstimateCsvRow {
            eps: r.eps,
            estimate: r.result.estimate,
            std_error: r.result.std_error,
            ci_low: r.result.ci_low,
            ci_high: r.result.ci_high,
            samples: r.result.samples,
            seed: r.result.seed,
            bound: r.bound,
        }]),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceReport {
    pub command: &'static str,
    pub function: String,
    pub n: usize,
    pub d: u32,
    pub bound: f64,
    pub samples_per_eps: u64,
    #[serde(flatten)]
    pub surface: SurfaceEstimate,
}

impl SurfaceReport {
    pub fn new(source: &Source, bound: f64, surface: SurfaceEstimate) -> Self {
        Self {
            command: "estimate-surface",
            function: source.label.clone(),
            n: source.ptf.n(),
            d: source.ptf.degree(),
            bound,
            samples_per_eps: surface.samples_per_eps,
            surface,
        }
    }
}

#[derive(Serialize)]
struct SurfaceCsvRow {
    eps: f64,
    ratio: f64,
    crossings: u64,
    extrapolated: f64,
    slope: f64,
}

pub fn render_surface(r: &SurfaceReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => {
            let s = &r.surface;
            let rows: Vec<_> = (0..s.eps_grid.len())
                .map(|k| SurfaceCsvRow {
                    eps: s.eps_grid[k],
                    ratio: s.ratios[k],
                    crossings: s.crossings[k],
                    extrapolated: s.extrapolated,
                    slope: s.fit_slope,
                })
                .collect();
            to_csv(&rows)
        }
    }
}

/// Treats the extrapolated crossing ratio as the estimate of a surface bound check.
pub fn surface_bound_report(d: u32, n: usize, s: &SurfaceEstimate) -> BoundReport {
    let estimate = EstimateResult {
        estimate: s.extrapolated,
        std_error: s.std_error,
        ci_low: s.extrapolated - 2.575_829_303_548_900_4 * s.std_error,
        ci_high: s.extrapolated + 2.575_829_303_548_900_4 * s.std_error,
        samples: s.samples_per_eps * s.eps_grid.len() as u64,
        seed: 0,
    };
    let eps = s.eps_grid.last().copied().unwrap_or(0.0);
    BoundReport::new(BoundName::Surface, d, n, eps, surface_bound(d), estimate)
}

/// Per-circle reports for the first `k` circles of an audit stream.
pub fn audit_circles(f: &Ptf, k: usize, seed: u64) -> Result<Vec<SignChangeReport>, CliError> {
    let mut stream = SeededStream::new(seed, u64::MAX).open();
    let n = f.n();
    (0..k)
        .map(|_| {
            let x = stream.sample_gaussian(n)?;
            let y = stream.sample_gaussian(n)?;
            Ok(count_sign_changes(f.poly(), &x, &y)?)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SignChangeOutput {
    pub command: &'static str,
    pub function: String,
    pub n: usize,
    pub d: u32,
    #[serde(flatten)]
    pub summary: SignChangeSummary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub audit: Vec<SignChangeReport>,
}

impl SignChangeOutput {
    pub fn new(source: &Source, summary: SignChangeSummary, audit: Vec<SignChangeReport>) -> Self {
        Self {
            command: "sign-changes",
            function: source.label.clone(),
            n: source.ptf.n(),
            d: source.ptf.degree(),
            summary,
            audit,
        }
    }
}

#[derive(Serialize)]
struct HistogramRow {
    count: usize,
    circles: u64,
}

pub fn render_sign_changes(out: &SignChangeOutput, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(out),
        Format::Csv => {
            let rows: Vec<_> = out
                .summary
                .histogram
                .iter()
                .enumerate()
                .map(|(count, &circles)| HistogramRow { count, circles })
                .collect();
            to_csv(&rows)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutput {
    pub command: &'static str,
    pub function: String,
    pub all_satisfied: bool,
    pub reports: Vec<BoundReport>,
}

impl VerifyOutput {
    pub fn new(source: &Source, reports: Vec<BoundReport>) -> Self {
        Self {
            command: "verify-bounds",
            function: source.label.clone(),
            all_satisfied: reports.iter().all(|r| r.satisfied),
            reports,
        }
    }
}

#[derive(Serialize)]
struct VerifyCsvRow {
    bound_name: BoundName,
    d: u32,
    n: usize,
    eps: f64,
    bound_value: f64,
    estimate: f64,
    std_error: f64,
    satisfied: bool,
    slack: f64,
}

pub fn render_verify(out: &VerifyOutput, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(out),
        Format::Csv => {
            let rows: Vec<_> = out
                .reports
                .iter()
                .map(|r| VerifyCsvRow {
                    bound_name: r.bound_name,
                    d: r.d,
                    n: r.n,
                    eps: r.eps,
                    bound_value: r.bound_value,
                    estimate: r.estimate.estimate,
                    std_error: r.estimate.std_error,
                    satisfied: r.satisfied,
                    slack: r.slack,
                })
                .collect();
            to_csv(&rows)
        }
    }
}

/// One row of an eps sweep; the CSV header is `eps,estimate,std_error,bound,ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub ratio: f64,
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(rows),
    }
}
