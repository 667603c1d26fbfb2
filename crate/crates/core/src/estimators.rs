//! Monte Carlo estimators for noise sensitivity, radial and wiggle
//! sensitivity, sign changes along great circles, and Gaussian surface area.
//!
//! Every estimator splits its sample budget into fixed-size shards. Shard `k`
//! draws from the substream `(seed, base + k)` and reports integer counts, so
//! results do not depend on how many threads run the shards.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::circle::{count_sign_changes_with, RootConfig};
use crate::error::{invalid, Error, Result};
use crate::poly::Ptf;
use crate::sampling::{CorrelationSpec, GaussianStream, SeededStream};

/// Samples per shard.
pub const SHARD_SIZE: u64 = 1 << 16;

/// Minimum sample counts accepted by the estimators.
pub const MIN_PROPORTION_SAMPLES: u64 = 1000;
pub const MIN_SIGN_CHANGE_SAMPLES: u64 = 100;
pub const MIN_COLLAR_SAMPLES: u64 = 10_000;

/// Below this many successes the Wilson score interval is used.
pub const WILSON_CUTOFF: u64 = 50;

/// Largest tolerated fraction of degenerate or skipped samples.
pub const MAX_DEGENERATE_FRACTION: f64 = 1e-3;

/// Fewest crossings accepted at any grid point of the surface estimator.
pub const MIN_CROSSINGS: u64 = 10;

/// Default grid for surface-area extrapolation.
pub const DEFAULT_SURFACE_GRID: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Two-sided confidence level of the reported interval.
    pub confidence: f64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            confidence: 0.99,
        }
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    fn z(&self) -> Result<f64> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(invalid(format!("confidence must lie in (0, 1), got {}", self.confidence)));
        }
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        Ok(normal.inverse_cdf(0.5 + self.confidence / 2.0))
    }

    fn require(&self, min: u64) -> Result<()> {
        if self.samples < min {
            return Err(invalid(format!("need at least {min} samples, got {}", self.samples)));
        }
        Ok(())
    }
}

/// Point estimate with standard error and confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "EstimateJson", into = "EstimateJson")]
pub struct EstimateResult {
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct EstimateJson {
    estimate: f64,
    std_error: f64,
    ci: [f64; 2],
    samples: u64,
    seed: u64,
}

impl From<EstimateJson> for EstimateResult {
    fn from(j: EstimateJson) -> Self {
        Self {
            estimate: j.estimate,
            std_error: j.std_error,
            ci_low: j.ci[0],
            ci_high: j.ci[1],
            samples: j.samples,
            seed: j.seed,
        }
    }
}

impl From<EstimateResult> for EstimateJson {
    fn from(r: EstimateResult) -> Self {
        Self {
            estimate: r.estimate,
            std_error: r.std_error,
            ci: [r.ci_low, r.ci_high],
            samples: r.samples,
            seed: r.seed,
        }
    }
}

impl EstimateResult {
    /// Binomial proportion `successes / total`.
    pub fn proportion(successes: u64, total: u64, seed: u64, z: f64) -> Self {
        let n = total as f64;
        let p = successes as f64 / n;
        let std_error = (p * (1.0 - p) / n).sqrt();
        let (ci_low, ci_high) = if successes.min(total - successes) < WILSON_CUTOFF {
            wilson(p, n, z)
        } else {
            ((p - z * std_error).max(0.0), (p + z * std_error).min(1.0))
        };
        Self {
            estimate: p,
            std_error,
            ci_low: ci_low.min(p),
            ci_high: ci_high.max(p),
            samples: total,
            seed,
        }
    }

    /// Sample mean from a running sum and sum of squares.
    pub fn mean(sum: f64, sum_sq: f64, count: u64, seed: u64, z: f64) -> Self {
        let n = count as f64;
        let mean = sum / n;
        let var = if count > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let std_error = (var / n).sqrt();
        Self {
            estimate: mean,
            std_error,
            ci_low: mean - z * std_error,
            ci_high: mean + z * std_error,
            samples: count,
            seed,
        }
    }

    /// Multiplies the estimate and its uncertainty by a positive constant.
    pub fn scaled(self, c: f64) -> Self {
        Self {
            estimate: self.estimate * c,
            std_error: self.std_error * c,
            ci_low: self.ci_low * c,
            ci_high: self.ci_high * c,
            ..self
        }
    }
}

fn wilson(p: f64, n: f64, z: f64) -> (f64, f64) {
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Runs `job` over the shard plan for `samples`, returning per-shard results
/// in shard order.
pub fn run_shards<T, F>(samples: u64, seed: u64, stream_base: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut GaussianStream, u64) -> T + Sync + Send,
{
    let shards = samples.div_ceil(SHARD_SIZE);
    (0..shards)
        .into_par_iter()
        .map(|k| {
            let count = SHARD_SIZE.min(samples - k * SHARD_SIZE);
            let mut stream = SeededStream::new(seed, stream_base + k).open();
            job(&mut stream, count)
        })
        .collect()
}

/// Counts pairs `(A, B)` with `f(A) != f(B)`, where `pair` fills `A` and `B`
/// from the stream.
fn disagreement_count<P>(f: &Ptf, cfg: &McConfig, stream_base: u64, pair: P) -> u64
where
    P: Fn(&mut GaussianStream, &mut [f64], &mut [f64]) + Sync + Send,
{
    let n = f.n();
    run_shards(cfg.samples, cfg.seed, stream_base, |stream, count| {
        let mut eval = f.poly().evaluator();
        let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
        let mut hits = 0u64;
        for _ in 0..count {
            pair(stream, &mut a, &mut b);
            if eval.sign(&a) != eval.sign(&b) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum()
}

fn proportion_estimate<P>(f: &Ptf, cfg: &McConfig, pair: P) -> Result<EstimateResult>
where
    P: Fn(&mut GaussianStream, &mut [f64], &mut [f64]) + Sync + Send,
{
    cfg.require(MIN_PROPORTION_SAMPLES)?;
    let z = cfg.z()?;
    let hits = disagreement_count(f, cfg, 0, pair);
    Ok(EstimateResult::proportion(hits, cfg.samples, cfg.seed, z))
}

/// `Pr(f(X) != f(Z))` with `Z = (1 - eps) X + sqrt(2 eps - eps^2) Y`.
pub fn estimate_gns(f: &Ptf, spec: &CorrelationSpec, cfg: &McConfig) -> Result<EstimateResult> {
    let (rho, w) = (spec.rho, spec.noise_weight());
    proportion_estimate(f, cfg, move |s, x, z| {
        s.fill(x);
        for (zi, xi) in z.iter_mut().zip(x.iter()) {
            *zi = rho * xi + w * s.next();
        }
    })
}

/// `Pr(f(X_phi) != f(X_{phi + theta}))` on the circle through two independent Gaussians.
pub fn estimate_rotation_disagreement(
    f: &Ptf,
    spec: &CorrelationSpec,
    phi: f64,
    cfg: &McConfig,
) -> Result<EstimateResult> {
    let n = f.n();
    let (s0, c0) = phi.sin_cos();
    let (s1, c1) = (phi + spec.theta).sin_cos();
    proportion_estimate(f, cfg, move |s, a, b| {
        s.fill(a);
        s.fill(b);
        for i in 0..n {
            let (x, y) = (a[i], b[i]);
            a[i] = c0 * x + s0 * y;
            b[i] = c1 * x + s1 * y;
        }
    })
}

/// `Pr(f(X) != f((1 + eps) X))`.
pub fn estimate_radial(f: &Ptf, eps: f64, cfg: &McConfig) -> Result<EstimateResult> {
    if !(eps > 0.0) {
        return Err(invalid(format!("radial step must be positive, got {eps}")));
    }
    let scale = 1.0 + eps;
    proportion_estimate(f, cfg, move |s, x, r| {
        s.fill(x);
        for (ri, xi) in r.iter_mut().zip(x.iter()) {
            *ri = scale * xi;
        }
    })
}

/// `Pr(f(X) != f(X + eps Y))`.
pub fn estimate_wiggle(f: &Ptf, eps: f64, cfg: &McConfig) -> Result<EstimateResult> {
    if !(eps > 0.0) {
        return Err(invalid(format!("wiggle step must be positive, got {eps}")));
    }
    proportion_estimate(f, cfg, move |s, x, w| {
        s.fill(x);
        for (wi, xi) in w.iter_mut().zip(x.iter()) {
            *wi = xi + eps * s.next();
        }
    })
}

/// Summary of sign changes over random great circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignChangeSummary {
    /// Mean count over non-degenerate circles.
    pub expected: EstimateResult,
    /// `histogram[c]` is the number of circles with exactly `c` sign changes.
    pub histogram: Vec<u64>,
    pub degenerate: u64,
    pub max_count: usize,
    /// The hard per-circle limit `2d`.
    pub limit: usize,
}

/// Mean number of sign changes of `phi -> f(X_phi)` over random circles.
pub fn estimate_expected_sign_changes(f: &Ptf, cfg: &McConfig) -> Result<SignChangeSummary> {
    estimate_expected_sign_changes_with(f, cfg, &RootConfig::default())
}

pub fn estimate_expected_sign_changes_with(
    f: &Ptf,
    cfg: &McConfig,
    roots: &RootConfig,
) -> Result<SignChangeSummary> {
    cfg.require(MIN_SIGN_CHANGE_SAMPLES)?;
    let z = cfg.z()?;
    let n = f.n();
    let shards = run_shards(cfg.samples, cfg.seed, 0, |stream, count| -> Result<(Vec<u64>, u64)> {
        let (mut x, mut y) = (vec![0.0; n], vec![0.0; n]);
        let mut hist = Vec::new();
        let mut degenerate = 0u64;
        for _ in 0..count {
            stream.fill(&mut x);
            stream.fill(&mut y);
            let report = count_sign_changes_with(f.poly(), &x, &y, roots)?;
            if report.degenerate {
                degenerate += 1;
                continue;
            }
            if hist.len() <= report.count {
                hist.resize(report.count + 1, 0);
            }
            hist[report.count] += 1;
        }
        Ok((hist, degenerate))
    });

    let mut histogram: Vec<u64> = Vec::new();
    let mut degenerate = 0u64;
    for shard in shards {
        let (hist, deg) = shard?;
        if histogram.len() < hist.len() {
            histogram.resize(hist.len(), 0);
        }
        for (acc, h) in histogram.iter_mut().zip(&hist) {
            *acc += h;
        }
        degenerate += deg;
    }
    if degenerate as f64 > MAX_DEGENERATE_FRACTION * cfg.samples as f64 {
        return Err(Error::TooManyDegenerate {
            skipped: degenerate,
            total: cfg.samples,
        });
    }
    let (mut sum, mut sum_sq, mut used) = (0.0, 0.0, 0u64);
    for (c, &k) in histogram.iter().enumerate() {
        let c = c as f64;
        sum += c * k as f64;
        sum_sq += c * c * k as f64;
        used += k;
    }
    let max_count = histogram.iter().rposition(|&k| k > 0).unwrap_or(0);
    Ok(SignChangeSummary {
        expected: EstimateResult::mean(sum, sum_sq, used, cfg.seed, z),
        histogram,
        degenerate,
        max_count,
        limit: 2 * f.degree() as usize,
    })
}

/// Directed boundary crossings between `X` and `X + eps Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingCounts {
    /// `f(X) = -1` and `f(X + eps Y) = +1`.
    pub minus_to_plus: u64,
    /// `f(X) = +1` and `f(X + eps Y) = -1`.
    pub plus_to_minus: u64,
    pub samples: u64,
}

impl CrossingCounts {
    /// `sqrt(2 pi) Pr(f(X) = -1, f(X + eps Y) = +1) / eps`.
    pub fn one_sided_ratio(&self, eps: f64) -> f64 {
        (2.0 * std::f64::consts::PI).sqrt() * self.minus_to_plus as f64 / self.samples as f64 / eps
    }

    /// `sqrt(2 pi) Pr(f(X) != f(X + eps Y)) / (2 eps)`.
    pub fn half_two_sided_ratio(&self, eps: f64) -> f64 {
        let both = (self.minus_to_plus + self.plus_to_minus) as f64;
        (2.0 * std::f64::consts::PI).sqrt() * both / self.samples as f64 / (2.0 * eps)
    }
}

/// Tallies directed crossings using substreams starting at `stream_base`.
pub fn crossing_counts(f: &Ptf, eps: f64, cfg: &McConfig, stream_base: u64) -> Result<CrossingCounts> {
    if !(eps > 0.0) {
        return Err(invalid(format!("step must be positive, got {eps}")));
    }
    cfg.require(MIN_PROPORTION_SAMPLES)?;
    let n = f.n();
    let parts = run_shards(cfg.samples, cfg.seed, stream_base, |stream, count| {
        let mut eval = f.poly().evaluator();
        let (mut x, mut w) = (vec![0.0; n], vec![0.0; n]);
        let (mut up, mut down) = (0u64, 0u64);
        for _ in 0..count {
            stream.fill(&mut x);
            for (wi, xi) in w.iter_mut().zip(&x) {
                *wi = xi + eps * stream.next();
            }
            match (eval.sign(&x), eval.sign(&w)) {
                (-1, 1) => up += 1,
                (1, -1) => down += 1,
                _ => {}
            }
        }
        (up, down)
    });
    let (minus_to_plus, plus_to_minus) = parts
        .into_iter()
        .fold((0, 0), |(a, b), (u, d)| (a + u, b + d));
    Ok(CrossingCounts {
        minus_to_plus,
        plus_to_minus,
        samples: cfg.samples,
    })
}

/// Surface-area estimate extrapolated from one-sided crossing ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEstimate {
    #[serde(rename = "eps")]
    pub eps_grid: Vec<f64>,
    pub ratios: Vec<f64>,
    pub extrapolated: f64,
    #[serde(rename = "slope")]
    pub fit_slope: f64,
    #[serde(skip)]
    pub crossings: Vec<u64>,
    #[serde(skip)]
    pub samples_per_eps: u64,
    /// Binomial standard error of `extrapolated`, propagated through the fit.
    #[serde(skip)]
    pub std_error: f64,
}

/// Least-squares fit `y ~ a + b x`, returning `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return (my, 0.0);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// The intercept is `sum_k w_k ratio_k`; each ratio carries an independent
/// binomial error.
fn intercept_std_error(eps: &[f64], crossings: &[u64], samples: u64) -> f64 {
    let m = eps.len() as f64;
    let mean = eps.iter().sum::<f64>() / m;
    let sxx: f64 = eps.iter().map(|e| (e - mean).powi(2)).sum();
    let n = samples as f64;
    let root_two_pi = (2.0 * std::f64::consts::PI).sqrt();
    eps.iter()
        .zip(crossings)
        .map(|(&e, &c)| {
            let w = if sxx == 0.0 { 1.0 / m } else { 1.0 / m - mean * (e - mean) / sxx };
            let p = c as f64 / n;
            let se = root_two_pi / e * (p * (1.0 - p) / n).sqrt();
            (w * se).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("empty eps grid"));
    }
    if grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(invalid("eps grid must be strictly decreasing"));
    }
    let last = grid[grid.len() - 1];
    if !(last >= 1e-4) || !(grid[0] <= 1.0) {
        return Err(invalid(format!("eps grid must lie in [1e-4, 1], got {grid:?}")));
    }
    Ok(())
}

/// Ratios `sqrt(2 pi) Pr(f(X) = -1, f(X + eps Y) = +1) / eps` on a decreasing
/// grid, extrapolated to `eps = 0` by a linear least-squares fit.
///
/// If no grid point sees a crossing the estimate is exactly zero; otherwise
/// every grid point needs at least [`MIN_CROSSINGS`].
pub fn estimate_surface_crossing(
    f: &Ptf,
    eps_grid: &[f64],
    samples_per_eps: u64,
    seed: u64,
) -> Result<SurfaceEstimate> {
    check_grid(eps_grid)?;
    let cfg = McConfig::new(samples_per_eps, seed);
    let mut ratios = Vec::with_capacity(eps_grid.len());
    let mut crossings = Vec::with_capacity(eps_grid.len());
    for (k, &eps) in eps_grid.iter().enumerate() {
        let counts = crossing_counts(f, eps, &cfg, (k as u64 + 1) << 32)?;
        crossings.push(counts.minus_to_plus);
        ratios.push(counts.one_sided_ratio(eps));
    }
    if crossings.iter().all(|&c| c == 0) {
        return Ok(SurfaceEstimate {
            eps_grid: eps_grid.to_vec(),
            ratios,
            extrapolated: 0.0,
            fit_slope: 0.0,
            crossings,
            samples_per_eps,
            std_error: 0.0,
        });
    }
    if let Some(k) = crossings.iter().position(|&c| c < MIN_CROSSINGS) {
        return Err(Error::InsufficientResolution {
            eps: eps_grid[k],
            crossings: crossings[k],
        });
    }
    let (extrapolated, fit_slope) = linear_fit(eps_grid, &ratios);
    let std_error = intercept_std_error(eps_grid, &crossings, samples_per_eps);
    Ok(SurfaceEstimate {
        eps_grid: eps_grid.to_vec(),
        ratios,
        extrapolated,
        fit_slope,
        crossings,
        samples_per_eps,
        std_error,
    })
}

/// Samples needed for relative error `rel` on a probability near `p`:
/// `(4 / rel)^2 (1 - p) / p`.
pub fn plan_samples(p: f64, rel: f64) -> Option<u64> {
    if !(p > 0.0 && p <= 1.0 && rel > 0.0) {
        return None;
    }
    Some(((4.0 / rel).powi(2) * (1.0 - p) / p).ceil() as u64)
}

/// Per-grid-point sample count giving at least `target` expected crossings at
/// the smallest `eps`, estimated from a pilot at the largest `eps`.
///
/// Returns `Ok(min_samples)` if the pilot sees no crossings at all and
/// [`Error::BudgetExceeded`] if the requirement is above `cap`.
pub fn plan_surface_samples(
    f: &Ptf,
    eps_grid: &[f64],
    target: u64,
    min_samples: u64,
    cap: u64,
    seed: u64,
) -> Result<u64> {
    check_grid(eps_grid)?;
    const PILOT: u64 = 100_000;
    let (big, small) = (eps_grid[0], eps_grid[eps_grid.len() - 1]);
    let pilot = crossing_counts(f, big, &McConfig::new(PILOT, seed), u64::MAX >> 1)?;
    if pilot.minus_to_plus == 0 {
        return Ok(min_samples);
    }
    let p_small = pilot.minus_to_plus as f64 / PILOT as f64 * small / big;
    let required = ((target as f64 / p_small).ceil() as u64).max(min_samples);
    if required > cap {
        return Err(Error::BudgetExceeded { required, cap });
    }
    Ok(required)
}

/// First-order collar estimate `Pr(|p(X)| <= delta |grad p(X)|) / (2 delta)`.
///
/// This treats `|p| / |grad p|` as the distance to the zero set, which is
/// exact for affine `p` and biased otherwise.
pub fn estimate_surface_collar(f: &Ptf, delta: f64, cfg: &McConfig) -> Result<EstimateResult> {
    if !(delta > 0.0) {
        return Err(invalid(format!("collar width must be positive, got {delta}")));
    }
    cfg.require(MIN_COLLAR_SAMPLES)?;
    let z = cfg.z()?;
    let n = f.n();
    let poly = f.poly();
    let parts = run_shards(cfg.samples, cfg.seed, 0, |stream, count| -> Result<(u64, u64)> {
        let mut eval = poly.evaluator();
        let mut x = vec![0.0; n];
        let (mut inside, mut skipped) = (0u64, 0u64);
        for _ in 0..count {
            stream.fill(&mut x);
            let v = eval.eval(&x);
            let g = poly.gradient(&x)?;
            let norm = g.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm == 0.0 {
                if v.abs() <= delta {
                    skipped += 1;
                }
                continue;
            }
            if v.abs() <= delta * norm {
                inside += 1;
            }
        }
        Ok((inside, skipped))
    });
    let (mut inside, mut skipped) = (0u64, 0u64);
    for part in parts {
        let (i, s) = part?;
        inside += i;
        skipped += s;
    }
    if skipped as f64 > MAX_DEGENERATE_FRACTION * cfg.samples as f64 {
        return Err(Error::TooManyDegenerate {
            skipped,
            total: cfg.samples,
        });
    }
    let used = cfg.samples - skipped;
    Ok(EstimateResult::proportion(inside, used, cfg.seed, z).scaled(1.0 / (2.0 * delta)))
}
