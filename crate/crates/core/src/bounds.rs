//! Closed-form upper bounds for degree-`d` threshold functions and the
//! density used to control radial sensitivity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};
use crate::estimators::EstimateResult;
use crate::sampling::noise_angle;

/// Noise sensitivity bound `d * arcsin(sqrt(2 eps - eps^2)) / pi`.
pub fn gns_bound(d: u32, eps: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("degree must be at least 1"));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(invalid(format!("noise rate must lie in [0, 1], got {eps}")));
    }
    Ok(f64::from(d) * noise_angle(eps) / PI)
}

/// Small-noise form `d * sqrt(2 eps) / pi`.
pub fn gns_bound_asymptotic(d: u32, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("noise rate must lie in (0, 1], got {eps}")));
    }
    Ok(f64::from(d) * (2.0 * eps).sqrt() / PI)
}

/// Gaussian surface area bound `d / sqrt(2 pi)`.
pub fn surface_bound(d: u32) -> f64 {
    f64::from(d) / (2.0 * PI).sqrt()
}

/// Bound on `Pr(f(X) != f((1 + eps) X))`: `d eps sqrt(n / (4 pi))`.
pub fn radial_bound(d: u32, eps: f64, n: usize) -> f64 {
    f64::from(d) * eps * (n as f64 / (4.0 * PI)).sqrt()
}

/// Bound on `Pr(f(X) != f(X + eps Y))`: `d eps / pi + (d eps^2 / 4) sqrt(n / pi)`.
pub fn wiggle_bound(d: u32, eps: f64, n: usize) -> f64 {
    let d = f64::from(d);
    d * eps / PI + d * eps * eps / 4.0 * (n as f64 / PI).sqrt()
}

/// Natural log of [`chi2_log_density`].
pub fn ln_chi2_log_density(y: f64, n: usize) -> f64 {
    let half = n as f64 / 2.0;
    let ey = y.exp();
    if ey.is_infinite() {
        return f64::NEG_INFINITY;
    }
    half * y - ey / 2.0 - half * std::f64::consts::LN_2 - ln_gamma(half)
}

/// Density of `y = 2 log |X|` for `X` standard Gaussian in `n` dimensions:
/// `e^{n y / 2} e^{-e^y / 2} / (2^{n/2} Gamma(n/2))`.
pub fn chi2_log_density(y: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    Ok(ln_chi2_log_density(y, n).exp())
}

/// Golden-section search for the maximizer of a unimodal function on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    (lo + hi) / 2.0
}

/// Numerical maximizer and maximum of the log-radius density, searched on
/// `[log n - 5, log n + 5]`.
pub fn chi2_log_density_max(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let center = (n as f64).ln();
    let y = golden_section_max(|y| ln_chi2_log_density(y, n), center - 5.0, center + 5.0, 1e-10);
    Ok((y, chi2_log_density(y, n)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    Gns,
    Surface,
    Radial,
    Wiggle,
}

/// Comparison of a Monte Carlo estimate with its closed-form bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_name: BoundName,
    pub d: u32,
    pub n: usize,
    pub eps: f64,
    pub bound_value: f64,
    pub estimate: EstimateResult,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundReport {
    /// Standard errors of tolerance granted to the estimate.
    pub const SIGMAS: f64 = 4.0;

    pub fn new(bound_name: BoundName, d: u32, n: usize, eps: f64, bound_value: f64, estimate: EstimateResult) -> Self {
        let satisfied = estimate.estimate <= bound_value + Self::SIGMAS * estimate.std_error;
        Self {
            bound_name,
            d,
            n,
            eps,
            bound_value,
            slack: bound_value - estimate.estimate,
            estimate,
            satisfied,
        }
    }
}
