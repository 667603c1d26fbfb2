//! Seedable Gaussian streams and the correlated pairs whose disagreement
//! probabilities the estimators measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Noise rate `eps` together with its rotation angle and correlation.
///
/// `theta = arcsin(sqrt(2 eps - eps^2))` is the angle for which
/// `cos(theta) X + sin(theta) Y` has the same law as the noisy copy
/// `(1 - eps) X + sqrt(2 eps - eps^2) Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub eps: f64,
    pub theta: f64,
    pub rho: f64,
}

impl CorrelationSpec {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid(format!("noise rate must lie in (0, 1], got {eps}")));
        }
        Ok(Self {
            eps,
            theta: noise_angle(eps),
            rho: 1.0 - eps,
        })
    }

    /// `sqrt(2 eps - eps^2)`, the weight on the fresh Gaussian.
    pub fn noise_weight(&self) -> f64 {
        self.theta.sin()
    }
}

/// `arcsin(sqrt(2 eps - eps^2))` without cancellation for tiny `eps`.
pub fn noise_angle(eps: f64) -> f64 {
    let s = (2.0 * eps).sqrt() * (1.0 - eps / 2.0).sqrt();
    s.min(1.0).asin()
}

/// Identifies a reproducible substream: equal `(seed, stream_id)` pairs give
/// identical draws on every platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn open(self) -> GaussianStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        GaussianStream { rng }
    }
}

/// Standard normal generator over a ChaCha8 substream (ziggurat transform).
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
}

impl GaussianStream {
    #[inline]
    pub fn next(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    #[inline]
    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.rng.sample(StandardNormal);
        }
    }

    /// `n` i.i.d. standard normal components.
    pub fn sample_gaussian(&mut self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let mut v = vec![0.0; n];
        self.fill(&mut v);
        Ok(v)
    }
}

fn same_dim(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(())
}

/// `(X, Z)` with `Z = (1 - eps) X + sqrt(2 eps - eps^2) Y`.
pub fn correlated_pair(x: &[f64], y: &[f64], spec: &CorrelationSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    same_dim(x, y)?;
    let (a, b) = (spec.rho, spec.noise_weight());
    let z = x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect();
    Ok((x.to_vec(), z))
}

/// `cos(phi) X + sin(phi) Y`.
pub fn rotate(x: &[f64], y: &[f64], phi: f64) -> Result<Vec<f64>> {
    same_dim(x, y)?;
    let (s, c) = phi.sin_cos();
    Ok(x.iter().zip(y).map(|(xi, yi)| c * xi + s * yi).collect())
}

/// `(X_phi, X_{phi + theta})` on the great circle through `X` and `Y`.
pub fn rotated_pair(
    x: &[f64],
    y: &[f64],
    phi: f64,
    spec: &CorrelationSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((rotate(x, y, phi)?, rotate(x, y, phi + spec.theta)?))
}

/// `(X, (1 + eps) X)`.
pub fn radial_pair(x: &[f64], eps: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(eps > 0.0) {
        return Err(invalid(format!("radial step must be positive, got {eps}")));
    }
    let scale = 1.0 + eps;
    Ok((x.to_vec(), x.iter().map(|v| scale * v).collect()))
}

/// `(X, X + eps Y)`.
pub fn wiggle_pair(x: &[f64], y: &[f64], eps: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    same_dim(x, y)?;
    if !(eps > 0.0) {
        return Err(invalid(format!("wiggle step must be positive, got {eps}")));
    }
    Ok((x.to_vec(), x.iter().zip(y).map(|(a, b)| a + eps * b).collect()))
}
