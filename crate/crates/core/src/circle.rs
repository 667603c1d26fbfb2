//! Restriction of a polynomial to the great circle `phi -> cos(phi) X + sin(phi) Y`.
//!
//! Substituting `cos(phi) = (z + 1/z) / 2` and `sin(phi) = (z - 1/z) / (2i)` with
//! `z = e^{i phi}` turns `z^d g(X_phi)` into an ordinary polynomial `h` of degree
//! `2d`. Zeros of `g` along the circle are exactly the unit-modulus roots of `h`,
//! so the restriction changes sign at most `2d` times.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{sgn, Polynomial};
use crate::sampling::rotate;

/// Numerical tolerances for root counting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Roots with `||z| - 1|` at most this are treated as lying on the circle.
    pub unit_band: f64,
    /// Candidate angles closer than this are merged.
    pub angle_dedup: f64,
    /// Relative magnitude below which leading/trailing coefficients are trimmed.
    pub trim: f64,
    /// Relative magnitude below which the whole restriction counts as zero.
    pub degenerate: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            unit_band: 1e-7,
            angle_dedup: 1e-8,
            trim: 1e-12,
            degenerate: 1e-12,
        }
    }
}

/// `h(z) = sum_k c_k z^k` with `h(e^{i phi}) = e^{i d phi} g(X_phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirclePolynomial {
    pub d: u32,
    pub coeffs: Vec<Complex64>,
    pub scale: f64,
}

impl CirclePolynomial {
    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.coeffs.iter().rev().fold((zero, zero), |(v, dv), &c| (v * z + c, dv * z + v))
    }

    /// Value of `g` on the circle recovered from `h`: `e^{-i d phi} h(e^{i phi})`.
    pub fn restriction_at(&self, phi: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, phi);
        self.eval(z) * Complex64::from_polar(1.0, -(self.d as f64) * phi)
    }

    /// Largest relative violation of `conj(c_k) = c_{2d-k}`.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.coeffs.len();
        if self.scale == 0.0 {
            return 0.0;
        }
        (0..m)
            .map(|k| (self.coeffs[k].conj() - self.coeffs[m - 1 - k]).norm())
            .fold(0.0, f64::max)
            / self.scale
    }

    /// All finite nonzero roots, via eigenvalues of the companion matrix of
    /// the trimmed monic normalization, polished by Newton steps.
    pub fn roots(&self, trim: f64) -> Result<Vec<Complex64>> {
        let cutoff = trim * self.scale;
        let lo = self.coeffs.iter().position(|c| c.norm() > cutoff);
        let hi = self.coeffs.iter().rposition(|c| c.norm() > cutoff);
        let (lo, hi) = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Ok(Vec::new()),
        };
        let m = hi - lo;
        if m == 0 {
            return Ok(Vec::new());
        }
        let lead = self.coeffs[hi];
        let mut companion = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        for i in 1..m {
            companion[i][i - 1] = Complex64::new(1.0, 0.0);
        }
        for k in 0..m {
            companion[k][m - 1] = -self.coeffs[lo + k] / lead;
        }
        let eig = hessenberg_eigenvalues(companion)?;
        Ok(eig.into_iter().map(|z| self.polish(z)).collect())
    }

    fn polish(&self, mut z: Complex64) -> Complex64 {
        let mut best = self.eval(z).norm();
        for _ in 0..3 {
            let (v, dv) = self.eval_with_derivative(z);
            if dv.norm() == 0.0 {
                break;
            }
            let cand = z - v / dv;
            let val = self.eval(cand).norm();
            if !(val < best) {
                break;
            }
            z = cand;
            best = val;
        }
        z
    }
}

/// Eigenvalues of an upper Hessenberg matrix by shifted complex QR with
/// Givens rotations and Wilkinson shifts.
fn hessenberg_eigenvalues(mut h: Vec<Vec<Complex64>>) -> Result<Vec<Complex64>> {
    const MAX_ITER: usize = 60;
    let zero = Complex64::new(0.0, 0.0);
    let m = h.len();
    let mut eig = vec![zero; m];
    let mut hi = m;
    let mut iter = 0;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(m);
    while hi > 0 {
        let top = hi - 1;
        let mut lo = top;
        while lo > 0 {
            let scale = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            if h[lo][lo - 1].norm() <= f64::EPSILON * scale {
                h[lo][lo - 1] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == top {
            eig[top] = h[top][top];
            hi = top;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_ITER {
            return Err(Error::RootFinding);
        }

        let (a, b) = (h[top - 1][top - 1], h[top - 1][top]);
        let (c, d) = (h[top][top - 1], h[top][top]);
        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            d + Complex64::new(0.75 * c.norm(), 0.0)
        } else {
            let half = (a - d) / 2.0;
            let disc = (half * half + b * c).sqrt();
            let (s1, s2) = (d + half + disc, d + half - disc);
            if (s1 - d).norm() < (s2 - d).norm() {
                s1
            } else {
                s2
            }
        };

        for k in lo..=top {
            h[k][k] -= shift;
        }
        rot.clear();
        for k in lo..top {
            let (x, y) = (h[k][k], h[k + 1][k]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (1.0, zero)
            } else if x.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                (x.norm() / r, x / x.norm() * y.conj() / r)
            };
            for j in k..=top {
                let (u, v) = (h[k][j], h[k + 1][j]);
                h[k][j] = u * cs + sn * v;
                h[k + 1][j] = -sn.conj() * u + v * cs;
            }
            rot.push((cs, sn));
        }
        for (idx, &(cs, sn)) in rot.iter().enumerate() {
            let k = lo + idx;
            for row in h.iter_mut().take((k + 2).min(top) + 1).skip(lo) {
                let (u, v) = (row[k], row[k + 1]);
                row[k] = u * cs + v * sn.conj();
                row[k + 1] = -u * sn + v * cs;
            }
        }
        for k in lo..=top {
            h[k][k] += shift;
        }
    }
    Ok(eig)
}

/// Sign changes of `phi -> g(X_phi)` on `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignChangeReport {
    pub angles: Vec<f64>,
    pub count: usize,
    pub degenerate: bool,
}

impl SignChangeReport {
    fn degenerate() -> Self {
        Self {
            angles: Vec::new(),
            count: 0,
            degenerate: true,
        }
    }
}

fn check_dims(p: &Polynomial, x: &[f64], y: &[f64]) -> Result<()> {
    for len in [x.len(), y.len()] {
        if len != p.n() {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                got: len,
            });
        }
    }
    Ok(())
}

/// `g(cos(phi) X + sin(phi) Y)`.
pub fn eval_along_circle(p: &Polynomial, x: &[f64], y: &[f64], phi: f64) -> Result<f64> {
    check_dims(p, x, y)?;
    p.evaluate(&rotate(x, y, phi)?)
}

/// Builds the degree-`2d` circle polynomial of `p` for the circle through `X`, `Y`.
pub fn circle_polynomial(p: &Polynomial, x: &[f64], y: &[f64]) -> Result<CirclePolynomial> {
    circle_polynomial_with(p, x, y, RootConfig::default().degenerate)
}

fn circle_polynomial_with(
    p: &Polynomial,
    x: &[f64],
    y: &[f64],
    degenerate: f64,
) -> Result<CirclePolynomial> {
    check_dims(p, x, y)?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = p.degree() as usize;
    // x_i(phi) = up_i z + down_i / z
    let up: Vec<Complex64> = x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, -b) / 2.0).collect();
    let down: Vec<Complex64> = up.iter().map(|c| c.conj()).collect();

    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * d + 1];
    let mut q: Vec<Complex64> = Vec::with_capacity(d + 1);
    for t in p.terms() {
        // q(w) = prod_i (down_i + up_i w)^{e_i}, with w = z^2
        q.clear();
        q.push(Complex64::new(t.coeff, 0.0));
        for (i, &e) in t.exps.iter().enumerate() {
            for _ in 0..e {
                q.push(Complex64::new(0.0, 0.0));
                for j in (0..q.len()).rev() {
                    let shifted = if j > 0 { q[j - 1] * up[i] } else { Complex64::new(0.0, 0.0) };
                    q[j] = q[j] * down[i] + shifted;
                }
            }
        }
        let k = q.len() - 1;
        for (j, c) in q.iter().enumerate() {
            coeffs[d - k + 2 * j] += c;
        }
    }

    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let radius = up
        .iter()
        .fold(1.0f64, |m, c| m.max(2.0 * c.norm()));
    let input_scale = p.max_abs_coeff() * radius.powi(d as i32);
    if !(scale > degenerate * input_scale) {
        return Err(Error::DegenerateRestriction);
    }
    Ok(CirclePolynomial {
        d: d as u32,
        coeffs,
        scale,
    })
}

/// Counts sign changes along the circle with default tolerances.
pub fn count_sign_changes(p: &Polynomial, x: &[f64], y: &[f64]) -> Result<SignChangeReport> {
    count_sign_changes_with(p, x, y, &RootConfig::default())
}

pub fn count_sign_changes_with(
    p: &Polynomial,
    x: &[f64],
    y: &[f64],
    cfg: &RootConfig,
) -> Result<SignChangeReport> {
    let h = match circle_polynomial_with(p, x, y, cfg.degenerate) {
        Ok(h) => h,
        Err(Error::DegenerateRestriction) => return Ok(SignChangeReport::degenerate()),
        Err(e) => return Err(e),
    };

    let mut candidates: Vec<f64> = h
        .roots(cfg.trim)?
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() <= cfg.unit_band)
        .map(|z| z.arg().rem_euclid(TAU))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|b, a| *b - *a <= cfg.angle_dedup);
    if candidates.len() > 1 && candidates[0] + TAU - candidates[candidates.len() - 1] <= cfg.angle_dedup {
        candidates.pop();
    }

    let k = candidates.len();
    if k < 2 {
        return Ok(SignChangeReport {
            angles: Vec::new(),
            count: 0,
            degenerate: false,
        });
    }

    // Sign on the arc following each candidate.
    let mut eval = p.evaluator();
    let mut point = vec![0.0; p.n()];
    let mut arc_sign = Vec::with_capacity(k);
    for j in 0..k {
        let next = if j + 1 < k { candidates[j + 1] } else { candidates[0] + TAU };
        let (s, c) = ((candidates[j] + next) / 2.0).sin_cos();
        for (pi, (xi, yi)) in point.iter_mut().zip(x.iter().zip(y)) {
            *pi = c * xi + s * yi;
        }
        arc_sign.push(sgn(eval.eval(&point)));
    }

    let angles: Vec<f64> = (0..k)
        .filter(|&j| arc_sign[(j + k - 1) % k] != arc_sign[j])
        .map(|j| candidates[j])
        .collect();
    Ok(SignChangeReport {
        count: angles.len(),
        angles,
        degenerate: false,
    })
}


#[cfg(test)]
mod root_tests {
    use super::*;

    fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            c.push(Complex64::new(0.0, 0.0));
            for j in (0..c.len()).rev() {
                let prev = if j > 0 { c[j - 1] } else { Complex64::new(0.0, 0.0) };
                c[j] = prev - r * c[j];
            }
        }
        c
    }

    #[test]
    fn companion_roots_recover_known_roots() {
        let want = [
            Complex64::from_polar(1.0, 0.3),
            Complex64::from_polar(1.0, 2.0),
            Complex64::new(0.5, -0.2),
            Complex64::new(-1.7, 0.9),
            Complex64::from_polar(1.0, 4.4),
            Complex64::new(0.0, 3.0),
        ];
        let coeffs = poly_from_roots(&want);
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let h = CirclePolynomial { d: 3, coeffs, scale };
        let got = h.roots(1e-12).unwrap();
        assert_eq!(got.len(), want.len());
        for w in want {
            let best = got.iter().map(|g| (g - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "{w}: {best}");
        }
    }

    #[test]
    fn roots_of_unity() {
        for m in 1..=12usize {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
            coeffs[0] = Complex64::new(-1.0, 0.0);
            coeffs[m] = Complex64::new(1.0, 0.0);
            let h = CirclePolynomial { d: 0, coeffs, scale: 1.0 };
            let roots = h.roots(1e-12).unwrap();
            assert_eq!(roots.len(), m);
            for r in roots {
                assert!((r.powu(m as u32) - 1.0).norm() < 1e-12);
            }
        }
    }
}
