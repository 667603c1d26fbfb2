//! Named threshold-function families and the closed forms used to check estimators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::poly::{product_expand, Monomial, Polynomial, Ptf, DEGREE_CAP};
use crate::sampling::SeededStream;

/// Pairs of directions with `|cos angle|` at or above `1 - DISTINCT_TOL` are
/// treated as the same linear form.
pub const DISTINCT_TOL: f64 = 1e-9;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `sgn(<a, x>)`.
pub fn make_halfspace(a: &[f64]) -> Result<Ptf> {
    if a.is_empty() || norm(a) == 0.0 {
        return Err(invalid("halfspace normal must be a nonzero vector"));
    }
    Ptf::new(Polynomial::linear(a)?)
}

/// Threshold function of `prod_k <dirs[k], x>` for pairwise independent directions.
pub fn make_product_linear_forms(dirs: &[Vec<f64>]) -> Result<Ptf> {
    let first = dirs.first().ok_or_else(|| invalid("need at least one direction"))?;
    let n = first.len();
    let mut norms = Vec::with_capacity(dirs.len());
    for d in dirs {
        if d.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: d.len(),
            });
        }
        let m = norm(d);
        if m == 0.0 {
            return Err(invalid("direction must be nonzero"));
        }
        norms.push(m);
    }
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            let dot: f64 = dirs[i].iter().zip(&dirs[j]).map(|(a, b)| a * b).sum();
            if (dot / (norms[i] * norms[j])).abs() >= 1.0 - DISTINCT_TOL {
                return Err(Error::NotDistinct(i, j));
            }
        }
    }
    let forms = dirs
        .iter()
        .map(|d| Polynomial::linear(d))
        .collect::<Result<Vec<_>>>()?;
    Ptf::new(product_expand(&forms)?)
}

fn sum_of_squares_minus(c: f64, n: usize) -> Result<Polynomial> {
    let mut terms = vec![Monomial::new(-c, vec![0; n])];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 2;
        terms.push(Monomial::new(1.0, e));
    }
    Polynomial::new(n, terms)
}

/// `sgn(r^2 - |x|^2)`: `+1` inside the ball of radius `r`.
pub fn make_ball(r: f64, n: usize) -> Result<Ptf> {
    if !(r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    Ptf::new(sum_of_squares_minus(r * r, n)?.scaled(-1.0)?)
}

/// `sgn(prod_k (|x|^2 - r_k))` for increasing positive thresholds `r_k`.
pub fn make_radial_product(radii: &[f64], n: usize) -> Result<Ptf> {
    if radii.is_empty() {
        return Err(invalid("need at least one radius"));
    }
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(invalid("radii must be positive"));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("radii must be strictly increasing"));
    }
    let factors = radii
        .iter()
        .map(|&r| sum_of_squares_minus(r, n))
        .collect::<Result<Vec<_>>>()?;
    Ptf::new(product_expand(&factors)?)
}

/// `sgn(1 + |x|^2)`, which is `+1` everywhere.
pub fn make_positive(n: usize) -> Result<Ptf> {
    Ptf::new(sum_of_squares_minus(-1.0, n)?)
}

/// Exponent vectors of total degree at most `d` in `n` variables, graded.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn fill(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(budget);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=budget).rev() {
            prefix.push(e);
            fill(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=d {
        fill(&mut Vec::with_capacity(n), n, total, &mut out);
    }
    out
}

/// Polynomial with i.i.d. standard normal coefficients on every monomial of
/// degree at most `d`.
pub fn make_random_ptf(n: usize, d: u32, seed: u64) -> Result<Ptf> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if d == 0 || d > DEGREE_CAP {
        return Err(invalid(format!("degree must lie in 1..={DEGREE_CAP}, got {d}")));
    }
    let mut stream = SeededStream::new(seed, 0).open();
    let terms = monomials_up_to(n, d)
        .into_iter()
        .map(|exps| Monomial::new(stream.next(), exps))
        .collect();
    Ptf::new(Polynomial::new(n, terms)?)
}

/// `d` standard Gaussian directions in `R^n` drawn from `seed`.
pub fn random_directions(n: usize, d: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut stream = SeededStream::new(seed, 0).open();
    (0..d).map(|_| stream.sample_gaussian(n)).collect()
}

/// The first `d` coordinate axes of `R^n`.
pub fn coordinate_axes(n: usize, d: usize) -> Result<Vec<Vec<f64>>> {
    if d > n {
        return Err(invalid(format!("cannot pick {d} orthonormal axes in dimension {n}")));
    }
    Ok((0..d)
        .map(|k| {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            e
        })
        .collect())
}

/// Gaussian surface area of the sphere of radius `r` in `R^n`:
/// `2^{1 - n/2} r^{n-1} e^{-r^2/2} / Gamma(n/2)`.
pub fn ball_surface_closed_form(r: f64, n: usize) -> Result<f64> {
    if !(r > 0.0) || n == 0 {
        return Err(invalid("need r > 0 and n >= 1"));
    }
    let nf = n as f64;
    let ln = (1.0 - nf / 2.0) * std::f64::consts::LN_2 + (nf - 1.0) * r.ln() - r * r / 2.0 - ln_gamma(nf / 2.0);
    Ok(ln.exp())
}

/// A named family with its parameters, parsed from strings such as
/// `ball:r=1.0,n=2` or `prodlin:n=3,d=3,seed=7`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Random normal direction when `seed` is set, otherwise `x_1`.
    Halfspace { n: usize, seed: Option<u64> },
    /// Random directions when `seed` is set, otherwise the first `d` axes.
    ProductLinear { n: usize, d: usize, seed: Option<u64> },
    Ball { r: f64, n: usize },
    RadialProduct { radii: Vec<f64>, n: usize },
    RandomPtf { n: usize, d: u32, seed: u64 },
    /// The everywhere-positive `1 + |x|^2`.
    Positive { n: usize },
}

impl FamilySpec {
    pub fn build(&self) -> Result<Ptf> {
        match self {
            FamilySpec::Halfspace { n, seed } => match seed {
                Some(s) => make_halfspace(&random_directions(*n, 1, *s)?[0]),
                None => make_halfspace(&coordinate_axes(*n, 1)?[0]),
            },
            FamilySpec::ProductLinear { n, d, seed } => {
                let dirs = match seed {
                    Some(s) => random_directions(*n, *d, *s)?,
                    None => coordinate_axes(*n, *d)?,
                };
                make_product_linear_forms(&dirs)
            }
            FamilySpec::Ball { r, n } => make_ball(*r, *n),
            FamilySpec::RadialProduct { radii, n } => make_radial_product(radii, *n),
            FamilySpec::RandomPtf { n, d, seed } => make_random_ptf(*n, *d, *seed),
            FamilySpec::Positive { n } => make_positive(*n),
        }
    }
}

struct Params<'a> {
    kind: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Parse(format!("{}: bad value {v:?} for {key}", self.kind)))
            })
            .transpose()
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| Error::Parse(format!("{}: missing parameter {key}", self.kind)))
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.pairs.iter().find(|(k, _)| !allowed.contains(k)) {
            Some((k, _)) => Err(Error::Parse(format!("{}: unknown parameter {k}", self.kind))),
            None => Ok(()),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut pairs = Vec::new();
        for item in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            pairs.push((k.trim(), v.trim()));
        }
        let p = Params { kind, pairs };
        match kind {
            "halfspace" => {
                p.only(&["n", "seed"])?;
                Ok(FamilySpec::Halfspace {
                    n: p.require("n")?,
                    seed: p.parse("seed")?,
                })
            }
            "prodlin" | "product_linear" => {
                p.only(&["n", "d", "seed"])?;
                Ok(FamilySpec::ProductLinear {
                    n: p.require("n")?,
                    d: p.require("d")?,
                    seed: p.parse("seed")?,
                })
            }
            "ball" => {
                p.only(&["r", "n"])?;
                Ok(FamilySpec::Ball {
                    r: p.require("r")?,
                    n: p.require("n")?,
                })
            }
            "radial" | "radial_product" => {
                p.only(&["radii", "n"])?;
                let radii = p
                    .get("radii")
                    .ok_or_else(|| Error::Parse("radial: missing parameter radii".into()))?
                    .split(';')
                    .map(|r| r.parse().map_err(|_| Error::Parse(format!("radial: bad radius {r:?}"))))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(FamilySpec::RadialProduct {
                    radii,
                    n: p.require("n")?,
                })
            }
            "random" | "random_ptf" => {
                p.only(&["n", "d", "seed"])?;
                Ok(FamilySpec::RandomPtf {
                    n: p.require("n")?,
                    d: p.require("d")?,
                    seed: p.parse("seed")?.unwrap_or(0),
                })
            }
            "positive" => {
                p.only(&["n"])?;
                Ok(FamilySpec::Positive { n: p.require("n")? })
            }
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Halfspace { n, seed } => {
                write!(f, "halfspace:n={n}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
            FamilySpec::ProductLinear { n, d, seed } => {
                write!(f, "prodlin:n={n},d={d}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
            FamilySpec::Ball { r, n } => write!(f, "ball:r={r:?},n={n}"),
            FamilySpec::RadialProduct { radii, n } => {
                let radii: Vec<String> = radii.iter().map(|r| format!("{r:?}")).collect();
                write!(f, "radial:radii={},n={n}", radii.join(";"))
            }
            FamilySpec::RandomPtf { n, d, seed } => write!(f, "random:n={n},d={d},seed={seed}"),
            FamilySpec::Positive { n } => write!(f, "positive:n={n}"),
        }
    }
}
