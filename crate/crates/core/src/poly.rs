//! Sparse multivariate real polynomials and the threshold functions built on them.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total degree `product_expand` will produce.
pub const DEGREE_CAP: u32 = 20;

/// Relative magnitude below which expanded coefficients are discarded.
pub const MERGE_THRESHOLD: f64 = 1e-14;

/// A single term `coeff * x_1^e_1 * ... * x_n^e_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: f64, exps: Vec<u32>) -> Self {
        Self { coeff, exps }
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// Graded lexicographic order: lower total degree first, then `x_1` before `x_2`.
fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// Precomputed layout for fast evaluation: each term is a coefficient times a
/// product of entries of a per-point power table of shape `n x (degree + 1)`.
#[derive(Debug, Clone, Default)]
struct EvalPlan {
    offsets: Vec<usize>,
    factors: Vec<usize>,
}

/// Sparse polynomial in `n` real variables, kept in canonical graded-lex form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PolynomialFile", into = "PolynomialFile")]
pub struct Polynomial {
    n: usize,
    terms: Vec<Monomial>,
    degree: u32,
    plan: EvalPlan,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

/// On-disk JSON layout: `{"n": int, "terms": [{"coeff": float, "exps": [int, ...]}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialFile {
    pub n: usize,
    pub terms: Vec<Monomial>,
}

impl TryFrom<PolynomialFile> for Polynomial {
    type Error = Error;

    fn try_from(file: PolynomialFile) -> Result<Self> {
        Polynomial::new(file.n, file.terms)
    }
}

impl From<Polynomial> for PolynomialFile {
    fn from(p: Polynomial) -> Self {
        PolynomialFile {
            n: p.n,
            terms: p.terms,
        }
    }
}

impl Polynomial {
    /// Builds a polynomial, merging like terms and dropping exact zeros.
    pub fn new(n: usize, terms: Vec<Monomial>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut merged: HashMap<Vec<u32>, f64> = HashMap::with_capacity(terms.len());
        for t in terms {
            if t.exps.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.exps.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite coefficient {}",
                    t.coeff
                )));
            }
            *merged.entry(t.exps).or_insert(0.0) += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(exps, coeff)| Monomial { coeff, exps })
            .collect();
        Ok(Self::from_canonical_parts(n, terms))
    }

    fn from_canonical_parts(n: usize, mut terms: Vec<Monomial>) -> Self {
        terms.sort_by(|a, b| grlex(&a.exps, &b.exps));
        let degree = terms.iter().map(Monomial::total_degree).max().unwrap_or(0);
        let stride = degree as usize + 1;
        let mut plan = EvalPlan {
            offsets: Vec::with_capacity(terms.len() + 1),
            factors: Vec::new(),
        };
        plan.offsets.push(0);
        for t in &terms {
            for (var, &e) in t.exps.iter().enumerate() {
                if e > 0 {
                    plan.factors.push(var * stride + e as usize);
                }
            }
            plan.offsets.push(plan.factors.len());
        }
        Self {
            n,
            terms,
            degree,
            plan,
        }
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![Monomial::new(c, vec![0; n])])
    }

    /// The coordinate function `x_i` (zero-based).
    pub fn variable(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: i + 1,
            });
        }
        let mut exps = vec![0; n];
        exps[i] = 1;
        Self::new(n, vec![Monomial::new(1.0, exps)])
    }

    /// The homogeneous linear form `<a, x>`.
    pub fn linear(a: &[f64]) -> Result<Self> {
        let n = a.len();
        let terms = a
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut exps = vec![0; n];
                exps[i] = 1;
                Monomial::new(c, exps)
            })
            .collect();
        Self::new(n, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest absolute coefficient (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeff.abs()))
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.evaluator().eval(x))
    }

    /// Exact partial derivatives at `x`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        let mut grad = vec![0.0; self.n];
        for t in &self.terms {
            for (var, &e) in t.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut v = t.coeff * f64::from(e) * x[var].powi(e as i32 - 1);
                for (other, &eo) in t.exps.iter().enumerate() {
                    if other != var && eo > 0 {
                        v *= x[other].powi(eo as i32);
                    }
                }
                grad[var] += v;
            }
        }
        Ok(grad)
    }

    /// Reusable evaluator holding a scratch power table; the hot path of the
    /// Monte Carlo loops.
    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            poly: self,
            table: vec![1.0; self.n * (self.degree as usize + 1)],
        }
    }

    /// `a * self`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| Monomial::new(a * t.coeff, t.exps.clone()))
            .collect();
        Self::new(self.n, terms)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::new(self.n, terms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Evaluates one polynomial at many points without reallocating.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    poly: &'a Polynomial,
    table: Vec<f64>,
}

impl Evaluator<'_> {
    /// Evaluates at `x`. The caller guarantees `x.len() == poly.n()`.
    #[inline]
    pub fn eval(&mut self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.poly.n);
        let stride = self.poly.degree as usize + 1;
        if stride > 1 {
            for (row, &xi) in self.table.chunks_exact_mut(stride).zip(x) {
                let mut acc = 1.0;
                for slot in &mut row[1..] {
                    acc *= xi;
                    *slot = acc;
                }
            }
        }
        let plan = &self.poly.plan;
        let mut sum = 0.0;
        for (k, t) in self.poly.terms.iter().enumerate() {
            let mut v = t.coeff;
            for &idx in &plan.factors[plan.offsets[k]..plan.offsets[k + 1]] {
                v *= self.table[idx];
            }
            sum += v;
        }
        sum
    }

    /// Sign of the polynomial at `x` with the `sgn(0) = +1` convention.
    #[inline]
    pub fn sign(&mut self, x: &[f64]) -> i8 {
        sgn(self.eval(x))
    }
}

/// `+1` for non-negative values, `-1` otherwise.
#[inline]
pub fn sgn(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

/// Fully expands a product of polynomials, merging like terms.
pub fn product_expand(factors: &[Polynomial]) -> Result<Polynomial> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty factor list".into()))?;
    let n = first.n;
    let mut degree = 0u32;
    for f in factors {
        if f.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.n,
            });
        }
        degree += f.degree;
    }
    if degree > DEGREE_CAP {
        return Err(Error::DegreeCapExceeded {
            degree,
            cap: DEGREE_CAP,
        });
    }

    let mut acc: HashMap<Vec<u32>, f64> = first
        .terms
        .iter()
        .map(|t| (t.exps.clone(), t.coeff))
        .collect();
    for f in &factors[1..] {
        let mut next: HashMap<Vec<u32>, f64> = HashMap::with_capacity(acc.len() * f.terms.len());
        for (ea, ca) in &acc {
            for tb in &f.terms {
                let exps: Vec<u32> = ea.iter().zip(&tb.exps).map(|(a, b)| a + b).collect();
                *next.entry(exps).or_insert(0.0) += ca * tb.coeff;
            }
        }
        acc = next;
    }

    let scale = acc.values().fold(0.0f64, |m, c| m.max(c.abs()));
    let cutoff = MERGE_THRESHOLD * scale;
    let terms = acc
        .into_iter()
        .filter(|(_, c)| c.abs() >= cutoff && *c != 0.0)
        .map(|(exps, coeff)| Monomial { coeff, exps })
        .collect();
    Ok(Polynomial::from_canonical_parts(n, terms))
}

/// A polynomial threshold function `x -> sgn(p(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Polynomial", into = "Polynomial")]
pub struct Ptf {
    poly: Polynomial,
}

impl TryFrom<Polynomial> for Ptf {
    type Error = Error;

    fn try_from(poly: Polynomial) -> Result<Self> {
        Ptf::new(poly)
    }
}

impl From<Ptf> for Polynomial {
    fn from(f: Ptf) -> Self {
        f.poly
    }
}

impl Ptf {
    /// Value taken where the polynomial vanishes.
    pub const SIGN_AT_ZERO: i8 = 1;

    pub fn new(poly: Polynomial) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self { poly })
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn n(&self) -> usize {
        self.poly.n
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree
    }

    pub fn eval(&self, x: &[f64]) -> Result<i8> {
        self.poly.evaluate(x).map(sgn)
    }
}
