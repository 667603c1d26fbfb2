use ptfsense_core::sampling::{correlated_pair, rotated_pair};
use ptfsense_core::{CorrelationSpec, SeededStream};

const N: usize = 1_000_000;

struct Moments {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Moments {
    fn new() -> Self {
        Self { n: 0.0, sx: 0.0, sy: 0.0, sxx: 0.0, syy: 0.0, sxy: 0.0 }
    }
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }
    fn mean_x(&self) -> f64 {
        self.sx / self.n
    }
    fn var_x(&self) -> f64 {
        self.sxx / self.n - self.mean_x().powi(2)
    }
    fn var_y(&self) -> f64 {
        self.syy / self.n - (self.sy / self.n).powi(2)
    }
    fn corr(&self) -> f64 {
        let cov = self.sxy / self.n - self.mean_x() * self.sy / self.n;
        cov / (self.var_x() * self.var_y()).sqrt()
    }
}

#[test]
fn standard_normal_moments() {
    let mut s = SeededStream::new(2024, 0).open();
    let mut m = Moments::new();
    for _ in 0..N {
        let v = s.sample_gaussian(2).unwrap();
        m.push(v[0], v[1]);
    }
    let tol = 4.0 / (N as f64).sqrt();
    assert!(m.mean_x().abs() < tol, "mean {}", m.mean_x());
    assert!((m.var_x() - 1.0).abs() < 0.01, "var {}", m.var_x());
    assert!(m.corr().abs() < tol, "corr {}", m.corr());
}

#[test]
fn correlated_pair_has_correlation_one_minus_eps() {
    let spec = CorrelationSpec::new(0.3).unwrap();
    let mut s = SeededStream::new(7, 0).open();
    let mut m = Moments::new();
    for _ in 0..N {
        let x = s.sample_gaussian(1).unwrap();
        let y = s.sample_gaussian(1).unwrap();
        let (_, z) = correlated_pair(&x, &y, &spec).unwrap();
        m.push(x[0], z[0]);
    }
    // sample correlation has standard error (1 - rho^2) / sqrt(N)
    let se = (1.0 - 0.7f64 * 0.7) / (N as f64).sqrt();
    assert!((m.corr() - 0.7).abs() < 4.0 * se, "corr {}", m.corr());
    assert!((m.var_y() - 1.0).abs() < 0.01);
    assert!((m.sy / m.n).abs() < 4.0 / (N as f64).sqrt());
}

#[test]
fn rotated_points_are_standard_normal() {
    let spec = CorrelationSpec::new(0.1).unwrap();
    let mut s = SeededStream::new(8, 0).open();
    let mut m = Moments::new();
    for _ in 0..N {
        let x = s.sample_gaussian(1).unwrap();
        let y = s.sample_gaussian(1).unwrap();
        let (a, b) = rotated_pair(&x, &y, 1.0, &spec).unwrap();
        m.push(a[0], b[0]);
    }
    assert!(m.mean_x().abs() < 4.0 / (N as f64).sqrt());
    assert!((m.var_x() - 1.0).abs() < 0.01);
    assert!((m.var_y() - 1.0).abs() < 0.01);
    let se = (1.0 - 0.81) / (N as f64).sqrt();
    assert!((m.corr() - 0.9).abs() < 4.0 * se, "corr {}", m.corr());
}
