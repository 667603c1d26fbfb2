//! Fixtures shared by the criterion benchmarks.

use ptfsense_core::families::{make_random_ptf, random_directions};
use ptfsense_core::{Ptf, SeededStream};

/// A reproducible random threshold function of the given shape.
pub fn random_ptf(n: usize, d: u32) -> Ptf {
    make_random_ptf(n, d, 0xbe7c).expect("valid shape")
}

/// `count` Gaussian points in `R^n`.
pub fn points(n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut s = SeededStream::new(1, 0).open();
    (0..count).map(|_| s.sample_gaussian(n).expect("n >= 1")).collect()
}

/// Pairs `(X, Y)` spanning random great circles.
pub fn circles(n: usize, count: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let dirs = random_directions(n, 2 * count, 2).expect("n >= 1");
    dirs.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
}
