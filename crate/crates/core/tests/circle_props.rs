use num_complex::Complex64;
use proptest::prelude::*;
use ptfsense_core::circle::{circle_polynomial, count_sign_changes, eval_along_circle};
use ptfsense_core::families::{make_product_linear_forms, make_random_ptf, random_directions};
use ptfsense_core::{Polynomial, SeededStream};

fn draw(seed: u64, stream: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut s = SeededStream::new(seed, stream).open();
    (s.sample_gaussian(n).unwrap(), s.sample_gaussian(n).unwrap())
}

/// Sum of absolute term values at `x`: the scale against which a computed
/// value of `p(x)` is accurate.
fn local_scale(p: &Polynomial, x: &[f64]) -> f64 {
    p.terms()
        .iter()
        .map(|t| t.coeff.abs() * t.exps.iter().zip(x).map(|(&e, v)| v.abs().powi(e as i32)).product::<f64>())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn circle_polynomial_reproduces_restriction(n in 1usize..=5, d in 1u32..=6, seed in 0u64..10_000) {
        let f = make_random_ptf(n, d, seed).unwrap();
        let (x, y) = draw(seed, 1, n);
        let h = circle_polynomial(f.poly(), &x, &y).unwrap();
        prop_assert_eq!(h.coeffs.len(), 2 * d as usize + 1);
        prop_assert!(h.symmetry_defect() <= 1e-9);
        let mut s = SeededStream::new(seed, 2).open();
        for _ in 0..32 {
            let phi = s.next() * 3.0;
            let direct = eval_along_circle(f.poly(), &x, &y, phi).unwrap();
            let via_h = h.restriction_at(phi);
            let pt: Vec<f64> = x.iter().zip(&y).map(|(a, b)| phi.cos() * a + phi.sin() * b).collect();
            let scale = local_scale(f.poly(), &pt).max(h.scale);
            prop_assert!((via_h.re - direct).abs() <= 1e-9 * scale, "{} vs {}", via_h.re, direct);
            prop_assert!(via_h.im.abs() <= 1e-9 * scale);
            // h(e^{i phi}) e^{-i d phi} is real and equals g on the circle
            let z = Complex64::from_polar(1.0, phi);
            let raw = h.eval(z) * Complex64::from_polar(1.0, -(d as f64) * phi);
            prop_assert!((raw.re - direct).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn counts_are_even_bounded_and_located(n in 1usize..=6, d in 1u32..=6, seed in 0u64..10_000) {
        let f = make_random_ptf(n, d, seed).unwrap();
        let (x, y) = draw(seed, 3, n);
        let r = count_sign_changes(f.poly(), &x, &y).unwrap();
        prop_assert!(!r.degenerate);
        prop_assert_eq!(r.count % 2, 0);
        prop_assert!(r.count <= 2 * d as usize);
        prop_assert_eq!(r.angles.len(), r.count);
        prop_assert!(r.angles.windows(2).all(|w| w[0] < w[1]));
        for &phi in &r.angles {
            prop_assert!((0.0..std::f64::consts::TAU).contains(&phi));
            let pt: Vec<f64> = x.iter().zip(&y).map(|(a, b)| phi.cos() * a + phi.sin() * b).collect();
            let v = eval_along_circle(f.poly(), &x, &y, phi).unwrap();
            prop_assert!(v.abs() <= 1e-6 * local_scale(f.poly(), &pt), "phi={} g={}", phi, v);
        }
    }

    #[test]
    fn sign_changes_agree_with_dense_scan(n in 1usize..=4, d in 1u32..=4, seed in 0u64..10_000) {
        let f = make_random_ptf(n, d, seed).unwrap();
        let (x, y) = draw(seed, 4, n);
        let r = count_sign_changes(f.poly(), &x, &y).unwrap();
        // a fine scan can only miss flips, never invent them
        let steps = 20_000;
        let signs: Vec<bool> = (0..steps)
            .map(|k| eval_along_circle(f.poly(), &x, &y, k as f64 * std::f64::consts::TAU / steps as f64).unwrap() >= 0.0)
            .collect();
        let scanned = (0..steps).filter(|&k| signs[k] != signs[(k + 1) % steps]).count();
        prop_assert!(scanned <= r.count, "scan={} exact={}", scanned, r.count);
    }
}

#[test]
fn products_of_distinct_forms_change_sign_2d_times() {
    for d in 1..=5usize {
        let dirs = random_directions(4, d, 100 + d as u64).unwrap();
        let f = make_product_linear_forms(&dirs).unwrap();
        for trial in 0..2000 {
            let (x, y) = draw(d as u64, trial, 4);
            let r = count_sign_changes(f.poly(), &x, &y).unwrap();
            assert!(!r.degenerate);
            assert_eq!(r.count, 2 * d, "d={d} trial={trial}");
        }
    }
}
