use std::f64::consts::PI;

use ptfsense_core::bounds::chi2_log_density_max;
use ptfsense_core::chi2_log_density;

#[test]
fn density_peaks_at_log_n_below_sqrt_n_over_4pi() {
    for n in [1usize, 2, 5, 20, 100, 1000, 1_000_000] {
        let (y, value) = chi2_log_density_max(n).unwrap();
        assert!((y - (n as f64).ln()).abs() <= 1e-6, "n={n}: argmax {y}");
        assert!(value <= (n as f64 / (4.0 * PI)).sqrt(), "n={n}: max {value}");
        assert!((value - chi2_log_density((n as f64).ln(), n).unwrap()).abs() < 1e-12);
    }
}
