use proptest::prelude::*;
use ptfsense_core::{product_expand, Monomial, Polynomial};

fn poly_strategy(n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (-3.0f64..3.0, prop::collection::vec(0..=max_deg, n)),
        1..=max_terms,
    )
    .prop_map(move |raw| {
        let terms = raw
            .into_iter()
            .map(|(c, mut exps)| {
                // keep total degree within max_deg
                while exps.iter().sum::<u32>() > max_deg {
                    let i = exps.iter().position(|&e| e > 0).unwrap();
                    exps[i] -= 1;
                }
                Monomial::new(c, exps)
            })
            .collect();
        Polynomial::new(n, terms).unwrap()
    })
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5f64..1.5, n)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluation_is_linear_in_coefficients(
        (p, q, x) in (1usize..=6).prop_flat_map(|n| (poly_strategy(n, 5, 8), poly_strategy(n, 5, 8), point(n))),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let combo = p.scaled(a).unwrap().add(&q.scaled(b).unwrap()).unwrap();
        let lhs = combo.evaluate(&x).unwrap();
        let pa = a * p.evaluate(&x).unwrap();
        let qb = b * q.evaluate(&x).unwrap();
        // relative to the size of the summands, since they may cancel
        let scale = pa.abs() + qb.abs();
        prop_assert!((lhs - (pa + qb)).abs() <= 1e-12 * scale.max(1e-300) + 1e-300);
    }

    #[test]
    fn gradient_matches_central_differences(
        (p, x) in (1usize..=10).prop_flat_map(|n| (poly_strategy(n, 6, 10), point(n))),
    ) {
        let g = p.gradient(&x).unwrap();
        let h = 1e-5;
        for i in 0..x.len() {
            let (mut up, mut down) = (x.clone(), x.clone());
            up[i] += h;
            down[i] -= h;
            let fd = (p.evaluate(&up).unwrap() - p.evaluate(&down).unwrap()) / (2.0 * h);
            prop_assert!(rel_close(g[i], fd, 1e-6), "i={} exact={} fd={}", i, g[i], fd);
        }
    }

    #[test]
    fn product_evaluates_to_product_of_factors(
        (factors, xs) in (1usize..=5).prop_flat_map(|n| (
            prop::collection::vec(poly_strategy(n, 3, 5), 1..=4),
            prop::collection::vec(point(n), 100),
        )),
    ) {
        let prod = product_expand(&factors).unwrap();
        let want_degree: u32 = factors.iter().map(Polynomial::degree).sum();
        prop_assert_eq!(prod.degree(), want_degree);
        for x in &xs {
            let direct: f64 = factors.iter().map(|f| f.evaluate(x).unwrap()).product();
            let expanded = prod.evaluate(x).unwrap();
            // expansion reorders sums; measure error against the absolute term mass
            let mass: f64 = factors
                .iter()
                .map(|f| f.terms().iter().map(|t| t.coeff.abs() * t.exps.iter().zip(x).map(|(&e, v)| v.abs().powi(e as i32)).product::<f64>()).sum::<f64>())
                .product();
            prop_assert!((direct - expanded).abs() <= 1e-9 * direct.abs().max(mass * 1e-3).max(1e-300),
                "direct={} expanded={}", direct, expanded);
        }
    }

    #[test]
    fn json_round_trip_is_identity(p in (1usize..=6).prop_flat_map(|n| poly_strategy(n, 6, 12))) {
        let text = p.to_json();
        let back = Polynomial::from_json(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_json(), text);
    }
}

#[test]
fn gradient_of_random_degree_four_polynomial() {
    let f = ptfsense_core::families::make_random_ptf(4, 4, 3).unwrap();
    let p = f.poly();
    let x = [0.3, -0.8, 1.1, 0.25];
    let g = p.gradient(&x).unwrap();
    for i in 0..4 {
        let (mut up, mut down) = (x, x);
        up[i] += 1e-5;
        down[i] -= 1e-5;
        let fd = (p.evaluate(&up).unwrap() - p.evaluate(&down).unwrap()) / 2e-5;
        assert!(rel_close(g[i], fd, 1e-6), "{} vs {}", g[i], fd);
    }
}
