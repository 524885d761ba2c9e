use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use polya_sa::rational::{int, rat, to_f64};
use polya_sa::ratpoly::{roots_in_unit_interval, RootLocation, RootValue};
use polya_sa::sa::classify;
use polya_sa::RatPoly;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A root in [0, 1] as `p/q`.
fn unit_root() -> impl Strategy<Value = (i64, i64)> {
    (1i64..=12).prop_flat_map(|q| (0..=q, Just(q)))
}

fn product(roots: &[((i64, i64), u32)], scale: i64) -> RatPoly {
    let mut p = RatPoly::constant(int(scale));
    for ((n, d), m) in roots {
        p = &p * &RatPoly::linear_factor(&r(*n, *d)).pow(*m);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn recovers_factor_roots_and_multiplicities(
        raw in prop::collection::vec((unit_root(), 1u32..=3), 1..=3),
        scale in prop::sample::select(vec![-7i64, -2, -1, 1, 3, 5]),
        outside in prop::option::of(prop::sample::select(vec![(-1i64, 2i64), (3, 2), (7, 3)])),
    ) {
        // merge duplicate roots
        let mut expected: Vec<(BigRational, u32)> = Vec::new();
        for ((n, d), m) in &raw {
            let x = r(*n, *d);
            match expected.iter_mut().find(|(y, _)| *y == x) {
                Some(e) => e.1 += m,
                None => expected.push((x, *m)),
            }
        }
        let mut p = product(&raw, scale);
        if let Some((n, d)) = outside {
            p = &p * &RatPoly::linear_factor(&r(n, d));
        }
        let roots = roots_in_unit_interval(&p).unwrap();
        prop_assert_eq!(roots.len(), expected.len());
        let total: u32 = roots.iter().map(|x| x.multiplicity).sum();
        prop_assert!(total as usize <= p.degree().unwrap());
        for (x, m) in &expected {
            let found = roots.iter().find(|rr| rr.exact_value() == Some(x));
            prop_assert!(found.is_some(), "root {} missing", x);
            prop_assert_eq!(found.unwrap().multiplicity, *m);
        }
    }

    #[test]
    fn derivative_matches_central_difference(
        coeffs in prop::collection::vec(-20i64..=20, 1..=5),
        xs in prop::collection::vec(0.05f64..0.95, 20),
    ) {
        let p = RatPoly::from_ints(&coeffs);
        let dp = p.derivative();
        for x in xs {
            let h = 1e-5;
            let fd = (p.eval_f64(x + h) - p.eval_f64(x - h)) / (2.0 * h);
            let exact = dp.eval_f64(x);
            let scale = exact.abs().max(1.0);
            prop_assert!((fd - exact).abs() / scale < 1e-6, "x = {}: {} vs {}", x, fd, exact);
        }
    }

    #[test]
    fn isolating_intervals_disjoint_and_tight(
        coeffs in prop::collection::vec(-30i64..=30, 2..=5),
    ) {
        let p = RatPoly::from_ints(&coeffs);
        prop_assume!(!p.is_zero());
        let roots = roots_in_unit_interval(&p).unwrap();
        let mut spans: Vec<(f64, f64)> = Vec::new();
        for rr in &roots {
            let x = rr.approx();
            prop_assert!((0.0..=1.0).contains(&x));
            prop_assert!(p.eval_f64(x).abs() < 1e-9, "p({}) = {}", x, p.eval_f64(x));
            match &rr.value {
                RootValue::Exact { value } => {
                    prop_assert_eq!(p.eval(value), int(0));
                    spans.push((x, x));
                }
                RootValue::Isolated { lo, hi, .. } => {
                    prop_assert!(to_f64(hi) - to_f64(lo) <= 1e-12);
                    prop_assert_eq!(rr.location, RootLocation::Interior);
                    spans.push((to_f64(lo), to_f64(hi)));
                }
            }
        }
        for w in spans.windows(2) {
            prop_assert!(w[0].1 < w[1].0, "overlap {:?}", w);
        }
    }

    #[test]
    fn classification_ignores_positive_scaling(
        raw in prop::collection::vec((unit_root(), 1u32..=3), 1..=3),
        sign in prop::sample::select(vec![-1i64, 1]),
        num in 1i64..=50,
        den in 1i64..=50,
    ) {
        let p = product(&raw, sign);
        let q = p.scale(&rat(num, den));
        for rr in roots_in_unit_interval(&p).unwrap() {
            prop_assert_eq!(classify(&p, &rr).unwrap().class, classify(&q, &rr).unwrap().class);
        }
    }
}

#[test]
fn irrational_roots_are_isolated() {
    // 2x^2 - 1 has the single root 1/sqrt(2) in [0, 1]
    let p = RatPoly::from_ints(&[-1, 0, 2]);
    let roots = roots_in_unit_interval(&p).unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0].approx() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(roots[0].exact_value().is_none());
}
