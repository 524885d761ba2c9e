use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use polya_sa::rational::{int, rat};
use polya_sa::sa::{FlatFamily, PredictionKind};
use polya_sa::urns::{
    analyze, cond_iv_closed_form_one, cond_moments_oracle, drift_one, drift_two, error_two,
    k_e_two, model_flags, psi_explicit_quartic, r_n_closed_form, step_distribution, Outcome,
    ReplacementMatrixOne, ReplacementMatrixTwo, Sampling, UrnModel, UrnSpec, UrnState,
};
use polya_sa::Rational;

fn entry() -> impl Strategy<Value = Rational> {
    prop_oneof![
        1 => Just(Rational::zero()),
        3 => (1i64..=12, 1i64..=6).prop_map(|(p, q)| rat(p, q)),
    ]
}

fn matrix_one() -> impl Strategy<Value = ReplacementMatrixOne> {
    (entry(), entry(), entry(), entry()).prop_filter_map("valid one-draw matrix", |(a, b, c, d)| {
        ReplacementMatrixOne::new(a, b, c, d).ok()
    })
}

fn matrix_two() -> impl Strategy<Value = ReplacementMatrixTwo> {
    prop::array::uniform6(entry()).prop_filter_map("valid two-draw matrix", |[a, b, c, d, e, f]| {
        ReplacementMatrixTwo::new(a, b, c, d, e, f).ok()
    })
}

fn int_matrix_two() -> impl Strategy<Value = ReplacementMatrixTwo> {
    prop::array::uniform6(0i64..=6)
        .prop_filter_map("valid", |v| ReplacementMatrixTwo::from_ints(v).ok())
}

/// Integer counts with `W, B >= 2`, so every outcome is possible.
fn state() -> impl Strategy<Value = UrnState> {
    (2i64..=60, 2i64..=60).prop_map(|(w, b)| UrnState::new(int(w), int(b)).unwrap())
}

/// Hand-written outcome probabilities, in the enumeration order W, B or WW, WB, BB.
fn probabilities(st: &UrnState, model: &UrnModel) -> Vec<Rational> {
    let (w, b) = (&st.w, &st.b);
    let t = w + b;
    match model {
        UrnModel::OneDraw(_) => vec![w / &t, b / &t],
        UrnModel::TwoDraw {
            sampling: Sampling::With,
            ..
        } => {
            let (p, q) = (w / &t, b / &t);
            vec![&p * &p, int(2) * &p * &q, &q * &q]
        }
        UrnModel::TwoDraw {
            sampling: Sampling::Without,
            ..
        } => {
            let pairs = &t * (&t - int(1));
            vec![
                w * (w - int(1)) / &pairs,
                int(2) * w * b / &pairs,
                b * (b - int(1)) / &pairs,
            ]
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn step_probabilities_sum_to_one(
        one in matrix_one(),
        two in matrix_two(),
        with in any::<bool>(),
        use_two in any::<bool>(),
        st in state(),
    ) {
        let model = if use_two {
            UrnModel::TwoDraw { matrix: two, sampling: if with { Sampling::With } else { Sampling::Without } }
        } else {
            UrnModel::OneDraw(one)
        };
        let d = step_distribution(&st, &model).unwrap();
        prop_assert_eq!(d.total_probability(), Rational::one());
        let got: Vec<Rational> = d.outcomes.iter().map(|o| o.probability.clone()).collect();
        prop_assert_eq!(got, probabilities(&st, &model));
        prop_assert!(d.outcomes.iter().all(|o| !o.probability.is_negative()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn one_draw_mean_increment_is_the_drift(m in matrix_one(), st in state()) {
        let z = st.fraction();
        let mo = cond_moments_oracle(&st, &UrnModel::OneDraw(m.clone())).unwrap();
        // E[dW - Z dT] over the two colours
        let by_hand = &z * (&m.a - &z * (&m.a + &m.b)) + (Rational::one() - &z) * (&m.c - &z * (&m.c + &m.d));
        prop_assert_eq!(&mo.e_y, &by_hand);
        prop_assert_eq!(mo.e_y, drift_one(&m).eval(&z));
        prop_assert!(mo.e_u.is_zero());
    }

    #[test]
    fn one_draw_closed_form_matches_enumeration(m in matrix_one(), st in state()) {
        let mo = cond_moments_oracle(&st, &UrnModel::OneDraw(m.clone())).unwrap();
        prop_assert_eq!(mo.e_u_over_t, cond_iv_closed_form_one(&st, &m).unwrap());
    }

    #[test]
    fn without_replacement_bias_is_r_n(m in matrix_two(), st in state()) {
        let model = UrnModel::TwoDraw { matrix: m.clone(), sampling: Sampling::Without };
        let mo = cond_moments_oracle(&st, &model).unwrap();
        let g = drift_two(&m).eval(&st.fraction());
        let rn = r_n_closed_form(&st, &m).unwrap();
        prop_assert_eq!(&mo.e_y - g, rn.clone());
        prop_assert_eq!(mo.e_u, rn);
    }

    #[test]
    fn with_replacement_second_moment(m in matrix_two(), st in state()) {
        let model = UrnModel::TwoDraw { matrix: m.clone(), sampling: Sampling::With };
        let mo = cond_moments_oracle(&st, &model).unwrap();
        let z = st.fraction();
        prop_assert!(mo.e_u.is_zero());
        prop_assert_eq!(mo.e_u2, &z * (Rational::one() - &z) * psi_explicit_quartic(&m).eval(&z));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quartic_matches_decomposition(m in matrix_two()) {
        let err = error_two(&m);
        prop_assert_eq!(&err.psi, &psi_explicit_quartic(&m));
        prop_assert_eq!(err.a_x, &err.b_x - &err.c_x.scale(&int(2)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn boundary_signs(m in matrix_two()) {
        let g = drift_two(&m);
        prop_assert!(!g.eval(&Rational::zero()).is_negative());
        prop_assert!(!g.eval(&Rational::one()).is_positive());
    }

    #[test]
    fn prediction_is_never_empty(m in int_matrix_two(), with in any::<bool>()) {
        let sampling = if with { Sampling::With } else { Sampling::Without };
        let spec = UrnSpec::new(UrnModel::TwoDraw { matrix: m, sampling }, int(2), int(2)).unwrap();
        let p = analyze(&spec).unwrap().prediction;
        let flat = matches!(p.kind, PredictionKind::BetaDistribution | PredictionKind::ContinuousNoAtoms);
        prop_assert!(flat || !p.certain_points.is_empty() || !p.excluded_points.is_empty());
        if p.kind == PredictionKind::PointMassSet {
            prop_assert!(!p.certain_points.is_empty(), "every zero excluded");
        }
    }

    #[test]
    fn classical_polya_is_beta(a in 1i64..=9, w0 in 1i64..=9, b0 in 1i64..=9) {
        let m = ReplacementMatrixOne::from_ints([a, 0, 0, a]).unwrap();
        let spec = UrnSpec::new(UrnModel::OneDraw(m), int(w0), int(b0)).unwrap();
        let p = analyze(&spec).unwrap().prediction;
        prop_assert_eq!(p.kind, PredictionKind::BetaDistribution);
        prop_assert!(p.excluded_points.is_empty());
        prop_assert_eq!(p.beta_params, Some((rat(w0, a), rat(b0, a))));
        let flat = model_flags(&spec).flat_family;
        prop_assert_eq!(flat, Some(FlatFamily::ClassicalPolya { alpha: rat(w0, a), beta: rat(b0, a) }));
    }
}

/// `(T - 1) |E U^2 - Z (1 - Z) Ψ(Z)|` at `Z = 1/2` settles to a constant.
#[test]
fn without_replacement_second_moment_gap_is_order_one_over_t() {
    let m = ReplacementMatrixTwo::from_ints([15, 3, 4, 1, 3, 21]).unwrap();
    let model = UrnModel::TwoDraw {
        matrix: m.clone(),
        sampling: Sampling::Without,
    };
    let half = rat(1, 2);
    let target = &half * &half * psi_explicit_quartic(&m).eval(&half);
    let scaled: Vec<Rational> = [10i64, 100, 1000, 10000]
        .iter()
        .map(|&t| {
            let st = UrnState::new(int(t / 2), int(t / 2)).unwrap();
            let mo = cond_moments_oracle(&st, &model).unwrap();
            (mo.e_u2 - &target).abs() * int(t - 1)
        })
        .collect();
    let last = polya_sa::rational::to_f64(&scaled[3]);
    let prev = polya_sa::rational::to_f64(&scaled[2]);
    assert!(last > 0.0);
    assert!((last - prev).abs() / last < 0.01, "{prev} vs {last}");
}

/// `T^2 |E[U / T']|` stays below the model constant as `T` grows.
#[test]
fn scaled_noise_mean_is_bounded() {
    for v in [
        [15, 3, 4, 1, 3, 21],
        [35, 9, 1, 1, 3, 21],
        [3, 2, 2, 3, 1, 4],
        [0, 5, 2, 0, 7, 1],
    ] {
        let m = ReplacementMatrixTwo::from_ints(v).unwrap();
        let model = UrnModel::TwoDraw {
            matrix: m.clone(),
            sampling: Sampling::Without,
        };
        let bound = k_e_two(&m, Sampling::Without);
        for t in [10i64, 100, 1000, 10_000, 100_000] {
            for (p, q) in [(1, 5), (1, 3), (1, 2), (4, 5)] {
                let w = (t * p / q).max(2);
                let st = UrnState::new(int(w), int(t - w)).unwrap();
                let mo = cond_moments_oracle(&st, &model).unwrap();
                let scaled = mo.e_u_over_t.abs() * st.total() * st.total();
                assert!(scaled <= bound, "{v:?} at T = {t}: {scaled} > {bound}");
            }
        }
    }
}

#[test]
fn outcome_increments_follow_the_rows() {
    let m = ReplacementMatrixTwo::from_ints([15, 3, 4, 1, 3, 21]).unwrap();
    let st = UrnState::new(int(5), int(7)).unwrap();
    let d = step_distribution(
        &st,
        &UrnModel::TwoDraw {
            matrix: m,
            sampling: Sampling::Without,
        },
    )
    .unwrap();
    let wb = d.get(Outcome::WB).unwrap();
    assert_eq!((wb.dw.clone(), wb.dt.clone()), (int(4), int(5)));
    assert_eq!(d.get(Outcome::BB).unwrap().probability, rat(7 * 6, 12 * 11));
}
