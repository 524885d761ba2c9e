use proptest::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use polya_sa::montecarlo::{
    incomplete_beta, ks_beta, ln_gamma, run_replicates, simulate, step, write_finals_csv,
    write_trajectory_csv, SimConfig,
};
use polya_sa::rational::{int, rat, to_f64};
use polya_sa::urns::{
    cond_moments_oracle, drift_of, step_distribution, ReplacementMatrixOne, ReplacementMatrixTwo,
    Sampling, UrnModel, UrnSpec, UrnState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two(v: [i64; 6], sampling: Sampling) -> UrnModel {
    UrnModel::TwoDraw {
        matrix: ReplacementMatrixTwo::from_ints(v).unwrap(),
        sampling,
    }
}

fn one(v: [i64; 4]) -> UrnModel {
    UrnModel::OneDraw(ReplacementMatrixOne::from_ints(v).unwrap())
}

fn model_strategy() -> impl Strategy<Value = UrnModel> {
    prop_oneof![
        prop::array::uniform4(0i64..=5).prop_filter_map("valid", |v| {
            ReplacementMatrixOne::from_ints(v)
                .ok()
                .map(UrnModel::OneDraw)
        }),
        (prop::array::uniform6(0i64..=5), any::<bool>()).prop_filter_map("valid", |(v, with)| {
            let sampling = if with {
                Sampling::With
            } else {
                Sampling::Without
            };
            ReplacementMatrixTwo::from_ints(v)
                .ok()
                .map(|matrix| UrnModel::TwoDraw { matrix, sampling })
        }),
    ]
}

fn csv_bytes(config: &SimConfig, jobs: usize) -> (Vec<u8>, Vec<u8>) {
    let results = run_replicates(config, jobs).unwrap();
    let (mut finals, mut traj) = (Vec::new(), Vec::new());
    write_finals_csv(&mut finals, &results).unwrap();
    write_trajectory_csv(&mut traj, &results).unwrap();
    (finals, traj)
}

#[test]
fn thread_count_does_not_change_results() {
    let spec = UrnSpec::new(two([15, 3, 4, 1, 3, 21], Sampling::Without), int(2), int(2)).unwrap();
    let config = SimConfig::new(spec, 2_000, 64, 11)
        .unwrap()
        .with_trajectory(250)
        .unwrap();
    let serial = csv_bytes(&config, 1);
    assert_eq!(serial, csv_bytes(&config, 8));
    assert_eq!(serial, csv_bytes(&config, 3));
    let other = SimConfig {
        base_seed: 12,
        ..config
    };
    assert_ne!(serial.0, csv_bytes(&other, 8).0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_are_conserved_and_z_stays_in_range(
        model in model_strategy(),
        w0 in 2i64..=6,
        b0 in 2i64..=6,
        seed in any::<u64>(),
    ) {
        let spec = UrnSpec::new(model.clone(), int(w0), int(b0)).unwrap();
        let config = SimConfig::new(spec, 500, 3, seed).unwrap().with_trajectory(7).unwrap();
        // white increments and row sums per outcome, in the model's order
        let (dw, dt): (Vec<f64>, Vec<f64>) = match &model {
            UrnModel::OneDraw(m) => (
                vec![to_f64(&m.a), to_f64(&m.c)],
                m.row_sums().iter().map(to_f64).collect(),
            ),
            UrnModel::TwoDraw { matrix: m, .. } => (
                vec![to_f64(&m.a), to_f64(&m.c), to_f64(&m.e)],
                m.row_sums().iter().map(to_f64).collect(),
            ),
        };
        for r in run_replicates(&config, 2).unwrap() {
            prop_assert_eq!(r.outcome_counts.iter().sum::<u64>(), 500);
            let t: f64 = (w0 + b0) as f64 + r.outcome_counts.iter().zip(&dt).map(|(&k, s)| k as f64 * s).sum::<f64>();
            let w: f64 = w0 as f64 + r.outcome_counts.iter().zip(&dw).map(|(&k, s)| k as f64 * s).sum::<f64>();
            prop_assert_eq!(r.final_t, t);
            prop_assert_eq!(r.final_w, w);
            prop_assert!(r.final_w >= 0.0 && r.final_b >= 0.0);
            let tr = r.trajectory.unwrap();
            prop_assert_eq!(tr.first().unwrap().0, 0);
            prop_assert_eq!(tr.last().unwrap().0, 500);
            prop_assert!(tr.iter().all(|&(_, z)| (0.0..=1.0).contains(&z)));
        }
    }
}

#[test]
fn deterministic_scheme_follows_its_closed_form() {
    // every draw adds two white and one black
    let spec = UrnSpec::new(one([2, 1, 2, 1]), int(3), int(4)).unwrap();
    let config = SimConfig::new(spec, 1_000, 5, 9).unwrap();
    for r in run_replicates(&config, 2).unwrap() {
        assert_eq!((r.final_w, r.final_b), (3.0 + 2_000.0, 4.0 + 1_000.0));
        assert_eq!(r.final_z, 2_003.0 / 3_007.0);
    }
}

/// The first draw of each replicate is an independent sample of the exact
/// one-step law, so the noise has mean zero within three standard errors.
#[test]
fn one_step_noise_is_centered() {
    let model = two([15, 3, 4, 1, 3, 21], Sampling::With);
    let (w0, b0) = (3, 5);
    let st = UrnState::new(int(w0), int(b0)).unwrap();
    let exact = cond_moments_oracle(&st, &model).unwrap();
    let z0 = rat(w0, w0 + b0);
    let g = to_f64(&drift_of(&model).eval(&z0));
    let n = 100_000u64;
    let config = SimConfig::new(UrnSpec::new(model, int(w0), int(b0)).unwrap(), 1, n, 5).unwrap();
    let z0 = to_f64(&z0);
    let noise: Vec<f64> = (0..n)
        .map(|i| {
            let r = simulate(&config, i);
            r.final_t * (r.final_z - z0) - g
        })
        .collect();
    let mean = noise.iter().sum::<f64>() / n as f64;
    let se = (to_f64(&exact.e_u2) / n as f64).sqrt();
    assert!(mean.abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn exact_step_frequencies_match_probabilities() {
    let model = two([35, 9, 1, 1, 3, 21], Sampling::Without);
    let st = UrnState::new(int(4), int(7)).unwrap();
    let dist = step_distribution(&st, &model).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 20_000;
    let mut counts = vec![0usize; dist.outcomes.len()];
    for _ in 0..n {
        let (_, o) = step(&st, &model, &mut rng).unwrap();
        counts[dist.outcomes.iter().position(|x| x.outcome == o).unwrap()] += 1;
    }
    for (o, k) in dist.outcomes.iter().zip(counts) {
        let p = to_f64(&o.probability);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (k as f64 / n as f64 - p).abs() < 4.0 * se,
            "{:?}",
            o.outcome
        );
    }
}

#[test]
fn incomplete_beta_matches_statrs() {
    for (a, b) in [
        (1.0, 1.0),
        (2.0, 1.0),
        (0.5, 0.5),
        (3.5, 1.25),
        (20.0, 30.0),
        (0.2, 7.0),
    ] {
        let oracle = Beta::new(a, b).unwrap();
        for k in 0..=40 {
            let x = k as f64 / 40.0;
            let got = incomplete_beta(x, a, b);
            assert!(
                (got - oracle.cdf(x)).abs() < 1e-10,
                "I({x}; {a}, {b}) = {got} vs {}",
                oracle.cdf(x)
            );
        }
    }
    for x in [0.5, 1.0, 2.5, 10.0, 123.4] {
        assert!((ln_gamma(x) - statrs::function::gamma::ln_gamma(x)).abs() < 1e-10);
    }
}

#[test]
fn ks_statistic_matches_direct_computation() {
    let samples: Vec<f64> = (0..200)
        .map(|i| ((i * 37 % 200) as f64 + 0.5) / 200.0)
        .map(|u: f64| u.powf(0.7))
        .collect();
    let oracle = Beta::new(2.0, 1.0).unwrap();
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let direct = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = oracle.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let ks = ks_beta(&samples, &int(2), &int(1)).unwrap();
    assert!((ks.statistic - direct).abs() < 1e-12);
    assert_eq!(ks.n, 200);
}
