mod common;

use linkrt::costmodel::{
    fit_exp, fit_linear, fit_mixed, min_norm_solve, mixed_value, rmse, training_loss, Family, RuntimeModel,
    TrainingSample,
};
use linkrt::rng;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_samples(seed: u64, n: usize) -> Vec<TrainingSample> {
    let mut rng = rng::from_seed(seed);
    (0..n)
        .map(|_| {
            TrainingSample::new(
                rng.gen_range(1..500),
                rng.gen_range(1..500),
                rng.gen_range(0.5..=1.0),
                rng.gen_range(0.0..200.0),
            )
        })
        .collect()
}

fn with_coefficients(model: &RuntimeModel, c: Vec<f64>) -> RuntimeModel {
    let (s, t) = model.scales();
    RuntimeModel::scaled(model.family(), c, s, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn underdetermined_solution_has_minimum_norm(seed in any::<u64>()) {
        let mut rng = rng::from_seed(seed);
        let rows: Vec<Vec<f64>> = (0..4).map(|_| (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let b: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let a = DMatrix::from_fn(4, 5, |i, j| rows[i][j]);
        let x = min_norm_solve(&a, &DVector::from_column_slice(&b));
        let oracle = common::pinv_solve(&rows, &b);
        for (p, q) in x.iter().zip(&oracle) {
            prop_assert!((p - q).abs() <= 1e-8);
        }
        // adding any null-space direction can only lengthen the solution
        let z = DVector::from_fn(5, |_, _| rng.gen_range(-1.0..1.0));
        let az = &a * &z;
        let null = &z - DVector::from_vec(common::pinv_solve(&rows, az.as_slice()));
        prop_assert!((&a * &null).norm() < 1e-9);
        prop_assert!((&x + &null).norm() >= x.norm());
    }

    #[test]
    fn closed_form_fits_are_optimal(seed in any::<u64>(), n in 6usize..30, k in 0usize..5, sign in prop::bool::ANY) {
        let samples = random_samples(seed, n);
        for fit in [fit_linear, fit_exp] {
            let (model, report) = fit(&samples).unwrap();
            let base = training_loss(&model, &samples).unwrap();
            prop_assert!((base - report.loss).abs() <= 1e-9 * base.max(1.0));
            let mut c = model.coefficients().to_vec();
            if k < c.len() {
                c[k] += if sign { 1e-3 } else { -1e-3 };
                let moved = training_loss(&with_coefficients(&model, c), &samples).unwrap();
                prop_assert!(moved >= base * (1.0 - 1e-12), "{} -> {}", base, moved);
            }
        }
    }

    #[test]
    fn sample_order_does_not_matter(seed in any::<u64>(), n in 1usize..30) {
        let samples = random_samples(seed, n);
        let mut shuffled = samples.clone();
        shuffled.shuffle(&mut rng::from_seed(seed ^ 0xff));
        for fit in [fit_linear, fit_exp] {
            let (a, _) = fit(&samples).unwrap();
            let (b, _) = fit(&shuffled).unwrap();
            for (x, y) in a.coefficients().iter().zip(b.coefficients()) {
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn accepted_losses_never_increase(seed in any::<u64>()) {
        let (_, report) = fit_mixed(&random_samples(seed, 20)).unwrap();
        prop_assert!(report.history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(report.history.last().copied(), Some(report.loss));
    }

    #[test]
    fn exp_predictions_are_positive(c in prop::collection::vec(-0.3f64..0.3, 5), s in 1usize..1000, t in 1usize..1000, th in 0.01f64..=1.0) {
        let model = RuntimeModel::new(Family::Exp, c).unwrap();
        prop_assert!(model.predict(s, t, th).unwrap() > 0.0);
    }

    #[test]
    fn rmse_properties(pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 1..20), k in 0.1f64..10.0) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        prop_assert_eq!(rmse(&x, &x).unwrap(), 0.0);
        prop_assert_eq!(rmse(&x, &y).unwrap(), rmse(&y, &x).unwrap());
        let xs: Vec<f64> = x.iter().map(|v| v * k).collect();
        let ys: Vec<f64> = y.iter().map(|v| v * k).collect();
        let scaled = rmse(&xs, &ys).unwrap();
        prop_assert!((scaled - k * rmse(&x, &y).unwrap()).abs() <= 1e-9 * scaled.max(1.0));
    }

    #[test]
    fn model_files_round_trip(seed in any::<u64>(), family in prop::sample::select(Family::ALL.to_vec())) {
        let mut rng = rng::from_seed(seed);
        let c: Vec<f64> = (0..family.coefficient_count()).map(|_| rng.gen_range(-1e6..1e6) / 7.0).collect();
        let model = RuntimeModel::scaled(family, c, rng.gen_range(1.0..1e5), rng.gen_range(1.0..1e5))
            .unwrap()
            .with_metadata("a.tsv x b.tsv");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.model");
        model.save(&path, 0.125).unwrap();
        let (back, loss) = RuntimeModel::load(&path).unwrap();
        prop_assert_eq!(back, model);
        prop_assert_eq!(loss, 0.125);
    }
}

#[test]
fn prediction_examples() {
    let constant = RuntimeModel::new(Family::Linear, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!(constant.predict(123, 456, 0.7).unwrap(), 1.0);
    let zero = RuntimeModel::new(Family::Exp, vec![0.0; 5]).unwrap();
    assert_eq!(zero.predict(5, 5, 0.5).unwrap(), 1.0);
    let printed = RuntimeModel::new(Family::Exp, vec![-1.028, 0.009, 0.010, 9.821, -9.053]).unwrap();
    let want = (-1.028f64 + 4.122 + 5.12 + 4.9105 - 2.26325).exp();
    let got = printed.predict(458, 512, 0.5).unwrap();
    assert!((got - want).abs() <= 1e-9 * want, "{got} vs {want}");
    let huge = RuntimeModel::new(Family::Exp, vec![0.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
    assert!(huge.predict(1000, 1000, 0.5).is_err());
}

#[test]
fn linear_fit_examples() {
    let truth = [2.0, 0.5, 0.25, -3.0];
    let mut rng = rng::from_seed(21);
    let samples: Vec<_> = (0..20)
        .map(|_| {
            let (s, t, th) = (rng.gen_range(1..1000), rng.gen_range(1..1000), rng.gen_range(0.5..=1.0));
            let r = truth[0] + truth[1] * s as f64 + truth[2] * t as f64 + truth[3] * th;
            TrainingSample::new(s, t, th, r)
        })
        .collect();
    let (m, _) = fit_linear(&samples).unwrap();
    for (a, b) in m.coefficients().iter().zip(truth) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    let (single, _) = fit_linear(&[TrainingSample::new(1, 1, 1.0, 4.0)]).unwrap();
    assert!((single.predict(1, 1, 1.0).unwrap() - 4.0).abs() < 1e-12);
    // min norm spreads the value evenly over the four equal features
    for c in single.coefficients() {
        assert!((c - 1.0).abs() < 1e-12);
    }

    let constant: Vec<_> = samples.iter().map(|x| TrainingSample::new(x.s_size, x.t_size, x.theta, 7.0)).collect();
    let (m, _) = fit_linear(&constant).unwrap();
    for x in &constant {
        assert!((m.predict(x.s_size, x.t_size, x.theta).unwrap() - 7.0).abs() < 1e-8);
    }
}

#[test]
fn exp_fit_of_unit_runtimes_is_zero() {
    let samples: Vec<_> = random_samples(5, 8)
        .into_iter()
        .map(|x| TrainingSample::new(x.s_size, x.t_size, x.theta, 1.0))
        .collect();
    let (m, report) = fit_exp(&samples).unwrap();
    assert!(m.coefficients().iter().all(|c| *c == 0.0));
    assert_eq!(report.loss, 0.0);
    // sub-millisecond runtimes are clamped to 1 before the logarithm
    let tiny: Vec<_> = samples.iter().map(|x| TrainingSample::new(x.s_size, x.t_size, x.theta, 0.0)).collect();
    assert!(fit_exp(&tiny).unwrap().0.coefficients().iter().all(|c| *c == 0.0));
}

#[test]
fn mixed_fit_at_the_optimum_stops_at_once() {
    let ones = [1.0; 7];
    let mut rng = rng::from_seed(9);
    let mut samples: Vec<_> = (0..10)
        .map(|_| (rng.gen_range(1..=100usize), rng.gen_range(1..=100usize), rng.gen_range(0.5..=1.0)))
        .collect();
    samples.push((100, 100, 0.5));
    let samples: Vec<_> = samples
        .into_iter()
        .map(|(s, t, th)| TrainingSample::new(s, t, th, mixed_value(&ones, s as f64 / 100.0, t as f64 / 100.0, th)))
        .collect();
    let (model, report) = fit_mixed(&samples).unwrap();
    assert!(report.loss < 1e-12);
    assert!(report.converged);
    assert_eq!(report.iterations, 0);
    assert_eq!(model.scales(), (100.0, 100.0));
}

#[test]
fn invalid_inputs() {
    assert!(fit_linear(&[]).is_err());
    assert!(fit_exp(&[TrainingSample::new(1, 1, 0.5, f64::NAN)]).is_err());
    assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    assert!(RuntimeModel::new(Family::Mixed, vec![1.0; 4]).is_err());
}
