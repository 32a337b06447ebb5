mod common;

use std::collections::BTreeMap;

use linkrt::costmodel::{rmse, Family, RuntimeModel, TrainingSample};
use linkrt::ls::Similarity;
use linkrt::measures::{atomic_join, Measure};
use linkrt::rng;
use linkrt::trainer::{
    collect_samples, evaluate_models, read_samples_csv, train_all, write_evaluation_csv, write_samples_csv,
    SamplePlan, TrainingProtocol,
};
use proptest::prelude::*;

fn small_protocol(seed: u64) -> TrainingProtocol {
    TrainingProtocol {
        n_source_samples: 3,
        n_target_samples: 3,
        repetitions: 1,
        size_low: 5,
        size_high: 40,
        seed,
        ..TrainingProtocol::default()
    }
}

fn flat_models() -> BTreeMap<Family, RuntimeModel> {
    BTreeMap::from([
        (Family::Linear, RuntimeModel::new(Family::Linear, vec![2.0, 0.0, 0.0, 0.0]).unwrap()),
        (Family::Exp, RuntimeModel::new(Family::Exp, vec![0.0; 5]).unwrap()),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sample_plans_replay_and_respect_bounds(seed in any::<u64>(), len in 1usize..100) {
        let protocol = small_protocol(seed);
        let plan = SamplePlan::new(&protocol, len, 60).unwrap();
        prop_assert_eq!(&plan, &SamplePlan::new(&protocol, len, 60).unwrap());
        prop_assert_eq!(plan.source.len(), 3);
        prop_assert_eq!(plan.thetas.len(), 9);
        let hi = 40.min(len);
        for (size, _) in plan.source.iter().chain(&plan.target) {
            prop_assert!(*size >= 5.min(hi) && *size <= 40);
        }
        prop_assert!(plan.source.iter().all(|(s, _)| *s <= hi));
        prop_assert!(plan.thetas.iter().all(|t| (0.5..=1.0).contains(t)));
        prop_assert_eq!(plan.warnings.is_empty(), len >= 40);
    }

    #[test]
    fn sample_csv_round_trips(rows in prop::collection::vec((1usize..100_000, 1usize..100_000, 0.0f64..=1.0, 0.0f64..1e6), 0..30)) {
        let samples: Vec<_> = rows.into_iter().map(|(s, t, th, r)| TrainingSample::new(s, t, th, r)).collect();
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &samples).unwrap();
        prop_assert_eq!(read_samples_csv(buf.as_slice()).unwrap(), samples);
    }
}

#[test]
fn collected_samples_follow_the_plan() {
    let (s, t) = common::random_tables(&mut rng::from_seed(2), 50, 50);
    let sim = Similarity::new(Measure::Trigrams, "p", "p");
    let protocol = small_protocol(17);
    let plan = SamplePlan::new(&protocol, 50, 50).unwrap();
    let collected = collect_samples(&sim, &s, &t, &protocol).unwrap();
    assert_eq!(collected.samples.len(), 9);
    assert_eq!(collected.result_sizes.len(), 9);
    for (k, x) in collected.samples.iter().enumerate() {
        assert_eq!(x.s_size, plan.source[k / 3].0);
        assert_eq!(x.t_size, plan.target[k % 3].0);
        assert_eq!(x.theta, plan.thetas[k]);
        assert!(x.runtime_ms >= 0.0);
    }
    let again = collect_samples(&sim, &s, &t, &protocol).unwrap();
    assert_eq!(again.result_sizes, collected.result_sizes);
    let models = train_all(&collected.samples).unwrap();
    assert_eq!(models.keys().copied().collect::<Vec<_>>(), Family::ALL.to_vec());
}

#[test]
fn evaluation_rmse_matches_records() {
    let (s, t) = common::random_tables(&mut rng::from_seed(4), 30, 30);
    let sim = Similarity::new(Measure::Jaccard, "p", "p");
    let eval = evaluate_models(&flat_models(), &sim, &s, &t, 4, &small_protocol(1)).unwrap();
    assert_eq!(eval.records.len(), 8);
    for family in [Family::Linear, Family::Exp] {
        let (e, x): (Vec<f64>, Vec<f64>) = eval
            .records
            .iter()
            .filter(|r| r.model_family == family)
            .map(|r| (r.expected_ms, r.executed_ms))
            .unzip();
        assert_eq!(e.len(), 4);
        assert_eq!(eval.rmse[&family], rmse(&e, &x).unwrap());
        let want = if family == Family::Linear { 2.0 } else { 1.0 };
        assert!(e.iter().all(|v| *v == want));
    }
    for r in &eval.records {
        let theta: f64 = r.spec_text.rsplit('|').next().unwrap().parse().unwrap();
        assert!((0.5..=1.0).contains(&theta));
        assert!(atomic_join(Measure::Jaccard, &s, &t, "p", "p", theta).is_ok());
    }
}

#[test]
fn single_run_gives_one_record_per_family() {
    let (s, t) = common::random_tables(&mut rng::from_seed(6), 10, 10);
    let sim = Similarity::new(Measure::Cosine, "p", "p");
    let eval = evaluate_models(&flat_models(), &sim, &s, &t, 1, &small_protocol(3)).unwrap();
    assert_eq!(eval.records.len(), 2);
    assert!(evaluate_models(&flat_models(), &sim, &s, &t, 0, &small_protocol(3)).is_err());
    assert!(evaluate_models(&BTreeMap::new(), &sim, &s, &t, 1, &small_protocol(3)).is_err());

    let md = eval.markdown("cosine");
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines[0], "| cosine | expected | execution | RMSE |");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("| linear | 2.00 |"), "{md}");
    assert!(lines[3].starts_with("| exp | 1.00 |"), "{md}");

    let mut buf = Vec::new();
    write_evaluation_csv(&mut buf, &eval.records).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("spec,family,expected_ms,executed_ms"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn invalid_protocols_are_rejected() {
    let bad = [
        TrainingProtocol { theta_low: 0.0, ..small_protocol(0) },
        TrainingProtocol { theta_low: 0.9, theta_high: 0.8, ..small_protocol(0) },
        TrainingProtocol { size_low: 0, ..small_protocol(0) },
        TrainingProtocol { repetitions: 0, ..small_protocol(0) },
    ];
    for p in bad {
        assert!(p.validate().is_err(), "{p:?}");
    }
    assert!(read_samples_csv("a,b\n1,2\n".as_bytes()).is_err());
    assert!(read_samples_csv("s_size,t_size,theta,runtime_ms\n1,x,0.5,3\n".as_bytes()).is_err());
}
