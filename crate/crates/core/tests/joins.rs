mod common;

use linkrt::kb::{Resource, ResourceTable};
use linkrt::measures::{
    atomic_join, levenshtein_distance, levenshtein_within, measure_runtime, naive_join, similarity, Measure,
};
use linkrt::rng;
use proptest::prelude::*;

fn measure() -> impl Strategy<Value = Measure> {
    prop::sample::select(Measure::ALL.to_vec())
}

fn values() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-cA]{0,4}( [a-c]{1,3}){0,2}", 0..3)
}

fn table(prefix: &'static str) -> impl Strategy<Value = ResourceTable> {
    prop::collection::vec(values(), 0..12).prop_map(move |rows| {
        let resources = rows.into_iter().enumerate().map(|(i, vals)| {
            vals.into_iter()
                .fold(Resource::new(format!("{prefix}{i}")), |r, v| r.with("p", v))
        });
        ResourceTable::from_resources(resources).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn filtered_join_equals_naive(s in table("s"), t in table("t"), m in measure(), theta in 0.05f64..=1.0) {
        let fast = atomic_join(m, &s, &t, "p", "p", theta).unwrap();
        let slow = naive_join(m, &s, &t, "p", "p", theta).unwrap();
        prop_assert!(fast.diff(&slow, 1e-12).is_none(), "{:?}", fast.diff(&slow, 1e-12));
    }

    #[test]
    fn raising_the_threshold_only_removes_pairs(
        s in table("s"), t in table("t"), m in measure(), a in 0.05f64..=1.0, b in 0.05f64..=1.0,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let loose = atomic_join(m, &s, &t, "p", "p", lo).unwrap();
        let strict = atomic_join(m, &s, &t, "p", "p", hi).unwrap();
        for (x, y, r) in strict.iter() {
            prop_assert_eq!(loose.get(x, y), Some(r));
            prop_assert!(r >= hi && r <= 1.0);
        }
        prop_assert_eq!(loose.threshold(hi), strict);
    }

    #[test]
    fn swapping_tables_transposes(s in table("s"), t in table("t"), m in measure(), theta in 0.05f64..=1.0) {
        let forward = atomic_join(m, &s, &t, "p", "p", theta).unwrap();
        let backward = atomic_join(m, &t, &s, "p", "p", theta).unwrap();
        prop_assert_eq!(forward.transpose(), backward);
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in "[a-dA-D ]{0,12}", b in "[a-dA-D ]{0,12}", m in measure()) {
        let x = similarity(m, &a, &b);
        prop_assert_eq!(x, similarity(m, &b, &a));
        prop_assert!((0.0..=1.0).contains(&x));
        if !a.trim().is_empty() {
            prop_assert_eq!(similarity(m, &a, &a), 1.0);
        }
    }

    #[test]
    fn banded_distance_agrees(a in "[ab]{0,10}", b in "[ab]{0,10}", k in 0usize..12) {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let d = levenshtein_distance(&a, &b);
        prop_assert_eq!(levenshtein_within(&a, &b, k), (d <= k).then_some(d));
    }
}

#[test]
fn invalid_thresholds_rejected() {
    let (s, t) = common::random_tables(&mut rng::from_seed(1), 3, 3);
    for theta in [0.0, -0.1, 1.5, f64::NAN] {
        assert!(atomic_join(Measure::Jaccard, &s, &t, "p", "p", theta).is_err());
        assert!(naive_join(Measure::Jaccard, &s, &t, "p", "p", theta).is_err());
    }
}

/// Spearman rank correlation without tie handling; inputs are distinct.
fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (k, i) in idx.into_iter().enumerate() {
            r[i] = k as f64;
        }
        r
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn runtime_grows_with_table_size() {
    let mut rng = rng::from_seed(11);
    let (s, t) = common::random_tables(&mut rng, 1024, 1024);
    let mut sizes = Vec::new();
    let mut times = Vec::new();
    let mut n = 2;
    for _ in 0..10 {
        let head = |table: &ResourceTable| {
            ResourceTable::from_resources(table.resources()[..n].iter().cloned()).unwrap()
        };
        let ms = measure_runtime(Measure::Trigrams, &head(&s), &head(&t), "p", "p", 0.5, 3).unwrap();
        sizes.push(n as f64);
        times.push(ms);
        n *= 2;
    }
    let rho = spearman(&sizes, &times);
    assert!(rho > 0.0, "rank correlation {rho}, runtimes {times:?}");
}
