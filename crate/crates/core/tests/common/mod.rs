#![allow(dead_code)]

use linkrt::kb::{Resource, ResourceTable};
use linkrt::ls::Similarity;
use linkrt::measures::Measure;
use linkrt::rng::Rng;
use rand::Rng as _;

/// Pseudo-inverse solution `A⁺b` from a one-sided Jacobi SVD. Dense
/// row-major input; singular values below `1e-12 * max` count as zero.
pub fn pinv_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let m = a.len();
    let n = a[0].len();
    // columns of u are rotated until mutually orthogonal; v collects the
    // rotations
    let mut u: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| f64::from(u8::from(i == j))).collect()).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut u, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let (xp, yq) = (*x, *y);
                        *x = c * xp - s * yq;
                        *y = s * xp + c * yq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = u.iter().map(|col| dot(col, col).sqrt()).collect();
    let cutoff = 1e-12 * sigma.iter().cloned().fold(0.0, f64::max);
    let mut x = vec![0.0; n];
    for j in 0..n {
        if sigma[j] <= cutoff || sigma[j] == 0.0 {
            continue;
        }
        // (u_j / sigma_j)ᵀ b / sigma_j
        let coef = dot(&u[j], b) / (sigma[j] * sigma[j]);
        for (xi, vij) in x.iter_mut().zip(&v[j]) {
            *xi += coef * vij;
        }
    }
    x
}

pub fn random_word(rng: &mut Rng, alphabet: u8, max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| (b'a' + rng.gen_range(0..alphabet)) as char).collect()
}

/// Tables with a single property `p`. Values are one to four words over a
/// small alphabet, so that collisions are frequent. Some resources carry
/// two values or none, and mixed case appears now and then.
pub fn random_tables(rng: &mut Rng, n_source: usize, n_target: usize) -> (ResourceTable, ResourceTable) {
    let make = |prefix: &str, n: usize, rng: &mut Rng| {
        let mut table = ResourceTable::new();
        for i in 0..n {
            let mut r = Resource::new(format!("{prefix}{i}"));
            let count = match rng.gen_range(0..20) {
                0 => 0,
                1 | 2 => 2,
                _ => 1,
            };
            for _ in 0..count {
                let words = rng.gen_range(1..=4);
                let mut value: Vec<String> = (0..words).map(|_| random_word(rng, 5, 5)).collect();
                if rng.gen_range(0..10) == 0 {
                    value[0] = value[0].to_uppercase();
                }
                r = r.with("p", value.join(" "));
            }
            table.push(r).unwrap();
        }
        table
    };
    let s = make("s", n_source, rng);
    let t = make("t", n_target, rng);
    (s, t)
}

/// Two properties per resource so specifications can mix them.
pub fn random_tables_two(rng: &mut Rng, n_source: usize, n_target: usize) -> (ResourceTable, ResourceTable) {
    let make = |prefix: &str, n: usize, rng: &mut Rng| {
        let mut table = ResourceTable::new();
        for i in 0..n {
            let words = |rng: &mut Rng| {
                let k = rng.gen_range(1..=3);
                (0..k).map(|_| random_word(rng, 4, 4)).collect::<Vec<_>>().join(" ")
            };
            let a = words(rng);
            let b = words(rng);
            table.push(Resource::new(format!("{prefix}{i}")).with("a", a).with("b", b)).unwrap();
        }
        table
    };
    let s = make("s", n_source, rng);
    let t = make("t", n_target, rng);
    (s, t)
}

pub fn leaf_similarities() -> Vec<Similarity> {
    let mut out = Vec::new();
    for m in Measure::ALL {
        out.push(Similarity::new(m, "a", "a"));
        out.push(Similarity::new(m, "b", "a"));
    }
    out.push(Similarity::new(Measure::Jaccard, "b", "b"));
    out
}
