use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ls::{Atomic, Filter, LinkSpec, Operator, Similarity};
use crate::rng;

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn build(rng: &mut rng::Rng, depth: usize, leaves: &[Similarity]) -> LinkSpec {
    if depth == 0 {
        let similarity = leaves.choose(rng).expect("leaves checked non-empty").clone();
        return LinkSpec::Atomic(Atomic {
            similarity,
            theta: round4(rng.gen_range(0.5..=1.0)),
        });
    }
    let op = *Operator::ALL.choose(rng).unwrap();
    let deep = build(rng, depth - 1, leaves);
    let other_depth = rng.gen_range(0..depth);
    let other = build(rng, other_depth, leaves);
    let (left, right) = if rng.gen_bool(0.5) { (deep, other) } else { (other, deep) };
    let tau = round4(rng.gen_range(0.2..=1.0));
    LinkSpec::complex(op, left, right, Filter::score(tau))
}

/// A random specification of exactly the given depth over the given
/// similarities. Leaf thresholds lie in `[0.5, 1]`, filter thresholds in
/// `[0.2, 1]`, both rounded to four decimals.
pub fn random_spec(depth: usize, leaves: &[Similarity], seed: u64) -> Result<LinkSpec> {
    if leaves.is_empty() {
        return Err(Error::Empty("leaf similarities"));
    }
    let mut rng = rng::from_seed(seed);
    Ok(build(&mut rng, depth, leaves))
}
