//! Prefix-filtered set-similarity join.
//!
//! Tokens are ranked by ascending global frequency. A pair scoring at least
//! `theta` must share at least `alpha(|x|)` tokens, where `alpha` is the
//! per-record lower bound on the overlap for the measure; two such records
//! then share a token within their first `|x| - alpha(|x|) + 1` ranks. Only
//! target prefixes are indexed, probed by source prefixes, and every
//! surviving candidate is verified exactly.

use std::collections::HashMap;

use super::{score_from_overlap, sorted_overlap, Measure, PairBest, Tokenizer, Value};

const SLACK: f64 = 1e-9;

/// Lower bound on the overlap of a record of `len` tokens with any partner
/// reaching `theta`.
fn min_overlap(measure: Measure, theta: f64, len: usize) -> usize {
    let n = len as f64;
    let bound = match measure {
        Measure::Jaccard | Measure::Trigrams => theta * n,
        Measure::Cosine => theta * theta * n,
        // a partner with a single token can reach overlap 1.0
        Measure::Overlap => 1.0,
        Measure::Levenshtein => unreachable!(),
    };
    ((bound - SLACK * (n + 1.0)).ceil() as usize).clamp(1, len)
}

/// Admissible partner sizes for a record of `len` tokens.
fn size_window(measure: Measure, theta: f64, len: usize) -> (usize, usize) {
    let n = len as f64;
    let factor = match measure {
        Measure::Jaccard | Measure::Trigrams => theta,
        Measure::Cosine => theta * theta,
        Measure::Overlap => return (1, usize::MAX),
        Measure::Levenshtein => unreachable!(),
    };
    let lo = (factor * n - SLACK * (n + 1.0)).ceil().max(1.0) as usize;
    let hi = (n / factor + SLACK * (n + 1.0)).floor();
    let hi = if hi >= usize::MAX as f64 { usize::MAX } else { hi as usize };
    (lo, hi)
}

pub(super) fn join(
    measure: Measure,
    tokenizer: Tokenizer,
    source: &[Value<'_>],
    target: &[Value<'_>],
    theta: f64,
) -> PairBest {
    let src_tokens: Vec<Vec<String>> = source.iter().map(|v| tokenizer.tokens(v.text)).collect();
    let tgt_tokens: Vec<Vec<String>> = target.iter().map(|v| tokenizer.tokens(v.text)).collect();

    let mut freq: HashMap<&str, usize> = HashMap::new();
    for t in src_tokens.iter().chain(&tgt_tokens).flatten() {
        *freq.entry(t.as_str()).or_default() += 1;
    }
    let mut order: Vec<(&str, usize)> = freq.into_iter().collect();
    order.sort_unstable_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    let rank: HashMap<&str, u32> = order
        .iter()
        .enumerate()
        .map(|(i, (tok, _))| (*tok, i as u32))
        .collect();
    let encode = |tokens: &Vec<String>| -> Vec<u32> {
        let mut ids: Vec<u32> = tokens.iter().map(|t| rank[t.as_str()]).collect();
        ids.sort_unstable();
        ids
    };
    let src: Vec<Vec<u32>> = src_tokens.iter().map(encode).collect();
    let tgt: Vec<Vec<u32>> = tgt_tokens.iter().map(encode).collect();

    let mut index: HashMap<u32, Vec<u32>> = HashMap::new();
    for (j, y) in tgt.iter().enumerate() {
        if y.is_empty() {
            continue;
        }
        let prefix = y.len() - min_overlap(measure, theta, y.len()) + 1;
        for &tok in &y[..prefix] {
            index.entry(tok).or_default().push(j as u32);
        }
    }

    let mut best = PairBest::default();
    let mut seen = vec![u32::MAX; tgt.len()];
    let mut candidates = Vec::new();
    for (i, x) in src.iter().enumerate() {
        if x.is_empty() {
            continue;
        }
        let prefix = x.len() - min_overlap(measure, theta, x.len()) + 1;
        let (lo, hi) = size_window(measure, theta, x.len());
        candidates.clear();
        for tok in &x[..prefix] {
            let Some(postings) = index.get(tok) else { continue };
            for &j in postings {
                let ylen = tgt[j as usize].len();
                if seen[j as usize] != i as u32 && (lo..=hi).contains(&ylen) {
                    seen[j as usize] = i as u32;
                    candidates.push(j as usize);
                }
            }
        }
        for &j in &candidates {
            let y = &tgt[j];
            let score = score_from_overlap(measure, sorted_overlap(x, y), x.len(), y.len());
            if score >= theta {
                best.offer(source[i].owner, target[j].owner, score);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_bounds() {
        assert_eq!(min_overlap(Measure::Jaccard, 0.5, 4), 2);
        assert_eq!(min_overlap(Measure::Jaccard, 1.0, 4), 4);
        assert_eq!(min_overlap(Measure::Cosine, 0.5, 8), 2);
        assert_eq!(min_overlap(Measure::Overlap, 0.9, 8), 1);
        assert_eq!(min_overlap(Measure::Jaccard, 0.01, 3), 1);
    }

    #[test]
    fn size_windows() {
        assert_eq!(size_window(Measure::Jaccard, 0.5, 4), (2, 8));
        assert_eq!(size_window(Measure::Cosine, 0.5, 4), (1, 16));
        assert_eq!(size_window(Measure::Trigrams, 1.0, 3), (3, 3));
    }
}
