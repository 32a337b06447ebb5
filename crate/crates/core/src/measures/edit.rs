//! Edit-distance join.
//!
//! A pair passes when `1 - d / max(|a|, |b|) >= theta`, i.e. when
//! `d <= (1 - theta) * max(|a|, |b|)`. Candidates are pruned by length
//! difference and by the q-gram count bound: strings within edit distance
//! `k` share at least `max(|a|, |b|) - q + 1 - k * q` q-grams (counted as
//! multisets). Survivors are verified with a banded dynamic program.

use std::collections::{BTreeMap, HashMap};

use super::{edit_score, PairBest, Value};

const Q: usize = 3;

/// Plain Levenshtein distance over characters.
pub fn levenshtein_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let next = (diag + usize::from(ca != cb)).min(row[j] + 1).min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// Distance if it is at most `k`, computed on a diagonal band of width
/// `2k + 1`.
pub fn levenshtein_within<T: PartialEq>(a: &[T], b: &[T], k: usize) -> Option<usize> {
    if a.len().abs_diff(b.len()) > k {
        return None;
    }
    let inf = k + 1;
    let width = b.len();
    let mut prev = vec![inf; width + 1];
    let mut cur = vec![inf; width + 1];
    for (j, slot) in prev.iter_mut().enumerate().take(k.min(width) + 1) {
        *slot = j;
    }
    for i in 1..=a.len() {
        let lo = i.saturating_sub(k).max(1);
        let hi = (i + k).min(width);
        cur.fill(inf);
        if i <= k {
            cur[0] = i;
        }
        let mut row_min = cur[0];
        for j in lo..=hi {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let v = sub.min(prev[j] + 1).min(cur[j - 1] + 1).min(inf);
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if row_min > k {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (prev[width] <= k).then_some(prev[width])
}

/// Largest edit distance that can still reach `theta` for strings whose
/// longer side has `longest` characters. Rounded up, so never too small.
fn max_distance(theta: f64, longest: usize) -> usize {
    ((1.0 - theta) * longest as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Occurrence-numbered q-grams: the n-th repeat of a gram is a distinct
/// token, so set intersection equals multiset intersection.
fn qgram_tokens(chars: &[char], dict: &mut HashMap<(Vec<char>, u32), u32>) -> Vec<u32> {
    if chars.len() < Q {
        return Vec::new();
    }
    let mut counts: HashMap<&[char], u32> = HashMap::new();
    let mut out = Vec::with_capacity(chars.len() - Q + 1);
    for w in chars.windows(Q) {
        let c = counts.entry(w).or_default();
        let key = (w.to_vec(), *c);
        *c += 1;
        let next = dict.len() as u32;
        out.push(*dict.entry(key).or_insert(next));
    }
    out
}

pub(super) fn join(source: &[Value<'_>], target: &[Value<'_>], theta: f64) -> PairBest {
    let src: Vec<Vec<char>> = source.iter().map(|v| v.text.chars().collect()).collect();
    let tgt: Vec<Vec<char>> = target.iter().map(|v| v.text.chars().collect()).collect();

    let mut dict = HashMap::new();
    let mut by_length: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut postings: HashMap<u32, Vec<usize>> = HashMap::new();
    for (j, y) in tgt.iter().enumerate() {
        by_length.entry(y.len()).or_default().push(j);
        for g in qgram_tokens(y, &mut dict) {
            postings.entry(g).or_default().push(j);
        }
    }

    let mut best = PairBest::default();
    let mut shared = vec![0usize; tgt.len()];
    let mut touched: Vec<usize> = Vec::new();
    let verify = |i: usize, j: usize, best: &mut PairBest| {
        let (x, y) = (&src[i], &tgt[j]);
        let k = max_distance(theta, x.len().max(y.len()));
        if let Some(d) = levenshtein_within(x, y, k) {
            let score = edit_score(d, x.len(), y.len());
            if score >= theta {
                best.offer(source[i].owner, target[j].owner, score);
            }
        }
    };

    for (i, x) in src.iter().enumerate() {
        let la = x.len();
        // lengths whose distance bound is loose enough that count filtering
        // cannot prune, and lengths that need a q-gram count check
        let mut open_lengths = Vec::new();
        let mut counted: HashMap<usize, usize> = HashMap::new();
        for &lb in by_length.keys() {
            let longest = la.max(lb);
            let k = max_distance(theta, longest);
            if la.abs_diff(lb) > k {
                continue;
            }
            let need = longest as i64 - Q as i64 + 1 - (k * Q) as i64;
            if need <= 0 || la < Q || lb < Q {
                open_lengths.push(lb);
            } else {
                counted.insert(lb, need as usize);
            }
        }
        for lb in &open_lengths {
            for &j in &by_length[lb] {
                verify(i, j, &mut best);
            }
        }
        if counted.is_empty() {
            continue;
        }
        // grams of the probe string are looked up only, never added
        let probe: Vec<u32> = {
            let mut counts: HashMap<&[char], u32> = HashMap::new();
            x.windows(Q)
                .filter_map(|w| {
                    let c = counts.entry(w).or_default();
                    let key = (w.to_vec(), *c);
                    *c += 1;
                    dict.get(&key).copied()
                })
                .collect()
        };
        for g in probe {
            for &j in &postings[&g] {
                if shared[j] == 0 {
                    touched.push(j);
                }
                shared[j] += 1;
            }
        }
        for &j in &touched {
            if counted.get(&tgt[j].len()).is_some_and(|&need| shared[j] >= need) {
                verify(i, j, &mut best);
            }
        }
        for j in touched.drain(..) {
            shared[j] = 0;
        }
    }
    best
}
