//! String similarity measures and the joins that execute atomic
//! specifications.
//!
//! Token measures (`jaccard`, `overlap`, `cosine`, `trigrams`) run through a
//! prefix-filtered set-similarity join; `levenshtein` runs through an
//! edit-distance join with length and q-gram count filtering. Both are
//! verified against [`naive_join`], which scores every pair of the cross
//! product.
//!
//! A resource may carry several values for a property. Its score against
//! another resource is the best score over all value pairs; a resource with
//! no value scores 0.

mod edit;
mod prefix;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::kb::ResourceTable;
use crate::mapping::Mapping;

pub use edit::{levenshtein_distance, levenshtein_within};

/// How a string is turned into a token set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tokenizer {
    /// Lowercased, split on whitespace.
    Word,
    /// Contiguous 3-grams of the lowercased string; non-empty strings
    /// shorter than 3 characters are their own single token.
    CharTrigram,
}

impl Tokenizer {
    /// Sorted, deduplicated tokens.
    pub fn tokens(self, text: &str) -> Vec<String> {
        let lower = text.to_lowercase();
        let mut out: Vec<String> = match self {
            Tokenizer::Word => lower.split_whitespace().map(str::to_owned).collect(),
            Tokenizer::CharTrigram => {
                let chars: Vec<char> = lower.chars().collect();
                if chars.is_empty() {
                    Vec::new()
                } else if chars.len() < 3 {
                    vec![lower]
                } else {
                    chars.windows(3).map(|w| w.iter().collect()).collect()
                }
            }
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Levenshtein,
    Jaccard,
    Overlap,
    Cosine,
    Trigrams,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Levenshtein,
        Measure::Jaccard,
        Measure::Overlap,
        Measure::Cosine,
        Measure::Trigrams,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Levenshtein => "levenshtein",
            Measure::Jaccard => "jaccard",
            Measure::Overlap => "overlap",
            Measure::Cosine => "cosine",
            Measure::Trigrams => "trigrams",
        }
    }

    /// `None` for character-level edit distance.
    pub fn tokenizer(self) -> Option<Tokenizer> {
        match self {
            Measure::Levenshtein => None,
            Measure::Trigrams => Some(Tokenizer::CharTrigram),
            Measure::Jaccard | Measure::Overlap | Measure::Cosine => Some(Tokenizer::Word),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "levenshtein" | "levsim" | "levensim" => Ok(Measure::Levenshtein),
            "jaccard" => Ok(Measure::Jaccard),
            "overlap" => Ok(Measure::Overlap),
            "cosine" => Ok(Measure::Cosine),
            "trigrams" | "trigram" => Ok(Measure::Trigrams),
            _ => Err(Error::UnknownMeasure(s.to_owned())),
        }
    }
}

/// Score of a token-set measure from the overlap and the two set sizes.
/// Joins and the naive oracle both go through here, so their scores agree
/// bit for bit.
pub(crate) fn score_from_overlap(measure: Measure, overlap: usize, a: usize, b: usize) -> f64 {
    if a == 0 || b == 0 {
        return 0.0;
    }
    let o = overlap as f64;
    match measure {
        Measure::Jaccard | Measure::Trigrams => o / (a + b - overlap) as f64,
        Measure::Overlap => o / a.min(b) as f64,
        Measure::Cosine => o / ((a * b) as f64).sqrt(),
        Measure::Levenshtein => unreachable!("edit distance is not a set measure"),
    }
}

pub(crate) fn edit_score(distance: usize, len_a: usize, len_b: usize) -> f64 {
    let longest = len_a.max(len_b);
    if longest == 0 {
        1.0
    } else {
        1.0 - distance as f64 / longest as f64
    }
}

/// Size of the intersection of two sorted, deduplicated slices.
pub(crate) fn sorted_overlap<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Similarity of two strings under `measure`, in `[0, 1]`.
pub fn similarity(measure: Measure, a: &str, b: &str) -> f64 {
    match measure.tokenizer() {
        None => {
            let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
            edit_score(levenshtein_distance(&ca, &cb), ca.len(), cb.len())
        }
        Some(tok) => {
            let (ta, tb) = (tok.tokens(a), tok.tokens(b));
            score_from_overlap(measure, sorted_overlap(&ta, &tb), ta.len(), tb.len())
        }
    }
}

/// Best similarity over all value pairs; 0 when either side has no value.
pub fn best_similarity(measure: Measure, a: &[String], b: &[String]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| similarity(measure, x, y)))
        .fold(0.0, f64::max)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_nan() || theta <= 0.0 || theta > 1.0 {
        Err(Error::Threshold(theta))
    } else {
        Ok(())
    }
}

/// One property value tagged with the resource it belongs to.
pub(crate) struct Value<'a> {
    pub owner: usize,
    pub text: &'a str,
}

pub(crate) fn flatten<'a>(table: &'a ResourceTable, property: &str) -> Vec<Value<'a>> {
    table
        .column(property)
        .into_iter()
        .enumerate()
        .flat_map(|(owner, values)| {
            values.iter().map(move |v| Value {
                owner,
                text: v.as_str(),
            })
        })
        .collect()
}

/// Keeps the best passing score per resource pair.
#[derive(Default)]
pub(crate) struct PairBest {
    best: HashMap<(usize, usize), f64>,
}

impl PairBest {
    pub fn offer(&mut self, s: usize, t: usize, score: f64) {
        self.best
            .entry((s, t))
            .and_modify(|r| *r = r.max(score))
            .or_insert(score);
    }

    pub fn into_mapping(self, source: &ResourceTable, target: &ResourceTable) -> Mapping {
        let (src, tgt) = (source.resources(), target.resources());
        self.best
            .into_iter()
            .map(|((s, t), r)| (src[s].id.clone(), tgt[t].id.clone(), r))
            .collect()
    }
}

/// `{(s, t, m(s, t)) : m(s, t) >= theta}` computed with filtering.
pub fn atomic_join(
    measure: Measure,
    source: &ResourceTable,
    target: &ResourceTable,
    source_property: &str,
    target_property: &str,
    theta: f64,
) -> Result<Mapping> {
    check_theta(theta)?;
    let s = flatten(source, source_property);
    let t = flatten(target, target_property);
    let best = match measure.tokenizer() {
        None => edit::join(&s, &t, theta),
        Some(tok) => prefix::join(measure, tok, &s, &t, theta),
    };
    Ok(best.into_mapping(source, target))
}

/// Same contract as [`atomic_join`], scoring all `|S| * |T|` pairs.
pub fn naive_join(
    measure: Measure,
    source: &ResourceTable,
    target: &ResourceTable,
    source_property: &str,
    target_property: &str,
    theta: f64,
) -> Result<Mapping> {
    check_theta(theta)?;
    Ok(cross_product(measure, source, target, source_property, target_property, theta))
}

/// Every pair scoring at least `theta`, with no lower bound on `theta`.
pub(crate) fn cross_product(
    measure: Measure,
    source: &ResourceTable,
    target: &ResourceTable,
    source_property: &str,
    target_property: &str,
    theta: f64,
) -> Mapping {
    enum Prepared {
        Chars(Vec<char>),
        Tokens(Vec<String>),
    }
    let prepare = |table: &ResourceTable, property: &str| -> Vec<Vec<Prepared>> {
        table
            .column(property)
            .into_iter()
            .map(|values| {
                values
                    .iter()
                    .map(|v| match measure.tokenizer() {
                        None => Prepared::Chars(v.chars().collect()),
                        Some(tok) => Prepared::Tokens(tok.tokens(v)),
                    })
                    .collect()
            })
            .collect()
    };
    let left = prepare(source, source_property);
    let right = prepare(target, target_property);
    let score = |a: &Prepared, b: &Prepared| match (a, b) {
        (Prepared::Chars(a), Prepared::Chars(b)) => {
            edit_score(levenshtein_distance(a, b), a.len(), b.len())
        }
        (Prepared::Tokens(a), Prepared::Tokens(b)) => {
            score_from_overlap(measure, sorted_overlap(a, b), a.len(), b.len())
        }
        _ => unreachable!(),
    };
    let mut out = Mapping::new();
    for (s, sv) in source.iter().zip(&left) {
        for (t, tv) in target.iter().zip(&right) {
            let r = sv
                .iter()
                .flat_map(|a| tv.iter().map(move |b| (a, b)))
                .map(|(a, b)| score(a, b))
                .fold(0.0, f64::max);
            if r >= theta {
                out.insert(s.id.clone(), t.id.clone(), r);
            }
        }
    }
    out
}

/// Mean wall-clock milliseconds of `repetitions` runs of [`atomic_join`].
pub fn measure_runtime(
    measure: Measure,
    source: &ResourceTable,
    target: &ResourceTable,
    source_property: &str,
    target_property: &str,
    theta: f64,
    repetitions: usize,
) -> Result<f64> {
    Ok(timed_join(measure, source, target, source_property, target_property, theta, repetitions)?.0)
}

/// Mean runtime plus the size of the (identical) result of every run.
pub(crate) fn timed_join(
    measure: Measure,
    source: &ResourceTable,
    target: &ResourceTable,
    source_property: &str,
    target_property: &str,
    theta: f64,
    repetitions: usize,
) -> Result<(f64, usize)> {
    if repetitions == 0 {
        return Err(Error::Protocol("repetitions must be at least 1".into()));
    }
    let mut total = 0.0;
    let mut size = 0;
    for _ in 0..repetitions {
        let start = Instant::now();
        let m = atomic_join(measure, source, target, source_property, target_property, theta)?;
        total += start.elapsed().as_secs_f64() * 1e3;
        size = m.len();
    }
    Ok((total / repetitions as f64, size))
}
