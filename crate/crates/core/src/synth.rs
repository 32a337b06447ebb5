//! Seeded synthetic resource tables.
//!
//! Products are built from a fixed pseudo-word vocabulary. Part of the
//! target table consists of noisy copies of source records (typos, dropped
//! and swapped words), so joins at thresholds between 0.5 and 1 return
//! non-trivial mappings.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kb::{Resource, ResourceTable};
use crate::rng;

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ne", "ru", "sa", "te", "vi", "zo", "pa", "qui", "dor", "ban", "tel", "mor", "fin", "gra",
    "hex", "jun", "wex", "cro", "pli", "stu", "yam",
];

fn vocabulary(size: usize, seed: u64) -> Vec<String> {
    let mut rng = rng::derive(seed, 0x766f_6361);
    let mut words = Vec::with_capacity(size);
    while words.len() < size {
        let n = rng.gen_range(1..=3);
        let w: String = (0..n).map(|_| *SYLLABLES.choose(&mut rng).unwrap()).collect();
        if !words.contains(&w) {
            words.push(w);
        }
    }
    words
}

fn phrase(rng: &mut rng::Rng, vocab: &[String], words: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.gen_range(words);
    (0..n)
        .map(|_| vocab.choose(rng).unwrap().as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Applies `edits` random character substitutions, deletions or insertions.
pub fn perturb_chars(rng: &mut rng::Rng, text: &str, edits: usize) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for _ in 0..edits {
        let letter = (b'a' + rng.gen_range(0..26u8)) as char;
        match (rng.gen_range(0..3), chars.is_empty()) {
            (_, true) => chars.push(letter),
            (0, false) => {
                let i = rng.gen_range(0..chars.len());
                chars[i] = letter;
            }
            (1, false) => {
                chars.remove(rng.gen_range(0..chars.len()));
            }
            _ => {
                let i = rng.gen_range(0..=chars.len());
                chars.insert(i, letter);
            }
        }
    }
    chars.into_iter().collect()
}

fn perturb_words(rng: &mut rng::Rng, text: &str, vocab: &[String]) -> String {
    let mut words: Vec<String> = text.split(' ').map(str::to_owned).collect();
    match rng.gen_range(0..4) {
        0 if words.len() > 1 => {
            words.remove(rng.gen_range(0..words.len()));
        }
        1 => words.push(vocab.choose(rng).unwrap().clone()),
        2 if words.len() > 1 => {
            let i = rng.gen_range(0..words.len() - 1);
            words.swap(i, i + 1);
        }
        _ => {}
    }
    words.join(" ")
}

/// Product-like tables: source resources carry `title` and `description`,
/// target resources carry `name` and `description`. About half of the
/// targets are noisy copies of source records.
pub fn product_tables(n_source: usize, n_target: usize, seed: u64) -> (ResourceTable, ResourceTable) {
    let vocab = vocabulary(400, seed);
    let mut rng = rng::derive(seed, 1);
    let mut source = ResourceTable::new();
    let mut originals = Vec::with_capacity(n_source);
    for i in 0..n_source {
        let title = phrase(&mut rng, &vocab, 2..=5);
        let description = phrase(&mut rng, &vocab, 5..=12);
        originals.push((title.clone(), description.clone()));
        source
            .push(
                Resource::new(format!("http://example.org/source/{i}"))
                    .with("title", title)
                    .with("description", description),
            )
            .expect("generated ids are unique");
    }
    let mut target = ResourceTable::new();
    for j in 0..n_target {
        let (name, description) = if !originals.is_empty() && rng.gen_bool(0.5) {
            let (t, d) = originals.choose(&mut rng).unwrap();
            let t = perturb_words(&mut rng, t, &vocab);
            let edits = rng.gen_range(0..=2);
            (perturb_chars(&mut rng, &t, edits), perturb_words(&mut rng, d, &vocab))
        } else {
            (phrase(&mut rng, &vocab, 2..=5), phrase(&mut rng, &vocab, 5..=12))
        };
        target
            .push(
                Resource::new(format!("http://example.org/target/{j}"))
                    .with("name", name)
                    .with("description", description),
            )
            .expect("generated ids are unique");
    }
    (source, target)
}

/// Short strings over a small alphabet under property `p`, with a share of
/// target values derived from source values by a few edits. Some resources
/// get two values, a few get none.
pub fn string_tables(n_source: usize, n_target: usize, seed: u64) -> (ResourceTable, ResourceTable) {
    let mut rng = rng::derive(seed, 2);
    let word = |rng: &mut rng::Rng| -> String {
        let len = rng.gen_range(1..=6);
        (0..len).map(|_| (b'a' + rng.gen_range(0..6u8)) as char).collect()
    };
    let value = |rng: &mut rng::Rng| -> String {
        let n = rng.gen_range(1..=4);
        (0..n).map(|_| word(rng)).collect::<Vec<_>>().join(" ")
    };
    let make = |prefix: &str, n: usize, pool: &[String], rng: &mut rng::Rng| {
        let mut table = ResourceTable::new();
        let mut produced = Vec::new();
        for i in 0..n {
            let mut r = Resource::new(format!("{prefix}{i}"));
            let count = match rng.gen_range(0..20) {
                0 => 0,
                1..=3 => 2,
                _ => 1,
            };
            for _ in 0..count {
                let v = if !pool.is_empty() && rng.gen_bool(0.5) {
                    let base = pool.choose(rng).unwrap();
                    let edits = rng.gen_range(0..=3);
                    perturb_chars(rng, base, edits)
                } else {
                    value(rng)
                };
                produced.push(v.clone());
                r = r.with("p", v);
            }
            table.push(r).expect("generated ids are unique");
        }
        (table, produced)
    };
    let (source, pool) = make("s", n_source, &[], &mut rng);
    let (target, _) = make("t", n_target, &pool, &mut rng);
    (source, target)
}
