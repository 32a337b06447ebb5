use std::collections::btree_map::{self, BTreeMap};

/// A scored link set: at most one score in `[0, 1]` per (source, target).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mapping {
    entries: BTreeMap<(String, String), f64>,
}

impl Mapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or overwrites the score of a pair.
    pub fn insert(&mut self, source: impl Into<String>, target: impl Into<String>, score: f64) {
        debug_assert!((0.0..=1.0).contains(&score), "score {score} out of range");
        self.entries.insert((source.into(), target.into()), score);
    }

    pub fn get(&self, source: &str, target: &str) -> Option<f64> {
        // BTreeMap lookups need an owned key for tuple-of-String keys.
        self.entries
            .get(&(source.to_owned(), target.to_owned()))
            .copied()
    }

    pub fn contains(&self, source: &str, target: &str) -> bool {
        self.get(source, target).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.entries
            .iter()
            .map(|((s, t), &r)| (s.as_str(), t.as_str(), r))
    }

    /// Pairs present in both; score `min(r1, r2)`.
    pub fn and(&self, other: &Mapping) -> Mapping {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let entries = small
            .entries
            .iter()
            .filter_map(|(k, &r1)| large.entries.get(k).map(|&r2| (k.clone(), r1.min(r2))))
            .collect();
        Mapping { entries }
    }

    /// Pairs present in either; `max(r1, r2)` where both.
    pub fn or(&self, other: &Mapping) -> Mapping {
        let mut entries = self.entries.clone();
        for (k, &r2) in &other.entries {
            entries
                .entry(k.clone())
                .and_modify(|r1| *r1 = r1.max(r2))
                .or_insert(r2);
        }
        Mapping { entries }
    }

    /// Pairs of `self` absent from `other`, keeping the left score.
    pub fn minus(&self, other: &Mapping) -> Mapping {
        let entries = self
            .entries
            .iter()
            .filter(|(k, _)| !other.entries.contains_key(*k))
            .map(|(k, &r)| (k.clone(), r))
            .collect();
        Mapping { entries }
    }

    /// Keeps pairs whose score reaches `tau`.
    pub fn threshold(&self, tau: f64) -> Mapping {
        self.retain(|_, _, r| r >= tau)
    }

    pub fn retain(&self, mut keep: impl FnMut(&str, &str, f64) -> bool) -> Mapping {
        let entries = self
            .entries
            .iter()
            .filter(|((s, t), &r)| keep(s, t, r))
            .map(|(k, &r)| (k.clone(), r))
            .collect();
        Mapping { entries }
    }

    /// Swaps the roles of source and target.
    pub fn transpose(&self) -> Mapping {
        let entries = self
            .entries
            .iter()
            .map(|((s, t), &r)| ((t.clone(), s.clone()), r))
            .collect();
        Mapping { entries }
    }

    /// Same pair set, scores within `tol`.
    pub fn approx_eq(&self, other: &Mapping, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|((k1, r1), (k2, r2))| k1 == k2 && (r1 - r2).abs() <= tol)
    }

    /// Describes the first disagreement with `other`, if any.
    pub fn diff(&self, other: &Mapping, tol: f64) -> Option<String> {
        for ((s, t), r) in &self.entries {
            match other.entries.get(&(s.clone(), t.clone())) {
                None => return Some(format!("({s}, {t}, {r}) only on the left")),
                Some(r2) if (r - r2).abs() > tol => {
                    return Some(format!("({s}, {t}) scored {r} vs {r2}"))
                }
                _ => {}
            }
        }
        other
            .entries
            .iter()
            .find(|(k, _)| !self.entries.contains_key(*k))
            .map(|((s, t), r)| format!("({s}, {t}, {r}) only on the right"))
    }
}

impl FromIterator<(String, String, f64)> for Mapping {
    fn from_iter<I: IntoIterator<Item = (String, String, f64)>>(iter: I) -> Self {
        let mut m = Mapping::new();
        for (s, t, r) in iter {
            m.insert(s, t, r);
        }
        m
    }
}

impl<'a> IntoIterator for &'a Mapping {
    type Item = (&'a (String, String), &'a f64);
    type IntoIter = btree_map::Iter<'a, (String, String), f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(r: f64) -> Mapping {
        [("s".to_owned(), "t".to_owned(), r)].into_iter().collect()
    }

    #[test]
    fn or_takes_max() {
        assert_eq!(one(0.6).or(&one(0.9)).get("s", "t"), Some(0.9));
    }

    #[test]
    fn and_takes_min() {
        assert_eq!(one(0.6).and(&one(0.9)).get("s", "t"), Some(0.6));
    }

    #[test]
    fn minus_self_is_empty() {
        assert!(one(0.6).minus(&one(0.2)).is_empty());
    }

    #[test]
    fn diff_reports_disagreement() {
        assert!(one(0.5).diff(&one(0.5), 0.0).is_none());
        assert!(one(0.5).diff(&one(0.6), 1e-12).is_some());
        assert!(one(0.5).diff(&Mapping::new(), 0.0).is_some());
        assert!(Mapping::new().diff(&one(0.5), 0.0).is_some());
    }
}
