use crate::kb::ResourceTable;
use crate::measures::{best_similarity, cross_product};

use super::{Filter, LinkSpec, Mapping};

/// Reference semantics: every atomic node scores the full cross product.
pub fn eval_semantics(spec: &LinkSpec, source: &ResourceTable, target: &ResourceTable) -> Mapping {
    match spec {
        LinkSpec::Atomic(a) => cross_product(
            a.measure(),
            source,
            target,
            &a.similarity.source_property,
            &a.similarity.target_property,
            a.theta,
        ),
        LinkSpec::Complex(c) => {
            let left = eval_semantics(&c.left, source, target);
            let right = eval_semantics(&c.right, source, target);
            filter_mapping(&c.op.apply(&left, &right), &c.filter, source, target)
        }
    }
}

/// Applies `(f, tau)` to a mapping.
pub fn filter_mapping(mapping: &Mapping, filter: &Filter, source: &ResourceTable, target: &ResourceTable) -> Mapping {
    match &filter.measure {
        None => mapping.threshold(filter.tau),
        Some(sim) => {
            let sp = source.resolve_property(&sim.source_property);
            let tp = target.resolve_property(&sim.target_property);
            mapping.retain(|s, t, _| {
                let sv = match (&sp, source.get(s)) {
                    (Some(p), Some(r)) => r.values(p),
                    _ => &[],
                };
                let tv = match (&tp, target.get(t)) {
                    (Some(p), Some(r)) => r.values(p),
                    _ => &[],
                };
                best_similarity(sim.measure, sv, tv) >= filter.tau
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Resource;
    use crate::ls::{Similarity, parse_ls};
    use crate::measures::Measure;

    fn tables() -> (ResourceTable, ResourceTable) {
        let s = ResourceTable::from_resources([
            Resource::new("s1").with("name", "alpha beta").with("code", "x1"),
            Resource::new("s2").with("name", "gamma delta"),
        ])
        .unwrap();
        let t = ResourceTable::from_resources([
            Resource::new("t1").with("name", "alpha beta").with("code", "x1"),
            Resource::new("t2").with("name", "gamma epsilon").with("code", "x1"),
        ])
        .unwrap();
        (s, t)
    }

    #[test]
    fn self_difference_is_empty() {
        let (s, t) = tables();
        let l = parse_ls("jaccard(x.name,y.name)|0.2").unwrap();
        let m = LinkSpec::minus(l.clone(), l, 0.0);
        assert!(eval_semantics(&m, &s, &t).is_empty());
    }

    #[test]
    fn atomic_keeps_scores() {
        let (s, t) = tables();
        let m = eval_semantics(&parse_ls("jaccard(x.name,y.name)|0.3").unwrap(), &s, &t);
        assert_eq!(m.get("s1", "t1"), Some(1.0));
        assert_eq!(m.get("s2", "t2"), Some(1.0 / 3.0));
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn missing_property_never_passes() {
        let (s, t) = tables();
        let m = eval_semantics(&parse_ls("jaccard(x.code,y.code)|0.1").unwrap(), &s, &t);
        assert_eq!(m.len(), 2);
        assert!(!m.contains("s2", "t1"));
        // with theta 0 every pair is kept, missing values scoring 0
        let m = eval_semantics(&parse_ls("jaccard(x.code,y.code)|0").unwrap(), &s, &t);
        assert_eq!(m.len(), 4);
        assert_eq!(m.get("s2", "t1"), Some(0.0));
    }

    #[test]
    fn measure_filter_keeps_scores() {
        let (s, t) = tables();
        let base = parse_ls("jaccard(x.name,y.name)|0.3").unwrap();
        let spec = LinkSpec::complex(
            crate::ls::Operator::Or,
            base.clone(),
            base,
            Filter::by(Similarity::new(Measure::Levenshtein, "code", "code"), 1.0),
        );
        let m = eval_semantics(&spec, &s, &t);
        assert_eq!(m.len(), 1);
        assert_eq!(m.get("s1", "t1"), Some(1.0));
    }
}
