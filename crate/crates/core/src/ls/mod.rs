//! Link specifications.
//!
//! A specification is either an atomic measure with a threshold or a binary
//! operator over two specifications followed by a filter. The textual form
//! is
//!
//! ```text
//! ls       := atomic | complex
//! atomic   := name '(' 'x.' prop ',' 'y.' prop ')' '|' score
//! complex  := OP '(' ls ',' ls ')' '|' filter
//! filter   := score | name '(' 'x.' prop ',' 'y.' prop ')' '@' score
//! OP       := 'AND' | 'OR' | 'MINUS'
//! toplevel := ls ['>=' score]
//! ```
//!
//! The trailing `>=` raises the root threshold; the root `|score` of a
//! complex specification may be omitted when it is present. Whitespace is
//! ignored.

mod parse;
mod semantics;

use std::fmt;

use crate::measures::Measure;

pub use crate::mapping::Mapping;
pub use parse::parse_ls;
pub use semantics::{eval_semantics, filter_mapping};

/// A measure applied to one source and one target property.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Similarity {
    pub measure: Measure,
    pub source_property: String,
    pub target_property: String,
}

impl Similarity {
    pub fn new(measure: Measure, source_property: impl Into<String>, target_property: impl Into<String>) -> Self {
        Similarity {
            measure,
            source_property: source_property.into(),
            target_property: target_property.into(),
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(x.{},y.{})", self.measure, self.source_property, self.target_property)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atomic {
    pub similarity: Similarity,
    pub theta: f64,
}

impl Atomic {
    pub fn new(measure: Measure, source_property: &str, target_property: &str, theta: f64) -> Self {
        Atomic {
            similarity: Similarity::new(measure, source_property, target_property),
            theta,
        }
    }

    pub fn measure(&self) -> Measure {
        self.similarity.measure
    }
}

impl fmt::Display for Atomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.similarity, self.theta)
    }
}

/// `(f, tau)`: with `f` empty keeps pairs scoring at least `tau`, otherwise
/// keeps pairs whose `f` similarity reaches `tau` without changing scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    pub measure: Option<Similarity>,
    pub tau: f64,
}

impl Filter {
    pub fn score(tau: f64) -> Self {
        Filter { measure: None, tau }
    }

    pub fn by(similarity: Similarity, tau: f64) -> Self {
        Filter {
            measure: Some(similarity),
            tau,
        }
    }

    /// `(ε, 0)` keeps every pair, since scores never drop below 0.
    pub fn is_identity(&self) -> bool {
        self.measure.is_none() && self.tau <= 0.0
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.measure {
            None => write!(f, "{}", self.tau),
            Some(sim) => write!(f, "{sim}@{}", self.tau),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    And,
    Or,
    Minus,
}

impl Operator {
    pub const ALL: [Operator; 3] = [Operator::And, Operator::Or, Operator::Minus];

    pub fn apply(self, left: &Mapping, right: &Mapping) -> Mapping {
        match self {
            Operator::And => left.and(right),
            Operator::Or => left.or(right),
            Operator::Minus => left.minus(right),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::And => "AND",
            Operator::Or => "OR",
            Operator::Minus => "MINUS",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub op: Operator,
    pub left: LinkSpec,
    pub right: LinkSpec,
    pub filter: Filter,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinkSpec {
    Atomic(Atomic),
    Complex(Box<Complex>),
}

impl LinkSpec {
    pub fn atomic(measure: Measure, source_property: &str, target_property: &str, theta: f64) -> Self {
        LinkSpec::Atomic(Atomic::new(measure, source_property, target_property, theta))
    }

    pub fn complex(op: Operator, left: LinkSpec, right: LinkSpec, filter: Filter) -> Self {
        LinkSpec::Complex(Box::new(Complex {
            op,
            left,
            right,
            filter,
        }))
    }

    pub fn and(left: LinkSpec, right: LinkSpec, tau: f64) -> Self {
        Self::complex(Operator::And, left, right, Filter::score(tau))
    }

    pub fn or(left: LinkSpec, right: LinkSpec, tau: f64) -> Self {
        Self::complex(Operator::Or, left, right, Filter::score(tau))
    }

    pub fn minus(left: LinkSpec, right: LinkSpec, tau: f64) -> Self {
        Self::complex(Operator::Minus, left, right, Filter::score(tau))
    }

    /// Atomic nodes in post-order.
    pub fn leaves(&self) -> Vec<&Atomic> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Atomic>) {
        match self {
            LinkSpec::Atomic(a) => out.push(a),
            LinkSpec::Complex(c) => {
                c.left.collect_leaves(out);
                c.right.collect_leaves(out);
            }
        }
    }

    /// Operator depth: 0 for an atomic specification.
    pub fn depth(&self) -> usize {
        match self {
            LinkSpec::Atomic(_) => 0,
            LinkSpec::Complex(c) => 1 + c.left.depth().max(c.right.depth()),
        }
    }

    /// Every threshold lies in `[0, 1]`.
    pub fn is_valid(&self) -> bool {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        match self {
            LinkSpec::Atomic(a) => ok(a.theta),
            LinkSpec::Complex(c) => ok(c.filter.tau) && c.left.is_valid() && c.right.is_valid(),
        }
    }
}

/// Canonical text form; [`parse_ls`] reads it back unchanged.
impl fmt::Display for LinkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkSpec::Atomic(a) => a.fmt(f),
            LinkSpec::Complex(c) => write!(f, "{}({},{})|{}", c.op, c.left, c.right, c.filter),
        }
    }
}

/// The `leaves` of a specification, cloned.
pub fn leaves(spec: &LinkSpec) -> Vec<Atomic> {
    spec.leaves().into_iter().cloned().collect()
}
