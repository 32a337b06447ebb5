//! Execution plans for link specifications.
//!
//! A [`Plan`] is a list of steps in which every step only refers to earlier
//! ones and the last step yields the result. [`canonical_plan`] mirrors the
//! specification node by node in post-order. [`helios_plan`] may instead run
//! one child of a conjunction and check the other child's measure pair by
//! pair, whichever the runtime models estimate to be cheaper.

mod cost;
mod random;
mod size;

use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::kb::ResourceTable;
use crate::ls::{filter_mapping, Atomic, Filter, LinkSpec, Operator};
use crate::mapping::Mapping;
use crate::measures::{atomic_join, best_similarity, cross_product};

pub use cost::{helios_plan, Alternative, Decision, Estimator, Models};
pub use random::random_spec;
pub use size::{SizeModel, DEFAULT_MERGE_COST_MS, DEFAULT_PAIR_COST_MS};

#[derive(Debug, Clone, PartialEq)]
pub enum PlanStep {
    /// Executes an atomic specification with a join.
    Run(Atomic),
    /// Filters the mapping produced by step `input`. With `conjoin` set the
    /// filter stands in for the omitted child of a conjunction: a pair
    /// survives when the filter's measure reaches `tau`, and its score
    /// becomes the smaller of the two.
    Filter {
        filter: Filter,
        input: usize,
        conjoin: bool,
    },
    Merge {
        op: Operator,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    /// Estimated runtime in milliseconds; 0 for plans that were not costed.
    pub estimated_cost_ms: f64,
    /// Choices made at conjunctions by the cost-based planner.
    pub decisions: Vec<Decision>,
}

impl Plan {
    /// Checks that every reference points backwards and that every step but
    /// the last is consumed.
    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Plan("no steps".into()));
        }
        let mut consumed = vec![false; self.steps.len()];
        for (k, step) in self.steps.iter().enumerate() {
            let refs: &[usize] = match step {
                PlanStep::Run(_) => &[],
                PlanStep::Filter { input, .. } => std::slice::from_ref(input),
                PlanStep::Merge { left, right, .. } => &[*left, *right],
            };
            for &r in refs {
                if r >= k {
                    return Err(Error::Plan(format!("step {k} refers forward to {r}")));
                }
                consumed[r] = true;
            }
        }
        match consumed[..self.steps.len() - 1].iter().position(|c| !c) {
            Some(k) => Err(Error::Plan(format!("step {k} is never used"))),
            None => Ok(()),
        }
    }

    /// One-line summary of the step kinds, e.g. `RUN RUN MERGE FILTER`.
    pub fn shape(&self) -> String {
        self.steps
            .iter()
            .map(|s| match s {
                PlanStep::Run(_) => "RUN",
                PlanStep::Filter { .. } => "FILTER",
                PlanStep::Merge { .. } => "MERGE",
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Numbered steps, one per line, counting from 1.
impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, step) in self.steps.iter().enumerate() {
            write!(f, "{}: ", k + 1)?;
            match step {
                PlanStep::Run(a) => {
                    let s = &a.similarity;
                    writeln!(f, "RUN {}({},{})|{}", s.measure, s.source_property, s.target_property, a.theta)?
                }
                PlanStep::Filter { filter, input, .. } => {
                    match &filter.measure {
                        None => write!(f, "FILTER (ε, {})", filter.tau)?,
                        Some(s) => write!(
                            f,
                            "FILTER ({}({},{}), {})",
                            s.measure, s.source_property, s.target_property, filter.tau
                        )?,
                    }
                    writeln!(f, " <- {}", input + 1)?
                }
                PlanStep::Merge { op, left, right } => writeln!(f, "MERGE {op} <- {}, {}", left + 1, right + 1)?,
            }
        }
        Ok(())
    }
}

/// Post-order traversal: a run per leaf, a merge per operator and a filter
/// per filter that is not the identity.
pub fn canonical_plan(spec: &LinkSpec) -> Plan {
    fn walk(spec: &LinkSpec, steps: &mut Vec<PlanStep>) -> usize {
        match spec {
            LinkSpec::Atomic(a) => {
                steps.push(PlanStep::Run(a.clone()));
            }
            LinkSpec::Complex(c) => {
                let left = walk(&c.left, steps);
                let right = walk(&c.right, steps);
                steps.push(PlanStep::Merge { op: c.op, left, right });
                if !c.filter.is_identity() {
                    let input = steps.len() - 1;
                    steps.push(PlanStep::Filter {
                        filter: c.filter.clone(),
                        input,
                        conjoin: false,
                    });
                }
            }
        }
        steps.len() - 1
    }
    let mut steps = Vec::new();
    walk(spec, &mut steps);
    Plan {
        steps,
        estimated_cost_ms: 0.0,
        decisions: Vec::new(),
    }
}

fn run_atomic(a: &Atomic, source: &ResourceTable, target: &ResourceTable) -> Result<Mapping> {
    let s = &a.similarity;
    if a.theta > 0.0 {
        atomic_join(s.measure, source, target, &s.source_property, &s.target_property, a.theta)
    } else {
        // a zero threshold admits every pair
        Ok(cross_product(s.measure, source, target, &s.source_property, &s.target_property, 0.0))
    }
}

fn conjoin(mapping: &Mapping, filter: &Filter, source: &ResourceTable, target: &ResourceTable) -> Mapping {
    let Some(sim) = &filter.measure else {
        return mapping.threshold(filter.tau);
    };
    let sp = source.resolve_property(&sim.source_property);
    let tp = target.resolve_property(&sim.target_property);
    let mut out = Mapping::new();
    for (s, t, r) in mapping.iter() {
        let sv = match (&sp, source.get(s)) {
            (Some(p), Some(res)) => res.values(p),
            _ => &[],
        };
        let tv = match (&tp, target.get(t)) {
            (Some(p), Some(res)) => res.values(p),
            _ => &[],
        };
        let score = best_similarity(sim.measure, sv, tv);
        if score >= filter.tau {
            out.insert(s, t, r.min(score));
        }
    }
    out
}

/// Runs the steps in order. Returns the mapping of the last step and the
/// wall-clock milliseconds spent in each step.
pub fn execute_plan(plan: &Plan, source: &ResourceTable, target: &ResourceTable) -> Result<(Mapping, Vec<f64>)> {
    plan.validate()?;
    let mut results: Vec<Mapping> = Vec::with_capacity(plan.steps.len());
    let mut timings = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        let start = Instant::now();
        let m = match step {
            PlanStep::Run(a) => run_atomic(a, source, target)?,
            PlanStep::Filter {
                filter,
                input,
                conjoin: false,
            } => filter_mapping(&results[*input], filter, source, target),
            PlanStep::Filter {
                filter,
                input,
                conjoin: true,
            } => conjoin(&results[*input], filter, source, target),
            PlanStep::Merge { op, left, right } => op.apply(&results[*left], &results[*right]),
        };
        timings.push(start.elapsed().as_secs_f64() * 1e3);
        results.push(m);
    }
    Ok((results.pop().expect("validated plans are non-empty"), timings))
}
