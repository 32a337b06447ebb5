use std::collections::BTreeMap;
use std::fmt;

use crate::costmodel::RuntimeModel;
use crate::error::{Error, Result};
use crate::ls::{Atomic, Filter, LinkSpec, Operator};
use crate::measures::Measure;

use super::{Plan, PlanStep, SizeModel};

/// Runtime model per measure.
pub type Models = BTreeMap<Measure, RuntimeModel>;

/// How a conjunction is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Alternative {
    /// Run both children and merge.
    Canonical,
    /// Run the left child and check the atomic right child pair by pair.
    FilterRight,
    /// Run the right child and check the atomic left child pair by pair.
    FilterLeft,
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::Canonical => "canonical",
            Alternative::FilterRight => "filter-right",
            Alternative::FilterLeft => "filter-left",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// The conjunction, in canonical syntax.
    pub node: String,
    pub chosen: Alternative,
    /// Estimated cost of every alternative that was possible.
    pub costs: Vec<(Alternative, f64)>,
}

/// Prices plan steps for tables of fixed size.
#[derive(Debug, Clone, Copy)]
pub struct Estimator<'a> {
    pub models: &'a Models,
    pub sizes: &'a SizeModel,
    pub s_size: usize,
    pub t_size: usize,
}

impl<'a> Estimator<'a> {
    pub fn new(models: &'a Models, sizes: &'a SizeModel, s_size: usize, t_size: usize) -> Self {
        Estimator {
            models,
            sizes,
            s_size,
            t_size,
        }
    }

    fn cap(&self) -> f64 {
        self.s_size as f64 * self.t_size as f64
    }

    /// Predicted join runtime, floored at 0. A prediction that overflows
    /// costs infinity.
    pub fn run_cost(&self, atomic: &Atomic) -> Result<f64> {
        let model = self
            .models
            .get(&atomic.measure())
            .ok_or_else(|| Error::MissingModel(atomic.measure().to_string()))?;
        match model.predict(self.s_size, self.t_size, atomic.theta) {
            Ok(ms) => Ok(ms.max(0.0)),
            Err(Error::PredictionOverflow) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    pub fn run_size(&self, atomic: &Atomic) -> f64 {
        self.sizes
            .estimate(atomic.measure(), self.s_size, self.t_size, atomic.theta)
    }

    /// Cost and output size of a filter over `input` pairs.
    pub fn filter(&self, filter: &Filter, input: f64) -> (f64, f64) {
        match &filter.measure {
            None => (self.sizes.merge_cost_ms * input, input),
            Some(sim) => {
                let out = self
                    .sizes
                    .estimate(sim.measure, self.s_size, self.t_size, filter.tau);
                (self.sizes.pair_cost(sim.measure) * input, input.min(out))
            }
        }
    }

    /// Cost and output size of merging mappings of the given sizes.
    pub fn merge(&self, op: Operator, left: f64, right: f64) -> (f64, f64) {
        let size = match op {
            Operator::And => left.min(right),
            Operator::Or => (left + right).min(self.cap()),
            Operator::Minus => left,
        };
        (self.sizes.merge_cost_ms * (left + right), size)
    }

    /// Estimated cost of a linear plan.
    pub fn plan_cost(&self, plan: &Plan) -> Result<f64> {
        let mut sizes: Vec<f64> = Vec::with_capacity(plan.steps.len());
        let mut total = 0.0;
        for step in &plan.steps {
            let (cost, size) = match step {
                PlanStep::Run(a) => (self.run_cost(a)?, self.run_size(a)),
                PlanStep::Filter { filter, input, .. } => self.filter(filter, sizes[*input]),
                PlanStep::Merge { op, left, right } => self.merge(*op, sizes[*left], sizes[*right]),
            };
            total += cost;
            sizes.push(size);
        }
        Ok(total)
    }
}

enum Tree {
    Run(Atomic),
    Filter {
        filter: Filter,
        input: Box<Tree>,
        conjoin: bool,
    },
    Merge {
        op: Operator,
        left: Box<Tree>,
        right: Box<Tree>,
    },
}

struct Planned {
    tree: Tree,
    cost: f64,
    size: f64,
}

fn plan_node(spec: &LinkSpec, est: &Estimator<'_>, decisions: &mut Vec<Decision>) -> Result<Planned> {
    let c = match spec {
        LinkSpec::Atomic(a) => {
            return Ok(Planned {
                tree: Tree::Run(a.clone()),
                cost: est.run_cost(a)?,
                size: est.run_size(a),
            })
        }
        LinkSpec::Complex(c) => c,
    };
    let left = plan_node(&c.left, est, decisions)?;
    let right = plan_node(&c.right, est, decisions)?;
    let (merge_cost, merge_size) = est.merge(c.op, left.size, right.size);
    let canonical_cost = left.cost + right.cost + merge_cost;

    let mut best = (Alternative::Canonical, canonical_cost);
    let mut costs = vec![best];
    if c.op == Operator::And {
        // the omitted child must be atomic for the filter to reproduce it
        let options = [
            (Alternative::FilterRight, &left, &c.right),
            (Alternative::FilterLeft, &right, &c.left),
        ];
        for (alt, kept, other) in options {
            if let LinkSpec::Atomic(a) = other {
                let (cost, _) = est.filter(&Filter::by(a.similarity.clone(), a.theta), kept.size);
                let total = kept.cost + cost;
                costs.push((alt, total));
                if total < best.1 {
                    best = (alt, total);
                }
            }
        }
        decisions.push(Decision {
            node: spec.to_string(),
            chosen: best.0,
            costs,
        });
    }

    let conjoined = |kept: Planned, other: &LinkSpec| -> Planned {
        let LinkSpec::Atomic(a) = other else {
            unreachable!("only atomic children are filtered")
        };
        let filter = Filter::by(a.similarity.clone(), a.theta);
        let (cost, size) = est.filter(&filter, kept.size);
        Planned {
            size: size.min(est.run_size(a)),
            cost: kept.cost + cost,
            tree: Tree::Filter {
                filter,
                input: Box::new(kept.tree),
                conjoin: true,
            },
        }
    };
    let mut planned = match best.0 {
        Alternative::Canonical => Planned {
            tree: Tree::Merge {
                op: c.op,
                left: Box::new(left.tree),
                right: Box::new(right.tree),
            },
            cost: canonical_cost,
            size: merge_size,
        },
        Alternative::FilterRight => conjoined(left, &c.right),
        Alternative::FilterLeft => conjoined(right, &c.left),
    };
    if !c.filter.is_identity() {
        let (cost, size) = est.filter(&c.filter, planned.size);
        planned = Planned {
            tree: Tree::Filter {
                filter: c.filter.clone(),
                input: Box::new(planned.tree),
                conjoin: false,
            },
            cost: planned.cost + cost,
            size,
        };
    }
    Ok(planned)
}

fn linearize(tree: Tree, steps: &mut Vec<PlanStep>) -> usize {
    let step = match tree {
        Tree::Run(a) => PlanStep::Run(a),
        Tree::Filter { filter, input, conjoin } => PlanStep::Filter {
            filter,
            input: linearize(*input, steps),
            conjoin,
        },
        Tree::Merge { op, left, right } => {
            let left = linearize(*left, steps);
            let right = linearize(*right, steps);
            PlanStep::Merge { op, left, right }
        }
    };
    steps.push(step);
    steps.len() - 1
}

/// Cost-based plan. At every conjunction with an atomic child, running the
/// other child and filtering by the atomic child's measure replaces the
/// canonical run-and-merge when it is estimated to be strictly cheaper.
pub fn helios_plan(spec: &LinkSpec, models: &Models, sizes: &SizeModel, s_size: usize, t_size: usize) -> Result<Plan> {
    let est = Estimator::new(models, sizes, s_size, t_size);
    let mut decisions = Vec::new();
    let planned = plan_node(spec, &est, &mut decisions)?;
    let mut steps = Vec::new();
    linearize(planned.tree, &mut steps);
    Ok(Plan {
        steps,
        estimated_cost_ms: planned.cost,
        decisions,
    })
}
