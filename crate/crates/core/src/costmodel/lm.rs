//! Levenberg–Marquardt for small dense least-squares problems.
//!
//! The damping term is `λI`. Scaling it by `diag(JᵀJ)` instead stalls the
//! mixed model on plateaus where the exponential factor has underflowed.

use nalgebra::{DMatrix, DVector};

/// Damping schedule and stopping rules.
#[derive(Debug, Clone, Copy)]
pub struct LmSettings {
    pub initial_damping: f64,
    pub damping_cap: f64,
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the loss by less than this fraction.
    pub relative_decrease: f64,
    /// Stop once the gradient norm drops below this.
    pub gradient_norm: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        LmSettings {
            initial_damping: 1e-3,
            damping_cap: 1e12,
            max_iterations: 500,
            relative_decrease: 1e-10,
            gradient_norm: 1e-10,
        }
    }
}

/// Residuals and Jacobian for a parameter vector. `residuals` returns
/// `target - model`, `jacobian` the derivative of the model.
pub trait Problem {
    fn residuals(&self, params: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, params: &DVector<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: DVector<f64>,
    pub loss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Loss at the start and after every accepted step.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmError {
    NonFiniteStart,
}

fn finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

pub fn minimize(
    problem: &impl Problem,
    start: DVector<f64>,
    settings: &LmSettings,
) -> Result<LmOutcome, LmError> {
    let mut params = start;
    let mut residuals = problem.residuals(&params);
    if !finite(&residuals) || !problem.jacobian(&params).iter().all(|x| x.is_finite()) {
        return Err(LmError::NonFiniteStart);
    }
    let mut loss = residuals.norm_squared();
    let mut history = vec![loss];
    let mut damping = settings.initial_damping;
    let mut iterations = 0;
    let mut converged = false;

    'outer: while iterations < settings.max_iterations {
        let jac = problem.jacobian(&params);
        let gradient = jac.tr_mul(&residuals);
        if gradient.norm() < settings.gradient_norm {
            converged = true;
            break;
        }
        let normal = jac.tr_mul(&jac);
        loop {
            iterations += 1;
            let mut damped = normal.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += damping;
            }
            let step = damped.cholesky().map(|c| c.solve(&gradient));
            let trial = step.as_ref().map(|s| &params + s);
            let outcome = trial.as_ref().and_then(|p| {
                let r = problem.residuals(p);
                finite(&r).then(|| {
                    let l = r.norm_squared();
                    (r, l)
                })
            });
            match (trial, outcome) {
                (Some(p), Some((r, l))) if l < loss => {
                    let decrease = (loss - l) / loss;
                    params = p;
                    residuals = r;
                    loss = l;
                    history.push(loss);
                    damping = (damping / 10.0).max(f64::MIN_POSITIVE);
                    if decrease < settings.relative_decrease {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
                _ => {
                    damping *= 10.0;
                    if damping > settings.damping_cap {
                        break 'outer;
                    }
                }
            }
            if iterations >= settings.max_iterations {
                break 'outer;
            }
        }
    }

    Ok(LmOutcome {
        params,
        loss,
        iterations,
        converged,
        history,
    })
}
