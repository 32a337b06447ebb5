//! Runtime approximation models for atomic specifications.
//!
//! Three families map `(|S|, |T|, θ)` to milliseconds:
//!
//! | family   | form                                                    |
//! |----------|---------------------------------------------------------|
//! | `linear` | `a + b|S| + c|T| + dθ`                                  |
//! | `exp`    | `exp(a + b|S| + c|T| + dθ + eθ²)`                       |
//! | `mixed`  | `a + (b + c|S| + d|T| + e|S||T|) · exp(fθ + gθ²)`       |
//!
//! `linear` and `exp` (in log space) are linear in their coefficients and are
//! fitted as minimum-norm least-squares solutions. `mixed` is fitted with
//! Levenberg–Marquardt from an all-ones start, on sizes divided by the
//! largest training size; the model keeps those scale factors and applies
//! them again when predicting.

mod file;
pub mod lm;
mod lstsq;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use lstsq::{min_norm_solve, RANK_TOLERANCE};

/// One measured runtime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingSample {
    pub s_size: usize,
    pub t_size: usize,
    pub theta: f64,
    pub runtime_ms: f64,
}

impl TrainingSample {
    pub fn new(s_size: usize, t_size: usize, theta: f64, runtime_ms: f64) -> Self {
        TrainingSample {
            s_size,
            t_size,
            theta,
            runtime_ms,
        }
    }

    fn check(&self) -> Result<()> {
        if !self.theta.is_finite() || !self.runtime_ms.is_finite() {
            return Err(Error::NonFinite("training sample"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Linear,
    Exp,
    Mixed,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Linear, Family::Exp, Family::Mixed];

    pub fn coefficient_count(self) -> usize {
        match self {
            Family::Linear => 4,
            Family::Exp => 5,
            Family::Mixed => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Exp => "exp",
            Family::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Family::Linear),
            "exp" => Ok(Family::Exp),
            "mixed" => Ok(Family::Mixed),
            other => Err(Error::Model(format!("unknown family `{other}`"))),
        }
    }
}

/// A fitted model: family, coefficients, and the divisors applied to `|S|`
/// and `|T|` before evaluation (1 unless fitted on scaled inputs).
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeModel {
    family: Family,
    coefficients: Vec<f64>,
    scale_s: f64,
    scale_t: f64,
    pub trained_on: String,
}

impl RuntimeModel {
    pub fn new(family: Family, coefficients: Vec<f64>) -> Result<Self> {
        Self::scaled(family, coefficients, 1.0, 1.0)
    }

    pub fn scaled(family: Family, coefficients: Vec<f64>, scale_s: f64, scale_t: f64) -> Result<Self> {
        if coefficients.len() != family.coefficient_count() {
            return Err(Error::Model(format!(
                "{family} takes {} coefficients, got {}",
                family.coefficient_count(),
                coefficients.len()
            )));
        }
        if !coefficients.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("model coefficients"));
        }
        if !(scale_s.is_finite() && scale_s > 0.0 && scale_t.is_finite() && scale_t > 0.0) {
            return Err(Error::Model("scale factors must be positive".into()));
        }
        Ok(RuntimeModel {
            family,
            coefficients,
            scale_s,
            scale_t,
            trained_on: String::new(),
        })
    }

    pub fn with_metadata(mut self, trained_on: impl Into<String>) -> Self {
        self.trained_on = trained_on.into();
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn scales(&self) -> (f64, f64) {
        (self.scale_s, self.scale_t)
    }

    /// Predicted runtime in milliseconds. Linear and mixed predictions may
    /// be negative.
    pub fn predict(&self, s_size: usize, t_size: usize, theta: f64) -> Result<f64> {
        let s = s_size as f64 / self.scale_s;
        let t = t_size as f64 / self.scale_t;
        let c = &self.coefficients;
        let value = match self.family {
            Family::Linear => linear_row(s, t, theta).iter().zip(c).map(|(x, k)| x * k).sum(),
            Family::Exp => exp_row(s, t, theta)
                .iter()
                .zip(c)
                .map(|(x, k)| x * k)
                .sum::<f64>()
                .exp(),
            Family::Mixed => mixed_value(c, s, t, theta),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::PredictionOverflow)
        }
    }
}

pub fn predict(model: &RuntimeModel, s_size: usize, t_size: usize, theta: f64) -> Result<f64> {
    model.predict(s_size, t_size, theta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// Final squared-error loss; in log space for `exp`.
    pub loss: f64,
    /// Levenberg–Marquardt iterations, 0 for closed-form fits.
    pub iterations: usize,
    pub converged: bool,
    /// Loss after each accepted step, starting from the initial guess.
    /// Empty for closed-form fits.
    pub history: Vec<f64>,
}

fn linear_row(s: f64, t: f64, theta: f64) -> [f64; 4] {
    [1.0, s, t, theta]
}

fn exp_row(s: f64, t: f64, theta: f64) -> [f64; 5] {
    [1.0, s, t, theta, theta * theta]
}

/// `a + (b + c s + d t + e s t) · exp(f θ + g θ²)` on already scaled sizes.
pub fn mixed_value(c: &[f64], s: f64, t: f64, theta: f64) -> f64 {
    let poly = c[1] + c[2] * s + c[3] * t + c[4] * s * t;
    c[0] + poly * (c[5] * theta + c[6] * theta * theta).exp()
}

/// Partial derivatives of [`mixed_value`] with respect to `a..g`.
pub fn mixed_gradient(c: &[f64], s: f64, t: f64, theta: f64) -> [f64; 7] {
    let e = (c[5] * theta + c[6] * theta * theta).exp();
    let poly = c[1] + c[2] * s + c[3] * t + c[4] * s * t;
    [1.0, e, s * e, t * e, s * t * e, poly * theta * e, poly * theta * theta * e]
}

fn check_samples(samples: &[TrainingSample]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Empty("training samples"));
    }
    samples.iter().try_for_each(TrainingSample::check)
}

fn closed_form<const N: usize>(
    samples: &[TrainingSample],
    row: impl Fn(&TrainingSample) -> [f64; N],
    target: impl Fn(&TrainingSample) -> f64,
) -> (Vec<f64>, f64) {
    let a = DMatrix::from_fn(samples.len(), N, |i, j| row(&samples[i])[j]);
    let b = DVector::from_iterator(samples.len(), samples.iter().map(&target));
    let x = min_norm_solve(&a, &b);
    let loss = (&b - &a * &x).norm_squared();
    (x.iter().copied().collect(), loss)
}

fn closed_report(loss: f64) -> FitReport {
    FitReport {
        loss,
        iterations: 0,
        converged: true,
        history: Vec::new(),
    }
}

/// Minimum-norm least squares on rows `[1, |S|, |T|, θ]`.
pub fn fit_linear(samples: &[TrainingSample]) -> Result<(RuntimeModel, FitReport)> {
    check_samples(samples)?;
    let (coeffs, loss) = closed_form(
        samples,
        |x| linear_row(x.s_size as f64, x.t_size as f64, x.theta),
        |x| x.runtime_ms,
    );
    Ok((RuntimeModel::new(Family::Linear, coeffs)?, closed_report(loss)))
}

/// Minimum-norm least squares on rows `[1, |S|, |T|, θ, θ²]` against
/// `ln(max(R, 1))`.
pub fn fit_exp(samples: &[TrainingSample]) -> Result<(RuntimeModel, FitReport)> {
    check_samples(samples)?;
    let (coeffs, loss) = closed_form(
        samples,
        |x| exp_row(x.s_size as f64, x.t_size as f64, x.theta),
        |x| x.runtime_ms.max(1.0).ln(),
    );
    Ok((RuntimeModel::new(Family::Exp, coeffs)?, closed_report(loss)))
}

struct MixedProblem {
    inputs: Vec<(f64, f64, f64)>,
    runtimes: DVector<f64>,
}

impl lm::Problem for MixedProblem {
    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        let c = p.as_slice();
        DVector::from_iterator(
            self.inputs.len(),
            self.inputs
                .iter()
                .zip(self.runtimes.iter())
                .map(|(&(s, t, th), r)| r - mixed_value(c, s, t, th)),
        )
    }

    fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let c = p.as_slice();
        let mut j = DMatrix::zeros(self.inputs.len(), 7);
        for (i, &(s, t, th)) in self.inputs.iter().enumerate() {
            for (k, d) in mixed_gradient(c, s, t, th).into_iter().enumerate() {
                j[(i, k)] = d;
            }
        }
        j
    }
}

/// Levenberg–Marquardt from all-ones coefficients with default settings.
pub fn fit_mixed(samples: &[TrainingSample]) -> Result<(RuntimeModel, FitReport)> {
    fit_mixed_with(samples, &lm::LmSettings::default())
}

pub fn fit_mixed_with(samples: &[TrainingSample], settings: &lm::LmSettings) -> Result<(RuntimeModel, FitReport)> {
    check_samples(samples)?;
    let scale_s = samples.iter().map(|x| x.s_size).max().unwrap_or(1).max(1) as f64;
    let scale_t = samples.iter().map(|x| x.t_size).max().unwrap_or(1).max(1) as f64;
    let problem = MixedProblem {
        inputs: samples
            .iter()
            .map(|x| (x.s_size as f64 / scale_s, x.t_size as f64 / scale_t, x.theta))
            .collect(),
        runtimes: DVector::from_iterator(samples.len(), samples.iter().map(|x| x.runtime_ms)),
    };
    let out = lm::minimize(&problem, DVector::from_element(7, 1.0), settings)
        .map_err(|_| Error::NonFinite("mixed-model residuals at the initial guess"))?;
    let model = RuntimeModel::scaled(Family::Mixed, out.params.iter().copied().collect(), scale_s, scale_t)?;
    Ok((
        model,
        FitReport {
            loss: out.loss,
            iterations: out.iterations,
            converged: out.converged,
            history: out.history,
        },
    ))
}

pub fn fit(family: Family, samples: &[TrainingSample]) -> Result<(RuntimeModel, FitReport)> {
    match family {
        Family::Linear => fit_linear(samples),
        Family::Exp => fit_exp(samples),
        Family::Mixed => fit_mixed(samples),
    }
}

/// Squared-error loss of `model` on `samples`, in the space it was fitted in.
pub fn training_loss(model: &RuntimeModel, samples: &[TrainingSample]) -> Result<f64> {
    samples.iter().try_fold(0.0, |acc, x| {
        let p = model.predict(x.s_size, x.t_size, x.theta)?;
        let d = match model.family() {
            Family::Exp => x.runtime_ms.max(1.0).ln() - p.ln(),
            _ => x.runtime_ms - p,
        };
        Ok(acc + d * d)
    })
}

/// Root mean square error between two equally long series.
pub fn rmse(expected: &[f64], actual: &[f64]) -> Result<f64> {
    if expected.len() != actual.len() {
        return Err(Error::LengthMismatch(expected.len(), actual.len()));
    }
    if expected.is_empty() {
        return Err(Error::Empty("rmse input"));
    }
    let sum: f64 = expected.iter().zip(actual).map(|(e, a)| (e - a) * (e - a)).sum();
    Ok((sum / expected.len() as f64).sqrt())
}
