//! Sampling-based training and train/test evaluation.
//!
//! Training draws `n_source` source samples and `n_target` target samples of
//! random sizes, then times the atomic join of every source sample against
//! every target sample at its own random threshold. Each timed triple is
//! preceded by one untimed warm-up run. All random parameters are drawn
//! before any timing starts, so they depend on the seed alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use rand::Rng;

use crate::costmodel::{self, Family, FitReport, RuntimeModel, TrainingSample};
use crate::error::{Error, Result};
use crate::kb::{sample_table, ResourceTable};
use crate::ls::{Atomic, Similarity};
use crate::measures::{atomic_join, timed_join};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingProtocol {
    pub n_source_samples: usize,
    pub n_target_samples: usize,
    pub repetitions: usize,
    pub theta_low: f64,
    pub theta_high: f64,
    pub size_low: usize,
    pub size_high: usize,
    pub seed: u64,
}

impl Default for TrainingProtocol {
    fn default() -> Self {
        TrainingProtocol {
            n_source_samples: 15,
            n_target_samples: 15,
            repetitions: 3,
            theta_low: 0.5,
            theta_high: 1.0,
            size_low: 10,
            size_high: 100_000,
            seed: rng::DEFAULT_SEED,
        }
    }
}

impl TrainingProtocol {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Protocol(m.to_owned()));
        if !(self.theta_low > 0.0 && self.theta_low <= self.theta_high && self.theta_high <= 1.0) {
            return bad("thresholds must satisfy 0 < low <= high <= 1");
        }
        if self.size_low == 0 || self.size_low > self.size_high {
            return bad("sizes must satisfy 1 <= low <= high");
        }
        if self.n_source_samples == 0 || self.n_target_samples == 0 || self.repetitions == 0 {
            return bad("sample counts and repetitions must be at least 1");
        }
        Ok(())
    }

    fn draw_theta(&self, rng: &mut rng::Rng) -> f64 {
        if self.theta_low == self.theta_high {
            self.theta_low
        } else {
            rng.gen_range(self.theta_low..=self.theta_high)
        }
    }
}

/// Seed-determined parameters of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    /// (size, sampling seed) per source sample.
    pub source: Vec<(usize, u64)>,
    pub target: Vec<(usize, u64)>,
    /// Threshold per (source sample, target sample), row-major.
    pub thetas: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SamplePlan {
    pub fn new(protocol: &TrainingProtocol, source_len: usize, target_len: usize) -> Result<Self> {
        protocol.validate()?;
        if source_len == 0 || target_len == 0 {
            return Err(Error::Empty("training tables"));
        }
        let mut warnings = Vec::new();
        let mut rng = rng::from_seed(protocol.seed);
        let mut sizes = |name: &str, len: usize, count: usize, rng: &mut rng::Rng| {
            let hi = protocol.size_high.min(len);
            let lo = protocol.size_low.min(hi);
            if hi < protocol.size_high {
                warnings.push(format!(
                    "{name} table has {len} resources; sample sizes clipped to [{lo}, {hi}]"
                ));
            }
            (0..count)
                .map(|_| (rng.gen_range(lo..=hi), rng.gen::<u64>()))
                .collect::<Vec<_>>()
        };
        let source = sizes("source", source_len, protocol.n_source_samples, &mut rng);
        let target = sizes("target", target_len, protocol.n_target_samples, &mut rng);
        let thetas = (0..source.len() * target.len())
            .map(|_| protocol.draw_theta(&mut rng))
            .collect();
        Ok(SamplePlan {
            source,
            target,
            thetas,
            warnings,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectedSamples {
    pub samples: Vec<TrainingSample>,
    /// Result size of the join behind each sample.
    pub result_sizes: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Runs the sampling protocol for one similarity.
pub fn collect_samples(
    similarity: &Similarity,
    source: &ResourceTable,
    target: &ResourceTable,
    protocol: &TrainingProtocol,
) -> Result<CollectedSamples> {
    let plan = SamplePlan::new(protocol, source.len(), target.len())?;
    let sources = plan
        .source
        .iter()
        .map(|&(size, seed)| sample_table(source, size, seed))
        .collect::<Result<Vec<_>>>()?;
    let targets = plan
        .target
        .iter()
        .map(|&(size, seed)| sample_table(target, size, seed))
        .collect::<Result<Vec<_>>>()?;

    let mut samples = Vec::with_capacity(plan.thetas.len());
    let mut result_sizes = Vec::with_capacity(plan.thetas.len());
    let mut thetas = plan.thetas.iter();
    for s in &sources {
        for t in &targets {
            let theta = *thetas.next().expect("one threshold per pair");
            let (ms, size) = timed_with_warmup(similarity, s, t, theta, protocol.repetitions)?;
            samples.push(TrainingSample::new(s.len(), t.len(), theta, ms));
            result_sizes.push(size);
        }
    }
    Ok(CollectedSamples {
        samples,
        result_sizes,
        warnings: plan.warnings,
    })
}

fn timed_with_warmup(
    sim: &Similarity,
    source: &ResourceTable,
    target: &ResourceTable,
    theta: f64,
    repetitions: usize,
) -> Result<(f64, usize)> {
    let (sp, tp) = (&sim.source_property, &sim.target_property);
    atomic_join(sim.measure, source, target, sp, tp, theta)?;
    timed_join(sim.measure, source, target, sp, tp, theta, repetitions)
}

pub type TrainedModels = BTreeMap<Family, (RuntimeModel, FitReport)>;

/// Fits every family on the same samples.
pub fn train_all(samples: &[TrainingSample]) -> Result<TrainedModels> {
    Family::ALL
        .into_iter()
        .map(|f| costmodel::fit(f, samples).map(|fitted| (f, fitted)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub spec_text: String,
    pub expected_ms: f64,
    pub executed_ms: f64,
    pub model_family: Family,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub records: Vec<EvaluationRecord>,
    pub rmse: BTreeMap<Family, f64>,
}

impl Evaluation {
    fn column(&self, family: Family, pick: impl Fn(&EvaluationRecord) -> f64) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.model_family == family)
            .map(pick)
            .collect()
    }

    /// Markdown table of mean expected runtime, mean execution time and
    /// RMSE per family, in milliseconds.
    pub fn markdown(&self, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| {title} | expected | execution | RMSE |");
        let _ = writeln!(out, "|---|---:|---:|---:|");
        for (family, rmse) in &self.rmse {
            let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len().max(1) as f64;
            let expected = mean(self.column(*family, |r| r.expected_ms));
            let executed = mean(self.column(*family, |r| r.executed_ms));
            let _ = writeln!(out, "| {family} | {expected:.2} | {executed:.2} | {rmse:.2} |");
        }
        out
    }
}

/// Times `n_runs` joins of the full tables at fresh random thresholds and
/// records what each model expected.
pub fn evaluate_models(
    models: &BTreeMap<Family, RuntimeModel>,
    similarity: &Similarity,
    source: &ResourceTable,
    target: &ResourceTable,
    n_runs: usize,
    protocol: &TrainingProtocol,
) -> Result<Evaluation> {
    protocol.validate()?;
    if n_runs == 0 {
        return Err(Error::Protocol("at least one evaluation run is needed".into()));
    }
    if models.is_empty() {
        return Err(Error::MissingModel(similarity.measure.to_string()));
    }
    let mut rng = rng::derive(protocol.seed, 0x6576_616c);
    let thetas: Vec<f64> = (0..n_runs).map(|_| protocol.draw_theta(&mut rng)).collect();
    let mut records = Vec::with_capacity(n_runs * models.len());
    for theta in thetas {
        let spec_text = Atomic {
            similarity: similarity.clone(),
            theta,
        }
        .to_string();
        let (executed_ms, _) = timed_with_warmup(similarity, source, target, theta, protocol.repetitions)?;
        for (family, model) in models {
            records.push(EvaluationRecord {
                spec_text: spec_text.clone(),
                expected_ms: model.predict(source.len(), target.len(), theta)?,
                executed_ms,
                model_family: *family,
            });
        }
    }
    let mut evaluation = Evaluation {
        records,
        rmse: BTreeMap::new(),
    };
    for family in models.keys() {
        let expected = evaluation.column(*family, |r| r.expected_ms);
        let executed = evaluation.column(*family, |r| r.executed_ms);
        evaluation.rmse.insert(*family, costmodel::rmse(&expected, &executed)?);
    }
    Ok(evaluation)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io("<csv>", e),
        other => Error::syntax(0, format!("{other:?}")),
    }
}

/// Header `s_size,t_size,theta,runtime_ms`.
pub fn write_samples_csv(out: impl io::Write, samples: &[TrainingSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s_size", "t_size", "theta", "runtime_ms"]).map_err(csv_error)?;
    for x in samples {
        w.write_record([
            x.s_size.to_string(),
            x.t_size.to_string(),
            x.theta.to_string(),
            x.runtime_ms.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn read_samples_csv(input: impl io::Read) -> Result<Vec<TrainingSample>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().collect::<Vec<_>>() != ["s_size", "t_size", "theta", "runtime_ms"] {
        return Err(Error::syntax(1, "expected header s_size,t_size,theta,runtime_ms"));
    }
    let mut samples = Vec::new();
    for (n, row) in r.records().enumerate() {
        let row = row.map_err(csv_error)?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        let bad = || Error::syntax(n + 2, "malformed sample row");
        samples.push(TrainingSample::new(
            field(0).parse().ok().ok_or_else(bad)?,
            field(1).parse().ok().ok_or_else(bad)?,
            field(2).parse().ok().ok_or_else(bad)?,
            field(3).parse().ok().ok_or_else(bad)?,
        ));
    }
    Ok(samples)
}

/// Header `spec,family,expected_ms,executed_ms`.
pub fn write_evaluation_csv(out: impl io::Write, records: &[EvaluationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["spec", "family", "expected_ms", "executed_ms"]).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.spec_text.clone(),
            r.model_family.to_string(),
            r.expected_ms.to_string(),
            r.executed_ms.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}
