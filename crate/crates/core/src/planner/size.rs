use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use crate::costmodel::{fit_linear, Family, RuntimeModel, TrainingSample};
use crate::error::{Error, Result};
use crate::kv::{format_real, KeyValues};
use crate::measures::{similarity, Measure};
use crate::rng;
use crate::synth::perturb_chars;

/// Per-pair filter cost used when a measure was never calibrated.
pub const DEFAULT_PAIR_COST_MS: f64 = 1e-3;
/// Cost per input pair of merges and score filters.
pub const DEFAULT_MERGE_COST_MS: f64 = 1e-4;

/// Result-size estimates and per-pair costs used to price filters and
/// merges.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeModel {
    regressions: BTreeMap<Measure, RuntimeModel>,
    pair_cost_ms: BTreeMap<Measure, f64>,
    pub merge_cost_ms: f64,
}

impl Default for SizeModel {
    fn default() -> Self {
        SizeModel {
            regressions: BTreeMap::new(),
            pair_cost_ms: BTreeMap::new(),
            merge_cost_ms: DEFAULT_MERGE_COST_MS,
        }
    }
}

impl SizeModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the linear result-size regression `a + b|S| + c|T| + dθ`.
    pub fn set_regression(&mut self, measure: Measure, coefficients: [f64; 4]) -> Result<()> {
        self.regressions
            .insert(measure, RuntimeModel::new(Family::Linear, coefficients.to_vec())?);
        Ok(())
    }

    pub fn set_pair_cost(&mut self, measure: Measure, ms: f64) {
        self.pair_cost_ms.insert(measure, ms);
    }

    /// Fits the size regression of `measure` from training runs.
    pub fn fit(&mut self, measure: Measure, samples: &[TrainingSample], result_sizes: &[usize]) -> Result<()> {
        if samples.len() != result_sizes.len() {
            return Err(Error::LengthMismatch(samples.len(), result_sizes.len()));
        }
        let as_runtime: Vec<_> = samples
            .iter()
            .zip(result_sizes)
            .map(|(x, &n)| TrainingSample::new(x.s_size, x.t_size, x.theta, n as f64))
            .collect();
        let (model, _) = fit_linear(&as_runtime)?;
        self.regressions.insert(measure, model);
        Ok(())
    }

    /// Times `evaluations` similarity computations on 20-character strings
    /// and records the mean cost per pair.
    pub fn calibrate(&mut self, measure: Measure, evaluations: usize, seed: u64) {
        let mut rng = rng::from_seed(seed);
        let base = "qwertyuiop asdfghjkl";
        let pairs: Vec<(String, String)> = (0..64)
            .map(|_| (perturb_chars(&mut rng, base, 4), perturb_chars(&mut rng, base, 6)))
            .collect();
        let n = evaluations.max(1);
        let start = Instant::now();
        let mut sink = 0.0;
        for i in 0..n {
            let (a, b) = &pairs[i % pairs.len()];
            sink += similarity(measure, a, b);
        }
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        std::hint::black_box(sink);
        self.pair_cost_ms.insert(measure, elapsed / n as f64);
    }

    /// Estimated result size, clamped to `[0, |S||T|]`. Without a regression
    /// the smaller table size is assumed.
    pub fn estimate(&self, measure: Measure, s_size: usize, t_size: usize, theta: f64) -> f64 {
        let cap = s_size as f64 * t_size as f64;
        match self.regressions.get(&measure) {
            Some(m) => m.predict(s_size, t_size, theta).unwrap_or(cap).clamp(0.0, cap),
            None => s_size.min(t_size) as f64,
        }
    }

    pub fn pair_cost(&self, measure: Measure) -> f64 {
        self.pair_cost_ms
            .get(&measure)
            .copied()
            .unwrap_or(DEFAULT_PAIR_COST_MS)
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push("family", "size");
        kv.push("merge_cost", format_real(self.merge_cost_ms));
        for (m, cost) in &self.pair_cost_ms {
            kv.push(format!("pair_cost.{m}"), format_real(*cost));
        }
        for (m, model) in &self.regressions {
            for (i, c) in model.coefficients().iter().enumerate() {
                kv.push(format!("size.{m}.coeff.{i}"), format_real(*c));
            }
        }
        kv
    }

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        if kv.require("family")? != "size" {
            return Err(Error::Model("not a size model".into()));
        }
        let real = |key: &str, v: &str| -> Result<f64> {
            v.parse().map_err(|_| Error::Model(format!("`{key}` is not a number")))
        };
        let mut out = SizeModel {
            merge_cost_ms: real("merge_cost", kv.require("merge_cost")?)?,
            ..Default::default()
        };
        let mut coeffs: BTreeMap<Measure, [Option<f64>; 4]> = BTreeMap::new();
        for key in kv.keys() {
            let value = kv.get(key).unwrap_or_default();
            if let Some(m) = key.strip_prefix("pair_cost.") {
                out.pair_cost_ms.insert(m.parse()?, real(key, value)?);
            } else if let Some(rest) = key.strip_prefix("size.") {
                let (m, i) = rest
                    .split_once(".coeff.")
                    .ok_or_else(|| Error::Model(format!("bad key `{key}`")))?;
                let i: usize = i.parse().ok().filter(|i| *i < 4).ok_or_else(|| Error::Model(format!("bad key `{key}`")))?;
                coeffs.entry(m.parse()?).or_default()[i] = Some(real(key, value)?);
            }
        }
        for (m, c) in coeffs {
            let c: Option<Vec<f64>> = c.into_iter().collect();
            let c = c.ok_or_else(|| Error::Model(format!("incomplete size regression for {m}")))?;
            out.regressions.insert(m, RuntimeModel::new(Family::Linear, c)?);
        }
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_key_values().to_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_key_values(&KeyValues::parse(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimates_are_clamped() {
        let mut m = SizeModel::new();
        m.set_regression(Measure::Jaccard, [-50.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.estimate(Measure::Jaccard, 10, 10, 0.5), 0.0);
        m.set_regression(Measure::Jaccard, [1e9, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.estimate(Measure::Jaccard, 10, 10, 0.5), 100.0);
        assert_eq!(m.estimate(Measure::Cosine, 10, 30, 0.5), 10.0);
    }

    #[test]
    fn calibration_records_a_cost() {
        let mut m = SizeModel::new();
        m.calibrate(Measure::Levenshtein, 10_000, 1);
        assert!(m.pair_cost(Measure::Levenshtein) > 0.0);
        assert_eq!(m.pair_cost(Measure::Cosine), DEFAULT_PAIR_COST_MS);
    }

    #[test]
    fn file_round_trip() {
        let mut m = SizeModel::new();
        m.set_regression(Measure::Trigrams, [1.0, 0.5, 0.25, -3.0]).unwrap();
        m.set_pair_cost(Measure::Levenshtein, 0.002);
        let back = SizeModel::from_key_values(&KeyValues::parse(&m.to_key_values().to_string()).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
