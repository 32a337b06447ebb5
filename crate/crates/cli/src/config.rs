use std::path::Path;

use anyhow::{bail, Context, Result};
use linkrt::kv::KeyValues;
use linkrt::trainer::TrainingProtocol;

/// Protocol settings from an optional key-value file. Unknown keys are
/// rejected so typos do not pass silently.
pub struct Config {
    pub protocol: TrainingProtocol,
    pub runs: usize,
}

impl Config {
    pub fn load(path: Option<&Path>, seed: Option<u64>) -> Result<Config> {
        let mut config = Config {
            protocol: TrainingProtocol::default(),
            runs: 100,
        };
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let kv = KeyValues::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
            for key in kv.keys() {
                let value = kv.get(key).unwrap_or_default();
                let p = &mut config.protocol;
                let bad = || format!("{}: bad value for `{key}`", path.display());
                match key {
                    "n_source_samples" => p.n_source_samples = value.parse().with_context(bad)?,
                    "n_target_samples" => p.n_target_samples = value.parse().with_context(bad)?,
                    "repetitions" => p.repetitions = value.parse().with_context(bad)?,
                    "theta_low" => p.theta_low = value.parse().with_context(bad)?,
                    "theta_high" => p.theta_high = value.parse().with_context(bad)?,
                    "size_low" => p.size_low = value.parse().with_context(bad)?,
                    "size_high" => p.size_high = value.parse().with_context(bad)?,
                    "seed" => p.seed = value.parse().with_context(bad)?,
                    "runs" => config.runs = value.parse().with_context(bad)?,
                    other => bail!("{}: unknown setting `{other}`", path.display()),
                }
            }
        }
        if let Some(seed) = seed {
            config.protocol.seed = seed;
        }
        Ok(config)
    }
}
