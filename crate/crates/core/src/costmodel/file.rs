//! Model files: one `key = value` per line, keys in the order `family`,
//! `coeff.0 … coeff.n`, `scale.s`, `scale.t`, `trained_on`, `loss`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kv::{format_real, KeyValues};

use super::{Family, RuntimeModel};

impl RuntimeModel {
    pub fn to_key_values(&self, loss: f64) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push("family", self.family);
        for (i, c) in self.coefficients.iter().enumerate() {
            kv.push(format!("coeff.{i}"), format_real(*c));
        }
        kv.push("scale.s", format_real(self.scale_s));
        kv.push("scale.t", format_real(self.scale_t));
        kv.push("trained_on", self.trained_on.replace(['\n', '\r'], " "));
        kv.push("loss", format_real(loss));
        kv
    }

    /// Reads a model and its recorded training loss.
    pub fn from_key_values(kv: &KeyValues) -> Result<(RuntimeModel, f64)> {
        let family: Family = kv.require("family")?.parse()?;
        let real = |key: &str| -> Result<f64> {
            kv.require(key)?
                .parse()
                .map_err(|_| Error::Model(format!("`{key}` is not a number")))
        };
        let coefficients = (0..family.coefficient_count())
            .map(|i| real(&format!("coeff.{i}")))
            .collect::<Result<Vec<_>>>()?;
        if kv.get(&format!("coeff.{}", family.coefficient_count())).is_some() {
            return Err(Error::Model(format!("too many coefficients for {family}")));
        }
        let model = RuntimeModel::scaled(family, coefficients, real("scale.s")?, real("scale.t")?)?
            .with_metadata(kv.get("trained_on").unwrap_or_default());
        let loss = real("loss")?;
        Ok((model, loss))
    }

    pub fn save(&self, path: impl AsRef<Path>, loss: f64) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_key_values(loss).to_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(RuntimeModel, f64)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_key_values(&KeyValues::parse(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_round_trip() {
        let m = RuntimeModel::scaled(Family::Mixed, vec![0.5, 1.0, 0.01, 0.01, 1e-4, -2.0, 1.0], 1000.0, 800.0)
            .unwrap()
            .with_metadata("measure=trigrams;samples=225");
        let text = m.to_key_values(0.25).to_string();
        let keys: Vec<_> = text.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        assert_eq!(
            keys,
            [
                "family", "coeff.0", "coeff.1", "coeff.2", "coeff.3", "coeff.4", "coeff.5", "coeff.6", "scale.s",
                "scale.t", "trained_on", "loss"
            ]
        );
        assert!(text.contains("coeff.0 = 5.0000000000000000e-1\n"));
        let (back, loss) = RuntimeModel::from_key_values(&KeyValues::parse(&text).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(loss, 0.25);
    }

    #[test]
    fn rejects_wrong_shapes() {
        let bad = "family = linear\ncoeff.0 = 1\ncoeff.1 = 1\ncoeff.2 = 1\nscale.s = 1\nscale.t = 1\nloss = 0\n";
        assert!(RuntimeModel::from_key_values(&KeyValues::parse(bad).unwrap()).is_err());
        let bad = "family = cubic\n";
        assert!(RuntimeModel::from_key_values(&KeyValues::parse(bad).unwrap()).is_err());
    }
}
