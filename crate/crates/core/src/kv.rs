//! Flat `key = value` documents, used for model files and configuration.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Model(format!("missing key `{key}`")))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    /// Blank lines and lines starting with `#` are skipped; keys must be
    /// unique.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::syntax(n + 1, "expected `key = value`"));
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::syntax(n + 1, "empty key"));
            }
            if kv.get(key).is_some() {
                return Err(Error::syntax(n + 1, format!("duplicate key `{key}`")));
            }
            kv.push(key, value.trim());
        }
        Ok(kv)
    }
}

impl std::fmt::Display for KeyValues {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// 17 significant digits; reads back to the identical `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let kv = KeyValues::parse("# c\nfamily = exp\n\n coeff.0=1.5 \n").unwrap();
        assert_eq!(kv.get("family"), Some("exp"));
        assert_eq!(kv.get("coeff.0"), Some("1.5"));
        assert_eq!(kv.to_string(), "family = exp\ncoeff.0 = 1.5\n");
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(KeyValues::parse("a = 1\nb\n"), Err(Error::Syntax { line: 2, .. })));
        assert!(matches!(KeyValues::parse("a = 1\na = 2\n"), Err(Error::Syntax { line: 2, .. })));
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, -1.028, 1e-300, 123456789.12345679, f64::MIN_POSITIVE] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }
}
