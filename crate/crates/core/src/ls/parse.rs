use crate::error::{Error, Result};
use crate::measures::Measure;

use super::{Atomic, Filter, LinkSpec, Operator, Similarity};

/// Parses the textual form of a link specification.
pub fn parse_ls(text: &str) -> Result<LinkSpec> {
    let mut p = Parser { src: text, pos: 0 };
    let mut spec = p.spec(true)?;
    p.skip_ws();
    if p.rest().starts_with(">=") {
        p.pos += 2;
        let tau = p.score()?;
        match &mut spec {
            LinkSpec::Atomic(a) => a.theta = a.theta.max(tau),
            LinkSpec::Complex(c) => c.filter.tau = c.filter.tau.max(tau),
        }
    } else if let LinkSpec::Complex(c) = &spec {
        if c.filter.tau.is_nan() {
            return Err(p.error("missing `|` threshold"));
        }
    }
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(spec)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Spec {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn ident(&mut self) -> Result<(usize, &str)> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a name"));
        }
        self.pos += len;
        Ok((start, &self.src[start..start + len]))
    }

    fn property(&mut self, var: &str) -> Result<String> {
        self.expect(var)?;
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| c.is_whitespace() || matches!(c, ',' | '(' | ')' | '|'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a property name"));
        }
        let prop = self.rest()[..len].to_owned();
        self.pos += len;
        Ok(prop)
    }

    fn score(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '-' | '+')))
            .unwrap_or(self.rest().len());
        let text = &self.rest()[..len];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(format!("expected a threshold, found `{text}`")))?;
        if !(0.0..=1.0).contains(&value) {
            self.pos = start;
            return Err(self.error(format!("threshold {value} outside [0, 1]")));
        }
        self.pos += len;
        Ok(value)
    }

    fn similarity(&mut self, start: usize, name: &str) -> Result<Similarity> {
        let measure: Measure = name.parse().map_err(|_| Error::Spec {
            position: start,
            message: format!("unknown measure `{name}`"),
        })?;
        self.expect("(")?;
        let source_property = self.property("x.")?;
        self.expect(",")?;
        let target_property = self.property("y.")?;
        self.expect(")")?;
        Ok(Similarity {
            measure,
            source_property,
            target_property,
        })
    }

    fn spec(&mut self, root: bool) -> Result<LinkSpec> {
        let (start, name) = self.ident()?;
        let op = match name.to_ascii_uppercase().as_str() {
            "AND" => Some(Operator::And),
            "OR" => Some(Operator::Or),
            "MINUS" => Some(Operator::Minus),
            _ => None,
        };
        let Some(op) = op else {
            let name = name.to_owned();
            let similarity = self.similarity(start, &name)?;
            self.expect("|").map_err(|_| self.error("missing `|` threshold"))?;
            let theta = self.score()?;
            return Ok(LinkSpec::Atomic(Atomic { similarity, theta }));
        };
        self.expect("(")?;
        let left = self.spec(false)?;
        self.expect(",")?;
        let right = self.spec(false)?;
        self.expect(")")?;
        self.skip_ws();
        let filter = if self.rest().starts_with('|') {
            self.pos += 1;
            self.filter()?
        } else if root && self.rest().starts_with(">=") {
            // threshold supplied by the trailing `>=`
            Filter::score(f64::NAN)
        } else {
            return Err(self.error("missing `|` threshold"));
        };
        Ok(LinkSpec::complex(op, left, right, filter))
    }

    fn filter(&mut self) -> Result<Filter> {
        self.skip_ws();
        if self.rest().starts_with(|c: char| c.is_alphabetic()) {
            let (start, name) = self.ident()?;
            let name = name.to_owned();
            let sim = self.similarity(start, &name)?;
            self.expect("@")?;
            Ok(Filter::by(sim, self.score()?))
        } else {
            Ok(Filter::score(self.score()?))
        }
    }
}
