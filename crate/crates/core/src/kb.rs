//! Source and target resource sets.
//!
//! A [`ResourceTable`] holds resources in insertion order together with their
//! property values. Every literal is kept as a string; IRIs in object position
//! are stored verbatim (without angle brackets).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

/// One resource and its property values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resource {
    pub id: String,
    pub properties: BTreeMap<String, Vec<String>>,
}

impl Resource {
    pub fn new(id: impl Into<String>) -> Self {
        Resource {
            id: id.into(),
            properties: BTreeMap::new(),
        }
    }

    pub fn with(mut self, property: impl Into<String>, value: impl Into<String>) -> Self {
        self.properties
            .entry(property.into())
            .or_default()
            .push(value.into());
        self
    }

    /// Values of `property`; a missing property yields an empty slice.
    pub fn values(&self, property: &str) -> &[String] {
        self.properties
            .get(property)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    NTriples,
    Tsv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ntriples" | "nt" | "n-triples" => Ok(Format::NTriples),
            "tsv" => Ok(Format::Tsv),
            other => Err(Error::Protocol(format!("unknown table format `{other}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::NTriples => "ntriples",
            Format::Tsv => "tsv",
        })
    }
}

/// An ordered set of resources with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourceTable {
    resources: Vec<Resource>,
    index: HashMap<String, usize>,
}

impl ResourceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_resources(resources: impl IntoIterator<Item = Resource>) -> Result<Self> {
        let mut table = ResourceTable::new();
        for r in resources {
            table.push(r)?;
        }
        Ok(table)
    }

    pub fn push(&mut self, resource: Resource) -> Result<()> {
        if self.index.contains_key(&resource.id) {
            return Err(Error::DuplicateId(resource.id));
        }
        self.index.insert(resource.id.clone(), self.resources.len());
        self.resources.push(resource);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.resources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resources.is_empty()
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Resource> {
        self.resources.iter()
    }

    pub fn get(&self, id: &str) -> Option<&Resource> {
        self.index.get(id).map(|&i| &self.resources[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.resources.iter().map(|r| r.id.as_str())
    }

    /// All property names used by at least one resource, sorted.
    pub fn property_names(&self) -> BTreeSet<&str> {
        self.resources
            .iter()
            .flat_map(|r| r.properties.keys().map(String::as_str))
            .collect()
    }

    /// Maps a property name as written in a link specification to the key
    /// stored in this table. Exact names win; otherwise a unique match on
    /// the IRI local name (after the last `#` or `/`) is accepted.
    pub fn resolve_property(&self, name: &str) -> Option<String> {
        let names = self.property_names();
        if names.contains(name) {
            return Some(name.to_owned());
        }
        let mut hits = names.iter().filter(|n| local_name(n) == name);
        match (hits.next(), hits.next()) {
            (Some(only), None) => Some((*only).to_owned()),
            _ => None,
        }
    }

    /// Per-resource values of a property, in table order. Unknown
    /// properties give one empty slice per resource.
    pub fn column(&self, property: &str) -> Vec<&[String]> {
        match self.resolve_property(property) {
            Some(key) => self.resources.iter().map(|r| r.values(&key)).collect(),
            None => vec![&[][..]; self.resources.len()],
        }
    }

    fn select(&self, mut picked: Vec<usize>) -> ResourceTable {
        picked.sort_unstable();
        let resources: Vec<Resource> = picked.iter().map(|&i| self.resources[i].clone()).collect();
        let index = resources
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.clone(), i))
            .collect();
        ResourceTable { resources, index }
    }
}

impl<'a> IntoIterator for &'a ResourceTable {
    type Item = &'a Resource;
    type IntoIter = std::slice::Iter<'a, Resource>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

fn local_name(iri: &str) -> &str {
    iri.rsplit(['#', '/']).next().unwrap_or(iri)
}

pub fn load_table(
    path: impl AsRef<Path>,
    format: Format,
    property_filter: Option<&[String]>,
) -> Result<ResourceTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text, format, property_filter)
}

pub fn parse_table(
    text: &str,
    format: Format,
    property_filter: Option<&[String]>,
) -> Result<ResourceTable> {
    let keep = |p: &str| {
        property_filter.is_none_or(|f| {
            f.iter().any(|want| want == p || want == local_name(p))
        })
    };
    let table = match format {
        Format::Tsv => parse_tsv(text, &keep)?,
        Format::NTriples => parse_ntriples(text, &keep)?,
    };
    if table.is_empty() {
        return Err(Error::NoResources);
    }
    Ok(table)
}

fn parse_tsv(text: &str, keep: &dyn Fn(&str) -> bool) -> Result<ResourceTable> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Ok(ResourceTable::new());
    };
    let header: Vec<&str> = header.split('\t').map(str::trim).collect();
    if header.len() < 2 {
        return Err(Error::syntax(1, "header needs an id column and at least one property"));
    }
    let mut table = ResourceTable::new();
    for (n, line) in lines {
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != header.len() {
            return Err(Error::syntax(
                n + 1,
                format!("expected {} columns, found {}", header.len(), cells.len()),
            ));
        }
        let id = cells[0].trim();
        if id.is_empty() {
            return Err(Error::syntax(n + 1, "empty id"));
        }
        let mut resource = Resource::new(id);
        for (name, value) in header[1..].iter().zip(&cells[1..]) {
            if !value.is_empty() && keep(name) {
                resource = resource.with(*name, *value);
            }
        }
        table.push(resource).map_err(|e| Error::syntax(n + 1, e.to_string()))?;
    }
    Ok(table)
}

fn parse_ntriples(text: &str, keep: &dyn Fn(&str) -> bool) -> Result<ResourceTable> {
    let mut order: Vec<Resource> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (s, p, o) = parse_triple(trimmed).map_err(|m| Error::syntax(n + 1, m))?;
        let slot = *seen.entry(s.clone()).or_insert_with(|| {
            order.push(Resource::new(s.clone()));
            order.len() - 1
        });
        if keep(&p) {
            let r = &mut order[slot];
            r.properties.entry(p).or_default().push(o);
        }
    }
    ResourceTable::from_resources(order)
}

/// Parses one N-Triples statement into (subject, predicate, object) strings.
pub(crate) fn parse_triple(line: &str) -> std::result::Result<(String, String, String), String> {
    let mut cur = Cursor { s: line, pos: 0 };
    let subject = cur.node(false)?;
    cur.skip_ws();
    let predicate = cur.node(false)?;
    cur.skip_ws();
    let object = cur.node(true)?;
    cur.skip_ws();
    if !cur.eat('.') {
        return Err(format!("expected `.` at column {}", cur.pos + 1));
    }
    cur.skip_ws();
    if !cur.rest().is_empty() && !cur.rest().starts_with('#') {
        return Err(format!("trailing input at column {}", cur.pos + 1));
    }
    Ok((subject, predicate, object))
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn node(&mut self, literal_allowed: bool) -> std::result::Result<String, String> {
        match self.peek() {
            Some('<') => self.iri(),
            Some('_') => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if !c.is_whitespace()) {
                    self.pos += self.peek().map_or(1, char::len_utf8);
                }
                Ok(self.s[start..self.pos].to_owned())
            }
            Some('"') if literal_allowed => self.literal(),
            Some(c) => Err(format!("unexpected `{c}` at column {}", self.pos + 1)),
            None => Err("unexpected end of line".to_owned()),
        }
    }

    fn iri(&mut self) -> std::result::Result<String, String> {
        self.eat('<');
        let start = self.pos;
        match self.rest().find('>') {
            Some(end) => {
                self.pos += end + 1;
                Ok(self.s[start..start + end].to_owned())
            }
            None => Err(format!("unterminated IRI at column {start}")),
        }
    }

    fn literal(&mut self) -> std::result::Result<String, String> {
        let open = self.pos;
        self.eat('"');
        let mut out = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(format!("unterminated literal at column {}", open + 1));
            };
            self.pos += c.len_utf8();
            match c {
                '"' => break,
                '\\' => {
                    let esc = self.peek().ok_or("dangling escape")?;
                    self.pos += esc.len_utf8();
                    match esc {
                        't' => out.push('\t'),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        'b' => out.push('\u{8}'),
                        'f' => out.push('\u{c}'),
                        '"' => out.push('"'),
                        '\'' => out.push('\''),
                        '\\' => out.push('\\'),
                        'u' | 'U' => {
                            let len = if esc == 'u' { 4 } else { 8 };
                            let hex = self.rest().get(..len).ok_or("short unicode escape")?;
                            let code = u32::from_str_radix(hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| format!("bad unicode escape `{hex}`"))?;
                            out.push(code);
                            self.pos += len;
                        }
                        other => return Err(format!("unknown escape `\\{other}`")),
                    }
                }
                _ => out.push(c),
            }
        }
        // language tags and datatypes are dropped
        if self.eat('@') {
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                self.pos += 1;
            }
        } else if self.rest().starts_with("^^") {
            self.pos += 2;
            self.iri()?;
        }
        Ok(out)
    }
}

/// Writes the table as TSV. A property with several values on some
/// resource gets that many columns of the same name.
pub fn write_tsv(table: &ResourceTable, out: &mut impl std::io::Write) -> Result<()> {
    let mut columns: Vec<(&str, usize)> = Vec::new();
    for p in table.property_names() {
        let width = table.iter().map(|r| r.values(p).len()).max().unwrap_or(0);
        columns.push((p, width));
    }
    let mut lines = Vec::with_capacity(table.len() + 1);
    let mut header = vec!["id".to_string()];
    for (p, width) in &columns {
        header.extend(std::iter::repeat_n(p.to_string(), *width));
    }
    lines.push(header.join("\t"));
    for r in table {
        let mut cells = vec![r.id.as_str()];
        for (p, width) in &columns {
            let values = r.values(p);
            cells.extend(values.iter().map(String::as_str));
            cells.extend(std::iter::repeat_n("", width - values.len()));
        }
        if let Some(bad) = cells.iter().find(|c| c.contains(['\t', '\n', '\r'])) {
            return Err(Error::Unwritable {
                id: r.id.clone(),
                value: bad.to_string(),
            });
        }
        lines.push(cells.join("\t"));
    }
    for line in lines {
        writeln!(out, "{line}").map_err(|e| Error::io("<tsv>", e))?;
    }
    Ok(())
}

/// Uniform sample without replacement, returned in table order.
pub fn sample_table(table: &ResourceTable, size: usize, seed: u64) -> Result<ResourceTable> {
    if size == 0 || size > table.len() {
        return Err(Error::SampleSize {
            requested: size,
            available: table.len(),
        });
    }
    let mut rng = rng::from_seed(seed);
    let mut idx: Vec<usize> = (0..table.len()).collect();
    let (picked, _) = idx.partial_shuffle(&mut rng, size);
    Ok(table.select(picked.to_vec()))
}

/// Splits a table into two disjoint halves; the first half receives the
/// extra resource when the size is odd.
pub fn split_halves(table: &ResourceTable, seed: u64) -> Result<(ResourceTable, ResourceTable)> {
    if table.len() < 2 {
        return Err(Error::TooSmallToSplit(table.len()));
    }
    let mut rng = rng::from_seed(seed);
    let mut idx: Vec<usize> = (0..table.len()).collect();
    idx.shuffle(&mut rng);
    let cut = table.len().div_ceil(2);
    let second = idx.split_off(cut);
    Ok((table.select(idx), table.select(second)))
}
