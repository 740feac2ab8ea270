//! Experiment configuration.
//!
//! Grammar, one item per line:
//!
//! ```text
//! # comment
//! [experiment]            section without id
//! [sampler dpp_small]     section with id
//! key = value             value runs to end of line; '#' starts a comment
//! ```
//!
//! Sections: `experiment` and `problem` (at most one each), `sampler <id>`
//! and `model <id>` (any number, ids unique). Lists are comma separated;
//! integer grids also accept `a..b` (inclusive).

use std::path::Path;
use std::str::FromStr;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub id: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
}

fn parse_err(line: usize, message: impl Into<String>) -> BenchError {
    BenchError::Config {
        line,
        message: message.into(),
    }
}

impl Section {
    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn has(&self, key: &str) -> bool {
        self.entry(key).is_some()
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| parse_err(e.line, format!("invalid value for '{key}': '{}'", e.value))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| parse_err(self.line, format!("[{}] is missing '{key}'", self.label())))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    pub fn require_str(&self, key: &str) -> Result<&str> {
        self.get_str(key)
            .ok_or_else(|| parse_err(self.line, format!("[{}] is missing '{key}'", self.label())))
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.entry(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| parse_err(e.line, format!("invalid list item '{s}' in '{key}'")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Integer list accepting `a..b` ranges as items.
    pub fn get_grid(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some(e) = self.entry(key) else {
            return Ok(None);
        };
        let bad = || parse_err(e.line, format!("invalid grid '{}'", e.value));
        let mut out = Vec::new();
        for item in e.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.split_once("..") {
                Some((a, b)) => {
                    let a: usize = a.trim().parse().map_err(|_| bad())?;
                    let b: usize = b.trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    out.extend(a..=b);
                }
                None => out.push(item.parse().map_err(|_| bad())?),
            }
        }
        Ok(Some(out))
    }

    pub fn label(&self) -> String {
        match &self.id {
            Some(id) => format!("{} {id}", self.name),
            None => self.name.clone(),
        }
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(parse_err(
                    e.line,
                    format!("unknown key '{}' in [{}]", e.key, self.label()),
                ));
            }
        }
        Ok(())
    }

    pub fn line_of(&self, key: &str) -> usize {
        self.entry(key).map_or(self.line, |e| e.line)
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> BenchError {
        parse_err(self.line_of(key), message)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    pub sections: Vec<Section>,
}

const SECTIONS: [(&str, bool); 4] = [
    ("experiment", false),
    ("problem", false),
    ("sampler", true),
    ("model", true),
];

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(inner) = content.strip_prefix('[') {
                let inner = inner
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line, "unterminated section header"))?;
                let mut words = inner.split_whitespace();
                let name = words
                    .next()
                    .ok_or_else(|| parse_err(line, "empty section header"))?
                    .to_string();
                let id = words.next().map(str::to_string);
                if words.next().is_some() {
                    return Err(parse_err(line, "section header takes at most one id"));
                }
                let Some(&(_, needs_id)) = SECTIONS.iter().find(|(n, _)| *n == name) else {
                    return Err(parse_err(line, format!("unknown section '{name}'")));
                };
                if needs_id != id.is_some() {
                    return Err(parse_err(
                        line,
                        if needs_id {
                            format!("[{name}] needs an id")
                        } else {
                            format!("[{name}] takes no id")
                        },
                    ));
                }
                if sections.iter().any(|s| s.name == name && s.id == id) {
                    return Err(parse_err(line, format!("duplicate section [{inner}]")));
                }
                sections.push(Section {
                    name,
                    id,
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected 'key = value', got '{content}'")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(parse_err(line, "empty key"));
            }
            let section = sections
                .last_mut()
                .ok_or_else(|| parse_err(line, "key outside of any section"))?;
            if section.has(key) {
                return Err(parse_err(line, format!("duplicate key '{key}'")));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(Self { sections })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn sections_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections.iter().filter(move |s| s.name == name)
    }
}

/// Settings of the `[experiment]` section after command-line overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSettings {
    pub seed: u64,
    pub iterations: usize,
    pub reps: usize,
    /// Relative accuracy `ε`: a run has converged once `gap ≤ ε · gap₀`.
    pub target: Option<f64>,
    pub overhead: f64,
    pub variable_metric: bool,
    /// Draws per sampler for the `sample` command.
    pub draws: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
}

impl ExperimentSettings {
    pub fn from_config(cfg: &RawConfig, ov: Overrides) -> Result<Self> {
        let empty = Section {
            name: "experiment".into(),
            id: None,
            line: 0,
            entries: Vec::new(),
        };
        let s = cfg.section("experiment").unwrap_or(&empty);
        s.check_keys(&["seed", "iterations", "reps", "target", "overhead", "variant", "draws"])?;
        let seed = match ov.seed {
            Some(seed) => seed,
            None => s.get("seed")?.ok_or_else(|| {
                parse_err(s.line, "a seed is required ([experiment] seed = N or --seed N)")
            })?,
        };
        let reps = ov.reps.unwrap_or(s.get_or("reps", 1)?);
        if reps == 0 {
            return Err(s.error("reps", "reps must be at least 1"));
        }
        let iterations = s.get_or("iterations", 100)?;
        if iterations == 0 {
            return Err(s.error("iterations", "iterations must be at least 1"));
        }
        let target: Option<f64> = s.get("target")?;
        if let Some(t) = target {
            if !(t > 0.0 && t < 1.0) {
                return Err(s.error("target", "target must lie in (0, 1)"));
            }
        }
        let overhead = s.get_or("overhead", 0.0)?;
        if !(overhead >= 0.0) {
            return Err(s.error("overhead", "overhead must be nonnegative"));
        }
        let variable_metric = match s.get_str("variant").unwrap_or("fixed") {
            "fixed" => false,
            "variable" => true,
            other => return Err(s.error("variant", format!("variant must be fixed or variable, got '{other}'"))),
        };
        let draws = s.get_or("draws", 10_000)?;
        if draws == 0 {
            return Err(s.error("draws", "draws must be at least 1"));
        }
        Ok(Self {
            seed,
            iterations,
            reps,
            target,
            overhead,
            variable_metric,
            draws,
        })
    }
}

/// Ids become file names, so they are restricted to a portable alphabet.
pub fn check_ids(cfg: &RawConfig) -> Result<()> {
    for s in &cfg.sections {
        if let Some(id) = &s.id {
            if !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(parse_err(s.line, format!("id '{id}' may only use [A-Za-z0-9_-]")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "\
# top comment
[experiment]
seed = 7   # trailing
iterations = 50

[sampler a]
kind = dpp
alpha = 1
grid = 1..3, 8
";

    #[test]
    fn parses_sections_and_values() {
        let c = RawConfig::parse(TEXT).unwrap();
        assert_eq!(c.sections.len(), 2);
        let e = ExperimentSettings::from_config(&c, Overrides::default()).unwrap();
        assert_eq!((e.seed, e.iterations, e.reps), (7, 50, 1));
        let s = c.sections_named("sampler").next().unwrap();
        assert_eq!(s.id.as_deref(), Some("a"));
        assert_eq!(s.get::<f64>("alpha").unwrap(), Some(1.0));
        assert_eq!(s.get_grid("grid").unwrap().unwrap(), vec![1, 2, 3, 8]);
        assert_eq!(s.line_of("alpha"), 8);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("[experiment]\nseed = x\n", 2),
            ("seed = 1\n", 1),
            ("[experiment]\n[sampler]\n", 2),
            ("[nope]\n", 1),
            ("[experiment]\nseed 1\n", 2),
            ("[experiment]\nseed = 1\nseed = 2\n", 3),
        ];
        for (text, line) in cases {
            let err = RawConfig::parse(text)
                .and_then(|c| ExperimentSettings::from_config(&c, Overrides::default()).map(|_| ()))
                .unwrap_err();
            match err {
                BenchError::Config { line: l, .. } => assert_eq!(l, line, "{text:?}"),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn seed_is_mandatory_unless_overridden() {
        let c = RawConfig::parse("[experiment]\nreps = 2\n").unwrap();
        assert!(ExperimentSettings::from_config(&c, Overrides::default()).is_err());
        let ov = Overrides {
            seed: Some(3),
            reps: Some(5),
        };
        let e = ExperimentSettings::from_config(&c, ov).unwrap();
        assert_eq!((e.seed, e.reps), (3, 5));
    }
}
