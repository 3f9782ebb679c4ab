//! Run configuration: a TOML file plus `--set key=value` overrides.

use std::fmt;

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// A ring such as `Z`, `F3[t]`, `Z/6`, `F2[x,y]/(xy)`, or `P1/F2`.
    pub space: String,
    /// Only genus 0 (the projective line) is supported.
    #[serde(default)]
    pub genus: Option<u32>,
    #[serde(default)]
    pub window: WindowConfig,
    /// Objects for `ass`.
    #[serde(default)]
    pub objects: Vec<String>,
    /// Generators for `classify`.
    #[serde(default)]
    pub generators: Vec<String>,
    /// Generator pool for `verify`: a list of objects or `"full"`.
    #[serde(default)]
    pub pool: Option<Pool>,
    /// Point set for `verify serre-in-torf` and `lattice`: `"ass"`,
    /// `"assh"`, `"min"`, or a list of point labels.
    #[serde(default)]
    pub phi: Option<Phi>,
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    /// PID: window primes, as integers or monic irreducibles in `t`.
    pub primes: Option<Vec<String>>,
    /// PID: bound on the length of each primary part.
    pub max_exponent: Option<u32>,
    /// PID and P1: rank cap.
    pub max_rank: Option<u32>,
    /// Finite rings: bound on total length.
    pub max_length: Option<u32>,
    /// Monomial rings: explicit cyclic modules `R/J`, given by the ideal `J`.
    pub cyclics: Option<Vec<String>>,
    /// Monomial rings: use every `J ⊇ I` generated in the box `[0, e]^n`.
    pub box_exponent: Option<u32>,
    /// Monomial rings: cap on the number of summands.
    pub max_summands: Option<u32>,
    /// P1: twist range.
    pub twist_lo: Option<i64>,
    pub twist_hi: Option<i64>,
    /// P1: cap on total torsion length.
    pub max_torsion_length: Option<u32>,
    /// P1: all closed points up to this degree (finite fields).
    pub max_point_degree: Option<usize>,
    /// P1: explicit closed points instead of all points up to a degree.
    pub points: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Pool {
    Keyword(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Phi {
    Keyword(String),
    List(Vec<String>),
}

/// A configuration problem, with a position in the file when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError { line: None, column: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

fn from_toml_error(source: &str, e: toml::de::Error) -> ConfigError {
    let (line, column) = match e.span() {
        Some(span) => {
            let (l, c) = line_col(source, span.start);
            (Some(l), Some(c))
        }
        None => (None, None),
    };
    ConfigError { line, column, message: e.message().trim().to_string() }
}

/// Apply `key=value` with a dotted key; the value is read as TOML and falls
/// back to a plain string.
fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new(format!("--set expects key=value, found `{assignment}`")))?;
    let value = value.trim();
    let parsed: toml::Value = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    let path: Vec<&str> = key.trim().split('.').collect();
    let mut cur = table;
    for part in &path[..path.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::new(format!("--set {key}: `{part}` is not a table")))?;
    }
    cur.insert(path[path.len() - 1].to_string(), parsed);
    Ok(())
}

impl RunConfig {
    pub fn parse(source: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
        let config: RunConfig = toml::from_str(source).map_err(|e| from_toml_error(source, e))?;
        let config = if overrides.is_empty() {
            config
        } else {
            let mut table: toml::Table = toml::from_str(source).map_err(|e| from_toml_error(source, e))?;
            for o in overrides {
                apply_override(&mut table, o)?;
            }
            RunConfig::deserialize(toml::Value::Table(table))
                .map_err(|e| ConfigError::new(format!("after --set overrides: {}", e.message().trim())))?
        };
        if let Some(g) = config.genus {
            if g > 0 {
                return Err(ConfigError::new(format!(
                    "curves of genus {g} are not supported; only the projective line (genus 0) is"
                )));
            }
        }
        Ok(config)
    }

    /// Position of a literal string value inside the file, for error messages.
    pub fn locate(source: &str, literal: &str, column_in_literal: usize) -> (Option<usize>, Option<usize>) {
        let needle = format!("\"{literal}\"");
        match source.find(&needle) {
            Some(off) => {
                let (l, c) = line_col(source, off + 1);
                (Some(l), Some(c + column_in_literal.saturating_sub(1)))
            }
            None => (None, None),
        }
    }
}
