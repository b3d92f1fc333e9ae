//! `key = value` configuration with tracked resolution.
//!
//! A command reads every setting through [`Settings`], which records the
//! effective value (including defaults). The recorded map is the manifest:
//! feeding it back as a config file reproduces the run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ANOMEDGE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "anomedge-out";
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Raw key/value pairs, later sources overriding earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::parse(origin, idx + 1, "expected `key = value`"));
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::parse(origin, idx + 1, "empty key"));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.values.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Sorted `key = value` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Typed view of a [`Config`] that records every value it hands out.
#[derive(Debug)]
pub struct Settings {
    input: Config,
    used: BTreeSet<String>,
    resolved: Config,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: Display,
{
    raw.parse()
        .map_err(|e| CliError::config(format!("invalid value `{raw}` for `{key}`: {e}")))
}

impl Settings {
    /// Wraps a config for `command`; a `command` key, if present, must match.
    pub fn new(command: &str, mut input: Config) -> Result<Self> {
        if let Some(c) = input.values.remove("command") {
            if c != command {
                return Err(CliError::config(format!(
                    "config was written for `{c}`, not `{command}`"
                )));
            }
        }
        let mut resolved = Config::default();
        resolved.set("command", command);
        Ok(Self {
            input,
            used: BTreeSet::new(),
            resolved,
        })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.input.get(key).map(str::to_string)
    }

    pub fn opt<T: FromStr + Display>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => {
                let v: T = parse_value(key, &raw)?;
                self.resolved.set(key, v.to_string());
                Ok(Some(v))
            }
        }
    }

    pub fn get_or<T: FromStr + Display>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        let v = self.opt(key)?.unwrap_or(default);
        self.resolved.set(key, v.to_string());
        Ok(v)
    }

    pub fn require<T: FromStr + Display>(&mut self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        self.opt(key)?
            .ok_or_else(|| CliError::config(format!("missing required setting `{key}`")))
    }

    pub fn path(&mut self, key: &str) -> Result<Option<PathBuf>> {
        Ok(self.opt::<String>(key)?.map(PathBuf::from))
    }

    /// Comma-separated list; `None` when the key is absent.
    pub fn list<T: FromStr + Display>(&mut self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        let Some(raw) = self.take(key) else {
            return Ok(None);
        };
        let items = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_value(key, s))
            .collect::<Result<Vec<T>>>()?;
        if items.is_empty() {
            return Err(CliError::config(format!("`{key}` must list at least one value")));
        }
        self.resolved.set(key, join(&items));
        Ok(Some(items))
    }

    pub fn list_or<T: FromStr + Display + Clone>(&mut self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        let v = match self.list(key)? {
            Some(v) => v,
            None => default.to_vec(),
        };
        self.resolved.set(key, join(&v));
        Ok(v)
    }

    /// Output directory: explicit `out`, else the environment default. Not
    /// recorded in the manifest so a rerun can target another directory.
    pub fn out_dir(&mut self) -> PathBuf {
        match self.take("out") {
            Some(p) => PathBuf::from(p),
            None => std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        }
    }

    /// Fails on keys the command never asked for, then returns the manifest.
    pub fn finish(self) -> Result<Config> {
        let unknown: Vec<&str> = self
            .input
            .values
            .keys()
            .filter(|k| !self.used.contains(*k))
            .map(String::as_str)
            .collect();
        if !unknown.is_empty() {
            let cmd = self.resolved.get("command").unwrap_or_default();
            return Err(CliError::config(format!(
                "unknown setting(s) for `{cmd}`: {}",
                unknown.join(", ")
            )));
        }
        Ok(self.resolved)
    }
}

fn join<T: Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Config {
        Config::parse(text, Path::new("test.cfg")).unwrap()
    }

    #[test]
    fn parses_comments_blanks_and_overrides() {
        let mut c = cfg("# comment\n\nseed = 3\nlambda=0.5\nseed = 4\n");
        assert_eq!(c.get("seed"), Some("4"));
        assert_eq!(c.get("lambda"), Some("0.5"));
        c.set("seed", "9");
        assert_eq!(c.get("seed"), Some("9"));
    }

    #[test]
    fn malformed_line_reports_position() {
        let err = Config::parse("a = 1\nnot a pair\n", Path::new("x.cfg")).unwrap_err();
        assert_eq!(err.kind.code(), "E_PARSE");
        assert!(err.message.contains("x.cfg:2"));
    }

    #[test]
    fn resolution_records_defaults_and_rejects_unknown_keys() {
        let mut s = Settings::new("detect", cfg("lambda = 0.25\nseed = 7\n")).unwrap();
        assert_eq!(s.get_or("lambda", 1.0).unwrap(), 0.25);
        assert_eq!(s.get_or("mu", 3.0).unwrap(), 3.0);
        assert_eq!(s.list_or("grid", &[1usize, 2]).unwrap(), vec![1, 2]);
        let err = Settings::finish(s).unwrap_err();
        assert!(err.message.contains("seed"));

        let mut s = Settings::new("detect", cfg("lambda = 0.25\n")).unwrap();
        s.get_or("lambda", 1.0).unwrap();
        s.get_or("mu", 3.0).unwrap();
        let m = s.finish().unwrap();
        assert_eq!(m.render(), "command = detect\nlambda = 0.25\nmu = 3\n");
    }

    #[test]
    fn manifest_round_trips() {
        let mut s = Settings::new("sweep", cfg("lambda = 0.1, 0.2\n")).unwrap();
        s.list::<f64>("lambda").unwrap();
        let m = s.finish().unwrap();
        let again = Config::parse(&m.render(), Path::new("m")).unwrap();
        let mut s = Settings::new("sweep", again).unwrap();
        assert_eq!(s.list::<f64>("lambda").unwrap(), Some(vec![0.1, 0.2]));
        assert!(Settings::new("detect", m).is_err());
    }

    #[test]
    fn bad_values_are_config_errors() {
        let mut s = Settings::new("x", cfg("n = abc\nl = ,\n")).unwrap();
        assert_eq!(s.opt::<usize>("n").unwrap_err().kind.code(), "E_CONFIG");
        assert!(s.list::<f64>("l").is_err());
        assert!(s.require::<f64>("missing").is_err());
    }
}
