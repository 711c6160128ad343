//! Flat `key = value` configuration, resolved as defaults < file < flags.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use ncharm::random::{self, SeededRng};

use crate::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

/// Keys every subcommand accepts.
pub const COMMON: &[Key] = &[
    key("seed", "0", "seed for every random choice"),
    key("input", "", "CSV samples used with family=file"),
    key("out", "", "write the JSON report here instead of stdout"),
    key("timing", "on", "on|off; off writes runtime_ms as null"),
];

pub fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().replace('-', "_");
        if k.is_empty() {
            return Err(CliError::Config(format!("config line {}: empty key", i + 1)));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

/// Resolved settings for one run.
#[derive(Debug, Clone)]
pub struct Ctx {
    values: BTreeMap<String, String>,
}

impl Ctx {
    pub fn resolve(
        keys: &[Key],
        file: Option<&Path>,
        flags: &[(String, String)],
    ) -> Result<Ctx, CliError> {
        let mut values: BTreeMap<String, String> =
            keys.iter().chain(COMMON).map(|k| (k.name.to_string(), k.default.to_string())).collect();
        let mut set = |k: &str, v: &str, origin: &str| {
            match values.get_mut(k) {
                Some(slot) => {
                    *slot = v.to_string();
                    Ok(())
                }
                None => Err(CliError::Config(format!("unknown key '{k}' in {origin}"))),
            }
        };
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            for (k, v) in parse_file(&text)? {
                set(&k, &v, "config file")?;
            }
        }
        for (k, v) in flags {
            set(k, v, "flags")?;
        }
        let ctx = Ctx { values };
        ctx.seed()?;
        match ctx.str("timing")? {
            "on" | "off" => {}
            other => return Err(CliError::Config(format!("timing must be on or off, got '{other}'"))),
        }
        Ok(ctx)
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn str(&self, k: &str) -> Result<&str, CliError> {
        self.values
            .get(k)
            .map(String::as_str)
            .ok_or_else(|| CliError::Config(format!("missing key '{k}'")))
    }

    fn parse<T: std::str::FromStr>(&self, k: &str, what: &str) -> Result<T, CliError> {
        let s = self.str(k)?;
        s.parse().map_err(|_| CliError::Config(format!("{k} = '{s}' is not {what}")))
    }

    pub fn f64(&self, k: &str) -> Result<f64, CliError> {
        let x: f64 = self.parse(k, "a number")?;
        if x.is_nan() {
            return Err(CliError::Config(format!("{k} must not be NaN")));
        }
        Ok(x)
    }

    pub fn positive(&self, k: &str) -> Result<f64, CliError> {
        let x = self.f64(k)?;
        if !(x > 0.0) {
            return Err(CliError::Config(format!("{k} must be positive, got {x}")));
        }
        Ok(x)
    }

    pub fn usize(&self, k: &str) -> Result<usize, CliError> {
        self.parse(k, "a non-negative integer")
    }

    pub fn u32(&self, k: &str) -> Result<u32, CliError> {
        self.parse(k, "a non-negative integer")
    }

    pub fn u64(&self, k: &str) -> Result<u64, CliError> {
        self.parse(k, "a non-negative integer")
    }

    pub fn list(&self, k: &str) -> Result<Vec<f64>, CliError> {
        self.str(k)?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| !x.is_nan())
                    .ok_or_else(|| CliError::Config(format!("{k}: '{s}' is not a number")))
            })
            .collect()
    }

    pub fn choice<'a>(&'a self, k: &str, allowed: &[&str]) -> Result<&'a str, CliError> {
        let s = self.str(k)?;
        if allowed.contains(&s) {
            Ok(s)
        } else {
            Err(CliError::Config(format!("{k} must be one of {allowed:?}, got '{s}'")))
        }
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.u64("seed")
    }

    pub fn rng(&self) -> Result<SeededRng, CliError> {
        Ok(random::rng(self.seed()?))
    }

    pub fn timing(&self) -> bool {
        self.values.get("timing").map(String::as_str) == Some("on")
    }

    pub fn out(&self) -> Option<&str> {
        self.values.get("out").map(String::as_str).filter(|s| !s.is_empty())
    }

    /// Opens the `input` file; an empty path is a config error.
    pub fn input(&self) -> Result<File, CliError> {
        let path = self.str("input")?;
        if path.is_empty() {
            return Err(CliError::Config("family=file needs --input".into()));
        }
        File::open(path).map_err(|e| CliError::Config(format!("cannot open {path}: {e}")))
    }
}
