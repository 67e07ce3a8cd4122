//! `key=value` run configuration, overridable from the command line.

use std::collections::BTreeMap;
use std::fmt;

/// Mistakes in how the tool was invoked, as opposed to bad input data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fps: f64,
    pub t: usize,
    pub tau: usize,
    pub kappa: f64,
    pub clean: bool,
    pub ignore_background: bool,
    pub softmax: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            fps: 15.0,
            t: 8,
            tau: 8,
            kappa: 1.4,
            clean: true,
            ignore_background: true,
            softmax: false,
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, anyhow::Error> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, anyhow::Error>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e| usage(format!("{key}: cannot parse {v:?}: {e}")))
}

impl RunConfig {
    /// Applies `key=value` lines over the defaults. Blank lines and `#`
    /// comments are skipped; unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self, anyhow::Error> {
        let mut seen = BTreeMap::new();
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if seen.insert(k.to_string(), n + 1).is_some() {
                return Err(usage(format!("config line {}: duplicate key {k}", n + 1)));
            }
            match k {
                "fps" => cfg.fps = parse_num(k, v)?,
                "t" => cfg.t = parse_num(k, v)?,
                "tau" => cfg.tau = parse_num(k, v)?,
                "kappa" => cfg.kappa = parse_num(k, v)?,
                "clean" => cfg.clean = parse_bool(k, v)?,
                "ignore_background" => cfg.ignore_background = parse_bool(k, v)?,
                "consensus" => {
                    cfg.softmax = match v {
                        "logits" => false,
                        "softmax" => true,
                        _ => return Err(usage(format!("consensus: expected logits or softmax, got {v:?}"))),
                    }
                }
                _ => return Err(usage(format!("config line {}: unknown key {k}", n + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), anyhow::Error> {
        if self.t == 0 || self.tau == 0 {
            return Err(usage(format!(
                "t and tau must be >= 1 (t={}, tau={})",
                self.t, self.tau
            )));
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(usage(format!("fps must be > 0, got {}", self.fps)));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(usage(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        Ok(())
    }
}
