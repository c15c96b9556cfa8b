use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bayesseg::{DEFAULT_K_MAX, DEFAULT_THETA0};
use crate::clustering::DEFAULT_DEPTH;
use crate::metrics::MetricUnit;
use crate::segmentation::SegMethod;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

/// How K and candidates are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorMode {
    /// Minimize `pk + wd` against the reference. Tunes on the evaluation
    /// target, so results are reported as ORACLE.
    #[default]
    Oracle,
    /// Maximize the lexical log likelihood; needs no reference.
    Likelihood,
}

impl SelectorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::Likelihood => "likelihood",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "oracle" => Some(Self::Oracle),
            "likelihood" => Some(Self::Likelihood),
            _ => None,
        }
    }
}

impl fmt::Display for SelectorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which methods a run should emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    #[default]
    All,
    #[serde(untagged)]
    Only(SegMethod),
}

impl MethodChoice {
    pub fn parse(s: &str) -> Option<Self> {
        if s == "all" {
            return Some(Self::All);
        }
        SegMethod::parse(s)
            .filter(|m| *m != SegMethod::Reference)
            .map(Self::Only)
    }

    pub fn methods(self) -> Vec<SegMethod> {
        match self {
            Self::All => SegMethod::PIPELINE.to_vec(),
            Self::Only(m) => vec![m],
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::Only(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub method: MethodChoice,
    pub selector: SelectorMode,
    pub theta0: f64,
    pub k_max: usize,
    pub k_init: usize,
    pub inconsistency_depth: usize,
    pub metric_unit: MetricUnit,
    pub stopwords: bool,
    /// Fixed inconsistency cutoff; `None` uses the floor of the largest coefficient.
    pub cutoff: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: MethodChoice::All,
            selector: SelectorMode::Oracle,
            theta0: DEFAULT_THETA0,
            k_max: DEFAULT_K_MAX,
            k_init: 10,
            inconsistency_depth: DEFAULT_DEPTH,
            metric_unit: MetricUnit::Turn,
            stopwords: true,
            cutoff: None,
        }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "on" | "true" | "yes" | "1" => Some(true),
        "off" | "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

impl PipelineConfig {
    /// Parses `key = value` lines over the defaults. Blank lines and `#`
    /// comments are ignored; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError { line: n + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            cfg.set(key.trim(), value.trim()).map_err(err)?;
        }
        cfg.validate().map_err(|message| ConfigError { line: 0, message })?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = || format!("invalid value `{value}` for `{key}`");
        match key {
            "method" => self.method = MethodChoice::parse(value).ok_or_else(bad)?,
            "selector" => self.selector = SelectorMode::parse(value).ok_or_else(bad)?,
            "theta0" => self.theta0 = value.parse().map_err(|_| bad())?,
            "k_max" => self.k_max = value.parse().map_err(|_| bad())?,
            "k_init" => self.k_init = value.parse().map_err(|_| bad())?,
            "inconsistency_depth" => self.inconsistency_depth = value.parse().map_err(|_| bad())?,
            "metric_unit" => self.metric_unit = MetricUnit::parse(value).ok_or_else(bad)?,
            "stopwords" => self.stopwords = parse_bool(value).ok_or_else(bad)?,
            "cutoff" => {
                self.cutoff = if value == "auto" {
                    None
                } else {
                    Some(value.parse().map_err(|_| bad())?)
                }
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.theta0 > 0.0 && self.theta0.is_finite()) {
            return Err(format!("theta0 must be positive, got {}", self.theta0));
        }
        if self.k_max < 2 {
            return Err(format!("k_max must be at least 2, got {}", self.k_max));
        }
        if !(1 < self.k_init && self.k_init < 20) {
            return Err(format!("k_init must satisfy 1 < k_init < 20, got {}", self.k_init));
        }
        if self.inconsistency_depth == 0 {
            return Err("inconsistency_depth must be positive".into());
        }
        if matches!(self.cutoff, Some(c) if !c.is_finite()) {
            return Err("cutoff must be finite".into());
        }
        Ok(())
    }

    /// The config as `key = value` text that [`PipelineConfig::parse`] reads back.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "method = {}\nselector = {}\ntheta0 = {}\nk_max = {}\nk_init = {}\ninconsistency_depth = {}\nmetric_unit = {}\nstopwords = {}\n",
            self.method,
            self.selector,
            self.theta0,
            self.k_max,
            self.k_init,
            self.inconsistency_depth,
            match self.metric_unit {
                MetricUnit::Turn => "turn",
                MetricUnit::Word => "word",
            },
            if self.stopwords { "on" } else { "off" },
        );
        if let Some(c) = self.cutoff {
            s.push_str(&format!("cutoff = {c}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_overrides_defaults() {
        let cfg = PipelineConfig::parse(
            "# run settings\nmethod = hybrid\nselector = likelihood\n\ntheta0 = 0.5  # smoother\nk_max=12\nstopwords = off\nmetric_unit = word\n",
        )
        .unwrap();
        assert_eq!(cfg.method, MethodChoice::Only(SegMethod::Hybrid));
        assert_eq!(cfg.selector, SelectorMode::Likelihood);
        assert_eq!(cfg.theta0, 0.5);
        assert_eq!(cfg.k_max, 12);
        assert_eq!(cfg.k_init, 10);
        assert!(!cfg.stopwords);
        assert_eq!(cfg.metric_unit, MetricUnit::Word);
    }

    #[test]
    fn errors_name_the_line() {
        let e = PipelineConfig::parse("method = all\nbogus = 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("bogus"));
        assert_eq!(PipelineConfig::parse("k_init\n").unwrap_err().line, 1);
        assert!(PipelineConfig::parse("method = reference").is_err());
        assert!(PipelineConfig::parse("k_init = 20").is_err());
        assert!(PipelineConfig::parse("k_init = 1").is_err());
        assert!(PipelineConfig::parse("theta0 = 0").is_err());
    }

    #[test]
    fn text_round_trip() {
        let cfg = PipelineConfig {
            cutoff: Some(1.5),
            method: MethodChoice::Only(SegMethod::Kmedoids),
            ..PipelineConfig::default()
        };
        assert_eq!(PipelineConfig::parse(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(PipelineConfig::parse(&PipelineConfig::default().to_text()).unwrap(), PipelineConfig::default());
    }
}
