//! Run configuration: flags merged over an optional key=value file.

use crate::Failure;
use ecp_core::coulomb::{AnisotropyMode, Order};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Inverse temperature used when a curve asks for zero temperature.
pub const ZERO_TEMPERATURE_BETA: f64 = 1e3;

pub const DEFAULT_PRECISION: usize = 10;

/// Raw `key = value` settings; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    /// Reads a config file: one `key = value` per line, `#` starts a comment.
    pub fn from_file(path: &Path, allowed: &[&str]) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text, allowed)
    }

    pub fn parse(text: &str, allowed: &[&str]) -> Result<Self, Failure> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("config line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('_', "-");
            if !allowed.contains(&key.as_str()) {
                return Err(Failure::Usage(format!("config line {}: unknown key '{key}'", i + 1)));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Settings(map))
    }

    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str, Failure> {
        self.get(key).ok_or_else(|| Failure::Usage(format!("missing required setting --{key}")))
    }
}

/// Requested temperature of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSpec {
    Finite(f64),
    /// Zero temperature, approximated by [`ZERO_TEMPERATURE_BETA`].
    Zero,
}

impl BetaSpec {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        if s.eq_ignore_ascii_case("zero") {
            return Ok(BetaSpec::Zero);
        }
        match s.parse::<f64>() {
            Ok(b) if b > 0.0 && b.is_finite() => Ok(BetaSpec::Finite(b)),
            _ => Err(Failure::Usage(format!("beta must be a positive number or 'zero', got '{s}'"))),
        }
    }

    pub fn effective(self) -> f64 {
        match self {
            BetaSpec::Finite(b) => b,
            BetaSpec::Zero => ZERO_TEMPERATURE_BETA,
        }
    }
}

/// `start:stop:steps`, evenly spaced and inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        let bad = |why: &str| Failure::Usage(format!("invalid r0 grid '{s}': {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, steps] = parts[..] else {
            return Err(bad("expected start:stop:steps"));
        };
        let start: f64 = start.trim().parse().map_err(|_| bad("start is not a number"))?;
        let stop: f64 = stop.trim().parse().map_err(|_| bad("stop is not a number"))?;
        let steps: usize = steps.trim().parse().map_err(|_| bad("steps is not a non-negative integer"))?;
        if steps == 0 {
            return Err(bad("steps must be at least 1"));
        }
        if !(start >= 0.0 && start.is_finite() && stop.is_finite()) {
            return Err(bad("start must be non-negative and both ends finite"));
        }
        if steps > 1 && !(stop > start) {
            return Err(bad("stop must exceed start when steps > 1"));
        }
        Ok(Grid { start, stop, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + (self.stop - self.start) * i as f64 / n).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Failure::Usage(format!("format must be csv or json, got '{s}'"))),
        }
    }
}

fn parse_order(s: &str) -> Result<Order, Failure> {
    match s {
        "1" => Ok(Order::First),
        "2" => Ok(Order::Second),
        _ => Err(Failure::Usage(format!("order must be 1 or 2, got '{s}'"))),
    }
}

fn parse_mode(s: &str) -> Result<AnisotropyMode, Failure> {
    match s {
        "iso" => Ok(AnisotropyMode::Isotropic),
        "aniso" => Ok(AnisotropyMode::Anisotropic),
        _ => Err(Failure::Usage(format!("mode must be iso or aniso, got '{s}'"))),
    }
}

fn parse_precision(s: Option<&str>) -> Result<usize, Failure> {
    match s {
        None => Ok(DEFAULT_PRECISION),
        Some(s) => match s.parse::<usize>() {
            Ok(p) if (1..=17).contains(&p) => Ok(p),
            _ => Err(Failure::Usage(format!("precision must be an integer in 1..=17, got '{s}'"))),
        },
    }
}

pub const CURVE_KEYS: &[&str] = &["order", "beta", "r0", "mode", "out", "format", "precision"];
pub const TABLE_KEYS: &[&str] = &["out", "precision"];

#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    pub order: Order,
    pub beta: BetaSpec,
    pub grid: Grid,
    pub mode: AnisotropyMode,
    pub out: PathBuf,
    pub format: Format,
    pub precision: usize,
}

impl CurveConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, Failure> {
        Ok(CurveConfig {
            order: parse_order(s.required("order")?)?,
            beta: BetaSpec::parse(s.required("beta")?)?,
            grid: Grid::parse(s.required("r0")?)?,
            mode: parse_mode(s.get("mode").unwrap_or("iso"))?,
            out: PathBuf::from(s.required("out")?),
            format: Format::parse(s.get("format").unwrap_or("csv"))?,
            precision: parse_precision(s.get("precision"))?,
        })
    }
}

/// Output settings of the ground-state and constants tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TableConfig {
    pub out: PathBuf,
    pub precision: usize,
}

impl TableConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, Failure> {
        Ok(TableConfig { out: PathBuf::from(s.required("out")?), precision: parse_precision(s.get("precision"))? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = Grid::parse("0.5:5:10").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 10);
        assert_eq!(p[0], 0.5);
        assert_eq!(p[9], 5.0);
        assert_eq!(Grid::parse("2:2:1").unwrap().points(), vec![2.0]);
    }

    #[test]
    fn grid_rejects_bad_input() {
        for s in ["0:1:0", "-1:1:3", "1:0:3", "1:1:2", "0:1", "a:1:2", "0:1:-2"] {
            assert!(matches!(Grid::parse(s), Err(Failure::Usage(_))), "{s}");
        }
    }

    #[test]
    fn beta_accepts_zero_proxy() {
        assert_eq!(BetaSpec::parse("zero").unwrap().effective(), 1e3);
        assert_eq!(BetaSpec::parse("10").unwrap(), BetaSpec::Finite(10.0));
        assert!(BetaSpec::parse("0").is_err());
        assert!(BetaSpec::parse("inf").is_err());
    }

    #[test]
    fn file_settings_are_overridden_by_flags() {
        let mut s =
            Settings::parse("order = 1\n# comment\nbeta=10 # trailing\nr0 = 0:1:3\nout = a.csv\n", CURVE_KEYS).unwrap();
        s.set("order", Some("2".into()));
        s.set("beta", None);
        let cfg = CurveConfig::from_settings(&s).unwrap();
        assert_eq!(cfg.order, Order::Second);
        assert_eq!(cfg.beta, BetaSpec::Finite(10.0));
        assert_eq!(cfg.mode, AnisotropyMode::Isotropic);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.precision, DEFAULT_PRECISION);
    }

    #[test]
    fn unknown_and_malformed_lines_are_usage_errors() {
        assert!(matches!(Settings::parse("colour = red", CURVE_KEYS), Err(Failure::Usage(_))));
        assert!(matches!(Settings::parse("order 1", CURVE_KEYS), Err(Failure::Usage(_))));
    }

    #[test]
    fn missing_and_invalid_values() {
        let s = Settings::parse("order = 3\nbeta = 1\nr0 = 0:1:2\nout = x", CURVE_KEYS).unwrap();
        assert!(matches!(CurveConfig::from_settings(&s), Err(Failure::Usage(_))));
        let s = Settings::parse("order = 1\nr0 = 0:1:2\nout = x", CURVE_KEYS).unwrap();
        assert!(matches!(CurveConfig::from_settings(&s), Err(Failure::Usage(m)) if m.contains("beta")));
        assert!(parse_precision(Some("0")).is_err());
        assert!(parse_precision(Some("18")).is_err());
    }
}
