//! Simulation hyperparameters and their `key = value` text form.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::physics::positive_finite;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub initial_bid: i64,
    pub initial_spread: i64,
    /// Agent mass hyperparameter `m`.
    pub mass: f64,
    /// Kernel bandwidth `h`.
    pub smoothing_length: f64,
    pub collision_probability: f64,
    pub steps: usize,
    pub seed: u64,
    pub smoothing_window: usize,
    pub viscosity_clamp: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            initial_bid: 3681,
            initial_spread: 1,
            mass: 2000.0,
            smoothing_length: 10.0,
            collision_probability: 0.99,
            steps: 450,
            seed: 0,
            smoothing_window: 20,
            viscosity_clamp: 2.0,
        }
    }
}

/// Accepted keys, in the order they are written.
pub const KEYS: [&str; 9] = [
    "initial_bid",
    "initial_spread",
    "mass",
    "smoothing_length",
    "collision_probability",
    "steps",
    "seed",
    "smoothing_window",
    "viscosity_clamp",
];

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_bid < 1 {
            return Err(Error::invalid("initial_bid", "must be at least 1"));
        }
        if self.initial_spread < 1 {
            return Err(Error::invalid("initial_spread", "must be at least 1"));
        }
        if !positive_finite(self.mass) {
            return Err(Error::invalid("mass", "must be positive and finite"));
        }
        if !positive_finite(self.smoothing_length) {
            return Err(Error::invalid(
                "smoothing_length",
                "must be positive and finite",
            ));
        }
        if !(0.0..=1.0).contains(&self.collision_probability) {
            return Err(Error::invalid(
                "collision_probability",
                "must lie in [0, 1]",
            ));
        }
        if self.steps < 1 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if self.smoothing_window < 1 {
            return Err(Error::invalid("smoothing_window", "must be at least 1"));
        }
        if !(self.viscosity_clamp >= 1.0 && self.viscosity_clamp.is_finite()) {
            return Err(Error::invalid(
                "viscosity_clamp",
                "must be finite and at least 1",
            ));
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    /// The result is validated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = SimConfig::default();
        config.apply_text(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Applies `key = value` lines without validating the result.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::MalformedLine {
                    line,
                    text: raw.to_string(),
                })?;
            self.set(key.trim(), value.trim(), line)?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
            value.parse().map_err(|_| Error::Unparsable {
                key: key.to_string(),
                line,
                value: value.to_string(),
            })
        }
        match key {
            "initial_bid" => self.initial_bid = parse(key, value, line)?,
            "initial_spread" => self.initial_spread = parse(key, value, line)?,
            "mass" => self.mass = parse(key, value, line)?,
            "smoothing_length" => self.smoothing_length = parse(key, value, line)?,
            "collision_probability" => self.collision_probability = parse(key, value, line)?,
            "steps" => self.steps = parse(key, value, line)?,
            "seed" => self.seed = parse(key, value, line)?,
            "smoothing_window" => self.smoothing_window = parse(key, value, line)?,
            "viscosity_clamp" => self.viscosity_clamp = parse(key, value, line)?,
            _ => {
                return Err(Error::UnknownKey {
                    key: key.to_string(),
                    line,
                })
            }
        }
        Ok(())
    }

    /// `key = value` lines that [`SimConfig::parse`] reads back unchanged.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    pub fn entries(&self) -> [(&'static str, String); 9] {
        [
            (KEYS[0], self.initial_bid.to_string()),
            (KEYS[1], self.initial_spread.to_string()),
            (KEYS[2], self.mass.to_string()),
            (KEYS[3], self.smoothing_length.to_string()),
            (KEYS[4], self.collision_probability.to_string()),
            (KEYS[5], self.steps.to_string()),
            (KEYS[6], self.seed.to_string()),
            (KEYS[7], self.smoothing_window.to_string()),
            (KEYS[8], self.viscosity_clamp.to_string()),
        ]
    }
}
