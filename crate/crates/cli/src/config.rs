//! System selection: a preset name or a flat `key = value` file.
//!
//! ```text
//! # comments and blank lines are ignored
//! preset = main-aux            # starting point, default main-aux
//! label = lab-bench
//! total_power_dbm = -8         # re-split across channels by bandwidth
//! tx_gain_dbi = 26.4
//! rx_gain_dbi = 26.4
//! noise_temp_k = 290
//! noise_figure_db = 10
//! atten_db_per_m = 0
//! aux.center_freq_hz = 297.00e9
//! aux.tx_power_dbm = -12       # per-channel keys apply after the split
//! main.modulation = bpsk
//! ```
//!
//! Per-channel fields: `center_freq_hz`, `bandwidth_hz`, `nyquist_bw_hz`,
//! `modulation`, `tx_power_dbm`, `roll_off`, `label`. Keys may appear in any
//! order; `preset` and `total_power_dbm` are applied first.

use std::fs;
use std::path::Path;

use thz_fec_core::link::{system_preset, LinkBudget, Modulation, System, SYSTEM_PRESETS};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown system preset '{0}' (known: {known})", known = SYSTEM_PRESETS.join(", "))]
    Preset(String),
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Link(#[from] thz_fec_core::link::LinkError),
}

/// A system and the link budget its channels share.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub system: System,
    pub budget: LinkBudget,
}

impl Setup {
    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        let system = system_preset(name).ok_or_else(|| ConfigError::Preset(name.into()))?;
        Ok(Self { system, budget: LinkBudget::default() })
    }

    /// A preset name, or else a path to a config file.
    pub fn resolve(arg: &str) -> Result<Self, ConfigError> {
        if SYSTEM_PRESETS.contains(&arg) {
            return Self::preset(arg);
        }
        let path = Path::new(arg);
        if !path.exists() {
            return Err(ConfigError::Preset(arg.into()));
        }
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: arg.into(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(syntax(i + 1, format!("expected 'key = value', got '{line}'")));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(syntax(i + 1, "empty key or value".into()));
            }
            if entries.iter().any(|(_, k, _): &(usize, &str, &str)| *k == key) {
                return Err(syntax(i + 1, format!("duplicate key '{key}'")));
            }
            entries.push((i + 1, key, value));
        }

        let preset = entries.iter().find(|e| e.1 == "preset").map_or("main-aux", |e| e.2);
        let mut setup = Self::preset(preset).map_err(|e| match entries.iter().find(|e| e.1 == "preset") {
            Some(&(line, ..)) => syntax(line, e.to_string()),
            None => e,
        })?;
        if let Some(&(line, _, value)) = entries.iter().find(|e| e.1 == "total_power_dbm") {
            let total = number(line, value)?;
            let s = &setup.system;
            setup.system = System::with_total_power(&s.label, s.channels.clone(), total);
        }

        for &(line, key, value) in &entries {
            let budget = &mut setup.budget;
            match key {
                "preset" | "total_power_dbm" => {}
                "label" => setup.system.label = value.into(),
                "tx_gain_dbi" => budget.tx_gain_dbi = number(line, value)?,
                "rx_gain_dbi" => budget.rx_gain_dbi = number(line, value)?,
                "noise_temp_k" => budget.noise_temp_k = number(line, value)?,
                "noise_figure_db" => budget.noise_figure_db = number(line, value)?,
                "atten_db_per_m" => budget.atten_db_per_m = number(line, value)?,
                _ => {
                    let Some((label, field)) = key.rsplit_once('.') else {
                        return Err(syntax(line, format!("unknown key '{key}'")));
                    };
                    let Some(ch) = setup.system.channels.iter_mut().find(|c| c.label == label) else {
                        return Err(syntax(line, format!("no channel labelled '{label}'")));
                    };
                    match field {
                        "center_freq_hz" => ch.center_freq_hz = number(line, value)?,
                        "bandwidth_hz" => ch.bandwidth_hz = number(line, value)?,
                        "nyquist_bw_hz" => ch.nyquist_bw_hz = number(line, value)?,
                        "tx_power_dbm" => ch.tx_power_dbm = number(line, value)?,
                        "roll_off" => ch.roll_off = number(line, value)?,
                        "modulation" => {
                            ch.modulation = value.parse::<Modulation>().map_err(|e| syntax(line, e.to_string()))?
                        }
                        "label" => ch.label = value.into(),
                        _ => return Err(syntax(line, format!("unknown channel field '{field}'"))),
                    }
                }
            }
        }

        let labels: Vec<&str> = setup.system.channels.iter().map(|c| c.label.as_str()).collect();
        if labels.iter().enumerate().any(|(i, l)| labels[..i].contains(l)) {
            return Err(syntax(0, "channel labels must be unique".into()));
        }
        setup.system.validate()?;
        setup.budget.validate()?;
        Ok(setup)
    }
}

fn syntax(line: usize, reason: String) -> ConfigError {
    ConfigError::Syntax { line, reason }
}

fn number(line: usize, value: &str) -> Result<f64, ConfigError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(syntax(line, format!("'{value}' is not a finite number"))),
    }
}
