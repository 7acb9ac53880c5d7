//! Distance grids and the uncoded per-channel link sweep.

use thz_fec_core::link::{self, fspl_db, received_power_dbm, snr_db};

use crate::config::Setup;
use crate::table::{fmt_f64, Table};

const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub d_min: f64,
    pub d_max: f64,
    pub d_step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self { d_min: 0.5, d_max: 20.0, d_step: 0.5 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("d_min must be positive and finite, got {0}")]
    Min(f64),
    #[error("d_step must be positive and finite, got {0}")]
    Step(f64),
    #[error("d_max {max} is below d_min {min}")]
    Max { min: f64, max: f64 },
    #[error("grid has more than {MAX_POINTS} points")]
    TooLarge,
}

impl Grid {
    /// `d_min + i·d_step` for every `i` that stays within `d_max` (plus a
    /// rounding allowance of 1e-9 steps).
    pub fn points(&self) -> Result<Vec<f64>, GridError> {
        let Grid { d_min, d_max, d_step } = *self;
        if !(d_min.is_finite() && d_min > 0.0) {
            return Err(GridError::Min(d_min));
        }
        if !(d_step.is_finite() && d_step > 0.0) {
            return Err(GridError::Step(d_step));
        }
        if !(d_max.is_finite() && d_max >= d_min) {
            return Err(GridError::Max { min: d_min, max: d_max });
        }
        let span = ((d_max - d_min) / d_step + 1e-9).floor();
        if span >= MAX_POINTS as f64 {
            return Err(GridError::TooLarge);
        }
        Ok((0..=span as usize).map(|i| d_min + i as f64 * d_step).collect())
    }
}

pub const LINK_HEADER: [&str; 13] = [
    "distance_m",
    "channel",
    "modulation",
    "center_freq_hz",
    "nyquist_bw_hz",
    "tx_power_dbm",
    "fspl_db",
    "rx_power_dbm",
    "noise_dbm",
    "snr_db",
    "ber",
    "data_rate_bps",
    "system",
];

/// One row per (distance, channel), distances outermost.
pub fn link_sweep(setup: &Setup, grid: &Grid) -> anyhow::Result<Table> {
    let Setup { system, budget } = setup;
    system.validate()?;
    budget.validate()?;
    let mut table = Table::new(&LINK_HEADER);
    table
        .meta("command", "link-sweep")
        .meta("system", &system.label)
        .meta("channels", system.channels.len())
        .meta(
            "budget",
            format!(
                "tx_gain_dbi={} rx_gain_dbi={} noise_temp_k={} noise_figure_db={} atten_db_per_m={}",
                budget.tx_gain_dbi,
                budget.rx_gain_dbi,
                budget.noise_temp_k,
                budget.noise_figure_db,
                budget.atten_db_per_m
            ),
        )
        .meta("grid", format!("d_min={} d_max={} d_step={}", grid.d_min, grid.d_max, grid.d_step));
    for d in grid.points()? {
        for ch in &system.channels {
            let snr = snr_db(ch, budget, d)?;
            table.rows.push(vec![
                fmt_f64(d),
                ch.label.clone(),
                ch.modulation.to_string(),
                fmt_f64(ch.center_freq_hz),
                fmt_f64(ch.nyquist_bw_hz),
                fmt_f64(ch.tx_power_dbm),
                fmt_f64(fspl_db(d, ch.center_freq_hz)?),
                fmt_f64(received_power_dbm(ch, budget, d)?),
                fmt_f64(budget.noise_power_dbm(ch.nyquist_bw_hz)),
                fmt_f64(snr),
                fmt_f64(link::ber(ch.modulation, snr)),
                fmt_f64(link::data_rate(ch)),
                system.label.clone(),
            ]);
        }
    }
    Ok(table)
}
