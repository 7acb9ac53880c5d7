//! Monte-Carlo campaigns at fixed error rates or along a distance grid.

use anyhow::{anyhow, ensure};

use thz_fec_core::link::{self, snr_db};
use thz_fec_core::mdpc::DEFAULT_MAX_ITER;
use thz_fec_core::sim::{CampaignStats, TrialConfig, CHUNK_BLOCKS, RNG_NAME};

use crate::campaign::{analytic, run_parallel, Oracle};
use crate::code::CodeSpec;
use crate::config::Setup;
use crate::sweep::Grid;
use crate::table::{fmt_f64, fmt_opt, Table};

/// Where the channel bit error rates come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Operating {
    Rates { p_main: f64, p_aux: f64 },
    Distances { setup: Setup, grid: Grid, main: String, aux: String, d_aux: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub code: CodeSpec,
    pub blocks: u64,
    pub seed: u64,
    pub max_iter: usize,
}

impl SimulateOptions {
    pub fn new(code: CodeSpec, blocks: u64, seed: u64) -> Self {
        Self { code, blocks, seed, max_iter: DEFAULT_MAX_ITER }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    pub d_main: Option<f64>,
    pub d_aux: Option<f64>,
    pub p_main: f64,
    pub p_aux: f64,
    pub stats: CampaignStats,
    pub oracle_block_error: f64,
    pub oracle_kind: &'static str,
    pub analytic_residual_ber: f64,
    pub analytic_block_error: f64,
}

pub const SIMULATE_HEADER: [&str; 20] = [
    "d_main_m",
    "d_aux_m",
    "p_main",
    "p_aux",
    "code",
    "k_bits",
    "r_bits",
    "t",
    "blocks",
    "residual_ber",
    "residual_ber_se",
    "block_error_rate",
    "block_error_rate_se",
    "corrected_blocks",
    "failed_blocks",
    "decode_failures",
    "bit_errors",
    "oracle_block_error",
    "oracle_kind",
    "analytic_block_error",
];

/// Every point uses the same seed, so neighbouring points share their random
/// data and noise draws.
pub fn simulate_rows(op: &Operating, opts: &SimulateOptions) -> anyhow::Result<Vec<SimRow>> {
    ensure!(opts.blocks >= 1, "blocks must be at least 1");
    let codec = opts.code.build()?;
    let oracle = Oracle::new(&codec, opts.max_iter);
    let dims = codec.dims();

    let points: Vec<(Option<f64>, Option<f64>, f64, f64)> = match op {
        Operating::Rates { p_main, p_aux } => vec![(None, None, *p_main, *p_aux)],
        Operating::Distances { setup, grid, main, aux, d_aux } => {
            let find = |label: &str| {
                setup
                    .system
                    .channel(label)
                    .ok_or_else(|| anyhow!("system '{}' has no channel '{label}'", setup.system.label))
            };
            let (main, aux) = (find(main)?, find(aux)?);
            if let Some(d) = d_aux {
                ensure!(d.is_finite() && *d > 0.0, "d_aux must be positive and finite, got {d}");
            }
            setup.budget.validate()?;
            let mut pts = Vec::new();
            for d in grid.points()? {
                let da = d_aux.unwrap_or(d);
                let pm = link::ber(main.modulation, snr_db(main, &setup.budget, d)?);
                let pa = link::ber(aux.modulation, snr_db(aux, &setup.budget, da)?);
                pts.push((Some(d), Some(da), pm, pa));
            }
            pts
        }
    };

    points
        .into_iter()
        .map(|(d_main, d_aux, p_main, p_aux)| {
            let mut cfg = TrialConfig::new(codec.clone(), p_main, p_aux, opts.blocks, opts.seed);
            cfg.max_iter = opts.max_iter;
            let stats = run_parallel(&cfg)?;
            let est = analytic(&dims, p_main, p_aux)?;
            Ok(SimRow {
                d_main,
                d_aux,
                p_main,
                p_aux,
                stats,
                oracle_block_error: oracle.block_error(p_main, p_aux)?,
                oracle_kind: oracle.kind().name(),
                analytic_residual_ber: est.p_re,
                analytic_block_error: est.p_b,
            })
        })
        .collect()
}

pub fn simulate(op: &Operating, opts: &SimulateOptions) -> anyhow::Result<Table> {
    let rows = simulate_rows(op, opts)?;
    let codec = opts.code.build()?;
    let dims = codec.dims();
    let mut table = Table::new(&SIMULATE_HEADER);
    table
        .meta("command", "simulate")
        .meta("version", env!("CARGO_PKG_VERSION"))
        .meta("code", format!("{} k_bits={} r_bits={} t={}", codec.label(), dims.k_bits, dims.r_bits, dims.t))
        .meta("seed", opts.seed)
        .meta("rng", RNG_NAME)
        .meta("chunk_blocks", CHUNK_BLOCKS)
        .meta("blocks", opts.blocks)
        .meta("max_iter", opts.max_iter);
    match op {
        Operating::Rates { .. } => table.meta("source", "fixed bit error rates"),
        Operating::Distances { setup, grid, main, aux, .. } => table
            .meta("source", "link budget")
            .meta("system", &setup.system.label)
            .meta("main", main)
            .meta("aux", aux)
            .meta("grid", format!("d_min={} d_max={} d_step={}", grid.d_min, grid.d_max, grid.d_step)),
    };
    for r in &rows {
        let s = &r.stats;
        table.rows.push(vec![
            fmt_opt(r.d_main),
            fmt_opt(r.d_aux),
            fmt_f64(r.p_main),
            fmt_f64(r.p_aux),
            codec.label(),
            dims.k_bits.to_string(),
            dims.r_bits.to_string(),
            dims.t.to_string(),
            s.blocks.to_string(),
            fmt_f64(s.residual_ber),
            fmt_f64(s.residual_ber_se),
            fmt_f64(s.block_error_rate),
            fmt_f64(s.block_error_rate_se),
            s.corrected_blocks.to_string(),
            s.failed_blocks.to_string(),
            s.decode_failures.to_string(),
            s.bit_errors.to_string(),
            fmt_f64(r.oracle_block_error),
            r.oracle_kind.into(),
            fmt_f64(r.analytic_block_error),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_free_channels_give_zeros() {
        let opts = SimulateOptions::new("mdpc:2:2".parse().unwrap(), 100, 1);
        let rows = simulate_rows(&Operating::Rates { p_main: 0.0, p_aux: 0.0 }, &opts).unwrap();
        let s = &rows[0].stats;
        assert_eq!((s.blocks, s.failed_blocks, s.bit_errors, s.corrected_blocks), (100, 0, 0, 100));
        assert_eq!(s.residual_ber, 0.0);
        assert_eq!(rows[0].oracle_block_error, 0.0);
        assert_eq!(rows[0].oracle_kind, "mdpc_enumeration");
    }

    #[test]
    fn invalid_configurations() {
        let rates = Operating::Rates { p_main: 0.0, p_aux: 0.0 };
        assert!(simulate_rows(&rates, &SimulateOptions::new("mdpc:2:2".parse().unwrap(), 0, 1)).is_err());
        assert!(simulate_rows(&rates, &SimulateOptions::new("rs:8:2".parse().unwrap(), 10, 1)).is_err());
        let bad = Operating::Rates { p_main: 1.5, p_aux: 0.0 };
        assert!(simulate_rows(&bad, &SimulateOptions::new("mdpc:2:2".parse().unwrap(), 10, 1)).is_err());
    }

    #[test]
    fn distance_mode_has_one_row_per_point() {
        let op = Operating::Distances {
            setup: Setup::preset("main-aux").unwrap(),
            grid: Grid { d_min: 15.0, d_max: 20.0, d_step: 2.5 },
            main: "main".into(),
            aux: "aux".into(),
            d_aux: Some(1.0),
        };
        let rows = simulate_rows(&op, &SimulateOptions::new("rs:8:28:2".parse().unwrap(), 500, 3)).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.windows(2).all(|w| w[0].p_main <= w[1].p_main));
        assert!(rows.iter().all(|r| r.d_aux == Some(1.0)));
    }
}
