//! Coded two-channel analysis over a distance grid.
//!
//! Data bits ride the `main` channel and parity bits the `aux` channel. Each
//! grid point reports the link state, the code (fixed, or re-selected per
//! point in optimizer mode), the closed-form residual and block error
//! estimates, an independent block error oracle, an optional Monte-Carlo
//! estimate, and goodput under two readings of the goodput formula.

use anyhow::{anyhow, ensure, Context};
use rayon::prelude::*;

use thz_fec_core::analytics::{goodput, optimize_mdpc, optimize_rs, BlockDims, SystemSpec, DEFAULT_M_CAP};
use thz_fec_core::link::{self, snr_db, ChannelConfig};
use thz_fec_core::mdpc::DEFAULT_MAX_ITER;
use thz_fec_core::sim::{TrialConfig, MAX_ENUMERATION_BITS, RNG_NAME};

use crate::campaign::{analytic, run_parallel, Oracle};
use crate::code::{CodeError, CodeSpec};
use crate::config::Setup;
use crate::sweep::Grid;
use crate::table::{fmt_f64, fmt_opt, Table};

/// Auxiliary BER above which the error-free parity channel assumption is
/// flagged.
pub const AUX_BER_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub code: CodeSpec,
    pub optimize: bool,
    pub main: String,
    pub aux: String,
    /// Fixed auxiliary distance; `None` keeps it equal to the main distance.
    pub d_aux: Option<f64>,
    /// Largest MDPC side the optimizer may pick.
    pub m_cap: u64,
    /// Monte-Carlo blocks per point; 0 skips the simulation.
    pub blocks: u64,
    pub seed: u64,
    pub max_iter: usize,
}

impl AnalyzeOptions {
    pub fn new(code: CodeSpec) -> Self {
        Self {
            code,
            optimize: false,
            main: "main".into(),
            aux: "aux".into(),
            d_aux: None,
            m_cap: DEFAULT_M_CAP,
            blocks: 0,
            seed: 1,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub blocks: u64,
    pub residual_ber: f64,
    pub residual_ber_se: f64,
    pub block_error_rate: f64,
    pub block_error_rate_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeRow {
    pub d_main: f64,
    pub d_aux: f64,
    pub snr_main_db: f64,
    pub ber_main: f64,
    pub snr_aux_db: f64,
    pub ber_aux: f64,
    pub code: String,
    /// `m` for MDPC, `k_sym` for RS.
    pub param: u64,
    pub dims: BlockDims,
    pub infeasible: bool,
    pub code_rate: f64,
    pub overhead: f64,
    /// D_main / D_aux.
    pub rate_ratio: f64,
    /// K / R of the code.
    pub kr_ratio: f64,
    pub ser_main: Option<f64>,
    pub p_rs: Option<f64>,
    pub p_re: Option<f64>,
    pub p_b: Option<f64>,
    pub p_b_oracle: Option<f64>,
    pub oracle_kind: &'static str,
    pub mc: Option<McResult>,
    /// R_F · D_main · (1 − BER_main).
    pub goodput_main_bps: f64,
    /// R_F · Σ D_i · (1 − BER_i) over main and aux.
    pub goodput_all_bps: f64,
}

pub const ANALYZE_HEADER: [&str; 36] = [
    "d_main_m",
    "d_aux_m",
    "main_channel",
    "aux_channel",
    "snr_main_db",
    "ber_main",
    "snr_aux_db",
    "ber_aux",
    "aux_ber_warning",
    "code",
    "param",
    "k_bits",
    "r_bits",
    "t",
    "infeasible",
    "code_rate",
    "overhead",
    "rate_ratio",
    "kr_ratio",
    "ser_main",
    "p_rs",
    "p_re",
    "p_b",
    "p_b_oracle",
    "oracle_kind",
    "mc_blocks",
    "mc_residual_ber",
    "mc_residual_ber_se",
    "mc_block_error_rate",
    "mc_block_error_rate_se",
    "goodput_main_bps",
    "goodput_all_bps",
    "data_rate_main_bps",
    "data_rate_aux_bps",
    "system",
    "mode",
];

fn code_label(spec: &CodeSpec, dims: &BlockDims) -> String {
    match *spec {
        CodeSpec::Mdpc { n, m } => format!("mdpc({n}D/{}L)", m.unwrap_or(0)),
        CodeSpec::Rs { s, .. } => format!("rs({},{},s={s})", dims.k_symbols() + dims.r_symbols(), dims.k_symbols()),
    }
}

struct PointEval<'a> {
    setup: &'a Setup,
    opts: &'a AnalyzeOptions,
    main: &'a ChannelConfig,
    aux: &'a ChannelConfig,
    fixed_oracle: Option<Oracle>,
}

impl PointEval<'_> {
    fn point(&self, d_main: f64) -> anyhow::Result<AnalyzeRow> {
        let (opts, budget) = (self.opts, &self.setup.budget);
        let d_aux = opts.d_aux.unwrap_or(d_main);
        let snr_main_db = snr_db(self.main, budget, d_main)?;
        let snr_aux_db = snr_db(self.aux, budget, d_aux)?;
        let ber_main = link::ber(self.main.modulation, snr_main_db);
        let ber_aux = link::ber(self.aux.modulation, snr_aux_db);

        let (spec, dims, infeasible) = if opts.optimize {
            let choice = match opts.code {
                CodeSpec::Mdpc { n, .. } => optimize_mdpc(n, ber_main, opts.m_cap)?,
                CodeSpec::Rs { s, r, .. } => optimize_rs(s, r, ber_main)?,
            };
            (opts.code.with_param(choice.param), choice.dims, !choice.feasible)
        } else {
            (opts.code, opts.code.build()?.dims(), false)
        };
        let param = match spec {
            CodeSpec::Mdpc { m, .. } => m.unwrap_or(0),
            CodeSpec::Rs { k, .. } => k.unwrap_or(0),
        };
        let usable = dims.k_bits > 0;

        let estimates = if usable { Some(analytic(&dims, ber_main, ber_aux)?) } else { None };
        let mut oracle = None;
        let mut mc = None;
        if usable {
            let small = dims.k_bits + dims.r_bits <= MAX_ENUMERATION_BITS as u64;
            let local;
            let o = match &self.fixed_oracle {
                Some(o) => o,
                None => {
                    local = if small { Oracle::new(&spec.build()?, opts.max_iter) } else { Oracle::from_dims(dims) };
                    &local
                }
            };
            oracle = Some((o.block_error(ber_main, ber_aux)?, o.kind().name()));
            if opts.blocks > 0 {
                let mut cfg = TrialConfig::new(spec.build()?, ber_main, ber_aux, opts.blocks, opts.seed);
                cfg.max_iter = opts.max_iter;
                let stats = run_parallel(&cfg)?;
                mc = Some(McResult {
                    blocks: stats.blocks,
                    residual_ber: stats.residual_ber,
                    residual_ber_se: stats.residual_ber_se,
                    block_error_rate: stats.block_error_rate,
                    block_error_rate_se: stats.block_error_rate_se,
                });
            }
        }

        let code_rate = dims.code_rate();
        let (goodput_main_bps, goodput_all_bps) = if code_rate > 0.0 {
            let main_only = SystemSpec::new("main", vec![(self.main.clone(), d_main)], code_rate)?;
            let both = SystemSpec::new("all", vec![(self.main.clone(), d_main), (self.aux.clone(), d_aux)], code_rate)?;
            (goodput(&main_only, &[ber_main])?, goodput(&both, &[ber_main, ber_aux])?)
        } else {
            (0.0, 0.0)
        };

        Ok(AnalyzeRow {
            d_main,
            d_aux,
            snr_main_db,
            ber_main,
            snr_aux_db,
            ber_aux,
            code: code_label(&spec, &dims),
            param,
            dims,
            infeasible,
            code_rate,
            overhead: 1.0 - code_rate,
            rate_ratio: link::data_rate(self.main) / link::data_rate(self.aux),
            kr_ratio: dims.k_bits as f64 / dims.r_bits as f64,
            ser_main: estimates.and_then(|e| e.ser_main),
            p_rs: estimates.and_then(|e| e.p_rs),
            p_re: estimates.map(|e| e.p_re),
            p_b: estimates.map(|e| e.p_b),
            p_b_oracle: oracle.map(|o| o.0),
            oracle_kind: oracle.map_or("", |o| o.1),
            mc,
            goodput_main_bps,
            goodput_all_bps,
        })
    }
}

pub fn analyze_rows(setup: &Setup, grid: &Grid, opts: &AnalyzeOptions) -> anyhow::Result<Vec<AnalyzeRow>> {
    setup.system.validate()?;
    setup.budget.validate()?;
    let find = |label: &str| {
        setup.system.channel(label).ok_or_else(|| {
            let known: Vec<&str> = setup.system.channels.iter().map(|c| c.label.as_str()).collect();
            anyhow!("system '{}' has no channel '{label}' (channels: {})", setup.system.label, known.join(", "))
        })
    };
    let (main, aux) = (find(&opts.main)?, find(&opts.aux)?);
    ensure!(opts.main != opts.aux, "main and aux must be different channels");
    if let Some(d) = opts.d_aux {
        ensure!(d.is_finite() && d > 0.0, "d_aux must be positive and finite, got {d}");
    }
    if opts.optimize {
        ensure!(!opts.code.is_complete(), CodeError::Fixed(opts.code));
        ensure!(opts.m_cap >= 1, "m_cap must be at least 1");
    }
    let fixed_oracle = if opts.optimize {
        None
    } else {
        let codec = opts.code.build()?;
        Some(Oracle::new(&codec, opts.max_iter))
    };
    let ctx = PointEval { setup, opts, main, aux, fixed_oracle };
    grid.points()?.into_par_iter().map(|d| ctx.point(d).with_context(|| format!("at d_main = {d} m"))).collect()
}

/// Rows plus warnings for the error stream.
pub fn analyze(setup: &Setup, grid: &Grid, opts: &AnalyzeOptions) -> anyhow::Result<(Table, Vec<String>)> {
    let rows = analyze_rows(setup, grid, opts)?;
    let mut table = Table::new(&ANALYZE_HEADER);
    table
        .meta("command", "analyze")
        .meta("system", &setup.system.label)
        .meta("main", &opts.main)
        .meta("aux", &opts.aux)
        .meta("code", opts.code)
        .meta("mode", if opts.optimize { "optimize" } else { "fixed" })
        .meta("grid", format!("d_min={} d_max={} d_step={}", grid.d_min, grid.d_max, grid.d_step))
        .meta("d_aux", opts.d_aux.map_or("d_main".into(), |d| d.to_string()));
    if opts.optimize {
        if let CodeSpec::Mdpc { .. } = opts.code {
            table.meta("m_cap", opts.m_cap);
        }
    }
    if opts.blocks > 0 {
        table.meta("blocks", opts.blocks).meta("seed", opts.seed).meta("rng", RNG_NAME).meta("max_iter", opts.max_iter);
    }

    let rate = |label: &str| setup.system.channel(label).map_or(0.0, link::data_rate);
    let (rate_main, rate_aux) = (rate(&opts.main), rate(&opts.aux));
    let mut warned = 0;
    for r in &rows {
        let warn = r.ber_aux > AUX_BER_LIMIT;
        warned += warn as usize;
        let mc = r.mc;
        table.rows.push(vec![
            fmt_f64(r.d_main),
            fmt_f64(r.d_aux),
            opts.main.clone(),
            opts.aux.clone(),
            fmt_f64(r.snr_main_db),
            fmt_f64(r.ber_main),
            fmt_f64(r.snr_aux_db),
            fmt_f64(r.ber_aux),
            warn.to_string(),
            r.code.clone(),
            r.param.to_string(),
            r.dims.k_bits.to_string(),
            r.dims.r_bits.to_string(),
            r.dims.t.to_string(),
            r.infeasible.to_string(),
            fmt_f64(r.code_rate),
            fmt_f64(r.overhead),
            fmt_f64(r.rate_ratio),
            fmt_f64(r.kr_ratio),
            fmt_opt(r.ser_main),
            fmt_opt(r.p_rs),
            fmt_opt(r.p_re),
            fmt_opt(r.p_b),
            fmt_opt(r.p_b_oracle),
            r.oracle_kind.into(),
            mc.map(|m| m.blocks.to_string()).unwrap_or_default(),
            fmt_opt(mc.map(|m| m.residual_ber)),
            fmt_opt(mc.map(|m| m.residual_ber_se)),
            fmt_opt(mc.map(|m| m.block_error_rate)),
            fmt_opt(mc.map(|m| m.block_error_rate_se)),
            fmt_f64(r.goodput_main_bps),
            fmt_f64(r.goodput_all_bps),
            fmt_f64(rate_main),
            fmt_f64(rate_aux),
            setup.system.label.clone(),
            if opts.optimize { "optimize" } else { "fixed" }.into(),
        ]);
    }
    let mut warnings = Vec::new();
    if warned > 0 {
        warnings.push(format!(
            "auxiliary BER exceeds {AUX_BER_LIMIT:e} at {warned} of {} points; the parity channel is not error-free there",
            rows.len()
        ));
    }
    Ok((table, warnings))
}
