//! Parallel Monte-Carlo campaigns and the oracles they are checked against.

use rayon::prelude::*;

use thz_fec_core::analytics::{
    mdpc_block_error, mdpc_residual_ber, rs_residual, ser_from_ber, AnalyticsError, BlockDims,
};
use thz_fec_core::sim::{
    block_error_bound_mdpc, block_error_from_table, block_error_oracle_rs, mdpc_failure_table, run_chunk,
    CampaignStats, Codec, SimError, Tally, TrialConfig,
};

/// Same result as [`thz_fec_core::sim::run_campaign`], with chunks spread
/// over the rayon pool.
pub fn run_parallel(cfg: &TrialConfig) -> Result<CampaignStats, SimError> {
    cfg.validate()?;
    let tallies: Vec<Tally> =
        (0..cfg.chunks()).into_par_iter().map(|chunk| run_chunk(cfg, chunk)).collect::<Result<_, _>>()?;
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);
    Ok(CampaignStats::from_tally(&tally, cfg.codec.dims().k_bits))
}

/// Closed-form estimates at one operating point. `ser_main`
/// and `p_rs` are only defined for RS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analytic {
    pub ser_main: Option<f64>,
    pub p_rs: Option<f64>,
    pub p_re: f64,
    pub p_b: f64,
}

/// Bit error rates in, closed-form estimates out. RS inputs are converted
/// to symbol error rates first.
pub fn analytic(dims: &BlockDims, p_main: f64, p_aux: f64) -> Result<Analytic, AnalyticsError> {
    if dims.symbol_bits == 1 {
        let p_re = mdpc_residual_ber(dims, p_main, p_aux)?;
        return Ok(Analytic { ser_main: None, p_rs: None, p_re, p_b: mdpc_block_error(dims, p_re)? });
    }
    let s = dims.symbol_bits;
    let ps_main = ser_from_ber(p_main, s)?;
    let res = rs_residual(dims, ps_main, ser_from_ber(p_aux, s)?)?;
    Ok(Analytic { ser_main: Some(ps_main), p_rs: Some(res.ser), p_re: res.ber, p_b: res.block_error })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Exact binomial convolution, assuming RS fails iff more than t symbols err.
    RsBinomial,
    /// Exact, from running the decoder on every error pattern.
    MdpcEnumeration,
    /// Upper bound: probability of more than t bit errors.
    MdpcBound,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::RsBinomial => "rs_binomial",
            OracleKind::MdpcEnumeration => "mdpc_enumeration",
            OracleKind::MdpcBound => "mdpc_bound",
        }
    }
}

/// Block error oracle for one code; small MDPC codes are enumerated once.
#[derive(Debug, Clone)]
pub struct Oracle {
    dims: BlockDims,
    table: Option<Vec<Vec<u64>>>,
}

impl Oracle {
    pub fn new(codec: &Codec, max_iter: usize) -> Self {
        let table = match codec {
            Codec::Mdpc(code) => mdpc_failure_table(code, max_iter),
            Codec::Rs(_) => None,
        };
        Self { dims: codec.dims(), table }
    }

    /// An oracle from dimensions alone; MDPC gets the bound.
    pub fn from_dims(dims: BlockDims) -> Self {
        Self { dims, table: None }
    }

    pub fn kind(&self) -> OracleKind {
        match (self.dims.symbol_bits, &self.table) {
            (1, Some(_)) => OracleKind::MdpcEnumeration,
            (1, None) => OracleKind::MdpcBound,
            _ => OracleKind::RsBinomial,
        }
    }

    /// Block error probability at bit error rates `p_main` and `p_aux`.
    pub fn block_error(&self, p_main: f64, p_aux: f64) -> Result<f64, SimError> {
        match self.kind() {
            OracleKind::MdpcEnumeration => block_error_from_table(self.table.as_deref().unwrap_or(&[]), p_main, p_aux),
            OracleKind::MdpcBound => block_error_bound_mdpc(&self.dims, p_main, p_aux),
            OracleKind::RsBinomial => {
                let s = self.dims.symbol_bits;
                let ser = |p| ser_from_ber(p, s).map_err(SimError::from);
                block_error_oracle_rs(&self.dims, ser(p_main)?, ser(p_aux)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use thz_fec_core::sim::run_campaign;
    use thz_fec_core::{Field, MdpcCode, RsCode};

    #[test]
    fn parallel_matches_sequential() {
        let codec = Codec::Rs(RsCode::new(Field::with_default_poly(8).unwrap(), 28, 2).unwrap());
        let cfg = TrialConfig::new(codec, 0.01, 0.002, 10_000, 11);
        assert_eq!(run_parallel(&cfg).unwrap(), run_campaign(&cfg).unwrap());
    }

    #[test]
    fn oracle_kinds() {
        let small = Codec::Mdpc(MdpcCode::new(2, 2).unwrap());
        let big = Codec::Mdpc(MdpcCode::new(2, 28).unwrap());
        assert_eq!(Oracle::new(&small, 20).kind(), OracleKind::MdpcEnumeration);
        assert_eq!(Oracle::new(&big, 20).kind(), OracleKind::MdpcBound);
        let oracle = Oracle::new(&small, 20);
        assert_eq!(oracle.block_error(0.0, 0.0).unwrap(), 0.0);
        // Every weight-1 pattern is repaired, so the rate starts at second order.
        let p = 1e-4;
        let b = oracle.block_error(p, p).unwrap();
        assert!(b > 0.0 && b < 36.0 * p * p, "{b}");
    }
}
