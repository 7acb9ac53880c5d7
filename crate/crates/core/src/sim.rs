//! Monte-Carlo transmission over two binary symmetric channels, plus exact
//! block-error oracles to check it against.
//!
//! Every block draws fresh random data, encodes it, sends the data bits over
//! the main channel and the parity bits over the auxiliary channel, decodes,
//! and compares the `K` decoded data bits with the originals. A block is in
//! error when at least one data bit differs.
//!
//! Randomness: blocks are grouped into chunks of [`CHUNK_BLOCKS`]; chunk `i`
//! draws from `ChaCha8Rng::seed_from_u64(seed)` switched to stream `i`
//! (rand_chacha 0.3). Chunks are independent, so any execution order gives
//! bit-identical statistics.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytics::{check_prob, AnalyticsError, BlockDims};
use crate::gf::Element;
use crate::mdpc::{MdpcCode, MdpcError, DEFAULT_MAX_ITER};
use crate::rs::{RsCode, RsError};

/// Generator identification written into campaign metadata.
pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.3/seed_from_u64/stream=chunk";
/// Blocks per RNG stream.
pub const CHUNK_BLOCKS: u64 = 4096;
/// Largest block the exhaustive MDPC oracle enumerates, in bits.
pub const MAX_ENUMERATION_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Probability(#[from] AnalyticsError),
    #[error("block count must be at least 1")]
    NoBlocks,
    #[error(transparent)]
    Rs(#[from] RsError),
    #[error(transparent)]
    Mdpc(#[from] MdpcError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Codec {
    Mdpc(MdpcCode),
    Rs(RsCode),
}

impl Codec {
    pub fn dims(&self) -> BlockDims {
        match self {
            Codec::Mdpc(c) => c.into(),
            Codec::Rs(c) => c.into(),
        }
    }

    /// `mdpc(2D/28L)` or `rs(240,224,s=8)`.
    pub fn label(&self) -> String {
        match self {
            Codec::Mdpc(c) => format!("mdpc({}D/{}L)", c.dimensions(), c.side()),
            Codec::Rs(c) => format!("rs({},{},s={})", c.n(), c.k(), c.bits()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub codec: Codec,
    /// Bit error rate of the main (data) channel.
    pub p_main: f64,
    /// Bit error rate of the auxiliary (parity) channel.
    pub p_aux: f64,
    pub blocks: u64,
    pub seed: u64,
    /// Iteration budget of the MDPC decoder.
    pub max_iter: usize,
}

impl TrialConfig {
    pub fn new(codec: Codec, p_main: f64, p_aux: f64, blocks: u64, seed: u64) -> Self {
        Self { codec, p_main, p_aux, blocks, seed, max_iter: DEFAULT_MAX_ITER }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        check_prob(self.p_main)?;
        check_prob(self.p_aux)?;
        if self.blocks == 0 {
            return Err(SimError::NoBlocks);
        }
        Ok(())
    }

    pub fn chunks(&self) -> u64 {
        self.blocks.div_ceil(CHUNK_BLOCKS)
    }
}

/// Flips each bit independently with probability `p`; returns the flip count.
pub fn bsc_apply<R: Rng + ?Sized>(bits: &mut [u8], p: f64, rng: &mut R) -> usize {
    if p <= 0.0 {
        return 0;
    }
    let mut flips = 0;
    for b in bits {
        if rng.gen::<f64>() < p {
            *b ^= 1;
            flips += 1;
        }
    }
    flips
}

/// [`bsc_apply`] on the `bits` low bits of every symbol.
pub fn bsc_apply_symbols<R: Rng + ?Sized>(symbols: &mut [Element], bits: u32, p: f64, rng: &mut R) -> usize {
    if p <= 0.0 {
        return 0;
    }
    let mut flips = 0;
    for sym in symbols {
        for bit in 0..bits {
            if rng.gen::<f64>() < p {
                *sym ^= 1 << bit;
                flips += 1;
            }
        }
    }
    flips
}

/// Raw counts from a set of blocks; merging is plain addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub blocks: u64,
    pub failed_blocks: u64,
    /// Blocks the decoder flagged as uncorrectable (RS) or left with parity violations (MDPC).
    pub decode_failures: u64,
    pub bit_errors: u64,
    pub bit_errors_sq: u128,
}

impl Tally {
    pub fn merge(mut self, other: Tally) -> Tally {
        self.blocks += other.blocks;
        self.failed_blocks += other.failed_blocks;
        self.decode_failures += other.decode_failures;
        self.bit_errors += other.bit_errors;
        self.bit_errors_sq += other.bit_errors_sq;
        self
    }

    fn record(&mut self, bit_errors: u64, flagged: bool) {
        self.blocks += 1;
        self.failed_blocks += (bit_errors > 0) as u64;
        self.decode_failures += flagged as u64;
        self.bit_errors += bit_errors;
        self.bit_errors_sq += (bit_errors as u128) * (bit_errors as u128);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignStats {
    pub blocks: u64,
    pub data_bits_per_block: u64,
    /// Decoded data bit error rate and its ±1σ standard error.
    pub residual_ber: f64,
    pub residual_ber_se: f64,
    pub block_error_rate: f64,
    pub block_error_rate_se: f64,
    /// Blocks whose data came out intact.
    pub corrected_blocks: u64,
    pub failed_blocks: u64,
    pub decode_failures: u64,
    pub bit_errors: u64,
}

impl CampaignStats {
    /// Normal-approximation statistics; the residual BER error uses the
    /// per-block spread of the data bit error fraction.
    pub fn from_tally(t: &Tally, data_bits_per_block: u64) -> Self {
        let b = t.blocks.max(1) as f64;
        let k = data_bits_per_block.max(1) as f64;
        let block_error_rate = t.failed_blocks as f64 / b;
        let residual_ber = t.bit_errors as f64 / (b * k);
        let residual_var = if t.blocks > 1 {
            ((t.bit_errors_sq as f64 / (k * k)) - b * residual_ber * residual_ber).max(0.0) / (b - 1.0)
        } else {
            0.0
        };
        Self {
            blocks: t.blocks,
            data_bits_per_block,
            residual_ber,
            residual_ber_se: libm::sqrt(residual_var / b),
            block_error_rate,
            block_error_rate_se: libm::sqrt(block_error_rate * (1.0 - block_error_rate) / b),
            corrected_blocks: t.blocks - t.failed_blocks,
            failed_blocks: t.failed_blocks,
            decode_failures: t.decode_failures,
            bit_errors: t.bit_errors,
        }
    }
}

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs the blocks of chunk `chunk` (the last chunk may be short).
pub fn run_chunk(cfg: &TrialConfig, chunk: u64) -> Result<Tally, SimError> {
    cfg.validate()?;
    let start = chunk * CHUNK_BLOCKS;
    let count = cfg.blocks.saturating_sub(start).min(CHUNK_BLOCKS);
    let mut rng = chunk_rng(cfg.seed, chunk);
    let mut tally = Tally::default();
    match &cfg.codec {
        Codec::Mdpc(code) => {
            let k = code.k();
            let mut data = vec![0u8; k];
            for _ in 0..count {
                data.iter_mut().for_each(|b| *b = rng.gen::<bool>() as u8);
                let mut rx = code.encode_block(&data)?;
                bsc_apply(&mut rx[..k], cfg.p_main, &mut rng);
                bsc_apply(&mut rx[k..], cfg.p_aux, &mut rng);
                let out = code.decode(&rx, cfg.max_iter)?;
                let errors = out.data.iter().zip(&data).filter(|(a, b)| a != b).count();
                tally.record(errors as u64, !out.parity_ok);
            }
        }
        Codec::Rs(code) => {
            let (k, s) = (code.k(), code.bits());
            let mask = (code.field().size() - 1) as u32;
            let mut msg = vec![0 as Element; k];
            for _ in 0..count {
                msg.iter_mut().for_each(|v| *v = (rng.gen::<u32>() & mask) as Element);
                let mut rx = code.encode_codeword(&msg)?;
                bsc_apply_symbols(&mut rx[..k], s, cfg.p_main, &mut rng);
                bsc_apply_symbols(&mut rx[k..], s, cfg.p_aux, &mut rng);
                let (errors, flagged) = match code.decode(&rx) {
                    Ok(d) => (bit_differences(d.message(), &msg), false),
                    Err(RsError::DecodeFailure) => (bit_differences(&rx[..k], &msg), true),
                    Err(e) => return Err(e.into()),
                };
                tally.record(errors, flagged);
            }
        }
    }
    Ok(tally)
}

fn bit_differences(a: &[Element], b: &[Element]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as u64).sum()
}

/// Sequential campaign; identical to any parallel evaluation of its chunks.
pub fn run_campaign(cfg: &TrialConfig) -> Result<CampaignStats, SimError> {
    cfg.validate()?;
    let mut tally = Tally::default();
    for chunk in 0..cfg.chunks() {
        tally = tally.merge(run_chunk(cfg, chunk)?);
    }
    Ok(CampaignStats::from_tally(&tally, cfg.codec.dims().k_bits))
}

/// P(X = i) for X ~ Binomial(n, p).
pub fn binomial_pmf(n: u64, p: f64, i: u64) -> f64 {
    if i > n {
        return 0.0;
    }
    if p <= 0.0 {
        return (i == 0) as u8 as f64;
    }
    if p >= 1.0 {
        return (i == n) as u8 as f64;
    }
    let (n, i) = (n as f64, i as f64);
    let ln_choose = libm::lgamma(n + 1.0) - libm::lgamma(i + 1.0) - libm::lgamma(n - i + 1.0);
    libm::exp(ln_choose + i * libm::log(p) + (n - i) * libm::log1p(-p))
}

/// P(X + Y ≤ t) for independent X ~ Bin(n_main, p_main), Y ~ Bin(n_aux, p_aux).
pub fn prob_at_most(t: u64, n_main: u64, p_main: f64, n_aux: u64, p_aux: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..=t.min(n_main) {
        let pi = binomial_pmf(n_main, p_main, i);
        for j in 0..=(t - i).min(n_aux) {
            total += pi * binomial_pmf(n_aux, p_aux, j);
        }
    }
    total.clamp(0.0, 1.0)
}

/// Exact RS block error probability assuming decoding fails iff more than
/// `t` of the transmitted symbols are in error.
pub fn block_error_oracle_rs(dims: &BlockDims, ps_main: f64, ps_aux: f64) -> Result<f64, SimError> {
    let (pm, pa) = (check_prob(ps_main)?, check_prob(ps_aux)?);
    Ok(1.0 - prob_at_most(dims.t, dims.k_symbols(), pm, dims.r_symbols(), pa))
}

/// Upper bound on the MDPC block error probability: the probability that more
/// than `t` of the `K + R` bits are in error. The decoder also repairs some
/// heavier patterns, so its actual rate is at most this.
pub fn block_error_bound_mdpc(dims: &BlockDims, p_main: f64, p_aux: f64) -> Result<f64, SimError> {
    let (pm, pa) = (check_prob(p_main)?, check_prob(p_aux)?);
    Ok(1.0 - prob_at_most(dims.t, dims.k_bits, pm, dims.r_bits, pa))
}

/// Runs the decoder on every error pattern of a small code. Entry `[i][j]`
/// counts the patterns with `i` main-channel and `j` auxiliary-channel errors
/// whose decoded data is wrong. `None` if the block exceeds
/// [`MAX_ENUMERATION_BITS`].
///
/// The code is linear and the decoder only sees syndromes, so the all-zero
/// block stands in for every transmitted block.
pub fn mdpc_failure_table(code: &MdpcCode, max_iter: usize) -> Option<Vec<Vec<u64>>> {
    let (k, r) = (code.k(), code.r());
    let len = code.block_len();
    if len > MAX_ENUMERATION_BITS {
        return None;
    }
    let mut table = vec![vec![0u64; r + 1]; k + 1];
    let mut rx = vec![0u8; len];
    for pattern in 0u32..(1 << len) {
        for (i, b) in rx.iter_mut().enumerate() {
            *b = (pattern >> i) as u8 & 1;
        }
        let out = code.decode(&rx, max_iter).ok()?;
        if out.data.iter().any(|&b| b != 0) {
            let main = rx[..k].iter().filter(|&&b| b != 0).count();
            let aux = rx[k..].iter().filter(|&&b| b != 0).count();
            table[main][aux] += 1;
        }
    }
    Some(table)
}

/// Exact MDPC block error probability by exhaustive enumeration; see
/// [`mdpc_failure_table`].
pub fn block_error_exact_mdpc(
    code: &MdpcCode,
    p_main: f64,
    p_aux: f64,
    max_iter: usize,
) -> Result<Option<f64>, SimError> {
    check_prob(p_main)?;
    check_prob(p_aux)?;
    match mdpc_failure_table(code, max_iter) {
        Some(table) => block_error_from_table(&table, p_main, p_aux).map(Some),
        None => Ok(None),
    }
}

/// Block error probability from a table built by [`mdpc_failure_table`].
pub fn block_error_from_table(table: &[Vec<u64>], p_main: f64, p_aux: f64) -> Result<f64, SimError> {
    let (pm, pa) = (check_prob(p_main)?, check_prob(p_aux)?);
    let k = table.len() as i32 - 1;
    let r = table.first().map_or(0, |row| row.len() as i32 - 1);
    let mut p = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let (i, j) = (i as i32, j as i32);
            p += count as f64
                * libm::pow(pm, i as f64)
                * libm::pow(1.0 - pm, (k - i) as f64)
                * libm::pow(pa, j as f64)
                * libm::pow(1.0 - pa, (r - j) as f64);
        }
    }
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;

    #[test]
    fn bsc_extremes_and_concentration() {
        let mut rng = chunk_rng(3, 0);
        let mut bits = vec![1u8, 0, 1, 1, 0];
        assert_eq!(bsc_apply(&mut bits, 0.0, &mut rng), 0);
        assert_eq!(bits, [1, 0, 1, 1, 0]);
        assert_eq!(bsc_apply(&mut bits, 1.0, &mut rng), 5);
        assert_eq!(bits, [0, 1, 0, 0, 1]);

        let mut big = vec![0u8; 1_000_000];
        let flips = bsc_apply(&mut big, 0.01, &mut rng) as f64;
        let sigma = (1e6f64 * 0.01 * 0.99).sqrt();
        assert!((flips - 1e4).abs() < 5.0 * sigma, "{flips}");
        assert_eq!(big.iter().map(|&b| b as f64).sum::<f64>(), flips);
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        let total: f64 = (0..=30).map(|i| binomial_pmf(30, 0.2, i)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(binomial_pmf(5, 0.0, 0), 1.0);
        assert_eq!(binomial_pmf(5, 1.0, 5), 1.0);
        assert_eq!(binomial_pmf(5, 1.0, 4), 0.0);
    }

    #[test]
    fn rs_oracle_examples() {
        let d = BlockDims::rs(8, 28, 2).unwrap();
        assert_eq!(block_error_oracle_rs(&d, 0.0, 0.0).unwrap(), 0.0);
        let direct = 1.0 - 0.99f64.powi(28) - 28.0 * 0.01 * 0.99f64.powi(27);
        assert!((block_error_oracle_rs(&d, 0.01, 0.0).unwrap() - direct).abs() < 1e-13);
        assert!((direct - 0.031_824_752_8).abs() < 1e-9);
        // t covering the whole block
        let all = BlockDims { k_bits: 2, r_bits: 2, t: 4, symbol_bits: 1 };
        assert!(block_error_oracle_rs(&all, 0.3, 0.7).unwrap().abs() < 1e-15);
    }

    #[test]
    fn mdpc_bound_small_p_is_pair_dominated() {
        let d = BlockDims::mdpc(2, 28).unwrap();
        let p = 1e-6;
        let n = 841.0;
        let pairs = n * (n - 1.0) / 2.0 * p * p;
        let bound = block_error_bound_mdpc(&d, p, p).unwrap();
        assert!((bound / pairs - 1.0).abs() < 1e-2, "{bound} vs {pairs}");
        assert_eq!(block_error_bound_mdpc(&d, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn two_by_two_table() {
        let code = MdpcCode::new(2, 2).unwrap();
        let table = mdpc_failure_table(&code, DEFAULT_MAX_ITER).unwrap();
        // no failures at weight <= 1
        assert_eq!(table[0][0] + table[1][0] + table[0][1], 0);
        let weight2: u64 = (0..=2).map(|i| table[i][2 - i]).sum();
        assert!(weight2 > 0 && weight2 < 36);
        let exact = block_error_exact_mdpc(&code, 0.0, 0.0, DEFAULT_MAX_ITER).unwrap().unwrap();
        assert_eq!(exact, 0.0);
        let d = BlockDims::from(&code);
        let exact = block_error_exact_mdpc(&code, 0.05, 0.05, DEFAULT_MAX_ITER).unwrap().unwrap();
        assert!(exact <= block_error_bound_mdpc(&d, 0.05, 0.05).unwrap());
        assert!(mdpc_failure_table(&MdpcCode::new(2, 28).unwrap(), 20).is_none());
    }

    #[test]
    fn campaign_zero_noise_and_determinism() {
        let code = Codec::Mdpc(MdpcCode::new(2, 2).unwrap());
        let stats = run_campaign(&TrialConfig::new(code.clone(), 0.0, 0.0, 100, 1)).unwrap();
        assert_eq!((stats.residual_ber, stats.block_error_rate, stats.corrected_blocks), (0.0, 0.0, 100));

        let rs = Codec::Rs(RsCode::new(Field::new(8, 0x11D).unwrap(), 28, 2).unwrap());
        let cfg = TrialConfig::new(rs, 0.01, 0.001, 5000, 9);
        let a = run_campaign(&cfg).unwrap();
        assert_eq!(a, run_campaign(&cfg).unwrap());
        assert_eq!(a.corrected_blocks + a.failed_blocks, 5000);
        assert!(a.residual_ber > 0.0 && a.block_error_rate < 1.0);

        let other = run_campaign(&TrialConfig { seed: 10, ..cfg.clone() }).unwrap();
        assert_ne!(a, other);
        assert_eq!(run_campaign(&TrialConfig { blocks: 0, ..cfg }), Err(SimError::NoBlocks));
    }

    #[test]
    fn chunks_compose() {
        let code = Codec::Mdpc(MdpcCode::new(2, 4).unwrap());
        let cfg = TrialConfig::new(code, 0.02, 0.02, 2 * CHUNK_BLOCKS + 17, 5);
        assert_eq!(cfg.chunks(), 3);
        let by_hand = (0..3).rev().map(|c| run_chunk(&cfg, c).unwrap()).fold(Tally::default(), Tally::merge);
        assert_eq!(by_hand.blocks, cfg.blocks);
        assert_eq!(CampaignStats::from_tally(&by_hand, 16), run_campaign(&cfg).unwrap());
    }
}
