//! Closed-form fault-tolerance and throughput model of a two-channel system.
//!
//! The `K` data bits of a block ride the main channel with bit error rate
//! `p_M`, the `R` parity bits ride the auxiliary channel with `p_A`. The
//! residual-error expressions here are expectation-level approximations;
//! distribution-exact block error probabilities are in [`crate::sim`].

use alloc::string::String;
use alloc::vec::Vec;

use crate::link::{self, ChannelConfig};
use crate::mdpc::MdpcCode;
use crate::rs::RsCode;

/// Default upper bound on the MDPC side length when the error constraint is vacuous.
pub const DEFAULT_M_CAP: u64 = 1 << 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("dimension {0} is below 2")]
    Dimension(u32),
    #[error("symbol size {0} is outside 1..=16")]
    SymbolSize(u32),
    #[error("parity length {0} must be even and at least 2")]
    Parity(u64),
    #[error("no side length m >= 1 satisfies m^n * p <= t")]
    Infeasible,
    #[error("code rate {0} is outside (0, 1]")]
    CodeRate(f64),
    #[error("expected {expected} per-channel error rates, got {got}")]
    ChannelCount { expected: usize, got: usize },
}

pub(crate) fn check_prob(p: f64) -> Result<f64, AnalyticsError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(AnalyticsError::Probability(p))
    }
}

/// 1 − (1 − x)^e, accurate for small x.
pub(crate) fn one_minus_pow_complement(x: f64, e: f64) -> f64 {
    if x <= 0.0 || e == 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    (-libm::expm1(e * libm::log1p(-x))).clamp(0.0, 1.0)
}

/// Block geometry shared by both codes: data bits, parity bits, correctable
/// errors `t` (bits for MDPC, symbols for RS) and bits per symbol (1 for MDPC).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockDims {
    pub k_bits: u64,
    pub r_bits: u64,
    pub t: u64,
    pub symbol_bits: u32,
}

impl BlockDims {
    pub fn mdpc(n: u32, m: u64) -> Result<Self, AnalyticsError> {
        let t = t_mdpc(n)?;
        let k = m.pow(n);
        Ok(Self { k_bits: k, r_bits: (m + 1).pow(n) - k, t, symbol_bits: 1 })
    }

    pub fn rs(s: u32, k_sym: u64, r_sym: u64) -> Result<Self, AnalyticsError> {
        if !(1..=16).contains(&s) {
            return Err(AnalyticsError::SymbolSize(s));
        }
        if r_sym < 2 || !r_sym.is_multiple_of(2) {
            return Err(AnalyticsError::Parity(r_sym));
        }
        Ok(Self { k_bits: k_sym * s as u64, r_bits: r_sym * s as u64, t: r_sym / 2, symbol_bits: s })
    }

    pub fn k_symbols(&self) -> u64 {
        self.k_bits / self.symbol_bits as u64
    }

    pub fn r_symbols(&self) -> u64 {
        self.r_bits / self.symbol_bits as u64
    }

    pub fn code_rate(&self) -> f64 {
        code_rate(self.k_bits, self.r_bits)
    }
}

impl From<&MdpcCode> for BlockDims {
    fn from(c: &MdpcCode) -> Self {
        Self { k_bits: c.k() as u64, r_bits: c.r() as u64, t: c.t() as u64, symbol_bits: 1 }
    }
}

impl From<&RsCode> for BlockDims {
    fn from(c: &RsCode) -> Self {
        let s = c.bits() as u64;
        Self { k_bits: c.k() as u64 * s, r_bits: c.r() as u64 * s, t: c.t() as u64, symbol_bits: c.bits() }
    }
}

/// Correctable bit errors of MDPC(nD), 2^(n−1) − 1.
pub fn t_mdpc(n: u32) -> Result<u64, AnalyticsError> {
    if !(2..=63).contains(&n) {
        return Err(AnalyticsError::Dimension(n));
    }
    Ok((1u64 << (n - 1)) - 1)
}

/// Largest `m` in `[1, cap]` with `m^n · p_main ≤ t_MDPC`, assuming an
/// error-free auxiliary channel. Returns `cap` when `p_main` is zero.
pub fn mdpc_max_m(n: u32, p_main: f64, cap: u64) -> Result<u64, AnalyticsError> {
    let t = t_mdpc(n)? as f64;
    let p = check_prob(p_main)?;
    let fits = |m: u64| libm::pow(m as f64, n as f64) * p <= t;
    if cap == 0 || !fits(1) {
        return Err(AnalyticsError::Infeasible);
    }
    if p == 0.0 {
        return Ok(cap);
    }
    let mut m = (libm::floor(libm::pow(t / p, 1.0 / n as f64)) as u64).clamp(1, cap);
    while m > 1 && !fits(m) {
        m -= 1;
    }
    while m < cap && fits(m + 1) {
        m += 1;
    }
    Ok(m)
}

/// Symbol error rate from bit error rate, 1 − (1 − p)^s.
pub fn ser_from_ber(p: f64, s: u32) -> Result<f64, AnalyticsError> {
    Ok(one_minus_pow_complement(check_prob(p)?, s as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsSelection {
    pub k_sym: u64,
    /// Whether `2^(s−1) ≤ k_sym + r_sym`; when false, `k_sym` is the error
    /// budget's bound and lies below the minimum codeword length.
    pub feasible: bool,
}

/// Largest message length `k_sym` with `k_sym · P_s ≤ r_sym/2` and
/// `k_sym + r_sym ≤ 2^s − 1`, for main-channel symbol error rate `ps_main`
/// and an error-free auxiliary channel.
pub fn rs_select_params(ps_main: f64, s: u32, r_sym: u64) -> Result<RsSelection, AnalyticsError> {
    let dims = BlockDims::rs(s, 0, r_sym)?;
    let p = check_prob(ps_main)?;
    let max_len = (1u64 << s) - 1;
    if r_sym >= max_len {
        return Err(AnalyticsError::Parity(r_sym));
    }
    let length_bound = max_len - r_sym;
    let t = dims.t as f64;
    let k_sym = if p == 0.0 {
        length_bound
    } else {
        let fits = |k: u64| k as f64 * p <= t;
        let mut k = libm::floor(t / p).min(length_bound as f64) as u64;
        while k > 0 && !fits(k) {
            k -= 1;
        }
        while k < length_bound && fits(k + 1) {
            k += 1;
        }
        k
    };
    let feasible = k_sym >= 1 && k_sym + r_sym >= 1 << (s - 1);
    Ok(RsSelection { k_sym, feasible })
}

/// R_F = K / (K + R).
pub fn code_rate(k: u64, r: u64) -> f64 {
    k as f64 / (k + r) as f64
}

/// θ = 1 − R_F.
pub fn overhead(code_rate: f64) -> f64 {
    1.0 - code_rate
}

/// Expected residual bit error rate after MDPC decoding, clamped at zero:
/// (K·p_M + R·p_A − t) / (K + R).
pub fn mdpc_residual_ber(dims: &BlockDims, p_main: f64, p_aux: f64) -> Result<f64, AnalyticsError> {
    let (pm, pa) = (check_prob(p_main)?, check_prob(p_aux)?);
    let (k, r) = (dims.k_bits as f64, dims.r_bits as f64);
    Ok(((k * pm + r * pa - dims.t as f64) / (k + r)).clamp(0.0, 1.0))
}

/// 1 − (1 − P_re)^K.
pub fn mdpc_block_error(dims: &BlockDims, residual_ber: f64) -> Result<f64, AnalyticsError> {
    Ok(one_minus_pow_complement(check_prob(residual_ber)?, dims.k_bits as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsResidual {
    /// Residual symbol error rate.
    pub ser: f64,
    /// Residual bit error rate, 1 − (1 − ser)^(1/s).
    pub ber: f64,
    /// Block error probability, 1 − (1 − ber)^K.
    pub block_error: f64,
}

pub fn rs_residual(dims: &BlockDims, ps_main: f64, ps_aux: f64) -> Result<RsResidual, AnalyticsError> {
    let (pm, pa) = (check_prob(ps_main)?, check_prob(ps_aux)?);
    let (k, r) = (dims.k_symbols() as f64, dims.r_symbols() as f64);
    let ser = ((k * pm + r * pa - dims.t as f64) / (k + r)).clamp(0.0, 1.0);
    let ber = one_minus_pow_complement(ser, 1.0 / dims.symbol_bits as f64);
    let block_error = one_minus_pow_complement(ber, dims.k_bits as f64);
    Ok(RsResidual { ser, ber, block_error })
}

/// A code chosen for one operating point by [`optimize_mdpc`] or [`optimize_rs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizedCode {
    pub dims: BlockDims,
    /// `m` for MDPC, `k_sym` for RS.
    pub param: u64,
    pub feasible: bool,
}

impl OptimizedCode {
    pub fn code_rate(&self) -> f64 {
        self.dims.code_rate()
    }

    pub fn overhead(&self) -> f64 {
        overhead(self.code_rate())
    }
}

/// MDPC(nD/mL) with the largest `m ≤ cap` satisfying the fault-tolerance
/// constraint at main-channel bit error rate `p_main`.
pub fn optimize_mdpc(n: u32, p_main: f64, cap: u64) -> Result<OptimizedCode, AnalyticsError> {
    match mdpc_max_m(n, p_main, cap) {
        Ok(m) => Ok(OptimizedCode { dims: BlockDims::mdpc(n, m)?, param: m, feasible: true }),
        Err(AnalyticsError::Infeasible) => {
            Ok(OptimizedCode { dims: BlockDims::mdpc(n, 0)?, param: 0, feasible: false })
        }
        Err(e) => Err(e),
    }
}

/// RS over GF(2^s) with `r_sym` parity symbols and the largest message length
/// allowed at main-channel bit error rate `p_main`.
pub fn optimize_rs(s: u32, r_sym: u64, p_main: f64) -> Result<OptimizedCode, AnalyticsError> {
    let sel = rs_select_params(ser_from_ber(p_main, s)?, s, r_sym)?;
    Ok(OptimizedCode { dims: BlockDims::rs(s, sel.k_sym, r_sym)?, param: sel.k_sym, feasible: sel.feasible })
}

/// Largest MDPC side whose `m^n` data bits fit in the longest RS message over
/// GF(2^s) with `r_sym` parity symbols, so both codes are compared at the
/// same maximum payload per block.
pub fn mdpc_cap_for_rs_payload(n: u32, s: u32, r_sym: u64) -> u64 {
    let payload = ((1u64 << s) - 1).saturating_sub(r_sym) * s as u64;
    let mut m = libm::floor(libm::pow(payload as f64, 1.0 / n as f64)) as u64;
    while m > 0 && m.checked_pow(n).is_none_or(|v| v > payload) {
        m -= 1;
    }
    while (m + 1).checked_pow(n).is_some_and(|v| v <= payload) {
        m += 1;
    }
    m.max(1)
}

/// Channels of a system at their distances, and the code rate applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub label: String,
    pub channels: Vec<(ChannelConfig, f64)>,
    pub code_rate: f64,
}

impl SystemSpec {
    pub fn new(label: &str, channels: Vec<(ChannelConfig, f64)>, code_rate: f64) -> Result<Self, AnalyticsError> {
        if !(code_rate > 0.0 && code_rate <= 1.0) {
            return Err(AnalyticsError::CodeRate(code_rate));
        }
        Ok(Self { label: label.into(), channels, code_rate })
    }
}

/// G = R_F · Σ D_i · (1 − BER_i), bits/s.
pub fn goodput(sys: &SystemSpec, per_channel_ber: &[f64]) -> Result<f64, AnalyticsError> {
    if per_channel_ber.len() != sys.channels.len() {
        return Err(AnalyticsError::ChannelCount { expected: sys.channels.len(), got: per_channel_ber.len() });
    }
    let mut sum = 0.0;
    for ((cfg, _), &ber) in sys.channels.iter().zip(per_channel_ber) {
        sum += link::data_rate(cfg) * (1.0 - check_prob(ber)?);
    }
    Ok(sys.code_rate * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::channel_preset;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn t_mdpc_values() {
        assert_eq!(t_mdpc(2), Ok(1));
        assert_eq!(t_mdpc(3), Ok(3));
        assert_eq!(t_mdpc(4), Ok(7));
        assert_eq!(t_mdpc(1), Err(AnalyticsError::Dimension(1)));
    }

    #[test]
    fn max_m_scan() {
        // brute force: first m whose square times p exceeds t
        let brute = (1..).take_while(|&m: &u64| (m * m) as f64 * 1e-3 <= 1.0).last().unwrap();
        assert_eq!(brute, 31);
        assert_eq!(mdpc_max_m(2, 1e-3, 1024), Ok(31));
        assert_eq!(mdpc_max_m(2, 0.0, 1024), Ok(1024));
        assert_eq!(mdpc_max_m(2, 1e-3, 20), Ok(20));
        assert_eq!(mdpc_max_m(2, 1.0, 1024), Ok(1));
        assert_eq!(mdpc_max_m(3, 3.0 / 1000.0, 1024), Ok(10));
        assert_eq!(mdpc_max_m(2, 2.0, 1024), Err(AnalyticsError::Probability(2.0)));
        assert_eq!(mdpc_max_m(2, 1e-3, 0), Err(AnalyticsError::Infeasible));
    }

    #[test]
    fn ser() {
        assert_eq!(ser_from_ber(0.0, 8), Ok(0.0));
        assert!(close(ser_from_ber(1e-3, 8).unwrap(), 7.972_055_930e-3, 1e-12));
        assert_eq!(ser_from_ber(1.0, 8), Ok(1.0));
    }

    #[test]
    fn rs_selection() {
        assert_eq!(rs_select_params(1e-4, 8, 2), Ok(RsSelection { k_sym: 253, feasible: true }));
        assert_eq!(rs_select_params(0.01, 8, 2), Ok(RsSelection { k_sym: 100, feasible: false }));
        assert_eq!(rs_select_params(0.0, 8, 2), Ok(RsSelection { k_sym: 253, feasible: true }));
        assert_eq!(rs_select_params(0.0, 8, 16), Ok(RsSelection { k_sym: 239, feasible: true }));
        // 1/126 keeps the shortest allowed codeword (128 symbols)
        assert_eq!(rs_select_params(1.0 / 126.0, 8, 2), Ok(RsSelection { k_sym: 126, feasible: true }));
        assert_eq!(rs_select_params(1.0, 8, 2), Ok(RsSelection { k_sym: 1, feasible: false }));
        assert_eq!(rs_select_params(0.1, 8, 3), Err(AnalyticsError::Parity(3)));
    }

    #[test]
    fn rates() {
        assert!(close(code_rate(784, 57), 784.0 / 841.0, 1e-15));
        assert!(close(code_rate(224 * 8, 16 * 8), 14.0 / 15.0, 1e-15));
        assert_eq!(code_rate(0, 5), 0.0);
        assert_eq!(overhead(0.0), 1.0);
    }

    #[test]
    fn mdpc_residual_examples() {
        let d = BlockDims::mdpc(2, 28).unwrap();
        assert_eq!(mdpc_residual_ber(&d, 1.0 / 784.0, 0.0).unwrap(), 0.0);
        let p = mdpc_residual_ber(&d, 0.005, 0.0).unwrap();
        assert!(close(p, 2.92 / 841.0, 1e-15));
        assert!(close(mdpc_block_error(&d, p).unwrap(), 0.934_573_594, 1e-8));
        assert_eq!(mdpc_residual_ber(&d, 0.0, 0.0), Ok(0.0));
        assert_eq!(mdpc_block_error(&d, 0.0), Ok(0.0));
        assert_eq!(mdpc_block_error(&d, 1.0), Ok(1.0));
    }

    #[test]
    fn rs_residual_examples() {
        let d = BlockDims::rs(8, 28, 2).unwrap();
        let zero = rs_residual(&d, 0.0, 0.0).unwrap();
        assert_eq!((zero.ser, zero.ber, zero.block_error), (0.0, 0.0, 0.0));
        assert_eq!(rs_residual(&d, 1.0 / 28.0, 0.0).unwrap().ser, 0.0);
        let r = rs_residual(&d, 0.1, 0.0).unwrap();
        assert!(close(r.ser, 0.06, 1e-15));
        assert!(close(r.ber, 7.704_591_761e-3, 1e-12));
        assert!(close(r.block_error, 0.823_160_247, 1e-8));
    }

    #[test]
    fn optimizers() {
        let m = optimize_mdpc(2, 1e-3, DEFAULT_M_CAP).unwrap();
        assert_eq!((m.param, m.dims.k_bits, m.dims.r_bits, m.feasible), (31, 961, 63, true));
        let r = optimize_rs(8, 2, 0.0).unwrap();
        assert_eq!((r.param, r.feasible), (253, true));
        assert!(close(r.code_rate(), 253.0 / 255.0, 1e-15));
        assert_eq!(mdpc_cap_for_rs_payload(2, 8, 2), 44);
        assert_eq!(mdpc_cap_for_rs_payload(3, 8, 2), 12);
    }

    #[test]
    fn goodput_examples() {
        let qam = channel_preset("ref-10.80").unwrap();
        let sys = SystemSpec::new("ref", vec![(qam, 1.0)], 1.0).unwrap();
        assert!(close(goodput(&sys, &[0.0]).unwrap(), 35.2e9, 1.0));
        assert!(close(goodput(&sys, &[0.5]).unwrap(), 17.6e9, 1.0));
        assert!(goodput(&sys, &[0.0, 0.0]).is_err());
        assert!(SystemSpec::new("x", vec![], 0.0).is_err());
    }
}
