//! Free-space link budget and AWGN bit error rates for IEEE 802.15.3d channels.
//!
//! Noise is thermal, integrated over the Nyquist bandwidth `B_N`, and the
//! receiver is assumed symbol-rate matched, so `Eb/N0 = SNR / log2(M)`.
//! Roll-off only enters the occupied-bandwidth check.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Total transmit power of every evaluated system, dBm.
pub const SYSTEM_TX_POWER_DBM: f64 = -8.0;
pub const ROLL_OFF: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinkError {
    #[error("distance must be positive and finite, got {0} m")]
    Distance(f64),
    #[error("frequency must be positive and finite, got {0} Hz")]
    Frequency(f64),
    #[error("channel {label}: {reason}")]
    Channel { label: String, reason: &'static str },
    #[error("link budget: {0}")]
    Budget(&'static str),
    #[error("unknown modulation {0:?}")]
    Modulation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Bpsk,
    Qam16,
}

impl Modulation {
    pub fn order(self) -> u32 {
        match self {
            Modulation::Bpsk => 2,
            Modulation::Qam16 => 16,
        }
    }

    pub fn bits_per_symbol(self) -> u32 {
        self.order().trailing_zeros()
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Bpsk => "bpsk",
            Modulation::Qam16 => "16qam",
        })
    }
}

impl FromStr for Modulation {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Modulation::Bpsk),
            "16qam" | "qam16" => Ok(Modulation::Qam16),
            _ => Err(LinkError::Modulation(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub label: String,
    pub center_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub nyquist_bw_hz: f64,
    pub modulation: Modulation,
    pub tx_power_dbm: f64,
    pub roll_off: f64,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), LinkError> {
        let fail = |reason| Err(LinkError::Channel { label: self.label.clone(), reason });
        let finite = [self.center_freq_hz, self.bandwidth_hz, self.nyquist_bw_hz, self.tx_power_dbm, self.roll_off];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("non-finite parameter");
        }
        if self.center_freq_hz <= 0.0 || self.bandwidth_hz <= 0.0 || self.nyquist_bw_hz <= 0.0 {
            return fail("frequencies must be positive");
        }
        if !(0.0..=1.0).contains(&self.roll_off) {
            return fail("roll-off outside [0, 1]");
        }
        if self.nyquist_bw_hz * (1.0 + self.roll_off) > self.bandwidth_hz {
            return fail("pulse occupies more than the channel bandwidth");
        }
        Ok(())
    }

    /// Symbol rate, 2·B_N.
    pub fn symbol_rate(&self) -> f64 {
        2.0 * self.nyquist_bw_hz
    }
}

/// Antenna gains and receiver noise, shared by every channel of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub noise_temp_k: f64,
    pub noise_figure_db: f64,
    /// Additional attenuation per meter; atmospheric absorption is not modeled by default.
    pub atten_db_per_m: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self { tx_gain_dbi: 26.4, rx_gain_dbi: 26.4, noise_temp_k: 290.0, noise_figure_db: 10.0, atten_db_per_m: 0.0 }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<(), LinkError> {
        let all = [self.tx_gain_dbi, self.rx_gain_dbi, self.noise_temp_k, self.noise_figure_db, self.atten_db_per_m];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(LinkError::Budget("non-finite parameter"));
        }
        if self.noise_temp_k <= 0.0 {
            return Err(LinkError::Budget("noise temperature must be positive"));
        }
        Ok(())
    }

    /// Receiver noise power over `noise_bw_hz`, dBm.
    pub fn noise_power_dbm(&self, noise_bw_hz: f64) -> f64 {
        10.0 * libm::log10(BOLTZMANN * self.noise_temp_k * noise_bw_hz * 1e3) + self.noise_figure_db
    }
}

/// 20·log10(4π·d·f/c).
pub fn fspl_db(distance_m: f64, freq_hz: f64) -> Result<f64, LinkError> {
    if !(distance_m > 0.0 && distance_m.is_finite()) {
        return Err(LinkError::Distance(distance_m));
    }
    if !(freq_hz > 0.0 && freq_hz.is_finite()) {
        return Err(LinkError::Frequency(freq_hz));
    }
    Ok(20.0 * libm::log10(4.0 * core::f64::consts::PI * distance_m * freq_hz / SPEED_OF_LIGHT))
}

pub fn received_power_dbm(cfg: &ChannelConfig, budget: &LinkBudget, distance_m: f64) -> Result<f64, LinkError> {
    let loss = fspl_db(distance_m, cfg.center_freq_hz)? + budget.atten_db_per_m * distance_m;
    Ok(cfg.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi - loss)
}

pub fn snr_db(cfg: &ChannelConfig, budget: &LinkBudget, distance_m: f64) -> Result<f64, LinkError> {
    Ok(received_power_dbm(cfg, budget, distance_m)? - budget.noise_power_dbm(cfg.nyquist_bw_hz))
}

/// Gaussian tail probability Q(x).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Uncoded AWGN bit error probability, clamped to [0, 0.5].
///
/// BPSK is exact; 16QAM is the Gray-mapped nearest-neighbour approximation
/// (3/8)·erfc(√(0.4·Eb/N0)).
pub fn ber(modulation: Modulation, snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    let snr = libm::pow(10.0, snr_db / 10.0);
    let ebn0 = snr / modulation.bits_per_symbol() as f64;
    let p = match modulation {
        Modulation::Bpsk => q_function(libm::sqrt(2.0 * ebn0)),
        Modulation::Qam16 => 0.375 * libm::erfc(libm::sqrt(0.4 * ebn0)),
    };
    p.clamp(0.0, 0.5)
}

/// Bit error probability of a channel at a distance.
pub fn channel_ber(cfg: &ChannelConfig, budget: &LinkBudget, distance_m: f64) -> Result<f64, LinkError> {
    Ok(ber(cfg.modulation, snr_db(cfg, budget, distance_m)?))
}

/// D = log2(M)·2·B_N, bits/s.
pub fn data_rate(cfg: &ChannelConfig) -> f64 {
    cfg.modulation.bits_per_symbol() as f64 * cfg.symbol_rate()
}

// 802.15.3d channel widths and Nyquist bandwidths, Hz.
const BW_2_16: (f64, f64) = (2.16e9, 880e6);
const BW_8_64: (f64, f64) = (8.64e9, 3520e6);
const BW_10_80: (f64, f64) = (10.80e9, 4400e6);

/// Centers of the five 2.16 GHz channels, Hz.
pub const CENTERS_2_16: [f64; 5] = [294.84e9, 297.00e9, 299.16e9, 301.32e9, 303.48e9];

fn channel(label: &str, center: f64, (bw, nyquist): (f64, f64), modulation: Modulation) -> ChannelConfig {
    ChannelConfig {
        label: label.into(),
        center_freq_hz: center,
        bandwidth_hz: bw,
        nyquist_bw_hz: nyquist,
        modulation,
        tx_power_dbm: SYSTEM_TX_POWER_DBM,
        roll_off: ROLL_OFF,
    }
}

/// Names accepted by [`channel_preset`].
pub const CHANNEL_PRESETS: [&str; 8] =
    ["aux-2.16", "main-8.64", "ref-10.80", "ch-294.84", "ch-297.00", "ch-299.16", "ch-301.32", "ch-303.48"];

/// A single channel carrying the full system transmit power.
///
/// `ch-*` channels are BPSK; `ref-10.80` is 16QAM.
pub fn channel_preset(name: &str) -> Option<ChannelConfig> {
    let cfg = match name {
        "aux-2.16" => channel("aux", 294.84e9, BW_2_16, Modulation::Bpsk),
        "main-8.64" => channel("main", 300.24e9, BW_8_64, Modulation::Qam16),
        "ref-10.80" => channel("ref", 299.16e9, BW_10_80, Modulation::Qam16),
        _ => {
            let center: f64 = name.strip_prefix("ch-")?.parse().ok()?;
            let center = CENTERS_2_16.into_iter().find(|&c| libm::fabs(c - center * 1e9) < 1e6)?;
            channel(name, center, BW_2_16, Modulation::Bpsk)
        }
    };
    Some(cfg)
}

/// A set of parallel channels sharing one transmit power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub label: String,
    pub channels: Vec<ChannelConfig>,
}

impl System {
    /// Splits `total_dbm` across the channels in proportion to their
    /// bandwidth, i.e. at equal power spectral density.
    pub fn with_total_power(label: &str, mut channels: Vec<ChannelConfig>, total_dbm: f64) -> Self {
        let total_bw: f64 = channels.iter().map(|c| c.bandwidth_hz).sum();
        for c in &mut channels {
            c.tx_power_dbm = total_dbm + 10.0 * libm::log10(c.bandwidth_hz / total_bw);
        }
        Self { label: label.into(), channels }
    }

    pub fn channel(&self, label: &str) -> Option<&ChannelConfig> {
        self.channels.iter().find(|c| c.label == label)
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        self.channels.iter().try_for_each(ChannelConfig::validate)
    }

    /// Σ D_i, bits/s.
    pub fn data_rate(&self) -> f64 {
        self.channels.iter().map(data_rate).sum()
    }
}

/// Names accepted by [`system_preset`].
pub const SYSTEM_PRESETS: [&str; 7] = [
    "main-aux",
    "ref-5x2.16",
    "ref-5x2.16-bpsk",
    "ref-5x2.16-16qam",
    "ref-1x10.80",
    "ref-1x10.80-bpsk",
    "ref-1x10.80-16qam",
];

/// The two-channel system (16QAM main on 8.64 GHz, BPSK auxiliary on
/// 2.16 GHz) and the five-channel and single-channel reference systems, all
/// at −8 dBm total. `ref-5x2.16` is BPSK and `ref-1x10.80` is 16QAM unless a
/// modulation suffix says otherwise.
pub fn system_preset(name: &str) -> Option<System> {
    let (base, modulation) = match name.rsplit_once('-') {
        Some((base, m @ ("bpsk" | "16qam"))) => (base, m.parse().ok()),
        _ => (name, None),
    };
    let channels = match base {
        "main-aux" if modulation.is_none() => {
            let main = channel("main", 300.24e9, BW_8_64, Modulation::Qam16);
            let aux = channel("aux", 294.84e9, BW_2_16, Modulation::Bpsk);
            return Some(System::with_total_power(name, alloc::vec![main, aux], SYSTEM_TX_POWER_DBM));
        }
        "ref-5x2.16" => {
            let modulation = modulation.unwrap_or(Modulation::Bpsk);
            CENTERS_2_16
                .iter()
                .map(|&c| {
                    let mut label = String::new();
                    let _ = fmt::write(&mut label, format_args!("ch-{:.2}", c / 1e9));
                    channel(&label, c, BW_2_16, modulation)
                })
                .collect()
        }
        "ref-1x10.80" => {
            alloc::vec![channel("ref", 299.16e9, BW_10_80, modulation.unwrap_or(Modulation::Qam16))]
        }
        _ => return None,
    };
    Some(System::with_total_power(name, channels, SYSTEM_TX_POWER_DBM))
}
