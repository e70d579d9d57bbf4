//! The five PHY chains: payload bits to air symbols and back.
//!
//! Symbols are corrupted independently, each with the error probability that
//! its mean instantaneous SNR implies. The beating envelope supplies that SNR,
//! so corruption arrives in bursts at the beat frequency.

pub mod ber;
pub mod conv;
pub mod dsss;
pub mod pattern;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitVector;
use crate::channel::ChannelRealization;

pub use ber::{ber, BerModel};
pub use conv::{conv_encode, viterbi_decode, ConvCode};
pub use dsss::{dsss_despread, dsss_spread, ChipTable};
pub use pattern::{pattern_demap, pattern_map, PatternFactor};

pub const SAMPLES_PER_SYMBOL: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum PhyError {
    #[error("coded length {0} must be even and at least 8")]
    BadCodedLength(usize),
    #[error("length {len} is not a multiple of {multiple}")]
    BadSymbolLength { len: usize, multiple: usize },
    #[error("empty input")]
    Empty,
    #[error("negative SNR {0}")]
    NegativeSnr(f64),
    #[error("channel has {have} samples but the frame needs {need}")]
    ChannelTooShort { have: usize, need: usize },
    #[error("chip table: {0}")]
    ChipTable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhyKind {
    Ble1M,
    Ble2M,
    Ble125K,
    Ble500K,
    Ieee154,
}

impl PhyKind {
    pub const ALL: [PhyKind; 5] = [
        PhyKind::Ble1M,
        PhyKind::Ble2M,
        PhyKind::Ble125K,
        PhyKind::Ble500K,
        PhyKind::Ieee154,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PhyKind::Ble1M => "ble-1m",
            PhyKind::Ble2M => "ble-2m",
            PhyKind::Ble125K => "ble-125k",
            PhyKind::Ble500K => "ble-500k",
            PhyKind::Ieee154 => "ieee802154",
        }
    }

    pub fn is_coded(self) -> bool {
        !matches!(self, PhyKind::Ble1M | PhyKind::Ble2M)
    }

    pub fn is_ble(self) -> bool {
        self != PhyKind::Ieee154
    }
}

impl fmt::Display for PhyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == lower)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.as_str()).collect();
                format!("unknown PHY '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coding {
    None,
    Conv {
        code: ConvCode,
        pattern: PatternFactor,
    },
    Dsss(Arc<ChipTable>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhyConfig {
    pub kind: PhyKind,
    pub symbol_rate_hz: f64,
    pub coding: Coding,
    pub ber_model: BerModel,
}

impl PhyConfig {
    pub fn new(kind: PhyKind) -> Self {
        let conv = |pattern| Coding::Conv {
            code: ConvCode::BLE_CODED,
            pattern,
        };
        let (symbol_rate_hz, coding, ber_model) = match kind {
            PhyKind::Ble1M => (1e6, Coding::None, BerModel::NoncoherentFsk),
            PhyKind::Ble2M => (2e6, Coding::None, BerModel::NoncoherentFsk),
            PhyKind::Ble125K => (1e6, conv(PatternFactor::P4), BerModel::NoncoherentFsk),
            PhyKind::Ble500K => (1e6, conv(PatternFactor::P1), BerModel::NoncoherentFsk),
            PhyKind::Ieee154 => (
                2e6,
                Coding::Dsss(ChipTable::ieee_802154()),
                BerModel::CoherentOqpskChip,
            ),
        };
        Self {
            kind,
            symbol_rate_hz,
            coding,
            ber_model,
        }
    }

    /// Replaces the chip table of a DSSS PHY; other PHYs are unchanged.
    pub fn with_chip_table(mut self, table: ChipTable) -> Self {
        if let Coding::Dsss(_) = self.coding {
            self.coding = Coding::Dsss(Arc::new(table));
        }
        self
    }

    pub fn samples_per_symbol(&self) -> usize {
        SAMPLES_PER_SYMBOL
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.symbol_rate_hz * SAMPLES_PER_SYMBOL as f64
    }

    /// Number of air symbols (coded bits, pattern symbols or chips) carrying
    /// `bits` payload bits.
    pub fn air_symbols_for_bits(&self, bits: usize) -> usize {
        match &self.coding {
            Coding::None => bits,
            Coding::Conv { code, pattern } => code.coded_len(bits) * pattern.symbols_per_bit(),
            Coding::Dsss(_) => bits.div_ceil(dsss::BITS_PER_SYMBOL) * dsss::CHIPS_PER_SYMBOL,
        }
    }

    pub fn airtime_for_bits(&self, bits: usize) -> f64 {
        self.air_symbols_for_bits(bits) as f64 / self.symbol_rate_hz
    }
}

/// Airtime in seconds of a `payload_bytes`-byte packet.
pub fn airtime(phy: &PhyConfig, payload_bytes: usize) -> f64 {
    phy.airtime_for_bits(payload_bytes * 8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AirFrame {
    pub symbols: BitVector,
    pub airtime_s: f64,
}

impl AirFrame {
    pub fn samples_needed(&self) -> usize {
        self.symbols.len() * SAMPLES_PER_SYMBOL
    }
}

/// Runs the transmit-side coding chain.
pub fn encode(phy: &PhyConfig, bits: &BitVector) -> Result<AirFrame, PhyError> {
    if bits.is_empty() {
        return Err(PhyError::Empty);
    }
    let symbols = match &phy.coding {
        Coding::None => bits.clone(),
        Coding::Conv { code, pattern } => pattern_map(&code.encode(bits), *pattern),
        Coding::Dsss(table) => table.spread(bits)?,
    };
    let airtime_s = symbols.len() as f64 / phy.symbol_rate_hz;
    Ok(AirFrame { symbols, airtime_s })
}

/// Encodes `on_air` and corrupts each air symbol with probability
/// `ber(mean SNR over its samples)`. Returns the received air symbols.
pub fn transmit<R: Rng + ?Sized>(
    phy: &PhyConfig,
    on_air: &BitVector,
    ch: &ChannelRealization,
    rng: &mut R,
) -> Result<BitVector, PhyError> {
    let frame = encode(phy, on_air)?;
    let need = frame.samples_needed();
    if ch.len() < need {
        return Err(PhyError::ChannelTooShort {
            have: ch.len(),
            need,
        });
    }
    let mut received = frame.symbols;
    let snr = ch.snr_per_sample();
    for i in 0..received.len() {
        let window = &snr[i * SAMPLES_PER_SYMBOL..(i + 1) * SAMPLES_PER_SYMBOL];
        let mean = window.iter().sum::<f64>() / SAMPLES_PER_SYMBOL as f64;
        let p = ber(phy.ber_model, mean)?;
        // Always draw so the random stream does not depend on the SNR.
        let u: f64 = rng.random();
        if u < p {
            received.flip(i);
        }
    }
    Ok(received)
}

/// [`transmit`] with a fresh generator seeded from `seed`.
pub fn transmit_seeded(
    phy: &PhyConfig,
    on_air: &BitVector,
    ch: &ChannelRealization,
    seed: u64,
) -> Result<BitVector, PhyError> {
    transmit(phy, on_air, ch, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Inverts the coding chain, yielding candidate on-air packet bits.
pub fn receive(phy: &PhyConfig, received_air: &BitVector) -> Result<BitVector, PhyError> {
    if received_air.is_empty() {
        return Err(PhyError::Empty);
    }
    match &phy.coding {
        Coding::None => Ok(received_air.clone()),
        Coding::Conv { code, pattern } => {
            let per_bit = pattern.symbols_per_bit();
            if !received_air.len().is_multiple_of(2 * per_bit) {
                return Err(PhyError::BadSymbolLength {
                    len: received_air.len(),
                    multiple: 2 * per_bit,
                });
            }
            code.decode(&pattern_demap(received_air, *pattern)?)
        }
        Coding::Dsss(table) => table.despread(received_air),
    }
}
