//! Superposition of frequency-offset copies of the same transmission.
//!
//! Synchronous transmitters send identical symbols, so the composite signal is
//! the data waveform scaled by `sum_k A_k exp(j(2 pi f_k t + phi_k))`. Only the
//! magnitude of that factor matters to a receiver: it is the beating envelope.
//! Noise is folded into a per-sample SNR, `E[n]^2 / sigma^2`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::phy::PhyConfig;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("undersampled beating: fs = {fs} Hz but max |cfo| = {max_cfo} Hz")]
    Undersampled { fs: f64, max_cfo: f64 },
    #[error("no transmitters")]
    NoTransmitters,
    #[error("no beating: scenario has a single transmitter")]
    NoBeating,
    #[error("amplitude must be positive and finite, got {0}")]
    BadAmplitude(f64),
    #[error("phase must lie in [0, 2pi), got {0}")]
    BadPhase(f64),
    #[error("power difference {delta_db:.2} dB exceeds the {capture_db} dB capture threshold")]
    AboveCapture { delta_db: f64, capture_db: f64 },
    #[error("channel must have at least one sample")]
    NoSamples,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitterProfile {
    amplitude: f64,
    cfo_hz: f64,
    phase0_rad: f64,
}

impl TransmitterProfile {
    pub fn new(amplitude: f64, cfo_hz: f64, phase0_rad: f64) -> Result<Self, ChannelError> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(ChannelError::BadAmplitude(amplitude));
        }
        if !(0.0..TAU).contains(&phase0_rad) {
            return Err(ChannelError::BadPhase(phase0_rad));
        }
        Ok(Self {
            amplitude,
            cfo_hz,
            phase0_rad,
        })
    }

    /// Voltage gain of a transmitter at `power_dbm` relative to 0 dBm.
    pub fn from_power_dbm(
        power_dbm: f64,
        cfo_hz: f64,
        phase0_rad: f64,
    ) -> Result<Self, ChannelError> {
        Self::new(10f64.powf(power_dbm / 20.0), cfo_hz, phase0_rad)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn cfo_hz(&self) -> f64 {
        self.cfo_hz
    }

    pub fn phase0_rad(&self) -> f64 {
        self.phase0_rad
    }

    pub fn power_dbm(&self) -> f64 {
        20.0 * self.amplitude.log10()
    }

    /// Same transmitter with a new starting phase, wrapped into [0, 2pi).
    pub fn with_phase(&self, phase0_rad: f64) -> Self {
        Self {
            phase0_rad: phase0_rad.rem_euclid(TAU),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BeatingClass {
    WideStrong,
    WideWeak,
    NarrowStrong,
    NarrowWeak,
}

impl BeatingClass {
    pub const ALL: [BeatingClass; 4] = [
        BeatingClass::WideStrong,
        BeatingClass::WideWeak,
        BeatingClass::NarrowStrong,
        BeatingClass::NarrowWeak,
    ];

    pub fn is_wide(self) -> bool {
        matches!(self, BeatingClass::WideStrong | BeatingClass::WideWeak)
    }

    pub fn is_strong(self) -> bool {
        matches!(self, BeatingClass::WideStrong | BeatingClass::NarrowStrong)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BeatingClass::WideStrong => "wide-strong",
            BeatingClass::WideWeak => "wide-weak",
            BeatingClass::NarrowStrong => "narrow-strong",
            BeatingClass::NarrowWeak => "narrow-weak",
        }
    }
}

impl fmt::Display for BeatingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BeatingClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown beating class '{s}'"))
    }
}

/// Thresholds separating the four beating classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatingThresholds {
    /// Narrow once this many beat periods fit in one packet airtime.
    pub narrow_min_periods: f64,
    /// Strong when the largest pairwise power difference is at most this.
    pub strong_max_db: f64,
    /// Larger power differences are capture, not beating.
    pub capture_db: f64,
}

impl Default for BeatingThresholds {
    fn default() -> Self {
        Self {
            narrow_min_periods: 4.0,
            strong_max_db: 3.0,
            capture_db: 9.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeatingScenario {
    pub transmitters: Vec<TransmitterProfile>,
    pub snr_db: f64,
}

impl BeatingScenario {
    /// A reference transmitter at `tx_power_dbm` with zero offset, plus a
    /// second one `power_delta_db` weaker and offset by `cfo_hz`.
    pub fn pair(
        tx_power_dbm: f64,
        power_delta_db: f64,
        cfo_hz: f64,
        snr_db: f64,
    ) -> Result<Self, ChannelError> {
        Ok(Self {
            transmitters: vec![
                TransmitterProfile::from_power_dbm(tx_power_dbm, 0.0, 0.0)?,
                TransmitterProfile::from_power_dbm(tx_power_dbm - power_delta_db, cfo_hz, 0.0)?,
            ],
            snr_db,
        })
    }

    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    /// Noise variance such that total received power over noise equals the SNR.
    pub fn noise_variance(&self) -> f64 {
        let power: f64 = self.transmitters.iter().map(|t| t.amplitude.powi(2)).sum();
        power / self.snr_linear()
    }
}

/// `E[n] = | sum_k A_k exp(j(2 pi cfo_k n / fs + phi_k)) |`.
pub fn envelope(transmitters: &[TransmitterProfile], n: u64, fs: f64) -> Result<f64, ChannelError> {
    check_sampling(transmitters, fs)?;
    let t = n as f64 / fs;
    let (re, im) = transmitters.iter().fold((0.0, 0.0), |(re, im), tx| {
        // Reduce the phase modulo one cycle first so large n keeps precision.
        let cycles = (tx.cfo_hz * t).rem_euclid(1.0);
        let (s, c) = (TAU * cycles + tx.phase0_rad).sin_cos();
        (re + tx.amplitude * c, im + tx.amplitude * s)
    });
    Ok(re.hypot(im))
}

fn check_sampling(transmitters: &[TransmitterProfile], fs: f64) -> Result<(), ChannelError> {
    if transmitters.is_empty() {
        return Err(ChannelError::NoTransmitters);
    }
    let max_cfo = transmitters
        .iter()
        .map(|t| t.cfo_hz.abs())
        .fold(0.0, f64::max);
    if fs <= 2.0 * max_cfo {
        return Err(ChannelError::Undersampled { fs, max_cfo });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    sample_rate_hz: f64,
    noise_variance: f64,
    envelope: Vec<f64>,
    snr: Vec<f64>,
}

impl ChannelRealization {
    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn envelope_per_sample(&self) -> &[f64] {
        &self.envelope
    }

    /// Instantaneous linear SNR per sample.
    pub fn snr_per_sample(&self) -> &[f64] {
        &self.snr
    }

    pub fn len(&self) -> usize {
        self.snr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr.is_empty()
    }
}

/// Phasors are advanced by complex rotation and re-anchored exactly this often.
const REANCHOR_INTERVAL: usize = 1024;

/// Envelope and instantaneous SNR for `num_samples` samples at `fs`.
///
/// The realization is a deterministic function of the scenario: per-slot
/// randomness (phases) lives in the transmitter profiles.
pub fn realize_channel(
    scenario: &BeatingScenario,
    num_samples: usize,
    fs: f64,
) -> Result<ChannelRealization, ChannelError> {
    check_sampling(&scenario.transmitters, fs)?;
    if num_samples == 0 {
        return Err(ChannelError::NoSamples);
    }
    let noise_variance = scenario.noise_variance();
    let steps: Vec<(f64, f64)> = scenario
        .transmitters
        .iter()
        .map(|tx| {
            let (s, c) = (TAU * tx.cfo_hz / fs).sin_cos();
            (c, s)
        })
        .collect();
    let mut phasors = vec![(0.0, 0.0); scenario.transmitters.len()];
    let mut envelope = Vec::with_capacity(num_samples);
    for n in 0..num_samples {
        if n % REANCHOR_INTERVAL == 0 {
            let t = n as f64 / fs;
            for (p, tx) in phasors.iter_mut().zip(&scenario.transmitters) {
                let cycles = (tx.cfo_hz * t).rem_euclid(1.0);
                let (s, c) = (TAU * cycles + tx.phase0_rad).sin_cos();
                *p = (tx.amplitude * c, tx.amplitude * s);
            }
        }
        let (re, im) = phasors
            .iter()
            .fold((0.0, 0.0), |(re, im), p| (re + p.0, im + p.1));
        envelope.push(re.hypot(im));
        for (p, &(c, s)) in phasors.iter_mut().zip(&steps) {
            *p = (p.0 * c - p.1 * s, p.0 * s + p.1 * c);
        }
    }
    let snr = envelope.iter().map(|e| e * e / noise_variance).collect();
    Ok(ChannelRealization {
        sample_rate_hz: fs,
        noise_variance,
        envelope,
        snr,
    })
}

/// Classifies the beating between the two strongest transmitters.
///
/// Wide when fewer than `narrow_min_periods` beat periods fit in the airtime of
/// `packet_bits` on `phy`; strong when the largest pairwise power difference is
/// at most `strong_max_db`.
pub fn classify_beating(
    scenario: &BeatingScenario,
    phy: &PhyConfig,
    packet_bits: usize,
    thresholds: &BeatingThresholds,
) -> Result<BeatingClass, ChannelError> {
    match scenario.transmitters.len() {
        0 => return Err(ChannelError::NoTransmitters),
        1 => return Err(ChannelError::NoBeating),
        _ => {}
    }
    let mut by_power = scenario.transmitters.clone();
    by_power.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    let beat_hz = (by_power[0].cfo_hz - by_power[1].cfo_hz).abs();
    let periods = beat_hz * phy.airtime_for_bits(packet_bits);

    let loudest = by_power[0].amplitude;
    let quietest = by_power[by_power.len() - 1].amplitude;
    let delta_db = 20.0 * (loudest / quietest).log10();
    if delta_db > thresholds.capture_db {
        return Err(ChannelError::AboveCapture {
            delta_db,
            capture_db: thresholds.capture_db,
        });
    }

    let wide = periods < thresholds.narrow_min_periods;
    let strong = delta_db <= thresholds.strong_max_db;
    Ok(match (wide, strong) {
        (true, true) => BeatingClass::WideStrong,
        (true, false) => BeatingClass::WideWeak,
        (false, true) => BeatingClass::NarrowStrong,
        (false, false) => BeatingClass::NarrowWeak,
    })
}
