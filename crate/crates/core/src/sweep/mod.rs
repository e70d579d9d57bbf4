//! PER/PDR sweeps over PHY x beat frequency x power difference x voting.

mod config;
mod report;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{classify_beating, BeatingClass, BeatingScenario, BeatingThresholds};
use crate::packet::CRC_BITS;
use crate::phy::{PhyConfig, PhyKind};
use crate::sim::{run_experiment, RoundConfig, SimError};

pub use config::parse_config;
pub use report::{read_csv, summarize, write_csv, CsvError, CSV_COLUMNS, CSV_SCHEMA_VERSION};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown preset '{name}' (available: {})", PRESET_NAMES.join(", "))]
    UnknownPreset { name: String },
    #[error("{0} must not be empty")]
    EmptyList(&'static str),
    #[error("cfo_values_hz must all be positive, got {0}")]
    NonPositiveCfo(f64),
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("bad value for {key} '{value}': {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("line {0}: expected 'key = value'")]
    Syntax(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VotingMode {
    Both,
    On,
    Off,
}

impl VotingMode {
    /// Off before on, so paired cells sit next to each other.
    pub fn flags(self) -> &'static [bool] {
        match self {
            VotingMode::Both => &[false, true],
            VotingMode::On => &[true],
            VotingMode::Off => &[false],
        }
    }
}

impl fmt::Display for VotingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VotingMode::Both => "both",
            VotingMode::On => "on",
            VotingMode::Off => "off",
        })
    }
}

impl FromStr for VotingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "both" => Ok(VotingMode::Both),
            "on" => Ok(VotingMode::On),
            "off" => Ok(VotingMode::Off),
            other => Err(format!("expected both, on or off, got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub phys: Vec<PhyKind>,
    pub cfo_values_hz: Vec<f64>,
    pub power_deltas_db: Vec<f64>,
    pub snr_db: f64,
    pub num_packets: usize,
    pub slots_per_round: usize,
    pub master_seed: u64,
    pub voting: VotingMode,
    /// Payload bytes (before the CRC) for the BLE PHYs.
    pub ble_payload_bytes: usize,
    /// Payload bytes (before the CRC) for IEEE 802.15.4.
    pub ieee_payload_bytes: usize,
    /// Power of the stronger transmitter. SNR is normalized to total received
    /// power, so this only labels the scenario.
    pub tx_power_dbm: f64,
    /// Label written to the CSV. `None` classifies each cell instead.
    pub beating_class: Option<BeatingClass>,
    pub thresholds: BeatingThresholds,
}

pub const PRESET_NAMES: [&str; 6] = [
    "sim-wide-strong",
    "sim-narrow-strong",
    "sim-wide-weak",
    "sim-narrow-weak",
    "local-255B",
    "dcube-246B",
];

/// 500 Hz to 2 kHz in eight evenly spaced steps.
pub fn wide_cfo_grid() -> Vec<f64> {
    (0..8)
        .map(|i| 500.0 + 1500.0 * f64::from(i) / 7.0)
        .collect()
}

/// 10 kHz to 40 kHz in 5 kHz steps.
pub fn narrow_cfo_grid() -> Vec<f64> {
    (0..7).map(|i| 10_000.0 + 5_000.0 * f64::from(i)).collect()
}

pub const STRONG_DELTA_DB: f64 = 0.0;
pub const WEAK_DELTA_DB: f64 = 6.0;

fn simulation_preset(name: &str, class: BeatingClass) -> SweepSpec {
    SweepSpec {
        name: name.to_owned(),
        phys: PhyKind::ALL.to_vec(),
        cfo_values_hz: if class.is_wide() {
            wide_cfo_grid()
        } else {
            narrow_cfo_grid()
        },
        power_deltas_db: vec![if class.is_strong() {
            STRONG_DELTA_DB
        } else {
            WEAK_DELTA_DB
        }],
        snr_db: 25.0,
        num_packets: 200,
        slots_per_round: RoundConfig::DEFAULT_SLOTS,
        master_seed: 1,
        voting: VotingMode::Both,
        ble_payload_bytes: 255,
        ieee_payload_bytes: 125,
        tx_power_dbm: 0.0,
        beating_class: Some(class),
        thresholds: BeatingThresholds::default(),
    }
}

pub fn preset(name: &str) -> Result<SweepSpec, ConfigError> {
    let spec = match name {
        "sim-wide-strong" => simulation_preset(name, BeatingClass::WideStrong),
        "sim-narrow-strong" => simulation_preset(name, BeatingClass::NarrowStrong),
        "sim-wide-weak" => simulation_preset(name, BeatingClass::WideWeak),
        "sim-narrow-weak" => simulation_preset(name, BeatingClass::NarrowWeak),
        // Desk setup: 255 B BLE / 125 B 802.15.4, 100 packets per PHY at -40 dBm.
        "local-255B" => SweepSpec {
            num_packets: 100,
            tx_power_dbm: -40.0,
            cfo_values_hz: vec![1_000.0, 20_000.0],
            beating_class: None,
            ..simulation_preset(name, BeatingClass::WideStrong)
        },
        // Testbed setup: 246 B + CRC BLE, 128 B on air for 802.15.4, 200 packets at -20 dBm.
        "dcube-246B" => SweepSpec {
            num_packets: 200,
            ble_payload_bytes: 246,
            ieee_payload_bytes: 128 - CRC_BITS / 8,
            tx_power_dbm: -20.0,
            cfo_values_hz: vec![1_000.0, 20_000.0],
            beating_class: None,
            ..simulation_preset(name, BeatingClass::WideStrong)
        },
        _ => {
            return Err(ConfigError::UnknownPreset {
                name: name.to_owned(),
            })
        }
    };
    Ok(spec)
}

pub fn preset_description(name: &str) -> &'static str {
    match name {
        "sim-wide-strong" => "5 PHYs, 500-2000 Hz, equal power, 25 dB SNR, 200 packets",
        "sim-narrow-strong" => "5 PHYs, 10-40 kHz, equal power, 25 dB SNR, 200 packets",
        "sim-wide-weak" => "5 PHYs, 500-2000 Hz, 6 dB power difference, 25 dB SNR, 200 packets",
        "sim-narrow-weak" => "5 PHYs, 10-40 kHz, 6 dB power difference, 25 dB SNR, 200 packets",
        "local-255B" => "255 B BLE / 125 B 802.15.4 payloads, -40 dBm, 100 packets",
        "dcube-246B" => "246 B BLE / 126 B 802.15.4 payloads + CRC, -20 dBm, 200 packets",
        _ => "",
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.phys.is_empty() {
            return Err(ConfigError::EmptyList("phys"));
        }
        if self.cfo_values_hz.is_empty() {
            return Err(ConfigError::EmptyList("cfo_values_hz"));
        }
        if self.power_deltas_db.is_empty() {
            return Err(ConfigError::EmptyList("power_deltas_db"));
        }
        if let Some(&bad) = self
            .cfo_values_hz
            .iter()
            .find(|&&f| !(f > 0.0 && f.is_finite()))
        {
            return Err(ConfigError::NonPositiveCfo(bad));
        }
        if self.num_packets == 0 {
            return Err(ConfigError::Zero("num_packets"));
        }
        if self.slots_per_round == 0 {
            return Err(ConfigError::Zero("slots_per_round"));
        }
        if self.ble_payload_bytes == 0 {
            return Err(ConfigError::Zero("ble_payload_bytes"));
        }
        if self.ieee_payload_bytes == 0 {
            return Err(ConfigError::Zero("ieee_payload_bytes"));
        }
        Ok(())
    }

    pub fn payload_bytes(&self, kind: PhyKind) -> usize {
        if kind.is_ble() {
            self.ble_payload_bytes
        } else {
            self.ieee_payload_bytes
        }
    }

    /// Every cell in output order: phy, cfo, power delta, voting.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &phy in &self.phys {
            for (ci, &cfo_hz) in self.cfo_values_hz.iter().enumerate() {
                for (di, &power_delta_db) in self.power_deltas_db.iter().enumerate() {
                    let seed = self.cell_seed(phy, ci, di);
                    for &voting in self.voting.flags() {
                        cells.push(Cell {
                            phy,
                            cfo_hz,
                            power_delta_db,
                            voting,
                            seed,
                        });
                    }
                }
            }
        }
        cells
    }

    /// Shared by the voting-on and voting-off cells of one grid point.
    fn cell_seed(&self, phy: PhyKind, cfo_index: usize, delta_index: usize) -> u64 {
        let stream = ((phy as u64) << 48) | ((cfo_index as u64) << 24) | delta_index as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(stream);
        rng.random()
    }

    pub fn round_config(&self, cell: &Cell) -> Result<RoundConfig, SimError> {
        let scenario = BeatingScenario::pair(
            self.tx_power_dbm,
            cell.power_delta_db,
            cell.cfo_hz,
            self.snr_db,
        )?;
        Ok(RoundConfig {
            slots_per_round: self.slots_per_round,
            voting_enabled: cell.voting,
            ..RoundConfig::new(
                PhyConfig::new(cell.phy),
                scenario,
                self.payload_bytes(cell.phy),
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub phy: PhyKind,
    pub cfo_hz: f64,
    pub power_delta_db: f64,
    pub voting: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub phy: PhyKind,
    pub cfo_hz: f64,
    pub power_delta_db: f64,
    pub snr_db: f64,
    pub beating_class: BeatingClass,
    pub voting: bool,
    pub num_packets: usize,
    pub per: f64,
    pub pdr: f64,
    pub corrections: usize,
    pub false_accepts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub cell: Cell,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<CellFailure>,
}

fn run_cell(spec: &SweepSpec, cell: &Cell) -> Result<SweepRow, SimError> {
    let cfg = spec.round_config(cell)?;
    let beating_class = match spec.beating_class {
        Some(class) => class,
        None => classify_beating(
            &cfg.scenario,
            &cfg.phy,
            (cfg.payload_bytes + CRC_BITS / 8) * 8,
            &spec.thresholds,
        )?,
    };
    let metrics = run_experiment(&cfg, spec.num_packets, cell.seed)?;
    Ok(SweepRow {
        phy: cell.phy,
        cfo_hz: cell.cfo_hz,
        power_delta_db: cell.power_delta_db,
        snr_db: spec.snr_db,
        beating_class,
        voting: cell.voting,
        num_packets: metrics.packets,
        per: metrics.per,
        pdr: metrics.pdr,
        corrections: metrics.corrections,
        false_accepts: metrics.false_accepts,
        seed: cell.seed,
    })
}

/// Runs every cell on the rayon pool. Rows keep [`SweepSpec::cells`] order
/// regardless of completion order; failed cells are reported, not fatal.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport, ConfigError> {
    spec.validate()?;
    let results: Vec<(Cell, Result<SweepRow, SimError>)> = spec
        .cells()
        .into_par_iter()
        .map(|cell| (cell, run_cell(spec, &cell)))
        .collect();
    let mut report = SweepReport::default();
    for (cell, result) in results {
        match result {
            Ok(row) => report.rows.push(row),
            Err(e) => report.failures.push(CellFailure {
                cell,
                error: e.to_string(),
            }),
        }
    }
    Ok(report)
}
