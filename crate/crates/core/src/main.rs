use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use stx_vote::channel::BeatingScenario;
use stx_vote::phy::{PhyConfig, PhyKind};
use stx_vote::sim::{packet_for_round, run_round, RoundConfig, SlotStatus};
use stx_vote::sweep::{
    parse_config, preset, preset_description, run_sweep, summarize, write_csv, PRESET_NAMES,
};

#[derive(Parser)]
#[command(
    name = "stx-vote",
    version,
    about = "Beating-effect simulator with bit voting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a PER/PDR sweep and write one CSV row per cell.
    Sweep(SweepArgs),
    /// Trace a single round slot by slot.
    Round(RoundArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Built-in preset to start from.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// `key = value` config file (may name its own preset).
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path [default: <sweep name>.csv].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    packets: Option<usize>,
    #[arg(long)]
    slots: Option<usize>,
    /// Comma-separated PHY names.
    #[arg(long)]
    phys: Option<String>,
    /// both, on or off.
    #[arg(long)]
    voting: Option<String>,
    #[arg(long)]
    snr_db: Option<f64>,
    /// Any config key, e.g. `--set cfo_values_hz=1000,2000`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(clap::Args)]
struct RoundArgs {
    #[arg(long, default_value = "ble-1m")]
    phy: PhyKind,
    #[arg(long, default_value_t = 20_000.0)]
    cfo_hz: f64,
    #[arg(long, default_value_t = 0.0)]
    power_delta_db: f64,
    #[arg(long, default_value_t = 25.0)]
    snr_db: f64,
    #[arg(long, default_value_t = RoundConfig::DEFAULT_SLOTS)]
    slots: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Index of the packet under `--seed`.
    #[arg(long, default_value_t = 0)]
    packet: u64,
    /// Payload bytes before the CRC [default: 255 BLE, 125 802.15.4].
    #[arg(long)]
    payload_bytes: Option<usize>,
    #[arg(long)]
    no_voting: bool,
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut spec = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(name)) => preset(name)?,
        (None, None) => bail!(
            "either --preset or --config is required (presets: {})",
            PRESET_NAMES.join(", ")
        ),
    };
    let mut overrides: Vec<(String, String)> = Vec::new();
    if let Some(v) = args.seed {
        overrides.push(("seed".into(), v.to_string()));
    }
    if let Some(v) = args.packets {
        overrides.push(("num_packets".into(), v.to_string()));
    }
    if let Some(v) = args.slots {
        overrides.push(("slots_per_round".into(), v.to_string()));
    }
    if let Some(v) = args.phys {
        overrides.push(("phys".into(), v));
    }
    if let Some(v) = args.voting {
        overrides.push(("voting".into(), v));
    }
    if let Some(v) = args.snr_db {
        overrides.push(("snr_db".into(), v.to_string()));
    }
    for kv in &args.sets {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got '{kv}'"))?;
        overrides.push((k.trim().into(), v.trim().into()));
    }
    for (k, v) in &overrides {
        spec.set(k, v)?;
    }
    spec.validate()?;

    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", spec.name)));
    let report = run_sweep(&spec)?;
    let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(&report.rows, BufWriter::new(file))?;

    println!(
        "{} ({} packets per cell, seed {})",
        spec.name, spec.num_packets, spec.master_seed
    );
    print!("{}", summarize(&report.rows));
    println!("wrote {}", out.display());
    for f in &report.failures {
        eprintln!(
            "cell failed: {} cfo={} Hz delta={} dB voting={}: {}",
            f.cell.phy,
            f.cell.cfo_hz,
            f.cell.power_delta_db,
            if f.cell.voting { "on" } else { "off" },
            f.error
        );
    }
    Ok(if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn round(args: RoundArgs) -> Result<ExitCode> {
    let bytes = args
        .payload_bytes
        .unwrap_or(if args.phy.is_ble() { 255 } else { 125 });
    let scenario = BeatingScenario::pair(0.0, args.power_delta_db, args.cfo_hz, args.snr_db)?;
    let cfg = RoundConfig {
        slots_per_round: args.slots,
        voting_enabled: !args.no_voting,
        ..RoundConfig::new(PhyConfig::new(args.phy), scenario, bytes)
    };
    let (packet, round_seed) = packet_for_round(args.seed, args.packet, bytes)?;
    let out = run_round(&cfg, &packet, round_seed)?;

    println!(
        "{} {} on-air bits, cfo {} Hz, delta {} dB, snr {} dB, voting {}",
        args.phy,
        packet.on_air_len(),
        args.cfo_hz,
        args.power_delta_db,
        args.snr_db,
        if cfg.voting_enabled { "on" } else { "off" }
    );
    for (i, (status, errors)) in out
        .per_slot_status
        .iter()
        .zip(&out.per_slot_bit_errors)
        .enumerate()
    {
        let status = match status {
            SlotStatus::CorrectCrc => "crc ok",
            SlotStatus::ErrorCrc => "crc error",
        };
        println!("slot {}: {status:<9} {errors} bit errors", i + 1);
    }
    let verdict = if out.delivered_on_air() {
        "delivered on air"
    } else if out.recovered_by_voting {
        "recovered by voting"
    } else {
        "lost"
    };
    println!(
        "packet {}: {verdict} ({} receptions voted{})",
        out.packet_id,
        out.receptions_voted,
        if out.false_accept {
            ", FALSE ACCEPT"
        } else {
            ""
        }
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Sweep(args) => sweep(args),
        Command::Round(args) => round(args),
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name:<18} {}", preset_description(name));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
