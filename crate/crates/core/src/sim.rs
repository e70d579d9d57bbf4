//! Single-hop synchronous-transmission rounds.
//!
//! A source and a forwarder send the same packet in every slot of a round. The
//! destination checks each decoded copy's CRC, votes on the failures and, if no
//! slot succeeded, tries to rebuild the packet from the votes at round end.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bits::BitVector;
use crate::channel::{realize_channel, BeatingScenario, ChannelError};
use crate::packet::{make_packet, verify_packet, Packet, PacketError, PacketId};
use crate::phy::{self, PhyConfig, PhyError};
use crate::vote::{ReceptionEvent, VoteError, VotingReceiver};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("slots_per_round must be at least 1")]
    NoSlots,
    #[error("num_packets must be at least 1")]
    NoPackets,
    #[error("payload must be at least one byte")]
    EmptyPayload,
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    Packet(#[from] PacketError),
    #[error(transparent)]
    Vote(#[from] VoteError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundConfig {
    pub slots_per_round: usize,
    pub scenario: BeatingScenario,
    pub phy: PhyConfig,
    pub voting_enabled: bool,
    /// Redraw every transmitter's starting phase uniformly in each slot.
    pub phase_randomization: bool,
    /// Payload bytes per packet, before the 2-byte CRC.
    pub payload_bytes: usize,
}

impl RoundConfig {
    pub const DEFAULT_SLOTS: usize = 6;

    pub fn new(phy: PhyConfig, scenario: BeatingScenario, payload_bytes: usize) -> Self {
        Self {
            slots_per_round: Self::DEFAULT_SLOTS,
            scenario,
            phy,
            voting_enabled: true,
            phase_randomization: true,
            payload_bytes,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.slots_per_round == 0 {
            return Err(SimError::NoSlots);
        }
        if self.payload_bytes == 0 {
            return Err(SimError::EmptyPayload);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotStatus {
    CorrectCrc,
    ErrorCrc,
}

/// One round at the destination. Slots after the first correct reception are
/// not listened to, so `per_slot_status` may be shorter than the round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundOutcome {
    pub packet_id: PacketId,
    pub per_slot_status: Vec<SlotStatus>,
    /// Decoded bits that differ from the transmitted packet, per slot.
    pub per_slot_bit_errors: Vec<usize>,
    pub recovered_by_voting: bool,
    pub delivered: bool,
    pub receptions_voted: usize,
    /// The accepted packet (on air or by voting) differs from the one sent.
    pub false_accept: bool,
}

impl RoundOutcome {
    pub fn delivered_on_air(&self) -> bool {
        self.per_slot_status.contains(&SlotStatus::CorrectCrc)
    }
}

fn slot_rng(round_seed: u64, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(round_seed);
    rng.set_stream(slot as u64);
    rng
}

pub fn run_round(
    cfg: &RoundConfig,
    packet: &Packet,
    rng_seed: u64,
) -> Result<RoundOutcome, SimError> {
    cfg.validate()?;
    let on_air = packet.on_air();
    let samples = cfg.phy.air_symbols_for_bits(on_air.len()) * cfg.phy.samples_per_symbol();
    let fs = cfg.phy.sample_rate_hz();
    let mut receiver = VotingReceiver::new(cfg.voting_enabled);
    let mut scenario = cfg.scenario.clone();

    let mut per_slot_status = Vec::with_capacity(cfg.slots_per_round);
    let mut per_slot_bit_errors = Vec::with_capacity(cfg.slots_per_round);
    let mut delivered = false;
    let mut false_accept = false;

    for slot in 0..cfg.slots_per_round {
        let mut rng = slot_rng(rng_seed, slot);
        if cfg.phase_randomization {
            for (tx, base) in scenario
                .transmitters
                .iter_mut()
                .zip(&cfg.scenario.transmitters)
            {
                *tx = base.with_phase(rng.random_range(0.0..TAU));
            }
        }
        let channel = realize_channel(&scenario, samples, fs)?;
        let air = phy::transmit(&cfg.phy, &on_air, &channel, &mut rng)?;
        let decoded = phy::receive(&cfg.phy, &air)?;
        let crc_ok = verify_packet(&decoded)?;
        per_slot_bit_errors.push(
            decoded
                .hamming_distance(&on_air)
                .expect("decoder preserves length"),
        );
        let event = receiver.on_reception(packet.id(), &decoded, crc_ok)?;
        if event == ReceptionEvent::Correct {
            per_slot_status.push(SlotStatus::CorrectCrc);
            delivered = true;
            false_accept = decoded != on_air;
            break;
        }
        per_slot_status.push(SlotStatus::ErrorCrc);
    }

    let mut recovered_by_voting = false;
    if !delivered {
        if let Some(Ok(recovered)) = receiver.end_of_round(packet.id()) {
            recovered_by_voting = true;
            delivered = true;
            false_accept = recovered.on_air() != on_air;
        }
    }
    let receptions_voted = receiver.state().map_or(0, |s| s.num_accumulated());

    Ok(RoundOutcome {
        packet_id: packet.id(),
        per_slot_status,
        per_slot_bit_errors,
        recovered_by_voting,
        delivered,
        receptions_voted,
        false_accept,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepMetrics {
    pub packets: usize,
    pub delivered: usize,
    pub per: f64,
    pub pdr: f64,
    /// Rounds delivered only because voting rebuilt the packet.
    pub corrections: usize,
    pub false_accepts: usize,
}

impl SweepMetrics {
    pub fn from_outcomes(outcomes: &[RoundOutcome]) -> Self {
        let packets = outcomes.len();
        let delivered = outcomes.iter().filter(|o| o.delivered).count();
        let pdr = if packets == 0 {
            0.0
        } else {
            delivered as f64 / packets as f64
        };
        Self {
            packets,
            delivered,
            per: 1.0 - pdr,
            pdr,
            corrections: outcomes.iter().filter(|o| o.recovered_by_voting).count(),
            false_accepts: outcomes.iter().filter(|o| o.false_accept).count(),
        }
    }
}

/// The packet and round seed for the `index`-th round under `master_seed`.
/// Independent of voting and slot count, so runs that differ only in those
/// see identical payloads, phases and noise.
pub fn packet_for_round(
    master_seed: u64,
    index: u64,
    payload_bytes: usize,
) -> Result<(Packet, u64), SimError> {
    if payload_bytes == 0 {
        return Err(SimError::EmptyPayload);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    let mut payload = vec![0u8; payload_bytes];
    rng.fill(&mut payload[..]);
    let round_seed = rng.random();
    let packet = make_packet(PacketId(index), BitVector::from_bytes(&payload))?;
    Ok((packet, round_seed))
}

/// Runs `num_packets` independent rounds and returns every outcome in order.
pub fn run_rounds(
    cfg: &RoundConfig,
    num_packets: usize,
    master_seed: u64,
) -> Result<Vec<RoundOutcome>, SimError> {
    cfg.validate()?;
    if num_packets == 0 {
        return Err(SimError::NoPackets);
    }
    (0..num_packets as u64)
        .into_par_iter()
        .map(|i| {
            let (packet, seed) = packet_for_round(master_seed, i, cfg.payload_bytes)?;
            run_round(cfg, &packet, seed)
        })
        .collect()
}

pub fn run_experiment(
    cfg: &RoundConfig,
    num_packets: usize,
    master_seed: u64,
) -> Result<SweepMetrics, SimError> {
    Ok(SweepMetrics::from_outcomes(&run_rounds(
        cfg,
        num_packets,
        master_seed,
    )?))
}
