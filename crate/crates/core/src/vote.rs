//! Per-bit majority voting across erroneous receptions of the same packet.
//!
//! Each reception that fails its CRC moves every bit's counter by one: up for
//! a received 1, down for a received 0. The sign of a counter is the voted bit
//! value, with zero resolving to 0. A reconstruction is accepted only if its
//! trailing 16 bits are the CRC of the rest.

use thiserror::Error;

use crate::bits::BitVector;
use crate::crc::Crc16;
use crate::packet::{Packet, PacketId, CRC_BITS};

/// Vote counter width. Bounds the number of receptions per packet.
pub type Vote = i16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VoteError {
    #[error("reception has {got} bits, vote array has {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("voting suspended")]
    Suspended,
    #[error("vote counter overflow after {0} receptions")]
    Overflow(usize),
    #[error("not a new packet: {0}")]
    NotANewPacket(PacketId),
    #[error("vote array of {0} bits is shorter than the 24-bit minimum")]
    TooShort(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorrectionFailure {
    /// Fewer than two erroneous receptions were voted.
    InsufficientReceptions(usize),
    /// The majority packet does not carry a matching CRC.
    CrcMismatch,
}

impl std::fmt::Display for CorrectionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrectionFailure::InsufficientReceptions(n) => {
                write!(f, "insufficient receptions ({n})")
            }
            CorrectionFailure::CrcMismatch => f.write_str("CRC mismatch"),
        }
    }
}

impl std::error::Error for CorrectionFailure {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteState {
    packet_id: PacketId,
    votes: Vec<Vote>,
    num_accumulated: usize,
    suspended: bool,
}

impl VoteState {
    /// Fresh all-zero vote array for `on_air_bits` bits (payload + CRC).
    pub fn new(packet_id: PacketId, on_air_bits: usize) -> Result<Self, VoteError> {
        if on_air_bits < 8 + CRC_BITS {
            return Err(VoteError::TooShort(on_air_bits));
        }
        Ok(Self {
            packet_id,
            votes: vec![0; on_air_bits],
            num_accumulated: 0,
            suspended: false,
        })
    }

    pub fn packet_id(&self) -> PacketId {
        self.packet_id
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn num_accumulated(&self) -> usize {
        self.num_accumulated
    }

    pub fn is_suspended(&self) -> bool {
        self.suspended
    }

    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }

    /// Adds one erroneous reception to the tally.
    pub fn accumulate(&mut self, received: &BitVector) -> Result<(), VoteError> {
        if self.suspended {
            return Err(VoteError::Suspended);
        }
        if received.len() != self.votes.len() {
            return Err(VoteError::LengthMismatch {
                got: received.len(),
                expected: self.votes.len(),
            });
        }
        if self.num_accumulated >= Vote::MAX as usize {
            return Err(VoteError::Overflow(self.num_accumulated));
        }
        for (vote, bit) in self.votes.iter_mut().zip(received.iter()) {
            *vote += if bit == 1 { 1 } else { -1 };
        }
        self.num_accumulated += 1;
        Ok(())
    }

    /// Bit `i` is 1 iff `votes[i] > 0`.
    pub fn reconstruct(&self) -> BitVector {
        BitVector::from_bools(self.votes.iter().map(|&v| v > 0))
    }

    /// Reconstructs the packet and checks its embedded CRC. The state is left
    /// untouched either way so voting can continue.
    pub fn try_correct(&self) -> Result<Packet, CorrectionFailure> {
        self.try_correct_with(&Crc16::CCITT_FALSE)
    }

    pub fn try_correct_with(&self, crc: &Crc16) -> Result<Packet, CorrectionFailure> {
        if self.num_accumulated < 2 {
            return Err(CorrectionFailure::InsufficientReceptions(
                self.num_accumulated,
            ));
        }
        let candidate = self.reconstruct();
        let split = candidate.len() - CRC_BITS;
        let computed = crc
            .checksum(&candidate.slice(0..split))
            .expect("vote arrays are at least 24 bits");
        if u64::from(computed) == candidate.read_uint(split, CRC_BITS) {
            Ok(Packet::from_on_air_unchecked(self.packet_id, &candidate))
        } else {
            Err(CorrectionFailure::CrcMismatch)
        }
    }

    /// A correct copy arrived: stop voting on this packet. Idempotent.
    pub fn on_correct_reception(&mut self) {
        self.suspended = true;
    }

    /// Starts over for a different packet.
    pub fn reset_for(&mut self, new_id: PacketId, on_air_bits: usize) -> Result<(), VoteError> {
        if new_id == self.packet_id {
            return Err(VoteError::NotANewPacket(new_id));
        }
        *self = Self::new(new_id, on_air_bits)?;
        Ok(())
    }
}

/// What the receiver did with one reception.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReceptionEvent {
    /// CRC passed on the air.
    Correct,
    /// CRC failed and the reception was added to the votes.
    Voted { num_accumulated: usize },
    /// CRC failed but voting is off or already suspended for this packet.
    Ignored,
}

/// Receiver-side bookkeeping around a single [`VoteState`], keyed by packet id.
#[derive(Debug, Clone)]
pub struct VotingReceiver {
    state: Option<VoteState>,
    enabled: bool,
    reset_each_round: bool,
    crc: Crc16,
}

impl VotingReceiver {
    /// Votes persist across rounds until the packet id changes.
    pub fn new(enabled: bool) -> Self {
        Self {
            state: None,
            enabled,
            reset_each_round: false,
            crc: Crc16::CCITT_FALSE,
        }
    }

    /// Clear the votes at every round boundary instead of keeping them until
    /// the packet id changes.
    pub fn reset_each_round(mut self, reset: bool) -> Self {
        self.reset_each_round = reset;
        self
    }

    pub fn state(&self) -> Option<&VoteState> {
        self.state.as_ref()
    }

    /// Feeds one decoded reception. `crc_ok` is the receiver's on-air check.
    pub fn on_reception(
        &mut self,
        id: PacketId,
        received: &BitVector,
        crc_ok: bool,
    ) -> Result<ReceptionEvent, VoteError> {
        let state = match &mut self.state {
            Some(s) if s.packet_id == id => s,
            Some(s) => {
                s.reset_for(id, received.len())?;
                s
            }
            None => self.state.insert(VoteState::new(id, received.len())?),
        };
        if crc_ok {
            state.on_correct_reception();
            return Ok(ReceptionEvent::Correct);
        }
        if !self.enabled || state.suspended {
            return Ok(ReceptionEvent::Ignored);
        }
        state.accumulate(received)?;
        Ok(ReceptionEvent::Voted {
            num_accumulated: state.num_accumulated,
        })
    }

    /// End-of-round correction attempt for `id`. `None` when voting is off,
    /// the packet was already received correctly, or nothing was voted.
    pub fn end_of_round(&mut self, id: PacketId) -> Option<Result<Packet, CorrectionFailure>> {
        let state = self.state.as_mut().filter(|s| s.packet_id == id)?;
        let result = if self.enabled && !state.suspended {
            let r = state.try_correct_with(&self.crc);
            if r.is_ok() {
                state.on_correct_reception();
            }
            Some(r)
        } else {
            None
        };
        if self.reset_each_round && !state.suspended {
            let bits = state.votes.len();
            *state = VoteState::new(id, bits).expect("length was valid");
        }
        result
    }
}
