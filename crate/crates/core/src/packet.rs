//! Packets as transmitted by the source: payload followed by a 2-byte CRC.

use std::fmt;

use thiserror::Error;

use crate::bits::BitVector;
use crate::crc::{Crc16, CrcError};

pub const CRC_BITS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PacketError {
    #[error("payload of {0} bits is not a nonempty whole number of bytes")]
    NotByteAligned(usize),
    #[error("on-air packet of {0} bits is shorter than the 24-bit minimum")]
    TooShort(usize),
    #[error(transparent)]
    Crc(#[from] CrcError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PacketId(pub u64);

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    id: PacketId,
    body: BitVector,
    crc: BitVector,
}

impl Packet {
    pub fn id(&self) -> PacketId {
        self.id
    }

    pub fn body(&self) -> &BitVector {
        &self.body
    }

    pub fn crc(&self) -> &BitVector {
        &self.crc
    }

    /// Body followed by the CRC.
    pub fn on_air(&self) -> BitVector {
        self.body.concat(&self.crc)
    }

    pub fn on_air_len(&self) -> usize {
        self.body.len() + CRC_BITS
    }

    /// Splits on-air bits into a packet without checking the CRC.
    pub(crate) fn from_on_air_unchecked(id: PacketId, on_air: &BitVector) -> Self {
        let split = on_air.len() - CRC_BITS;
        Self {
            id,
            body: on_air.slice(0..split),
            crc: on_air.slice(split..on_air.len()),
        }
    }
}

pub fn make_packet(id: PacketId, body: BitVector) -> Result<Packet, PacketError> {
    if body.is_empty() || !body.len().is_multiple_of(8) {
        return Err(PacketError::NotByteAligned(body.len()));
    }
    let crc = Crc16::CCITT_FALSE.checksum_bits(&body)?;
    Ok(Packet { id, body, crc })
}

/// True iff the trailing 16 bits are the CRC of everything before them.
pub fn verify_packet(on_air: &BitVector) -> Result<bool, PacketError> {
    verify_with(&Crc16::CCITT_FALSE, on_air)
}

pub fn verify_with(crc: &Crc16, on_air: &BitVector) -> Result<bool, PacketError> {
    if on_air.len() < 8 + CRC_BITS {
        return Err(PacketError::TooShort(on_air.len()));
    }
    let split = on_air.len() - CRC_BITS;
    let computed = crc.checksum(&on_air.slice(0..split))?;
    Ok(u64::from(computed) == on_air.read_uint(split, CRC_BITS))
}
