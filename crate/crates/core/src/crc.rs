//! Non-reflected 16-bit CRC over arbitrary-length bit sequences.

use thiserror::Error;

use crate::bits::BitVector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CrcError {
    #[error("empty message")]
    EmptyMessage,
}

/// MSB-first CRC-16 parameters. Input and output are never reflected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crc16 {
    pub poly: u16,
    pub init: u16,
    pub xorout: u16,
}

impl Crc16 {
    /// CRC-16/CCITT-FALSE (a.k.a. CRC-16/IBM-3740): check value 0x29B1.
    pub const CCITT_FALSE: Crc16 = Crc16 {
        poly: 0x1021,
        init: 0xFFFF,
        xorout: 0x0000,
    };

    pub fn checksum(&self, bits: &BitVector) -> Result<u16, CrcError> {
        if bits.is_empty() {
            return Err(CrcError::EmptyMessage);
        }
        Ok(self.finish(self.update(self.init, bits.as_slice())))
    }

    /// Checksum of a byte slice, MSB-first within each byte.
    pub fn checksum_bytes(&self, bytes: &[u8]) -> Result<u16, CrcError> {
        if bytes.is_empty() {
            return Err(CrcError::EmptyMessage);
        }
        let table = self.table();
        let reg = bytes.iter().fold(self.init, |reg, &byte| {
            (reg << 8) ^ table[usize::from((reg >> 8) as u8 ^ byte)]
        });
        Ok(self.finish(reg))
    }

    /// The checksum as a 16-bit `BitVector`.
    pub fn checksum_bits(&self, bits: &BitVector) -> Result<BitVector, CrcError> {
        self.checksum(bits)
            .map(|crc| BitVector::from_uint(u64::from(crc), 16))
    }

    fn update(&self, mut reg: u16, bits: &[u8]) -> u16 {
        for &bit in bits {
            let feedback = ((reg >> 15) as u8 ^ bit) & 1;
            reg <<= 1;
            if feedback == 1 {
                reg ^= self.poly;
            }
        }
        reg
    }

    fn finish(&self, reg: u16) -> u16 {
        reg ^ self.xorout
    }

    fn table(&self) -> [u16; 256] {
        let mut table = [0u16; 256];
        for (byte, entry) in table.iter_mut().enumerate() {
            let mut reg = (byte as u16) << 8;
            for _ in 0..8 {
                reg = if reg & 0x8000 != 0 {
                    (reg << 1) ^ self.poly
                } else {
                    reg << 1
                };
            }
            *entry = reg;
        }
        table
    }
}

impl Default for Crc16 {
    fn default() -> Self {
        Self::CCITT_FALSE
    }
}

/// CRC-16/CCITT-FALSE of `bits`, as 16 bits.
pub fn crc16(bits: &BitVector) -> Result<BitVector, CrcError> {
    Crc16::CCITT_FALSE.checksum_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn check_value() {
        let bits = BitVector::from_bytes(b"123456789");
        assert_eq!(Crc16::CCITT_FALSE.checksum(&bits), Ok(0x29B1));
        assert_eq!(crc16(&bits).unwrap().read_uint(0, 16), 0x29B1);
        assert_eq!(Crc16::CCITT_FALSE.checksum_bytes(b"123456789"), Ok(0x29B1));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(crc16(&BitVector::zeros(0)), Err(CrcError::EmptyMessage));
        assert_eq!(
            Crc16::CCITT_FALSE.checksum_bytes(&[]),
            Err(CrcError::EmptyMessage)
        );
    }

    #[test]
    fn deterministic() {
        let bits: BitVector = "1011001110001111".parse().unwrap();
        assert_eq!(crc16(&bits), crc16(&bits));
    }

    #[test]
    fn matches_reference_crate() {
        let reference = crc::Crc::<u16>::new(&crc::CRC_16_IBM_3740);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for len in 1..200 {
            let bytes: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let expected = reference.checksum(&bytes);
            assert_eq!(Crc16::CCITT_FALSE.checksum_bytes(&bytes), Ok(expected));
            assert_eq!(
                Crc16::CCITT_FALSE.checksum(&BitVector::from_bytes(&bytes)),
                Ok(expected)
            );
        }
    }

    #[test]
    fn every_single_bit_flip_changes_the_checksum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bits = BitVector::from_bools((0..64).map(|_| rng.random::<bool>()));
        let base = crc16(&bits).unwrap();
        for i in 0..bits.len() {
            let mut flipped = bits.clone();
            flipped.flip(i);
            assert_ne!(crc16(&flipped).unwrap(), base, "flip at {i}");
        }
    }

    #[test]
    fn unaligned_lengths_are_supported() {
        let bits: BitVector = "10110".parse().unwrap();
        assert!(crc16(&bits).is_ok());
        // Leading-zero extension is not a no-op because init is nonzero.
        let padded: BitVector = "010110".parse().unwrap();
        assert_ne!(crc16(&bits), crc16(&padded));
    }
}
