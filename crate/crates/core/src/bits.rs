//! Fixed-length bit sequences.
//!
//! Bits are stored one per byte (0 or 1). All byte conversions are MSB-first:
//! bit 0 of a `BitVector` is the most significant bit of the first byte.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("bit value {value} at index {index} is not 0 or 1")]
    NotABit { index: usize, value: u8 },
    #[error("length {0} bits is not a whole number of bytes")]
    NotByteAligned(usize),
    #[error("invalid hex string: {0}")]
    BadHex(String),
    #[error("length mismatch: {left} vs {right} bits")]
    LengthMismatch { left: usize, right: usize },
}

/// An ordered sequence of bits whose length is fixed at construction.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    bits: Vec<u8>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    /// Builds from raw 0/1 values, rejecting anything else.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, BitsError> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(BitsError::NotABit { index, value });
        }
        Ok(Self { bits })
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().map(u8::from).collect(),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let bits = bytes
            .iter()
            .flat_map(|&byte| (0..8).rev().map(move |shift| (byte >> shift) & 1))
            .collect();
        Self { bits }
    }

    /// Packs into bytes; the length must be a multiple of 8.
    pub fn to_bytes(&self) -> Result<Vec<u8>, BitsError> {
        if !self.bits.len().is_multiple_of(8) {
            return Err(BitsError::NotByteAligned(self.bits.len()));
        }
        Ok(self
            .bits
            .chunks_exact(8)
            .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b))
            .collect())
    }

    pub fn from_hex(hex: &str) -> Result<Self, BitsError> {
        let hex = hex.trim();
        if !hex.len().is_multiple_of(2) || !hex.is_ascii() {
            return Err(BitsError::BadHex(hex.to_owned()));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| BitsError::BadHex(hex.to_owned()))?;
        Ok(Self::from_bytes(&bytes))
    }

    /// Lowercase hex, two characters per byte.
    pub fn to_hex(&self) -> Result<String, BitsError> {
        Ok(self
            .to_bytes()?
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> u8 {
        self.bits[index]
    }

    pub fn set(&mut self, index: usize, value: bool) {
        self.bits[index] = u8::from(value);
    }

    pub fn flip(&mut self, index: usize) {
        self.bits[index] ^= 1;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    /// Copy of the bits in `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            bits: self.bits[range].to_vec(),
        }
    }

    pub fn concat(&self, other: &BitVector) -> Self {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn hamming_distance(&self, other: &BitVector) -> Result<usize, BitsError> {
        if self.len() != other.len() {
            return Err(BitsError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count())
    }

    /// Big-endian integer value of up to 64 bits starting at `start`.
    pub fn read_uint(&self, start: usize, width: usize) -> u64 {
        debug_assert!(width <= 64);
        self.bits[start..start + width]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    /// `width` bits of `value`, most significant first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        Self {
            bits: (0..width)
                .rev()
                .map(|shift| ((value >> shift) & 1) as u8)
                .collect(),
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}](", self.len())?;
        for &b in self.bits.iter().take(64) {
            write!(f, "{b}")?;
        }
        if self.len() > 64 {
            write!(f, "...")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.iter().try_for_each(|b| write!(f, "{b}"))
    }
}

impl std::str::FromStr for BitVector {
    type Err = BitsError;

    /// Parses a string of '0'/'1' characters; whitespace and '_' are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for (index, c) in s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .enumerate()
        {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(BitsError::NotABit {
                        index,
                        value: c as u8,
                    })
                }
            }
        }
        Ok(Self { bits })
    }
}
