//! LE Coded PHY pattern mapper: S=2 passes coded bits through, S=8 spreads each
//! coded bit over four symbols.

use crate::bits::BitVector;

use super::PhyError;

const P4_ZERO: [u8; 4] = [0, 0, 1, 1];
const P4_ONE: [u8; 4] = [1, 1, 0, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternFactor {
    P1,
    P4,
}

impl PatternFactor {
    pub fn symbols_per_bit(self) -> usize {
        match self {
            PatternFactor::P1 => 1,
            PatternFactor::P4 => 4,
        }
    }
}

pub fn pattern_map(coded: &BitVector, factor: PatternFactor) -> BitVector {
    match factor {
        PatternFactor::P1 => coded.clone(),
        PatternFactor::P4 => {
            let symbols = coded
                .iter()
                .flat_map(|b| if b == 1 { P4_ONE } else { P4_ZERO })
                .collect();
            BitVector::from_bits(symbols).expect("patterns are binary")
        }
    }
}

/// Nearest pattern by Hamming distance; equidistant groups decode to 0.
pub fn pattern_demap(symbols: &BitVector, factor: PatternFactor) -> Result<BitVector, PhyError> {
    match factor {
        PatternFactor::P1 => Ok(symbols.clone()),
        PatternFactor::P4 => {
            if !symbols.len().is_multiple_of(4) {
                return Err(PhyError::BadSymbolLength {
                    len: symbols.len(),
                    multiple: 4,
                });
            }
            let bits = symbols
                .as_slice()
                .chunks_exact(4)
                .map(|group| {
                    let to_zero = distance(group, &P4_ZERO);
                    let to_one = distance(group, &P4_ONE);
                    u8::from(to_one < to_zero)
                })
                .collect();
            Ok(BitVector::from_bits(bits).expect("demapper emits only 0/1"))
        }
    }
}

fn distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
