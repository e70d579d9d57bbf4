//! Rate-1/2, constraint-length-4 convolutional code with hard-decision Viterbi
//! decoding. Defaults to the LE Coded PHY generators.

use crate::bits::BitVector;

use super::PhyError;

const MEMORY: usize = 3;
const STATES: usize = 1 << MEMORY;

/// Generator taps, bit 3 = current input, bits 2..0 = the three previous
/// inputs (most recent first).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvCode {
    pub g0: u8,
    pub g1: u8,
}

impl ConvCode {
    /// G0(x) = 1 + x + x^2 + x^3, G1(x) = 1 + x^2 + x^3.
    pub const BLE_CODED: ConvCode = ConvCode {
        g0: 0b1111,
        g1: 0b1011,
    };

    pub const TAIL_BITS: usize = MEMORY;

    pub fn coded_len(&self, data_bits: usize) -> usize {
        2 * (data_bits + MEMORY)
    }

    /// Output pair for shift register `reg` (input in bit 3).
    fn outputs(&self, reg: u8) -> (u8, u8) {
        (
            ((reg & self.g0).count_ones() & 1) as u8,
            ((reg & self.g1).count_ones() & 1) as u8,
        )
    }

    /// Encodes `bits` followed by three zero tail bits.
    pub fn encode(&self, bits: &BitVector) -> BitVector {
        let mut state = 0u8;
        let mut out = Vec::with_capacity(self.coded_len(bits.len()));
        for bit in bits.iter().chain(std::iter::repeat_n(0, MEMORY)) {
            let reg = (bit << MEMORY) | state;
            let (c0, c1) = self.outputs(reg);
            out.push(c0);
            out.push(c1);
            state = reg >> 1;
        }
        BitVector::from_bits(out).expect("encoder emits only 0/1")
    }

    /// Minimum-Hamming-distance path through the trellis, starting and ending
    /// in the zero state. The tail bits are stripped from the result.
    pub fn decode(&self, coded: &BitVector) -> Result<BitVector, PhyError> {
        if !coded.len().is_multiple_of(2) || coded.len() < 8 {
            return Err(PhyError::BadCodedLength(coded.len()));
        }
        let steps = coded.len() / 2;
        // Precomputed (next_state, c0, c1) for every (state, input).
        let mut branch = [[(0u8, 0u8, 0u8); 2]; STATES];
        for (state, row) in branch.iter_mut().enumerate() {
            for (input, entry) in row.iter_mut().enumerate() {
                let reg = ((input as u8) << MEMORY) | state as u8;
                let (c0, c1) = self.outputs(reg);
                *entry = (reg >> 1, c0, c1);
            }
        }

        const UNREACHED: u32 = u32::MAX / 2;
        let mut metric = [UNREACHED; STATES];
        metric[0] = 0;
        // survivors[t][s] = (previous state, input bit) on the best path into s.
        let mut survivors = vec![[(0u8, 0u8); STATES]; steps];
        let symbols = coded.as_slice();
        for (t, pair) in symbols.chunks_exact(2).enumerate() {
            let mut next = [UNREACHED; STATES];
            for state in 0..STATES {
                if metric[state] >= UNREACHED {
                    continue;
                }
                for input in 0..2u8 {
                    let (to, c0, c1) = branch[state][usize::from(input)];
                    let cost = metric[state] + u32::from(c0 ^ pair[0]) + u32::from(c1 ^ pair[1]);
                    let to = usize::from(to);
                    // Strict comparison keeps the lowest-index predecessor on ties.
                    if cost < next[to] {
                        next[to] = cost;
                        survivors[t][to] = (state as u8, input);
                    }
                }
            }
            metric = next;
        }

        let mut state = 0usize;
        let mut decoded = vec![0u8; steps];
        for t in (0..steps).rev() {
            let (prev, input) = survivors[t][state];
            decoded[t] = input;
            state = usize::from(prev);
        }
        decoded.truncate(steps - MEMORY);
        Ok(BitVector::from_bits(decoded).expect("decoder emits only 0/1"))
    }
}

impl Default for ConvCode {
    fn default() -> Self {
        Self::BLE_CODED
    }
}

pub fn conv_encode(bits: &BitVector) -> BitVector {
    ConvCode::BLE_CODED.encode(bits)
}

pub fn viterbi_decode(coded: &BitVector) -> Result<BitVector, PhyError> {
    ConvCode::BLE_CODED.decode(coded)
}
