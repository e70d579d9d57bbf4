//! 4-bit symbol to 32-chip spreading with minimum-distance despreading.

use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::bits::BitVector;

use super::PhyError;

pub const CHIPS_PER_SYMBOL: usize = 32;
pub const BITS_PER_SYMBOL: usize = 4;

const IEEE_802154_TABLE: &str = include_str!("../../data/ieee802154_chips.txt");

/// Sixteen distinct 32-chip sequences; row index is the symbol value.
/// Chip 0 is the most significant bit of each row word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChipTable {
    rows: [u32; 16],
}

impl ChipTable {
    /// The O-QPSK chip table from IEEE 802.15.4.
    pub fn ieee_802154() -> Arc<ChipTable> {
        static TABLE: OnceLock<Arc<ChipTable>> = OnceLock::new();
        TABLE
            .get_or_init(|| {
                Arc::new(ChipTable::parse(IEEE_802154_TABLE).expect("bundled chip table is valid"))
            })
            .clone()
    }

    /// Parses 16 lines of 32 `0`/`1` characters. Blank lines and `#` comments
    /// are skipped.
    pub fn parse(text: &str) -> Result<Self, PhyError> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.len() != 16 {
            return Err(PhyError::ChipTable(format!(
                "expected 16 rows, found {}",
                lines.len()
            )));
        }
        let mut rows = [0u32; 16];
        for (i, line) in lines.iter().enumerate() {
            if line.len() != CHIPS_PER_SYMBOL || !line.bytes().all(|c| c == b'0' || c == b'1') {
                return Err(PhyError::ChipTable(format!(
                    "row {i} is not 32 characters of 0/1"
                )));
            }
            rows[i] = u32::from_str_radix(line, 2).expect("validated binary");
        }
        Self::from_rows(rows)
    }

    pub fn from_file(path: &Path) -> Result<Self, PhyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PhyError::ChipTable(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_rows(rows: [u32; 16]) -> Result<Self, PhyError> {
        for i in 0..16 {
            for j in i + 1..16 {
                if rows[i] == rows[j] {
                    return Err(PhyError::ChipTable(format!(
                        "rows {i} and {j} are identical"
                    )));
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[u32; 16] {
        &self.rows
    }

    pub fn min_distance(&self) -> u32 {
        (0..16)
            .flat_map(|i| (i + 1..16).map(move |j| (i, j)))
            .map(|(i, j)| (self.rows[i] ^ self.rows[j]).count_ones())
            .min()
            .expect("16 rows")
    }

    /// Largest chip-error weight that is always despread correctly.
    pub fn correction_radius(&self) -> u32 {
        (self.min_distance() - 1) / 2
    }

    /// Symbol whose sequence is nearest to `chips`; lowest index wins ties.
    pub fn nearest(&self, chips: u32) -> u8 {
        let mut best = 0u8;
        let mut best_dist = u32::MAX;
        for (symbol, &row) in self.rows.iter().enumerate() {
            let d = (row ^ chips).count_ones();
            if d < best_dist {
                best_dist = d;
                best = symbol as u8;
            }
        }
        best
    }

    /// Bits are grouped four at a time, most significant first.
    pub fn spread(&self, bits: &BitVector) -> Result<BitVector, PhyError> {
        if !bits.len().is_multiple_of(BITS_PER_SYMBOL) {
            return Err(PhyError::BadSymbolLength {
                len: bits.len(),
                multiple: BITS_PER_SYMBOL,
            });
        }
        let mut chips = Vec::with_capacity(bits.len() / BITS_PER_SYMBOL * CHIPS_PER_SYMBOL);
        for start in (0..bits.len()).step_by(BITS_PER_SYMBOL) {
            let row = self.rows[bits.read_uint(start, BITS_PER_SYMBOL) as usize];
            chips.extend((0..CHIPS_PER_SYMBOL).rev().map(|s| ((row >> s) & 1) as u8));
        }
        Ok(BitVector::from_bits(chips).expect("chips are binary"))
    }

    pub fn despread(&self, chips: &BitVector) -> Result<BitVector, PhyError> {
        if !chips.len().is_multiple_of(CHIPS_PER_SYMBOL) {
            return Err(PhyError::BadSymbolLength {
                len: chips.len(),
                multiple: CHIPS_PER_SYMBOL,
            });
        }
        let mut bits = Vec::with_capacity(chips.len() / CHIPS_PER_SYMBOL * BITS_PER_SYMBOL);
        for start in (0..chips.len()).step_by(CHIPS_PER_SYMBOL) {
            let word = chips.read_uint(start, CHIPS_PER_SYMBOL) as u32;
            let symbol = self.nearest(word);
            bits.extend((0..BITS_PER_SYMBOL).rev().map(|s| (symbol >> s) & 1));
        }
        Ok(BitVector::from_bits(bits).expect("symbol bits are binary"))
    }
}

pub fn dsss_spread(bits: &BitVector) -> Result<BitVector, PhyError> {
    ChipTable::ieee_802154().spread(bits)
}

pub fn dsss_despread(chips: &BitVector) -> Result<BitVector, PhyError> {
    ChipTable::ieee_802154().despread(chips)
}
