//! Beating-effect channel simulation and bit-voting packet recovery for
//! synchronous-transmission (concurrent-transmission) wireless networks.
//!
//! Layers, bottom up:
//! - [`bits`], [`crc`], [`packet`]: payloads and the appended 2-byte CRC.
//! - [`channel`]: the beating envelope of frequency-offset transmitters.
//! - [`phy`]: BLE 1M/2M/125K/500K and IEEE 802.15.4 coding chains.
//! - [`vote`]: per-bit vote accumulation and CRC-gated reconstruction.
//! - [`sim`]: single-hop rounds and PER/PDR aggregation.
//! - [`sweep`]: presets, config files and CSV output for parameter sweeps.

pub mod bits;
pub mod channel;
pub mod crc;
pub mod packet;
pub mod phy;
pub mod sim;
pub mod sweep;
pub mod vote;

pub use bits::BitVector;
pub use packet::{make_packet, verify_packet, Packet, PacketId};
