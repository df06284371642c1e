//! Sender-side preparation and receiver-side recovery of the message bits:
//! Reed–Solomon framing, keyed byte mixing, and padding to image capacity.

pub mod gf256;
mod mixing;
mod plan;
mod rs;

use thiserror::Error;

pub use mixing::{gather, mixing_permutation, scatter, BitVector, FILLER_DOMAIN};
pub use plan::{recover_payload, MessagePlan, Recovered, DEFAULT_PARITY_SYMBOLS};
pub use rs::{
    block_lengths, check_parity, coded_len, decode_block, encode_block, generator, rs_decode,
    rs_decode_counted, rs_decode_prefix, rs_encode, BLOCK_LEN, HEADER_LEN,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("parity symbols must be even and within 2..=254, got {0}")]
    ParityOutOfRange(usize),
    #[error("payload of {0} bytes does not fit a 32-bit length header")]
    PayloadTooLong(usize),
    #[error("coded length {0} is inconsistent with the block structure")]
    InvalidCodedLength(usize),
    #[error("block {block} has more errors than the parity can correct")]
    Uncorrectable { block: usize },
    #[error("header declares {declared} payload bytes but {available} are present")]
    HeaderLength { declared: usize, available: usize },
    #[error("payload CRC mismatch: header {expected:#010x}, computed {actual:#010x}")]
    CrcMismatch { expected: u32, actual: u32 },
    #[error("message needs {needed_bits} bits but capacity is {capacity_bits}")]
    CapacityExceeded {
        needed_bits: usize,
        capacity_bits: usize,
    },
    #[error("permutation over zero slots")]
    EmptyPermutation,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("block size must be at least one pixel")]
    InvalidBlockPixels,
}

impl CodecError {
    /// True for failures that mean the received bits could not be decoded,
    /// as opposed to misuse of the API.
    pub fn is_decode_failure(&self) -> bool {
        matches!(
            self,
            Self::Uncorrectable { .. }
                | Self::HeaderLength { .. }
                | Self::CrcMismatch { .. }
                | Self::InvalidCodedLength(_)
        )
    }
}
