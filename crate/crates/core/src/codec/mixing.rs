//! Keyed byte placement: the mixing permutation and bit-level scatter/gather.

use super::CodecError;
use crate::rng::SplitMix64;

/// XORed into the mixing seed to derive the filler stream.
pub const FILLER_DOMAIN: u64 = 0x6669_6c6c_6572_2d31;

/// A sequence of message bits, one per pixel group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        Self {
            bits: vec![true; len],
        }
    }

    /// MSB-first expansion of `bytes`.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let bits = bytes
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |i| b >> i & 1 == 1))
            .collect();
        Self { bits }
    }

    /// `len` fair bits from a SplitMix64 stream, least-significant bit first.
    pub fn random(len: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut bits = Vec::with_capacity(len);
        let mut word = 0u64;
        for i in 0..len {
            if i % 64 == 0 {
                word = rng.next_u64();
            }
            bits.push(word >> (i % 64) & 1 == 1);
        }
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.bits
    }
}

impl From<Vec<bool>> for BitVector {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

/// Fisher–Yates shuffle of `0..slot_count` driven by `SplitMix64(seed)`.
///
/// For `i` from `slot_count - 1` down to 1, draw `j` uniformly from `0..=i`
/// with rejection sampling and swap entries `i` and `j`. The result is
/// bit-exact across implementations.
pub fn mixing_permutation(slot_count: usize, mixing_seed: u64) -> Result<Vec<usize>, CodecError> {
    if slot_count == 0 {
        return Err(CodecError::EmptyPermutation);
    }
    let mut perm: Vec<usize> = (0..slot_count).collect();
    let mut rng = SplitMix64::new(mixing_seed);
    for i in (1..slot_count).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    Ok(perm)
}

/// Place coded byte `b` at byte slot `perm[b]` (MSB first) and fill every
/// other position with keyed filler bits.
pub fn scatter(
    coded: &[u8],
    perm: &[usize],
    capacity_bits: usize,
    mixing_seed: u64,
) -> Result<BitVector, CodecError> {
    let slots = capacity_bits / 8;
    if coded.len() > slots {
        return Err(CodecError::CapacityExceeded {
            needed_bits: coded.len() * 8,
            capacity_bits,
        });
    }
    if perm.len() != slots {
        return Err(CodecError::LengthMismatch(format!(
            "permutation covers {} slots, capacity has {slots}",
            perm.len()
        )));
    }

    let mut occupied = vec![false; slots];
    let mut bits = vec![false; capacity_bits];
    for (b, &byte) in coded.iter().enumerate() {
        let slot = perm[b];
        occupied[slot] = true;
        for k in 0..8 {
            bits[slot * 8 + k] = byte >> (7 - k) & 1 == 1;
        }
    }

    let mut filler = SplitMix64::new(mixing_seed ^ FILLER_DOMAIN);
    let mut word = 0u64;
    let mut used = 64;
    for (pos, bit) in bits.iter_mut().enumerate() {
        if pos / 8 < slots && occupied[pos / 8] {
            continue;
        }
        if used == 64 {
            word = filler.next_u64();
            used = 0;
        }
        *bit = word >> used & 1 == 1;
        used += 1;
    }
    Ok(BitVector::new(bits))
}

/// Read back the first `coded_length` bytes placed by [`scatter`].
pub fn gather(bits: &BitVector, perm: &[usize], coded_length: usize) -> Result<Vec<u8>, CodecError> {
    if perm.len() < coded_length {
        return Err(CodecError::LengthMismatch(format!(
            "permutation covers {} slots, {coded_length} requested",
            perm.len()
        )));
    }
    let bits = bits.bits();
    let mut out = Vec::with_capacity(coded_length);
    for &slot in &perm[..coded_length] {
        let start = slot * 8;
        if start + 8 > bits.len() {
            return Err(CodecError::LengthMismatch(format!(
                "slot {slot} lies beyond {} bits",
                bits.len()
            )));
        }
        let byte = bits[start..start + 8]
            .iter()
            .fold(0u8, |acc, &b| (acc << 1) | b as u8);
        out.push(byte);
    }
    Ok(out)
}
