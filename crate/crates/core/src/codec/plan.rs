use super::mixing::{gather, mixing_permutation, scatter, BitVector};
use super::rs::{check_parity, coded_len, rs_decode_prefix, rs_encode};
use super::CodecError;

pub const DEFAULT_PARITY_SYMBOLS: usize = 8;

/// Everything the sender needs besides the two images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessagePlan {
    pub payload: Vec<u8>,
    /// Parity bytes per 255-byte Reed–Solomon block.
    pub parity_symbols: usize,
    pub mixing_seed: u64,
    /// Message bits the stego image can carry: usable pixels / `block_pixels`.
    pub capacity_bits: usize,
    pub block_pixels: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovered {
    pub payload: Vec<u8>,
    pub corrected_symbols: usize,
}

impl MessagePlan {
    pub fn coded_bits(&self) -> usize {
        coded_len(self.payload.len(), self.parity_symbols) * 8
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        check_parity(self.parity_symbols)?;
        if self.block_pixels == 0 {
            return Err(CodecError::InvalidBlockPixels);
        }
        let needed_bits = self.coded_bits();
        if needed_bits > self.capacity_bits {
            return Err(CodecError::CapacityExceeded {
                needed_bits,
                capacity_bits: self.capacity_bits,
            });
        }
        Ok(())
    }

    /// RS-encode, mix and pad the payload to exactly `capacity_bits` bits.
    pub fn to_bits(&self) -> Result<BitVector, CodecError> {
        self.validate()?;
        let coded = rs_encode(&self.payload, self.parity_symbols)?;
        let perm = mixing_permutation(self.capacity_bits / 8, self.mixing_seed)?;
        scatter(&coded, &perm, self.capacity_bits, self.mixing_seed)
    }
}

/// Undo mixing and error correction on extracted bits.
///
/// The coded length is not shared ahead of time; it is read back from the
/// framing header of the first block.
pub fn recover_payload(
    bits: &BitVector,
    parity_symbols: usize,
    mixing_seed: u64,
) -> Result<Recovered, CodecError> {
    check_parity(parity_symbols)?;
    let slots = bits.len() / 8;
    let perm = mixing_permutation(slots, mixing_seed).map_err(|_| CodecError::CapacityExceeded {
        needed_bits: coded_len(0, parity_symbols) * 8,
        capacity_bits: bits.len(),
    })?;
    let stream = gather(bits, &perm, slots)?;
    let (payload, corrected_symbols) = rs_decode_prefix(&stream, parity_symbols)?;
    Ok(Recovered {
        payload,
        corrected_symbols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(payload: &[u8], capacity_bits: usize) -> MessagePlan {
        MessagePlan {
            payload: payload.to_vec(),
            parity_symbols: 8,
            mixing_seed: 17,
            capacity_bits,
            block_pixels: 1,
        }
    }

    #[test]
    fn bits_fill_capacity_exactly() {
        let bits = plan(b"hello", 1003).to_bits().unwrap();
        assert_eq!(bits.len(), 1003);
        let out = recover_payload(&bits, 8, 17).unwrap();
        assert_eq!(out.payload, b"hello");
        assert_eq!(out.corrected_symbols, 0);
    }

    #[test]
    fn too_large_for_capacity() {
        let err = plan(&[0u8; 100], 800).to_bits().unwrap_err();
        assert_eq!(
            err,
            CodecError::CapacityExceeded {
                needed_bits: 116 * 8,
                capacity_bits: 800
            }
        );
    }

    #[test]
    fn wrong_mixing_seed_fails() {
        let bits = plan(&[42u8; 300], 8000).to_bits().unwrap();
        let err = recover_payload(&bits, 8, 18).unwrap_err();
        assert!(err.is_decode_failure(), "{err:?}");
    }

    #[test]
    fn corrects_scattered_bit_errors() {
        let p: Vec<u8> = (0..2000u32).map(|i| (i * 37 % 251) as u8).collect();
        let mut bits = plan(&p, 40_000).to_bits().unwrap().into_inner();
        // One flipped bit every 4000 positions, about one error per two blocks.
        for i in (0..bits.len()).step_by(4000) {
            bits[i] = !bits[i];
        }
        let out = recover_payload(&BitVector::new(bits), 8, 17).unwrap();
        assert_eq!(out.payload, p);
        assert!(out.corrected_symbols > 0);
    }

    #[test]
    fn zero_block_pixels_rejected() {
        let mut p = plan(b"x", 1000);
        p.block_pixels = 0;
        assert_eq!(p.validate(), Err(CodecError::InvalidBlockPixels));
    }
}
