//! Key/cover pixel selection.
//!
//! A zero bit copies its pixel group from the key image `K`, a one bit from
//! the cover image `C`. The receiver, holding `K`, reads a one wherever the
//! stego image differs from the key inside the group. A one bit is lost
//! only when every pixel of its group has `K_i == C_i`.

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::codec::BitVector;
use crate::imageio::RawImage;

/// Pixels whose key value falls below this count are excluded by
/// [`default_mask`]: their noise is not dominated by photon statistics.
pub const DARK_THRESHOLD: u16 = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StegoError {
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("message has {actual} bits, image capacity is {expected}")]
    MessageLength { expected: usize, actual: usize },
    #[error("block size must be at least one pixel")]
    InvalidBlockPixels,
    #[error("mask covers {actual} pixels, image has {expected}")]
    MaskLength { expected: usize, actual: usize },
    #[error("no usable pixels")]
    NoUsablePixels,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StegoParams {
    /// Pixels carrying each message bit.
    pub block_pixels: usize,
    /// `true` marks pixels available for embedding; `None` uses every pixel.
    pub usable_mask: Option<Vec<bool>>,
}

impl Default for StegoParams {
    fn default() -> Self {
        Self {
            block_pixels: 1,
            usable_mask: None,
        }
    }
}

/// Extraction result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedBits {
    pub bits: BitVector,
    /// Pixels anywhere in the image where the stego image differs from the key.
    pub raw_mismatch_count: usize,
}

impl StegoParams {
    pub fn new(block_pixels: usize) -> Self {
        Self {
            block_pixels,
            usable_mask: None,
        }
    }

    pub fn with_mask(mut self, mask: Vec<bool>) -> Self {
        self.usable_mask = Some(mask);
        self
    }

    fn check(&self, pixel_count: usize) -> Result<(), StegoError> {
        if self.block_pixels == 0 {
            return Err(StegoError::InvalidBlockPixels);
        }
        if let Some(mask) = &self.usable_mask {
            if mask.len() != pixel_count {
                return Err(StegoError::MaskLength {
                    expected: pixel_count,
                    actual: mask.len(),
                });
            }
        }
        Ok(())
    }

    /// Usable pixel indices in row-major order.
    pub fn usable_indices(&self, pixel_count: usize) -> Vec<usize> {
        match &self.usable_mask {
            None => (0..pixel_count).collect(),
            Some(mask) => mask
                .iter()
                .enumerate()
                .filter_map(|(i, &u)| u.then_some(i))
                .collect(),
        }
    }

    pub fn usable_count(&self, pixel_count: usize) -> usize {
        match &self.usable_mask {
            None => pixel_count,
            Some(mask) => mask.iter().filter(|&&u| u).count(),
        }
    }

    /// Message bits an image of `pixel_count` pixels can carry.
    pub fn capacity_bits(&self, pixel_count: usize) -> usize {
        self.usable_count(pixel_count) / self.block_pixels.max(1)
    }
}

/// Usable pixels of a key image: neither saturated nor dark.
pub fn default_mask(key: &RawImage, full_well: u32) -> Vec<bool> {
    key.pixels()
        .iter()
        .map(|&p| (p as u32) < full_well && p >= DARK_THRESHOLD)
        .collect()
}

fn check_same(a: &RawImage, b: &RawImage) -> Result<(), StegoError> {
    if !a.same_shape(b) {
        return Err(StegoError::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok(())
}

pub fn embed(
    key: &RawImage,
    cover: &RawImage,
    message: &BitVector,
    params: &StegoParams,
) -> Result<RawImage, StegoError> {
    check_same(key, cover)?;
    params.check(key.len())?;
    let capacity = params.capacity_bits(key.len());
    if message.len() != capacity {
        return Err(StegoError::MessageLength {
            expected: capacity,
            actual: message.len(),
        });
    }
    let usable = params.usable_indices(key.len());
    let mut stego = key.clone();
    let out = stego.pixels_mut();
    let cover = cover.pixels();
    for (group, &bit) in usable.chunks_exact(params.block_pixels).zip(message.bits()) {
        if bit {
            for &i in group {
                out[i] = cover[i];
            }
        }
    }
    Ok(stego)
}

pub fn extract(stego: &RawImage, key: &RawImage, params: &StegoParams) -> Result<DecodedBits, StegoError> {
    check_same(stego, key)?;
    params.check(key.len())?;
    let (s, k) = (stego.pixels(), key.pixels());
    let usable = params.usable_indices(key.len());
    let bits: Vec<bool> = usable
        .par_chunks_exact(params.block_pixels)
        .map(|group| group.iter().any(|&i| s[i] != k[i]))
        .collect();
    let raw_mismatch_count = s.iter().zip(k).filter(|(a, b)| a != b).count();
    Ok(DecodedBits {
        bits: BitVector::new(bits),
        raw_mismatch_count,
    })
}

/// Fraction of pixels with `K_i == C_i`.
pub fn collision_rate(key: &RawImage, cover: &RawImage) -> Result<f64, StegoError> {
    collision_rate_masked(key, cover, None)
}

/// Collision fraction restricted to the pixels marked usable.
pub fn collision_rate_masked(key: &RawImage, cover: &RawImage, mask: Option<&[bool]>) -> Result<f64, StegoError> {
    check_same(key, cover)?;
    let (k, c) = (key.pixels(), cover.pixels());
    let (hits, total) = match mask {
        None => (k.iter().zip(c).filter(|(a, b)| a == b).count(), k.len()),
        Some(mask) => {
            if mask.len() != k.len() {
                return Err(StegoError::MaskLength {
                    expected: k.len(),
                    actual: mask.len(),
                });
            }
            let mut hits = 0;
            let mut total = 0;
            for i in (0..k.len()).filter(|&i| mask[i]) {
                total += 1;
                hits += (k[i] == c[i]) as usize;
            }
            (hits, total)
        }
    };
    if total == 0 {
        return Err(StegoError::NoUsablePixels);
    }
    Ok(hits as f64 / total as f64)
}

/// Probability that two independent Poisson(λ) counts are equal,
/// `Σ_k (e^-λ λ^k / k!)^2`.
///
/// The sum runs over `λ ± 12√λ`, widened to cover at least `[0, 40]`.
pub fn expected_collision_rate(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let spread = 12.0 * lambda.sqrt();
    let lo = (lambda - spread).floor().max(0.0) as u64;
    let hi = ((lambda + spread).ceil() as u64).max(40);
    let ln_lambda = lambda.ln();
    (lo..=hi)
        .map(|k| {
            let ln_p = -lambda + k as f64 * ln_lambda - ln_gamma(k as f64 + 1.0);
            (2.0 * ln_p).exp()
        })
        .sum()
}
