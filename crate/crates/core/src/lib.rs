//! # qsteg
//!
//! Steganography in the shot noise of photographs. Two captures of the same
//! static scene differ only by photon-counting noise; a stego image built by
//! taking each pixel group from either the key capture (bit 0) or the cover
//! capture (bit 1) is itself distributed exactly like a capture. Only a holder
//! of the key capture can tell which pixels changed.
//!
//! The crate bundles:
//! - [`camera`]: a photon-counting sensor simulator,
//! - [`codec`]: Reed–Solomon framing, keyed byte mixing and padding,
//! - [`stego`]: embedding, extraction and collision analysis,
//! - [`statcheck`]: steganalysis statistics and a calibrated verdict,
//! - [`imageio`]: 16-bit PGM and report serialisation.

pub mod camera;
pub mod codec;
pub mod imageio;
pub mod rng;
pub mod statcheck;
pub mod stego;

use thiserror::Error;

pub use camera::{
    capture, capture_pair, make_scene, CameraError, ScenePattern, SceneRadiance, SensorConfig,
};
pub use codec::{
    gather, mixing_permutation, recover_payload, rs_decode, rs_encode, scatter, BitVector,
    CodecError, MessagePlan, Recovered,
};
pub use imageio::{read_pgm16, write_pgm16, write_report, ImageError, RawImage};
pub use statcheck::{ward_test, AnalysisReport, Calibration, Histogram, Rect, StatError, Verdict};
pub use stego::{
    collision_rate, default_mask, embed, expected_collision_rate, extract, DecodedBits,
    StegoError, StegoParams,
};

/// Any error raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Camera(#[from] CameraError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Stego(#[from] StegoError),
    #[error(transparent)]
    Stat(#[from] StatError),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Build the bit vector for `payload` and embed it into `key`/`cover`.
///
/// Pixels are filtered with [`default_mask`] when `use_mask` is set; the
/// receiver must make the same choice.
pub fn hide(
    key: &RawImage,
    cover: &RawImage,
    payload: &[u8],
    parity_symbols: usize,
    mixing_seed: u64,
    block_pixels: usize,
    full_well: Option<u32>,
) -> Result<RawImage> {
    let params = stego_params(key, block_pixels, full_well);
    let plan = MessagePlan {
        payload: payload.to_vec(),
        parity_symbols,
        mixing_seed,
        capacity_bits: params.capacity_bits(key.len()),
        block_pixels,
    };
    let bits = plan.to_bits()?;
    Ok(embed(key, cover, &bits, &params)?)
}

/// Extract and decode a payload hidden by [`hide`].
pub fn reveal(
    stego: &RawImage,
    key: &RawImage,
    parity_symbols: usize,
    mixing_seed: u64,
    block_pixels: usize,
    full_well: Option<u32>,
) -> Result<Recovered> {
    let params = stego_params(key, block_pixels, full_well);
    let decoded = extract(stego, key, &params)?;
    Ok(recover_payload(&decoded.bits, parity_symbols, mixing_seed)?)
}

/// Embedding parameters derived from the key image; `full_well` enables the
/// default saturation/darkness mask.
pub fn stego_params(key: &RawImage, block_pixels: usize, full_well: Option<u32>) -> StegoParams {
    let params = StegoParams::new(block_pixels);
    match full_well {
        Some(fw) => params.with_mask(default_mask(key, fw)),
        None => params,
    }
}
