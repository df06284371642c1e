//! 16-bit grayscale images and their binary PGM (P5) encoding, plus the
//! canonical text rendering of [`AnalysisReport`]s.

use std::fmt::Write as _;

use thiserror::Error;

use crate::statcheck::AnalysisReport;

/// Bit depth of every [`RawImage`].
pub const BIT_DEPTH: u32 = 16;
/// Largest representable sample, `2^16 - 1`.
pub const MAX_VALUE: u32 = 65_535;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported bit depth: maxval {0} (only 65535 is accepted)")]
    UnsupportedBitDepth(u64),
    #[error("truncated pixel data: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {actual} samples, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
}

/// Row-major array of photon counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawImage {
    width: usize,
    height: usize,
    pixels: Vec<u16>,
}

impl RawImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u16>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::InvalidDimensions { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(ImageError::InvalidDimensions { width, height })?;
        if pixels.len() != expected {
            return Err(ImageError::BufferSize {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u16) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u32 {
        BIT_DEPTH
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u16] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u16> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.pixels[y * self.width + x]
    }

    pub fn same_shape(&self, other: &RawImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().map(|&p| p as f64).sum::<f64>() / self.pixels.len() as f64
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64, ImageError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::MalformedHeader(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::MalformedHeader(format!("{what} out of range")))
    }
}

/// Decode a binary PGM with `maxval == 65535` and big-endian samples.
pub fn read_pgm16(bytes: &[u8]) -> Result<RawImage, ImageError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(ImageError::MalformedHeader("missing P5 magic".into()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(ImageError::MalformedHeader("no separator after magic".into()));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::InvalidDimensions {
            width: width as usize,
            height: height as usize,
        });
    }
    if maxval != MAX_VALUE as u64 {
        return Err(ImageError::UnsupportedBitDepth(maxval));
    }
    // Exactly one whitespace byte separates maxval from the raster.
    match cur.bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(ImageError::MalformedHeader(
                "missing whitespace before raster".into(),
            ))
        }
    }
    let (width, height) = (width as usize, height as usize);
    let count = width
        .checked_mul(height)
        .ok_or(ImageError::InvalidDimensions { width, height })?;
    let expected = count * 2;
    let raster = &bytes[cur.pos..];
    if raster.len() < expected {
        return Err(ImageError::Truncated {
            expected,
            found: raster.len(),
        });
    }
    let pixels = raster[..expected]
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    RawImage::new(width, height, pixels)
}

/// Encode with the canonical header `P5\n<w> <h>\n65535\n`.
pub fn write_pgm16(img: &RawImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n{}\n", img.width, img.height, MAX_VALUE);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len() * 2);
    out.extend_from_slice(header.as_bytes());
    for &p in &img.pixels {
        out.extend_from_slice(&p.to_be_bytes());
    }
    out
}

/// Format a float with nine significant digits, `%g` style.
///
/// Trailing zeros are trimmed but at least one fractional digit is kept, so
/// zero renders as `0.0`. Scientific notation is used for exponents outside
/// `[-5, 9)`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_fraction(mantissa), exp)
    }
}

fn trim_fraction(s: &str) -> String {
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

/// Render a report as `key = value` lines in a fixed field order.
pub fn write_report(report: &AnalysisReport) -> Vec<u8> {
    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    line("format", "qsteg-report/1".into());
    line("verdict", report.verdict.as_str().into());
    line(
        "flagged",
        if report.flagged.is_empty() {
            "none".into()
        } else {
            report.flagged.join(",")
        },
    );
    line("kl_bits", format_sig9(report.kl_bits));
    line("kl_smoothing", format_sig9(report.kl_smoothing));
    line("kl_samples", report.sample_sizes.kl.to_string());
    line("chi2_pvalue", format_sig9(report.chi2_pvalue));
    line("chi2_samples", report.sample_sizes.chi2.to_string());
    line("autocorr_lags", report.autocorr.len().to_string());
    for (i, v) in report.autocorr.iter().enumerate() {
        line(&format!("autocorr.{}", i + 1), format_sig9(*v));
    }
    line("autocorr_samples", report.sample_sizes.autocorr.to_string());
    line(
        "norm_dev",
        report
            .norm_dev
            .map(format_sig9)
            .unwrap_or_else(|| "none".into()),
    );
    line("norm_dev_samples", report.sample_sizes.norm_dev.to_string());
    s.into_bytes()
}
