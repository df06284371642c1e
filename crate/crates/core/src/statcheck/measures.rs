use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::histogram::{Histogram, Rect};
use super::StatError;
use crate::codec::BitVector;
use crate::imageio::RawImage;

/// Default additive smoothing per bin for [`kl_divergence`].
pub const DEFAULT_SMOOTHING: f64 = 0.5;
/// Fewest pixels accepted by [`chi_square_attack`].
pub const CHI2_MIN_AREA: usize = 10_000;
/// Pairs whose own or neighbouring pair sums fall below this are skipped.
pub const CHI2_MIN_PAIR_COUNT: u64 = 50;
/// Pixels with `K + C` below this are ignored by [`normalized_deviation`].
pub const NORM_DEV_MIN_SUM: u32 = 16;

/// Relative entropy `Σ p log2(p / q)` between smoothed, normalised
/// histograms.
pub fn kl_divergence(p: &Histogram, q: &Histogram, smoothing: f64) -> Result<f64, StatError> {
    p.check_binning(q)?;
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(StatError::InvalidArgument("smoothing must be > 0".into()));
    }
    let bins = p.counts().len() as f64;
    let p_total = p.total() as f64 + smoothing * bins;
    let q_total = q.total() as f64 + smoothing * bins;
    let kl = p
        .counts()
        .iter()
        .zip(q.counts())
        .map(|(&a, &b)| {
            let pa = (a as f64 + smoothing) / p_total;
            let qb = (b as f64 + smoothing) / q_total;
            pa * (pa / qb).log2()
        })
        .sum::<f64>();
    // Rounding can leave a tiny negative residue for identical inputs.
    Ok(kl.max(0.0))
}

/// Overwrite the least-significant bit of every pixel.
pub fn lsb_embed(img: &RawImage, bits: &BitVector) -> Result<RawImage, StatError> {
    if bits.len() != img.len() {
        return Err(StatError::LengthMismatch {
            expected: img.len(),
            actual: bits.len(),
        });
    }
    let pixels = img
        .pixels()
        .iter()
        .zip(bits.bits())
        .map(|(&p, &b)| (p & !1) | b as u16)
        .collect();
    Ok(RawImage::new(img.width(), img.height(), pixels).expect("same shape"))
}

fn check_pair(a: &RawImage, b: &RawImage) -> Result<(), StatError> {
    if !a.same_shape(b) {
        return Err(StatError::DimensionMismatch);
    }
    Ok(())
}

/// Normalised horizontal autocorrelation of `K - C` at lags `0..=max_lag`.
///
/// Rows are treated independently and pooled around a global mean; entry 0
/// is 1 by construction.
pub fn autocorrelation(k: &RawImage, c: &RawImage, max_lag: usize) -> Result<Vec<f64>, StatError> {
    check_pair(k, c)?;
    let diff: Vec<f64> = k
        .pixels()
        .iter()
        .zip(c.pixels())
        .map(|(&a, &b)| a as f64 - b as f64)
        .collect();
    autocorrelation_of(&diff, k.width(), max_lag)
}

/// [`autocorrelation`] on an arbitrary row-major field.
pub fn autocorrelation_of(field: &[f64], width: usize, max_lag: usize) -> Result<Vec<f64>, StatError> {
    if max_lag >= width {
        return Err(StatError::InvalidArgument(format!(
            "max_lag {max_lag} must be below width {width}"
        )));
    }
    let n = field.len() as f64;
    let mean = field.iter().sum::<f64>() / n;
    let var = field.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var == 0.0 {
        return Err(StatError::Degenerate("difference image has zero variance".into()));
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    for lag in 1..=max_lag {
        let mut sum = 0.0;
        let mut count = 0usize;
        for row in field.chunks_exact(width) {
            for x in 0..width - lag {
                sum += (row[x] - mean) * (row[x + lag] - mean);
            }
            count += width - lag;
        }
        out.push(sum / count as f64 / var);
    }
    Ok(out)
}

/// RMS of `(K - C) / sqrt(K + C)` over pixels with `K + C >= 16`; equal to 1
/// in expectation for independent shot-noise-limited captures.
pub fn normalized_deviation(k: &RawImage, c: &RawImage) -> Result<f64, StatError> {
    normalized_deviation_counted(k, c).map(|(v, _)| v)
}

/// [`normalized_deviation`] together with the number of qualifying pixels.
pub fn normalized_deviation_counted(k: &RawImage, c: &RawImage) -> Result<(f64, usize), StatError> {
    check_pair(k, c)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for (&a, &b) in k.pixels().iter().zip(c.pixels()) {
        let s = a as u32 + b as u32;
        if s >= NORM_DEV_MIN_SUM {
            let d = a as f64 - b as f64;
            sum += d * d / s as f64;
            n += 1;
        }
    }
    if n == 0 {
        return Err(StatError::NoQualifyingPixels);
    }
    Ok(((sum / n as f64).sqrt(), n))
}

/// Outcome of the pairs-of-values test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairsTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    /// Probability under the clean hypothesis of a statistic at least this
    /// large. Uniform on clean images, near zero after LSB replacement.
    pub p_value: f64,
}

/// Pairs-of-values steganalysis on a region.
///
/// LSB replacement equalises the counts of each value pair `(2k, 2k+1)`,
/// whereas a natural histogram keeps the difference dictated by its local
/// slope. Pair sums survive embedding, so the slope is estimated from the
/// neighbouring pair sums: the clean prediction for `n(2k) - n(2k+1)` is
/// `-(s(k+1) - s(k-1)) / 8`. The statistic sums squared deviations from that
/// prediction over their Poisson variances and is chi-square under the clean
/// hypothesis.
pub fn chi_square_attack(img: &RawImage, region: Rect) -> Result<PairsTest, StatError> {
    region.check(img)?;
    if region.area() < CHI2_MIN_AREA {
        return Err(StatError::InsufficientSamples {
            needed: CHI2_MIN_AREA,
            found: region.area(),
        });
    }
    let mut counts = vec![0u64; 1 << 16];
    for v in region.values(img) {
        counts[v as usize] += 1;
    }
    let pair_sum = |k: usize| counts[2 * k] + counts[2 * k + 1];
    let pairs = counts.len() / 2;
    let mut statistic = 0.0;
    let mut dof = 0usize;
    for k in 1..pairs - 1 {
        let (below, here, above) = (pair_sum(k - 1), pair_sum(k), pair_sum(k + 1));
        if below < CHI2_MIN_PAIR_COUNT || here < CHI2_MIN_PAIR_COUNT || above < CHI2_MIN_PAIR_COUNT {
            continue;
        }
        let diff = counts[2 * k] as f64 - counts[2 * k + 1] as f64;
        let predicted = -(above as f64 - below as f64) / 8.0;
        let variance = here as f64 + (above + below) as f64 / 64.0;
        statistic += (diff - predicted).powi(2) / variance;
        dof += 1;
    }
    if dof < 2 {
        return Err(StatError::InsufficientSamples {
            needed: 2,
            found: dof,
        });
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    Ok(PairsTest {
        statistic,
        degrees_of_freedom: dof,
        p_value: dist.sf(statistic).clamp(0.0, 1.0),
    })
}
