use std::fmt::Write as _;

use super::StatError;
use crate::imageio::RawImage;

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self {
            x,
            y,
            width,
            height,
        }
    }

    pub fn full(img: &RawImage) -> Self {
        Self::new(0, 0, img.width(), img.height())
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn check(&self, img: &RawImage) -> Result<(), StatError> {
        if self.width == 0
            || self.height == 0
            || self.x + self.width > img.width()
            || self.y + self.height > img.height()
        {
            return Err(StatError::RegionOutOfBounds);
        }
        Ok(())
    }

    pub fn values<'a>(&'a self, img: &'a RawImage) -> impl Iterator<Item = u16> + 'a {
        (self.y..self.y + self.height).flat_map(move |y| {
            let row = &img.pixels()[y * img.width()..(y + 1) * img.width()];
            row[self.x..self.x + self.width].iter().copied()
        })
    }
}

/// Counts over contiguous bins `[lo + i*w, lo + (i+1)*w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    lo: u32,
    bin_width: u32,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    /// Empty histogram over `bins` bins starting at `lo`.
    pub fn empty(lo: u32, bin_width: u32, bins: usize) -> Result<Self, StatError> {
        if bin_width == 0 || bins == 0 {
            return Err(StatError::InvalidArgument("empty binning".into()));
        }
        Ok(Self {
            lo,
            bin_width,
            counts: vec![0; bins],
            total: 0,
        })
    }

    pub fn from_counts(lo: u32, bin_width: u32, counts: Vec<u64>) -> Result<Self, StatError> {
        if bin_width == 0 || counts.is_empty() {
            return Err(StatError::InvalidArgument("empty binning".into()));
        }
        let total = counts.iter().sum();
        Ok(Self {
            lo,
            bin_width,
            counts,
            total,
        })
    }

    pub fn lo(&self) -> u32 {
        self.lo
    }

    /// Exclusive upper edge of the last bin.
    pub fn hi(&self) -> u32 {
        self.lo + self.bin_width * self.counts.len() as u32
    }

    pub fn bin_width(&self) -> u32 {
        self.bin_width
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bin_edges(&self) -> Vec<u32> {
        (0..=self.counts.len() as u32)
            .map(|i| self.lo + i * self.bin_width)
            .collect()
    }

    /// Bin index of `v`; values outside the range land in the edge bins.
    pub fn bin_of(&self, v: u32) -> usize {
        if v < self.lo {
            return 0;
        }
        (((v - self.lo) / self.bin_width) as usize).min(self.counts.len() - 1)
    }

    pub fn add(&mut self, v: u32) {
        let b = self.bin_of(v);
        self.counts[b] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<(), StatError> {
        self.check_binning(other)?;
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn check_binning(&self, other: &Histogram) -> Result<(), StatError> {
        if self.lo != other.lo
            || self.bin_width != other.bin_width
            || self.counts.len() != other.counts.len()
        {
            return Err(StatError::BinningMismatch);
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        let w = self.bin_width as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 * (self.lo as f64 + (i as f64 + 0.5) * w - 0.5))
            .sum::<f64>()
            / self.total as f64
    }

    /// Population standard deviation of bin centres.
    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let w = self.bin_width as f64;
        let var = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 * (self.lo as f64 + (i as f64 + 0.5) * w - 0.5 - m).powi(2))
            .sum::<f64>()
            / self.total as f64;
        var.sqrt()
    }

    /// Re-bin both histograms onto the union of their ranges.
    pub fn align(a: &Histogram, b: &Histogram) -> Result<(Histogram, Histogram), StatError> {
        if a.bin_width != b.bin_width || a.lo % a.bin_width != b.lo % b.bin_width {
            return Err(StatError::BinningMismatch);
        }
        let lo = a.lo.min(b.lo);
        let hi = a.hi().max(b.hi());
        let bins = ((hi - lo) / a.bin_width) as usize;
        let widen = |h: &Histogram| {
            let mut counts = vec![0u64; bins];
            let offset = ((h.lo - lo) / h.bin_width) as usize;
            counts[offset..offset + h.counts.len()].copy_from_slice(&h.counts);
            Histogram {
                lo,
                bin_width: h.bin_width,
                counts,
                total: h.total,
            }
        };
        Ok((widen(a), widen(b)))
    }

    /// `bin_low,bin_high,count` rows; `bin_high` is exclusive.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_low,bin_high,count\n");
        for (i, &c) in self.counts.iter().enumerate() {
            let low = self.lo + i as u32 * self.bin_width;
            let _ = writeln!(s, "{},{},{}", low, low + self.bin_width, c);
        }
        s
    }
}

/// Histogram of `region`, with bins aligned to multiples of `bin_width` and
/// spanning the observed value range.
pub fn histogram(img: &RawImage, region: Rect, bin_width: u32) -> Result<Histogram, StatError> {
    region.check(img)?;
    if bin_width == 0 {
        return Err(StatError::InvalidArgument("bin_width must be >= 1".into()));
    }
    let (min, max) = region
        .values(img)
        .fold((u16::MAX, 0u16), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let lo = min as u32 / bin_width * bin_width;
    let bins = ((max as u32 - lo) / bin_width + 1) as usize;
    let mut h = Histogram::empty(lo, bin_width, bins)?;
    for v in region.values(img) {
        h.add(v as u32);
    }
    Ok(h)
}

/// Histogram of `region` on a fixed binning; out-of-range values are counted
/// in the first or last bin.
pub fn histogram_on(img: &RawImage, region: Rect, binning: &Histogram) -> Result<Histogram, StatError> {
    region.check(img)?;
    let mut h = Histogram::empty(binning.lo, binning.bin_width, binning.counts.len())?;
    for v in region.values(img) {
        h.add(v as u32);
    }
    Ok(h)
}
