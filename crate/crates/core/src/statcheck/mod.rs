//! Steganalysis toolbox: histograms, relative entropy, the LSB baseline,
//! pixel-independence checks and a calibrated composite test.

mod histogram;
mod measures;
mod ward;

use thiserror::Error;

pub use histogram::{histogram, histogram_on, Histogram, Rect};
pub use measures::{
    autocorrelation, autocorrelation_of, chi_square_attack, kl_divergence, lsb_embed,
    normalized_deviation, normalized_deviation_counted, PairsTest, CHI2_MIN_AREA,
    CHI2_MIN_PAIR_COUNT, DEFAULT_SMOOTHING, NORM_DEV_MIN_SUM,
};
pub use ward::{
    bit_mutual_information, quantile, ward_test, AnalysisReport, Calibration, SampleSizes,
    Verdict, DEFAULT_MAX_LAG, FLAG_QUANTILE, MIN_CALIBRATION_TRIALS,
};

#[derive(Debug, Error, PartialEq)]
pub enum StatError {
    #[error("region lies outside the image")]
    RegionOutOfBounds,
    #[error("histograms use different binning")]
    BinningMismatch,
    #[error("images differ in size")]
    DimensionMismatch,
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("insufficient samples: need {needed}, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("no pixels qualify for the statistic")]
    NoQualifyingPixels,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing calibration: {0}")]
    MissingCalibration(String),
    #[error("calibration file: {0}")]
    CalibrationFormat(String),
}
