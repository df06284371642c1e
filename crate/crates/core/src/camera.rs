//! Photon-counting camera simulator.
//!
//! Each pixel records a Poisson number of photons around the scene radiance,
//! optionally perturbed by a per-capture exposure factor and Gaussian read
//! noise, then clamped at the full-well capacity. Every pixel draws from its
//! own counter-keyed stream, so captures are reproducible regardless of how
//! the work is split across threads.

use rayon::prelude::*;
use thiserror::Error;

use crate::imageio::{RawImage, MAX_VALUE};
use crate::rng::{counter_key, SplitMix64};

/// Typical full-well capacity of a scientific sensor, in electrons.
pub const DEFAULT_FULL_WELL: u32 = 50_000;
/// Radiance of the bright tiles in the `pcb` scene; exceeds the full well.
pub const PCB_BRIGHT_LAMBDA: f64 = 1.5 * DEFAULT_FULL_WELL as f64;
/// Side length of the tiles of the `pcb` scene.
pub const PCB_CELL: usize = 16;

/// Below this mean the Poisson sampler is exact; above it the normal
/// approximation is used.
const EXACT_POISSON_LIMIT: f64 = 60.0;

const STREAM_PIXEL: u64 = 0x7069_7865_6c00_0000;
const STREAM_JITTER: u64 = 0x6a69_7474_6572_0000;

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("invalid scene dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("radiance buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("radiance must be finite and non-negative")]
    NegativeRadiance,
    #[error("invalid sensor configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenePattern {
    Flat,
    Gradient,
    Pcb,
}

impl std::str::FromStr for ScenePattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flat" => Ok(Self::Flat),
            "gradient" => Ok(Self::Gradient),
            "pcb" => Ok(Self::Pcb),
            other => Err(format!("unknown scene pattern '{other}'")),
        }
    }
}

impl ScenePattern {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Flat => "flat",
            Self::Gradient => "gradient",
            Self::Pcb => "pcb",
        }
    }
}

/// Expected photon count per pixel, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneRadiance {
    width: usize,
    height: usize,
    lambda: Vec<f64>,
}

impl SceneRadiance {
    pub fn new(width: usize, height: usize, lambda: Vec<f64>) -> Result<Self, CameraError> {
        if width == 0 || height == 0 {
            return Err(CameraError::InvalidDimensions { width, height });
        }
        if lambda.len() != width * height {
            return Err(CameraError::BufferSize {
                expected: width * height,
                actual: lambda.len(),
            });
        }
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(CameraError::NegativeRadiance);
        }
        Ok(Self {
            width,
            height,
            lambda,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    pub full_well: u32,
    pub read_noise_sigma: f64,
    /// Each capture's exposure is scaled by a factor drawn uniformly from
    /// `[1 - f, 1 + f]`.
    pub exposure_jitter_fraction: f64,
    pub seed: u64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            full_well: DEFAULT_FULL_WELL,
            read_noise_sigma: 0.0,
            exposure_jitter_fraction: 0.0,
            seed: 0,
        }
    }
}

impl SensorConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), CameraError> {
        if self.full_well == 0 || self.full_well > MAX_VALUE {
            return Err(CameraError::InvalidConfig(format!(
                "full_well {} outside 1..=65535",
                self.full_well
            )));
        }
        if !(self.read_noise_sigma >= 0.0 && self.read_noise_sigma.is_finite()) {
            return Err(CameraError::InvalidConfig(
                "read_noise_sigma must be >= 0".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.exposure_jitter_fraction) {
            return Err(CameraError::InvalidConfig(
                "exposure_jitter_fraction must lie in [0, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Exposure factor applied to capture `capture_index`.
    pub fn exposure_factor(&self, capture_index: u64) -> f64 {
        let f = self.exposure_jitter_fraction;
        if f == 0.0 {
            return 1.0;
        }
        let mut rng = SplitMix64::new(counter_key(self.seed, STREAM_JITTER, capture_index));
        1.0 - f + 2.0 * f * rng.next_f64()
    }
}

pub fn make_scene(
    width: usize,
    height: usize,
    pattern: ScenePattern,
    mean_level: f64,
) -> Result<SceneRadiance, CameraError> {
    if width == 0 || height == 0 {
        return Err(CameraError::InvalidDimensions { width, height });
    }
    if !(mean_level >= 0.0 && mean_level.is_finite()) {
        return Err(CameraError::NegativeRadiance);
    }
    let mut lambda = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let l = match pattern {
                ScenePattern::Flat => mean_level,
                ScenePattern::Gradient => {
                    if width == 1 {
                        0.0
                    } else {
                        2.0 * mean_level * x as f64 / (width - 1) as f64
                    }
                }
                ScenePattern::Pcb => pcb_level(x, y, mean_level),
            };
            lambda.push(l);
        }
    }
    SceneRadiance::new(width, height, lambda)
}

// Diagonal runs of tiles: one in eight saturating copper, one in eight dark
// board, the rest at the mean level.
fn pcb_level(x: usize, y: usize, mean_level: f64) -> f64 {
    let (cx, cy) = (x / PCB_CELL, y / PCB_CELL);
    match (cx + 3 * cy) % 8 {
        0 => PCB_BRIGHT_LAMBDA,
        4 => 0.0,
        _ => mean_level,
    }
}

/// Draw a Poisson variate: Knuth's product method for small means, rounded
/// normal approximation otherwise.
pub fn sample_poisson(rng: &mut SplitMix64, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    if lambda < EXACT_POISSON_LIMIT {
        let limit = (-lambda).exp();
        let mut k = 0u32;
        let mut p = rng.next_f64_open0();
        while p > limit {
            k += 1;
            p *= rng.next_f64_open0();
        }
        k as f64
    } else {
        (lambda + lambda.sqrt() * rng.next_gaussian()).round().max(0.0)
    }
}

#[inline]
fn capture_pixel(lambda: f64, exposure: f64, sensor: &SensorConfig, key: u64) -> u16 {
    let mut rng = SplitMix64::new(key);
    let mut n = sample_poisson(&mut rng, exposure * lambda);
    if sensor.read_noise_sigma > 0.0 {
        n += (sensor.read_noise_sigma * rng.next_gaussian()).round();
    }
    n.clamp(0.0, sensor.full_well as f64) as u16
}

pub fn capture(
    scene: &SceneRadiance,
    sensor: &SensorConfig,
    capture_index: u64,
) -> Result<RawImage, CameraError> {
    sensor.validate()?;
    let exposure = sensor.exposure_factor(capture_index);
    let stream = STREAM_PIXEL ^ capture_index;
    let pixels: Vec<u16> = scene
        .lambda
        .par_iter()
        .enumerate()
        .map(|(i, &l)| capture_pixel(l, exposure, sensor, counter_key(sensor.seed, stream, i as u64)))
        .collect();
    Ok(RawImage::new(scene.width, scene.height, pixels).expect("scene dimensions are valid"))
}

/// Capture a key image (index 0) and a cover image (index 1).
pub fn capture_pair(
    scene: &SceneRadiance,
    sensor: &SensorConfig,
) -> Result<(RawImage, RawImage), CameraError> {
    Ok((capture(scene, sensor, 0)?, capture(scene, sensor, 1)?))
}

/// Check that an image can have been captured from `scene`.
pub fn check_dimensions(scene: &SceneRadiance, img: &RawImage) -> Result<(), CameraError> {
    if scene.width != img.width() || scene.height != img.height() {
        return Err(CameraError::BufferSize {
            expected: scene.width * scene.height,
            actual: img.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(img: &RawImage) -> (f64, f64) {
        let n = img.len() as f64;
        let mean = img.mean();
        let var = img
            .pixels()
            .iter()
            .map(|&p| (p as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn flat_scene() {
        let s = make_scene(2, 2, ScenePattern::Flat, 100.0).unwrap();
        assert_eq!(s.lambda(), &[100.0; 4]);
    }

    #[test]
    fn gradient_endpoints() {
        let s = make_scene(5, 2, ScenePattern::Gradient, 50.0).unwrap();
        assert_eq!(s.lambda()[0], 0.0);
        assert_eq!(s.lambda()[4], 100.0);
        assert_eq!(s.lambda()[5], 0.0);
        assert_eq!(s.lambda()[9], 100.0);
    }

    #[test]
    fn rejects_empty_scene() {
        assert!(matches!(
            make_scene(0, 3, ScenePattern::Flat, 1.0),
            Err(CameraError::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn pcb_capture_saturates() {
        let scene = make_scene(64, 64, ScenePattern::Pcb, 10_000.0).unwrap();
        assert!(scene.lambda().iter().any(|&l| l > DEFAULT_FULL_WELL as f64));
        let img = capture(&scene, &SensorConfig::with_seed(5), 0).unwrap();
        let saturated = img
            .pixels()
            .iter()
            .filter(|&&p| p as u32 == DEFAULT_FULL_WELL)
            .count();
        let dark = img.pixels().iter().filter(|&&p| p == 0).count();
        // Two bright tiles and two dark tiles fall inside a 4x4 tile window.
        assert_eq!(saturated, 2 * PCB_CELL * PCB_CELL);
        assert_eq!(dark, 2 * PCB_CELL * PCB_CELL);
    }

    #[test]
    fn dark_scene_is_zero() {
        let scene = make_scene(16, 16, ScenePattern::Flat, 0.0).unwrap();
        let img = capture(&scene, &SensorConfig::with_seed(1), 0).unwrap();
        assert!(img.pixels().iter().all(|&p| p == 0));
    }

    #[test]
    fn overexposure_clamps() {
        let scene = make_scene(16, 16, ScenePattern::Flat, 500_000.0).unwrap();
        let img = capture(&scene, &SensorConfig::with_seed(1), 0).unwrap();
        assert!(img.pixels().iter().all(|&p| p as u32 == DEFAULT_FULL_WELL));
    }

    #[test]
    fn shot_noise_moments() {
        let scene = make_scene(1000, 1000, ScenePattern::Flat, 10_000.0).unwrap();
        let img = capture(&scene, &SensorConfig::with_seed(42), 0).unwrap();
        let (mean, var) = stats(&img);
        // Standard error of the mean is 0.1.
        assert!((mean - 10_000.0).abs() < 0.5, "mean {mean}");
        assert!((var.sqrt() - 100.0).abs() < 1.0, "sd {}", var.sqrt());
        assert!((0.95e4..=1.05e4).contains(&var));
    }

    #[test]
    fn exact_sampler_small_lambda() {
        // Knuth branch: compare with the Poisson pmf at lambda = 3.
        let mut rng = SplitMix64::new(11);
        let n = 200_000;
        let mut hist = [0usize; 20];
        for _ in 0..n {
            let k = sample_poisson(&mut rng, 3.0) as usize;
            hist[k.min(19)] += 1;
        }
        let mut pmf = (-3.0f64).exp();
        for (k, &count) in hist.iter().enumerate().take(10) {
            let observed = count as f64 / n as f64;
            let se = (pmf * (1.0 - pmf) / n as f64).sqrt();
            assert!((observed - pmf).abs() < 5.0 * se + 1e-4, "k={k}");
            pmf *= 3.0 / (k + 1) as f64;
        }
    }

    #[test]
    fn read_noise_adds_variance() {
        let scene = make_scene(500, 400, ScenePattern::Flat, 1_000.0).unwrap();
        let sensor = SensorConfig {
            read_noise_sigma: 20.0,
            ..SensorConfig::with_seed(8)
        };
        let (_, var) = stats(&capture(&scene, &sensor, 0).unwrap());
        // 1000 shot-noise variance plus 400 read-noise variance.
        assert!((var - 1_400.0).abs() < 40.0, "var {var}");
    }

    #[test]
    fn deterministic_and_index_dependent() {
        let scene = make_scene(32, 32, ScenePattern::Gradient, 300.0).unwrap();
        let sensor = SensorConfig::with_seed(9);
        let (k1, c1) = capture_pair(&scene, &sensor).unwrap();
        let (k2, c2) = capture_pair(&scene, &sensor).unwrap();
        assert_eq!(k1, k2);
        assert_eq!(c1, c2);
        assert_ne!(k1, c1);
        assert_eq!(capture(&scene, &sensor, 1).unwrap(), c1);
    }

    #[test]
    fn jitter_changes_exposure() {
        let scene = make_scene(512, 512, ScenePattern::Flat, 10_000.0).unwrap();
        let sensor = SensorConfig {
            exposure_jitter_fraction: 0.05,
            ..SensorConfig::with_seed(2)
        };
        let (k, c) = capture_pair(&scene, &sensor).unwrap();
        let ratio = c.mean() / k.mean();
        assert!((0.90..=1.10).contains(&ratio));
        let expected = sensor.exposure_factor(1) / sensor.exposure_factor(0);
        // Mean over 2^18 pixels resolves the ratio to ~3e-5.
        assert!((ratio - expected).abs() < 2e-4);
        assert!((ratio - 1.0).abs() > 1e-3, "ratio {ratio}");
        for i in 0..100 {
            let j = sensor.exposure_factor(i);
            assert!((0.95..=1.05).contains(&j));
        }
    }

    #[test]
    fn config_validation() {
        let mut s = SensorConfig::default();
        assert!(s.validate().is_ok());
        s.exposure_jitter_fraction = 1.0;
        assert!(s.validate().is_err());
        s = SensorConfig {
            full_well: 70_000,
            ..SensorConfig::default()
        };
        assert!(s.validate().is_err());
    }
}
