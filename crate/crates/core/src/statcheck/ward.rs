//! The warden's hypothesis test: compare an image's statistics with their
//! null distributions simulated from clean captures of the same scene class.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::histogram::{histogram, histogram_on, Histogram, Rect};
use super::measures::{
    autocorrelation, chi_square_attack, kl_divergence, normalized_deviation_counted,
    DEFAULT_SMOOTHING,
};
use super::StatError;
use crate::camera::{capture_pair, SceneRadiance, SensorConfig};
use crate::imageio::RawImage;
use crate::rng::counter_key;

/// Fewest null samples a statistic needs before it can be thresholded.
pub const MIN_CALIBRATION_TRIALS: usize = 100;
/// Quantile of the null distribution above which a statistic is flagged.
pub const FLAG_QUANTILE: f64 = 0.99;
pub const DEFAULT_MAX_LAG: usize = 8;

const CALIBRATION_STREAM: u64 = 0x6361_6c69_6272_6174;
const FORMAT_HEADER: &str = "qsteg-calibration 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Clean,
    Suspicious,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Clean => "clean",
            Verdict::Suspicious => "suspicious",
        }
    }
}

/// Number of observations behind each statistic; zero when not computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SampleSizes {
    pub kl: usize,
    pub chi2: usize,
    pub autocorr: usize,
    pub norm_dev: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub kl_bits: f64,
    pub kl_smoothing: f64,
    /// Lags `1..=L` of the difference-image autocorrelation; empty without a
    /// reference capture.
    pub autocorr: Vec<f64>,
    pub norm_dev: Option<f64>,
    pub chi2_pvalue: f64,
    pub verdict: Verdict,
    /// Names of the statistics that exceeded their threshold.
    pub flagged: Vec<String>,
    pub sample_sizes: SampleSizes,
}

/// Null samples for each statistic plus the reference histogram used by the
/// divergence test.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub reference: Histogram,
    pub smoothing: f64,
    pub max_lag: usize,
    pub null_kl: Vec<f64>,
    pub null_chi2_pvalue: Vec<f64>,
    pub null_autocorr_max: Vec<f64>,
    pub null_norm_dev: Vec<f64>,
}

struct TrialStats {
    hist: Histogram,
    cover: RawImage,
    chi2_pvalue: f64,
    autocorr_max: f64,
    norm_dev: f64,
}

/// Linear-interpolation quantile of `values` (R type 7).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn max_abs_lag(rho: &[f64]) -> f64 {
    rho.iter().skip(1).fold(0.0f64, |m, r| m.max(r.abs()))
}

impl Calibration {
    /// Simulate `trials` independent key/cover pairs of `scene`.
    ///
    /// The key captures are pooled into the reference histogram; the cover
    /// captures, which the reference never saw, supply the single-image null
    /// samples, and each pair supplies the pair statistics.
    pub fn simulate(
        scene: &SceneRadiance,
        sensor: &SensorConfig,
        trials: usize,
        bin_width: u32,
    ) -> Result<Self, StatError> {
        if trials < MIN_CALIBRATION_TRIALS {
            return Err(StatError::MissingCalibration(format!(
                "{trials} trials requested, at least {MIN_CALIBRATION_TRIALS} needed"
            )));
        }
        let max_lag = DEFAULT_MAX_LAG.min(scene.width().saturating_sub(1));
        let stats: Vec<TrialStats> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let trial_sensor = SensorConfig {
                    seed: counter_key(sensor.seed, CALIBRATION_STREAM, t as u64),
                    ..*sensor
                };
                let (key, cover) = capture_pair(scene, &trial_sensor)
                    .map_err(|e| StatError::InvalidArgument(e.to_string()))?;
                let hist = histogram(&key, Rect::full(&key), bin_width)?;
                let chi2_pvalue = chi_square_attack(&cover, Rect::full(&cover))?.p_value;
                let autocorr_max = max_abs_lag(&autocorrelation(&cover, &key, max_lag)?);
                let (norm_dev, _) = normalized_deviation_counted(&cover, &key)?;
                Ok(TrialStats {
                    hist,
                    cover,
                    chi2_pvalue,
                    autocorr_max,
                    norm_dev,
                })
            })
            .collect::<Result<_, StatError>>()?;

        let mut reference = stats[0].hist.clone();
        for s in &stats[1..] {
            let (mut a, b) = Histogram::align(&reference, &s.hist)?;
            a.merge(&b)?;
            reference = a;
        }
        let smoothing = DEFAULT_SMOOTHING;
        let null_kl = stats
            .par_iter()
            .map(|s| {
                let h = histogram_on(&s.cover, Rect::full(&s.cover), &reference)?;
                kl_divergence(&reference, &h, smoothing)
            })
            .collect::<Result<_, StatError>>()?;
        Ok(Self {
            reference,
            smoothing,
            max_lag,
            null_kl,
            null_chi2_pvalue: stats.iter().map(|s| s.chi2_pvalue).collect(),
            null_autocorr_max: stats.iter().map(|s| s.autocorr_max).collect(),
            null_norm_dev: stats.iter().map(|s| s.norm_dev).collect(),
        })
    }

    fn require(&self, name: &str, samples: &[f64]) -> Result<(), StatError> {
        if samples.len() < MIN_CALIBRATION_TRIALS {
            return Err(StatError::MissingCalibration(format!(
                "{name}: {} null samples, at least {MIN_CALIBRATION_TRIALS} needed",
                samples.len()
            )));
        }
        Ok(())
    }

    pub fn kl_threshold(&self) -> f64 {
        quantile(&self.null_kl, FLAG_QUANTILE)
    }

    /// Threshold on `-ln p` of the pairs test.
    pub fn chi2_threshold(&self) -> f64 {
        let scores: Vec<f64> = self.null_chi2_pvalue.iter().map(|p| -p.max(f64::MIN_POSITIVE).ln()).collect();
        quantile(&scores, FLAG_QUANTILE)
    }

    pub fn autocorr_threshold(&self) -> f64 {
        quantile(&self.null_autocorr_max, FLAG_QUANTILE)
    }

    pub fn norm_dev_threshold(&self) -> f64 {
        quantile(&self.null_norm_dev, FLAG_QUANTILE)
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "{FORMAT_HEADER}");
        let _ = writeln!(s, "smoothing = {}", self.smoothing);
        let _ = writeln!(s, "max_lag = {}", self.max_lag);
        let _ = writeln!(s, "reference.lo = {}", self.reference.lo());
        let _ = writeln!(s, "reference.bin_width = {}", self.reference.bin_width());
        let counts: Vec<String> = self.reference.counts().iter().map(u64::to_string).collect();
        let _ = writeln!(s, "reference.counts = {}", counts.join(" "));
        let _ = writeln!(s, "null.kl_bits = {}", join(&self.null_kl));
        let _ = writeln!(s, "null.chi2_pvalue = {}", join(&self.null_chi2_pvalue));
        let _ = writeln!(s, "null.autocorr_max = {}", join(&self.null_autocorr_max));
        let _ = writeln!(s, "null.norm_dev = {}", join(&self.null_norm_dev));
        s
    }

    pub fn from_text(text: &str) -> Result<Self, StatError> {
        let bad = |m: &str| StatError::CalibrationFormat(m.to_string());
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == FORMAT_HEADER => {}
            Some(h) => return Err(bad(&format!("unsupported header '{}'", h.trim()))),
            None => return Err(bad("empty file")),
        }
        let mut fields = std::collections::BTreeMap::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(&format!("expected key = value: '{line}'")))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| fields.get(k).ok_or_else(|| bad(&format!("missing field {k}")));
        let floats = |k: &str| -> Result<Vec<f64>, StatError> {
            get(k)?
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad(&format!("bad number in {k}"))))
                .collect()
        };
        let parse = |k: &str| -> Result<u64, StatError> {
            get(k)?.parse().map_err(|_| bad(&format!("bad integer in {k}")))
        };
        let counts: Vec<u64> = get("reference.counts")?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad count")))
            .collect::<Result<_, _>>()?;
        let reference = Histogram::from_counts(
            parse("reference.lo")? as u32,
            parse("reference.bin_width")? as u32,
            counts,
        )?;
        let smoothing: f64 = get("smoothing")?.parse().map_err(|_| bad("bad smoothing"))?;
        Ok(Self {
            reference,
            smoothing,
            max_lag: parse("max_lag")? as usize,
            null_kl: floats("null.kl_bits")?,
            null_chi2_pvalue: floats("null.chi2_pvalue")?,
            null_autocorr_max: floats("null.autocorr_max")?,
            null_norm_dev: floats("null.norm_dev")?,
        })
    }
}

/// Run every applicable statistic on `img` and flag any that exceeds the
/// 99th percentile of its calibrated null distribution.
///
/// `reference` is an independent capture of the same scene; when present the
/// pair statistics (autocorrelation and normalised deviation) are included.
pub fn ward_test(
    img: &RawImage,
    calibration: &Calibration,
    reference: Option<&RawImage>,
) -> Result<AnalysisReport, StatError> {
    calibration.require("kl_bits", &calibration.null_kl)?;
    calibration.require("chi2_pvalue", &calibration.null_chi2_pvalue)?;
    let region = Rect::full(img);
    let mut flagged = Vec::new();
    let mut sizes = SampleSizes::default();

    let hist = histogram_on(img, region, &calibration.reference)?;
    let kl_bits = kl_divergence(&calibration.reference, &hist, calibration.smoothing)?;
    sizes.kl = hist.total() as usize;
    if kl_bits > calibration.kl_threshold() {
        flagged.push("kl_bits".to_string());
    }

    let pairs = chi_square_attack(img, region)?;
    sizes.chi2 = region.area();
    if -pairs.p_value.max(f64::MIN_POSITIVE).ln() > calibration.chi2_threshold() {
        flagged.push("chi2_pvalue".to_string());
    }

    let mut autocorr = Vec::new();
    let mut norm_dev = None;
    if let Some(reference) = reference {
        calibration.require("autocorr_max", &calibration.null_autocorr_max)?;
        calibration.require("norm_dev", &calibration.null_norm_dev)?;
        let max_lag = calibration.max_lag.min(img.width().saturating_sub(1));
        let rho = autocorrelation(img, reference, max_lag)?;
        sizes.autocorr = img.len();
        if max_abs_lag(&rho) > calibration.autocorr_threshold() {
            flagged.push("autocorr".to_string());
        }
        autocorr = rho[1..].to_vec();
        let (nd, n) = normalized_deviation_counted(img, reference)?;
        sizes.norm_dev = n;
        if nd > calibration.norm_dev_threshold() {
            flagged.push("norm_dev".to_string());
        }
        norm_dev = Some(nd);
    }

    Ok(AnalysisReport {
        kl_bits,
        kl_smoothing: calibration.smoothing,
        autocorr,
        norm_dev,
        chi2_pvalue: pairs.p_value,
        verdict: if flagged.is_empty() {
            Verdict::Clean
        } else {
            Verdict::Suspicious
        },
        flagged,
        sample_sizes: sizes,
    })
}

/// Plug-in estimate of the mutual information between two bit sequences,
/// in bits per bit.
pub fn bit_mutual_information(a: &[bool], b: &[bool]) -> f64 {
    assert_eq!(a.len(), b.len(), "sequences differ in length");
    let n = a.len() as f64;
    let mut joint = [[0f64; 2]; 2];
    for (&x, &y) in a.iter().zip(b) {
        joint[x as usize][y as usize] += 1.0;
    }
    let px = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let py = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let mut mi = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let j = joint[x][y];
            if j > 0.0 {
                mi += j / n * (j * n / (px[x] * py[y])).log2();
            }
        }
    }
    mi.max(0.0)
}
