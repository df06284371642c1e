use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qsteg::camera::{ScenePattern, DEFAULT_FULL_WELL};
use qsteg::codec::DEFAULT_PARITY_SYMBOLS;

#[derive(Debug, Parser)]
#[command(name = "qsteg", version, about = "Shot-noise steganography toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a key and a cover capture of the same scene.
    Capture(CaptureArgs),
    /// Hide a message file in a stego image built from a key/cover pair.
    Embed(EmbedArgs),
    /// Recover a message from a stego image using the key image.
    Extract(ExtractArgs),
    /// Run the calibrated steganalysis battery on an image.
    Analyze(AnalyzeArgs),
    /// LSB-replace random bits into an image and dump both histograms.
    DemoLsb(DemoLsbArgs),
    /// Simulate clean captures and record the null distributions.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    #[arg(long, default_value = "flat", value_parser = parse_pattern)]
    pub pattern: ScenePattern,
    #[arg(long, default_value_t = 10_000.0)]
    pub mean_level: f64,
}

#[derive(Debug, Args)]
pub struct SensorArgs {
    #[arg(long, default_value_t = DEFAULT_FULL_WELL)]
    pub full_well: u32,
    #[arg(long, default_value_t = 0.0)]
    pub read_noise_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub exposure_jitter_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, default_value_t = DEFAULT_PARITY_SYMBOLS)]
    pub parity_symbols: usize,
    #[arg(long, default_value_t = 0)]
    pub mixing_seed: u64,
    #[arg(long, default_value_t = 1)]
    pub block_pixels: usize,
    /// Saturation level used to mask unusable key pixels.
    #[arg(long, default_value_t = DEFAULT_FULL_WELL)]
    pub full_well: u32,
    /// Use every pixel, including saturated and dark ones.
    #[arg(long)]
    pub no_mask: bool,
}

impl PlanArgs {
    pub fn mask_level(&self) -> Option<u32> {
        (!self.no_mask).then_some(self.full_well)
    }
}

#[derive(Debug, Args)]
pub struct CaptureArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub sensor: SensorArgs,
    #[arg(long)]
    pub key_out: PathBuf,
    #[arg(long)]
    pub cover_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long)]
    pub cover: PathBuf,
    /// Raw message bytes.
    #[arg(long)]
    pub message: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub stego: PathBuf,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub calibration: PathBuf,
    /// Independent capture of the same scene; enables the pair statistics.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub fail_on_suspicious: bool,
}

#[derive(Debug, Args)]
pub struct DemoLsbArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub cover_histogram: PathBuf,
    #[arg(long)]
    pub stego_histogram: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub bin_width: u32,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub sensor: SensorArgs,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub bin_width: u32,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_pattern(s: &str) -> Result<ScenePattern, String> {
    s.parse()
}
