use std::io::Write as _;
use std::path::Path;

use qsteg::camera::{capture_pair, make_scene, SceneRadiance, SensorConfig};
use qsteg::codec::BitVector;
use qsteg::imageio::{read_pgm16, write_pgm16, write_report, RawImage};
use qsteg::statcheck::{histogram, lsb_embed, ward_test, Calibration, Histogram, Rect, Verdict};
use qsteg::{hide, reveal};
use tempfile::NamedTempFile;

use crate::args::*;
use crate::error::{embed_error, extract_error, CliError};

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn read_image(path: &Path) -> Result<RawImage, CliError> {
    read_pgm16(&read_bytes(path)?).map_err(|source| CliError::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Write through a temporary file in the target directory, then rename, so a
/// failed run never leaves a partial file behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn scene(args: &SceneArgs) -> Result<SceneRadiance, CliError> {
    Ok(make_scene(args.width, args.height, args.pattern, args.mean_level)?)
}

fn sensor(args: &SensorArgs) -> Result<SensorConfig, CliError> {
    let cfg = SensorConfig {
        full_well: args.full_well,
        read_noise_sigma: args.read_noise_sigma,
        exposure_jitter_fraction: args.exposure_jitter_fraction,
        seed: args.seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Capture(a) => capture(a),
        Command::Embed(a) => embed(a),
        Command::Extract(a) => extract(a),
        Command::Analyze(a) => analyze(a),
        Command::DemoLsb(a) => demo_lsb(a),
        Command::Calibrate(a) => calibrate(a),
    }
}

fn capture(a: CaptureArgs) -> Result<(), CliError> {
    let (k, c) = capture_pair(&scene(&a.scene)?, &sensor(&a.sensor)?)?;
    // Encode both before writing either.
    let (kb, cb) = (write_pgm16(&k), write_pgm16(&c));
    write_atomic(&a.key_out, &kb)?;
    write_atomic(&a.cover_out, &cb)
}

fn embed(a: EmbedArgs) -> Result<(), CliError> {
    let key = read_image(&a.key)?;
    let cover = read_image(&a.cover)?;
    let message = read_bytes(&a.message)?;
    let p = &a.plan;
    let stego = hide(
        &key,
        &cover,
        &message,
        p.parity_symbols,
        p.mixing_seed,
        p.block_pixels,
        p.mask_level(),
    )
    .map_err(embed_error)?;
    write_atomic(&a.out, &write_pgm16(&stego))
}

fn extract(a: ExtractArgs) -> Result<(), CliError> {
    let stego = read_image(&a.stego)?;
    let key = read_image(&a.key)?;
    let p = &a.plan;
    let recovered = reveal(
        &stego,
        &key,
        p.parity_symbols,
        p.mixing_seed,
        p.block_pixels,
        p.mask_level(),
    )
    .map_err(extract_error)?;
    eprintln!(
        "recovered {} bytes, {} symbols corrected",
        recovered.payload.len(),
        recovered.corrected_symbols
    );
    write_atomic(&a.out, &recovered.payload)
}

fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let img = read_image(&a.image)?;
    let text = std::fs::read_to_string(&a.calibration).map_err(|e| CliError::io(&a.calibration, e))?;
    let calibration = Calibration::from_text(&text)?;
    let reference = a.reference.as_deref().map(read_image).transpose()?;
    let report = ward_test(&img, &calibration, reference.as_ref())?;
    let bytes = write_report(&report);
    match &a.out {
        Some(path) => write_atomic(path, &bytes)?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
    }
    if a.fail_on_suspicious && report.verdict == Verdict::Suspicious {
        return Err(CliError::Suspicious);
    }
    Ok(())
}

fn demo_lsb(a: DemoLsbArgs) -> Result<(), CliError> {
    let img = read_image(&a.image)?;
    let stego = lsb_embed(&img, &BitVector::random(img.len(), a.seed))?;
    let (before, after) = Histogram::align(
        &histogram(&img, Rect::full(&img), a.bin_width)?,
        &histogram(&stego, Rect::full(&stego), a.bin_width)?,
    )?;
    write_atomic(&a.out, &write_pgm16(&stego))?;
    write_atomic(&a.cover_histogram, before.to_csv().as_bytes())?;
    write_atomic(&a.stego_histogram, after.to_csv().as_bytes())
}

fn calibrate(a: CalibrateArgs) -> Result<(), CliError> {
    let cal = Calibration::simulate(&scene(&a.scene)?, &sensor(&a.sensor)?, a.trials, a.bin_width)?;
    write_atomic(&a.out, cal.to_text().as_bytes())
}
