//! `nrlink` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures.

mod config_file;
mod denoise;
mod evaluate;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config_file::{parse_config, parse_list, GenerateSettings};
use denoise::{denoise_tree, DenoiseOptions, Method};
use evaluate::{evaluate, write_report, EvaluateInputs};
use nrlink::denoise::DEFAULT_WINDOW;
use nrlink::link::{dataset_digest, generate_dataset, SweepSpec, MANIFEST_FILE};

/// Invalid invocation: bad flags, missing inputs or a malformed config.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Parser)]
#[command(name = "nrlink", version, about = "NR uplink image transmission simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmit every PNG of a directory over an SNR x Doppler grid.
    Generate(GenerateArgs),
    /// Apply a classical denoiser to every PNG of a tree.
    Denoise(DenoiseArgs),
    /// Score test images against clean references and write a CSV report.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// key = value link configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "in")]
    in_dir: PathBuf,
    #[arg(long = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated SNR values in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Comma-separated maximum Doppler shifts in Hz.
    #[arg(long)]
    doppler: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long = "in")]
    in_dir: PathBuf,
    #[arg(long = "out")]
    out_dir: PathBuf,
    /// Noise standard deviation for bm3d, in 8-bit units; estimated when omitted.
    #[arg(long)]
    sigma: Option<f64>,
    /// Odd window side for mean and median.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Directory of clean `{stem}.png` references.
    #[arg(long)]
    clean: PathBuf,
    /// Test images, flat or in `snr{S}_dop{D}` groups.
    #[arg(long = "in")]
    in_dir: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long = "out")]
    out: Option<PathBuf>,
    #[arg(long, requires = "masks")]
    gt_masks: Option<PathBuf>,
    #[arg(long, requires = "gt_masks")]
    masks: Option<PathBuf>,
    #[arg(long, requires = "detections")]
    gt_detections: Option<PathBuf>,
    #[arg(long, requires = "gt_detections")]
    detections: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<nrlink::Error> for Failure {
    fn from(e: nrlink::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn require_dir(path: &Path, what: &str) -> Result<(), UsageError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(UsageError(format!("{what} {} is not a directory", path.display())))
    }
}

fn generate_settings(args: &GenerateArgs) -> Result<GenerateSettings, UsageError> {
    let mut s = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?
        }
        None => GenerateSettings::default(),
    };
    if let Some(v) = &args.snr {
        s.snr_db = parse_list("--snr", v)?;
    }
    if let Some(v) = &args.doppler {
        s.doppler_hz = parse_list("--doppler", v)?;
    }
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(w) = args.workers {
        s.workers = w;
    }
    s.validate()?;
    Ok(s)
}

fn run_generate(args: GenerateArgs) -> Result<(), Failure> {
    let settings = generate_settings(&args)?;
    require_dir(&args.in_dir, "input")?;
    let spec = SweepSpec {
        base: settings.link,
        snr_db: settings.snr_db,
        doppler_hz: settings.doppler_hz,
        base_seed: settings.seed,
        workers: settings.workers,
    };
    log::info!(
        "sweeping {} SNR x {} Doppler points, seed {}",
        spec.snr_db.len(),
        spec.doppler_hz.len(),
        spec.base_seed
    );
    let summary = generate_dataset(&args.in_dir, &args.out_dir, &spec)?;
    for (path, reason) in &summary.skipped {
        log::warn!("skipped {}: {reason}", path.display());
    }
    log::info!(
        "wrote {} images and {}",
        summary.rows.len(),
        args.out_dir.join(MANIFEST_FILE).display()
    );
    println!("{}", dataset_digest(&args.out_dir)?);
    Ok(())
}

fn run_denoise(args: DenoiseArgs) -> Result<(), Failure> {
    require_dir(&args.in_dir, "input")?;
    if matches!(args.method, Method::Mean | Method::Median) && (args.window < 3 || args.window.is_multiple_of(2)) {
        return Err(UsageError(format!("--window must be odd and at least 3, got {}", args.window)).into());
    }
    if let Some(s) = args.sigma {
        if !(s.is_finite() && s >= 0.0) {
            return Err(UsageError(format!("--sigma must be a non-negative number, got {s}")).into());
        }
    }
    let opts = DenoiseOptions {
        method: args.method,
        window: args.window,
        sigma: args.sigma,
    };
    let summary = denoise_tree(&args.in_dir, &args.out_dir, &opts, args.workers)?;
    log::info!(
        "denoised {} images, copied {} references, {} failed",
        summary.written,
        summary.copied,
        summary.failed.len()
    );
    Ok(())
}

fn run_evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    require_dir(&args.clean, "clean")?;
    require_dir(&args.in_dir, "input")?;
    let inputs = EvaluateInputs {
        clean_dir: args.clean,
        test_dir: args.in_dir,
        gt_masks: args.gt_masks,
        masks: args.masks,
        gt_detections: args.gt_detections,
        detections: args.detections,
    };
    for dir in [&inputs.gt_masks, &inputs.masks, &inputs.gt_detections, &inputs.detections]
        .into_iter()
        .flatten()
    {
        require_dir(dir, "annotation")?;
    }
    let rows = evaluate(&inputs)?;
    match &args.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(anyhow::Error::from)?;
            }
            write_report(fs::File::create(path).map_err(anyhow::Error::from)?, &rows)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_report(&mut lock, &rows)?;
            lock.flush().map_err(anyhow::Error::from)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => run_generate(a),
        Command::Denoise(a) => run_denoise(a),
        Command::Evaluate(a) => run_evaluate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
