//! Command-line front end for the quality-assessment pipeline.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 partial data
//! failure (some sequences failed), 3 numerical failure.

mod cache;
mod compare;
mod config;
mod evaluate;
mod extract;
mod media;
mod predict;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vqfuse_core::video::VideoSpec;

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "vqfuse",
    version,
    about = "Full-reference video quality assessment"
)]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Deterministic seed recorded into artifacts (the pipeline itself is
    /// deterministic; the seed namespaces runs).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// JSON run configuration (alpha, beta or "tune", SVR hyperparameters,
    /// grid steps).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract per-frame features for every sequence of a manifest into a
    /// cache directory (idempotent).
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        /// Feature pool file; defaults to the full pool restricted to the
        /// manifest's source geometry.
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long)]
        cache_dir: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Select features, train both regressors, tune the combination weight
    /// and write the model file.
    Train {
        /// Manifest of the first training database (seeds model 1).
        #[arg(long)]
        train1: PathBuf,
        /// Manifest of the second training database (model 2, empty seed).
        #[arg(long)]
        train2: PathBuf,
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long)]
        cache_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Score one test sequence against its reference.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        #[arg(long, default_value_t = 8)]
        bit_depth: u8,
        #[arg(long)]
        frames: usize,
        /// Stored geometry of a re-sampled test sequence ("WxH"); it is
        /// upsampled back to the reference geometry before scoring.
        #[arg(long)]
        test_geometry: Option<String>,
        /// Per-frame score CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlate a model and baseline features against subjective scores
    /// over evaluation manifests; writes report table and pair dumps.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        /// Evaluation manifests (repeatable).
        #[arg(long = "manifest", required = true)]
        manifests: Vec<PathBuf>,
        #[arg(long)]
        cache_dir: PathBuf,
        /// Baseline feature keys, e.g. "PSNR-Y-S1" or "E-ADM" (repeatable).
        #[arg(long = "baseline")]
        baselines: Vec<String>,
        /// Metric the F-tests compare against (default: the model).
        #[arg(long)]
        anchor: Option<String>,
        /// Baseline for the pairwise protocol (default: first baseline).
        #[arg(long)]
        pair_against: Option<String>,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Compare two pairwise dumps: accuracy ratios and the exact test.
    ComparePairs {
        #[arg(long)]
        pairs_a: PathBuf,
        #[arg(long)]
        pairs_b: PathBuf,
        #[arg(long, default_value = "metric-a")]
        label_a: String,
        #[arg(long, default_value = "metric-b")]
        label_b: String,
    },
}

fn load_config(arg: &ConfigArg, seed: Option<u64>) -> anyhow::Result<RunConfig> {
    let mut config = RunConfig::load(arg.config.as_deref())?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match cli.command {
        Command::Extract {
            manifest,
            pool,
            cache_dir,
            config,
        } => {
            let config = load_config(&config, cli.seed)?;
            let report = extract::run(&manifest, pool.as_deref(), &cache_dir, &config)?;
            Ok(if report.failures.is_empty() { 0 } else { 2 })
        }
        Command::Train {
            train1,
            train2,
            pool,
            cache_dir,
            out,
            config,
        } => {
            let config = load_config(&config, cli.seed)?;
            train::run(&train1, &train2, pool.as_deref(), &cache_dir, &config, &out)?;
            Ok(0)
        }
        Command::Predict {
            model,
            reference,
            test,
            width,
            height,
            fps,
            bit_depth,
            frames,
            test_geometry,
            out,
        } => {
            let spec = VideoSpec::new(width, height, fps, bit_depth, frames);
            spec.validate_source()?;
            let test_geometry = match test_geometry {
                None => None,
                Some(text) => {
                    let (w, h) = text
                        .split_once(['x', 'X'])
                        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                        .ok_or_else(|| {
                            anyhow::anyhow!("--test-geometry expects WxH, got `{text}`")
                        })?;
                    Some((w, h))
                }
            };
            predict::run(&predict::PredictArgs {
                model: &model,
                reference: &reference,
                test: &test,
                spec,
                test_geometry,
                out: out.as_deref(),
            })?;
            Ok(0)
        }
        Command::Evaluate {
            model,
            manifests,
            cache_dir,
            baselines,
            anchor,
            pair_against,
            out_dir,
            config,
        } => {
            let config = load_config(&config, cli.seed)?;
            evaluate::run(
                &evaluate::EvaluateArgs {
                    model: &model,
                    manifests: manifests.iter().map(|p| p.as_path()).collect(),
                    cache_dir: &cache_dir,
                    baselines,
                    anchor,
                    pair_against,
                    out_dir: &out_dir,
                },
                &config,
            )?;
            Ok(0)
        }
        Command::ComparePairs {
            pairs_a,
            pairs_b,
            label_a,
            label_b,
        } => {
            compare::run(&pairs_a, &pairs_b, &label_a, &label_b)?;
            Ok(0)
        }
    }
}

/// Exit code for an error chain: numerical failures map to 3, everything
/// else is a usage/configuration problem.
fn classify_error(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<vqfuse_core::Error>() {
            match core {
                vqfuse_core::Error::Training { .. } | vqfuse_core::Error::NonFiniteFeature(_) => {
                    return 3
                }
                _ => return 1,
            }
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify_error(&e))
        }
    }
}
