//! Command-line surface. Every tunable also reads a `DEREFLECT_*` environment
//! variable; an explicit flag wins over the environment, which wins over the
//! built-in default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dereflect_core::pipeline::{DEFAULT_EPSILON, DEFAULT_H};
use dereflect_core::{NormMode, SuppressionParams};

/// Default cap on uploaded image size, in pixels.
pub const DEFAULT_MAX_PIXELS: u64 = 24_000_000;
pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_TIME_RUNS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "dereflect", version, about = "Single-image reflection suppression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Suppress reflections in one or more images and write PNGs.
    Suppress(SuppressArgs),
    /// Write a synthetic transmission/reflection pair and their blend.
    Synth(SynthArgs),
    /// Compute PSNR and SSIM for reference/test image pairs.
    Eval(EvalArgs),
    /// Time the solver on synthetic blends of several sizes.
    Bench(BenchArgs),
    /// Run the local HTTP service for interactive tuning.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Gradient threshold; gradients with magnitude below it are removed.
    #[arg(long = "h", env = "DEREFLECT_H", default_value_t = DEFAULT_H)]
    pub h: f64,
    /// Screening weight of the solve.
    #[arg(long, env = "DEREFLECT_EPSILON", default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Gradient norm used by the threshold.
    #[arg(long, env = "DEREFLECT_NORM", default_value = "per-channel", value_parser = ["per-channel", "joint"])]
    pub norm: String,
}

impl SolveArgs {
    pub fn params(&self) -> dereflect_core::Result<SuppressionParams> {
        let mode: NormMode = self.norm.parse()?;
        SuppressionParams::with_norm_mode(self.h, self.epsilon, mode)
    }
}

#[derive(Debug, Args)]
pub struct SuppressArgs {
    /// `INPUT OUTPUT`, or several inputs when `--out-dir` is given.
    #[arg(required = true, num_args = 1..)]
    pub paths: Vec<PathBuf>,
    /// Write `<stem>_dereflected.png` for every input into this directory.
    #[arg(long, env = "DEREFLECT_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Report the mean wall time over N repeated solves (default N = 20).
    #[arg(long, value_name = "N", env = "DEREFLECT_TIME", num_args = 0..=1,
          default_missing_value = "20", value_parser = clap::value_parser!(u32).range(1..))]
    pub time: Option<u32>,
    /// Include decode and encode in the timed region.
    #[arg(long, env = "DEREFLECT_TIME_TOTAL")]
    pub time_total: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Directory receiving `transmission.png`, `reflection.png`, `blend.png`
    /// and `reference.png` (the transmission scaled by the blend weight).
    #[arg(long, short = 'o')]
    pub out_dir: PathBuf,
    /// Transmission layer; the procedural toy layer is used when absent.
    #[arg(long, requires = "reflection")]
    pub transmission: Option<PathBuf>,
    /// Reflection layer; required together with `--transmission`.
    #[arg(long, requires = "transmission")]
    pub reflection: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Weight of the transmission layer in the blend.
    #[arg(long, default_value_t = 0.7)]
    pub w: f64,
    /// Standard deviation of the reflection blur, in pixels.
    #[arg(long, default_value_t = 4.0)]
    pub sigma: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Alternating `REFERENCE TEST` paths.
    #[arg(required = true, num_args = 2.., value_name = "REF TEST")]
    pub pairs: Vec<PathBuf>,
    /// Also write the rows as CSV to this path (`-` for stdout).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated `HEIGHTxWIDTH` sizes.
    #[arg(long, value_delimiter = ',', default_value = "512x512,1024x1024,1080x1440", value_parser = parse_size)]
    pub sizes: Vec<(usize, usize)>,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Timed repeats per size.
    #[arg(long, value_name = "N", env = "DEREFLECT_TIME", default_value_t = DEFAULT_TIME_RUNS as u32,
          value_parser = clap::value_parser!(u32).range(1..))]
    pub time: u32,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, env = "DEREFLECT_PORT", default_value_t = DEFAULT_PORT,
          value_parser = clap::value_parser!(u16).range(1024..))]
    pub port: u16,
    /// Address to bind; the service is meant for local use.
    #[arg(long, env = "DEREFLECT_BIND", default_value = "127.0.0.1")]
    pub bind: String,
    /// Largest accepted upload, in pixels.
    #[arg(long, env = "DEREFLECT_MAX_PIXELS", default_value_t = DEFAULT_MAX_PIXELS,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_pixels: u64,
    /// Directory with the web UI; a minimal page is served when absent.
    #[arg(long, env = "DEREFLECT_ASSETS")]
    pub assets: Option<PathBuf>,
    /// Rendered results kept per session.
    #[arg(long, env = "DEREFLECT_CACHE_SIZE", default_value_t = 32,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub cache_size: u64,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HEIGHTxWIDTH, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    let (h, w) = (parse(h)?, parse(w)?);
    if h == 0 || w == 0 {
        return Err(format!("size must be positive, got {s:?}"));
    }
    Ok((h, w))
}
