//! Monocular 3D detection pipeline driver.
//!
//! Subcommands:
//! - `infer`  – 2D detections (+ dimension/orientation estimates) → 3D
//!   result files via tight-constraint seeding, dense sampling and scoring.
//! - `fit`    – estimate sampling parameters and the ray coefficient from
//!   training ground truth.
//! - `eval`   – KITTI-style AP/AOS/dimension-error report.
//! - `render` – green wireframe overlays on PPM images.

mod config;
mod dataset;
mod eval_cmd;
mod fit;
mod infer;
mod render;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::ConfigMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "mono3d", version, about = "Monocular 3D object detection toolkit")]
struct Cli {
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run detection-to-3D inference.
    Infer(infer::InferArgs),
    /// Fit sampling parameters and the ray coefficient on training data.
    Fit(fit::FitArgs),
    /// Evaluate result files against ground truth.
    Eval(eval_cmd::EvalArgs),
    /// Render wireframe overlays.
    Render(render::RenderArgs),
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::default(),
    };
    match cli.command {
        Command::Infer(args) => infer::run(args, &cfg),
        Command::Fit(args) => fit::run(args, &cfg),
        Command::Eval(args) => eval_cmd::run(args, &cfg),
        Command::Render(args) => render::run(args, &cfg),
    }
}
