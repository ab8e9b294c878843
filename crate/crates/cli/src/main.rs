//! `dopvel` command-line interface.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.
//! Errors are printed to stderr as one JSON object.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use dopvel_core::runner;
use dopvel_core::{Error, RunConfig};

/// Overrides the output directory when `--out` is not given.
const OUT_DIR_ENV: &str = "DOPVEL_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "dopvel-out";

#[derive(Parser, Debug)]
#[command(
    name = "dopvel",
    version,
    about = "Doppler LiDAR motion segmentation and velocity estimation"
)]
struct Cli {
    /// Run configuration file (JSON, schema `dopvel-run/1`).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Root seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory, overriding the config and DOPVEL_OUT_DIR.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Print results as JSON and also write report.json.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct SourceArgs {
    /// Built-in scene: intersection, t_intersection, straight_road, turn_straight_road.
    #[arg(long, conflicts_with_all = ["scene", "frames_dir"])]
    preset: Option<String>,

    /// Scene file (JSON, schema `dopvel-scene/1`).
    #[arg(long, value_name = "FILE", conflicts_with = "frames_dir")]
    scene: Option<PathBuf>,

    /// Directory written by `simulate`.
    #[arg(long, value_name = "DIR")]
    frames_dir: Option<PathBuf>,

    /// Number of frames.
    #[arg(long)]
    frames: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ray-cast a scene into frame files plus a manifest.
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Segment one frame file into static and moving clusters.
    Segment {
        frame: PathBuf,
        /// Write per-cell cluster labels as CSV into the output directory.
        #[arg(long)]
        labels: bool,
    },
    /// Segment one frame file and estimate ego and object velocities.
    Estimate { frame: PathBuf },
    /// Segment and estimate every frame, score against truth, write reports.
    Pipeline {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Measure segmentation and estimation throughput.
    Bench {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Dump a frame file as CSV.
    ExportCsv {
        frame: PathBuf,
        /// Destination file. Defaults to `<out>/<frame stem>.csv`.
        #[arg(long, short = 'o', value_name = "FILE")]
        output: Option<PathBuf>,
    },
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
    match run(&cli).and_then(|text| emit(&text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = classify(&e);
            let msg = serde_json::json!({
                "error": kind,
                "message": render(&e),
                "exit_code": code,
            });
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}

/// The error chain joined by `: `, skipping causes already quoted by their parent.
fn render(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if msg.contains(&text) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&text);
    }
    msg
}

fn classify(e: &anyhow::Error) -> (u8, &'static str) {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(err) if err.is_config_error() => (1, err.kind()),
        Some(err) => (2, err.kind()),
        None => (2, "runtime"),
    }
}

fn base_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::read(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn apply_source(cfg: &mut RunConfig, s: &SourceArgs) {
    if s.preset.is_some() || s.scene.is_some() || s.frames_dir.is_some() {
        cfg.preset = s.preset.clone();
        cfg.scene = s.scene.clone();
        cfg.frames_dir = s.frames_dir.clone();
    }
    if let Some(n) = s.frames {
        cfg.frames = n;
    }
}

fn out_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> anyhow::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn json_text(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

/// Runs the command and returns what it prints to stdout.
fn run(cli: &Cli) -> anyhow::Result<String> {
    let mut cfg = base_config(cli)?;
    let mut text = String::new();
    match &cli.command {
        Command::Simulate { source } => {
            apply_source(&mut cfg, source);
            cfg.validate()?;
            let out = out_dir(cli, &cfg);
            let manifest = runner::simulate(&cfg, &out)?;
            if cli.json {
                text = json_text(&serde_json::json!({
                    "out_dir": out,
                    "scene": manifest.scene,
                    "frames": manifest.frames.len(),
                }));
            } else {
                writeln!(
                    text,
                    "wrote {} frames of {} to {}",
                    manifest.frames.len(),
                    manifest.scene,
                    out.display()
                )?;
            }
        }
        Command::Pipeline { source } => {
            apply_source(&mut cfg, source);
            cfg.validate()?;
            let out = out_dir(cli, &cfg);
            let run = runner::pipeline(&cfg, &out, cli.json)?;
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
            if cli.json {
                text = runner::report_json(&run.output.report, &cfg) + "\n";
            } else {
                text = runner::report_text(&run.output.report, &cfg);
                writeln!(text, "outputs in {}", out.display())?;
            }
        }
        Command::Bench { source } => {
            apply_source(&mut cfg, source);
            if cfg.preset.is_none() && cfg.scene.is_none() && cfg.frames_dir.is_none() {
                cfg.preset = Some("intersection".into());
            }
            cfg.validate()?;
            let report = runner::bench(&cfg, source.frames.unwrap_or(100))?;
            text = if cli.json {
                json_text(&report)
            } else {
                runner::bench_text(&report)
            };
        }
        Command::Segment { frame, labels } => {
            cfg.validate_params()?;
            let labels_path = if *labels {
                let dir = out_dir(cli, &cfg);
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                Some(dir.join(format!("{}_labels.csv", stem(frame))))
            } else {
                None
            };
            let s = runner::segment_file(&cfg, frame, labels_path.as_deref())?;
            if cli.json {
                text = json_text(&s);
            } else {
                writeln!(
                    text,
                    "{}x{} grid, {} returns, v_th {:.4} m/s",
                    s.rows, s.cols, s.valid_cells, s.v_th
                )?;
                writeln!(text, "static cluster: {} cells", s.static_size)?;
                for c in &s.moving {
                    writeln!(
                        text,
                        "moving cluster {:>4}: {:>6} cells, mean Doppler {:+.3} m/s{}",
                        c.id,
                        c.size,
                        c.mean_doppler,
                        if c.undersized { " (undersized)" } else { "" }
                    )?;
                }
                if let Some(p) = labels_path {
                    writeln!(text, "labels written to {}", p.display())?;
                }
            }
        }
        Command::Estimate { frame } => {
            cfg.validate_params()?;
            let s = runner::estimate_file(&cfg, frame)?;
            if cli.json {
                text = json_text(&s);
            } else {
                let v = s.ego_velocity;
                writeln!(
                    text,
                    "ego velocity: [{:.4}, {:.4}, {:.4}] m/s from {} returns ({:?})",
                    v[0], v[1], v[2], s.ego_samples, s.ego_conditioning
                )?;
                for o in &s.objects {
                    match (&o.velocity, &o.error) {
                        (Some(v), _) => writeln!(
                            text,
                            "cluster {:>4} ({} cells): [{:.4}, {:.4}, {:.4}] m/s",
                            o.cluster_id, o.cluster_size, v[0], v[1], v[2]
                        )?,
                        (None, e) => writeln!(
                            text,
                            "cluster {:>4} ({} cells): {}",
                            o.cluster_id,
                            o.cluster_size,
                            e.as_deref().unwrap_or("no estimate")
                        )?,
                    }
                }
            }
        }
        Command::ExportCsv { frame, output } => {
            let dest = match output {
                Some(p) => p.clone(),
                None => {
                    let dir = out_dir(cli, &cfg);
                    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                    dir.join(format!("{}.csv", stem(frame)))
                }
            };
            let cells = runner::export_csv(frame, &dest).with_context(|| format!("exporting {}", frame.display()))?;
            if cli.json {
                text = json_text(&serde_json::json!({ "cells": cells, "output": dest }));
            } else {
                writeln!(text, "wrote {cells} cells to {}", dest.display())?;
            }
        }
    }
    Ok(text)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or("frame".into(), |s| s.to_string_lossy().into_owned())
}
