//! `hodgechart`: run JSON scenarios against the chart engine and emit
//! machine-readable reports.
//!
//! Exit codes: 0 scenario ran and the verdict passed, 2 scenario ran
//! and the verdict failed, 1 anything else (bad input, schema
//! violation, engine rejection).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

mod run;
mod scenario;

use run::{apply_overrides, run_scenario, Overrides};

#[derive(Parser)]
#[command(
    name = "hodgechart",
    version,
    about = "Chart computations for nonlinear bundles: connections, curvature tensors, monodromy"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Chern connection of a fiber metric and its orthogonality residual.
    Chern(RunArgs),
    /// F-family curvature of Higgs data pushed through the forward transform.
    CurvatureF(RunArgs),
    /// G-family curvature of flat data pulled through the backward transform.
    CurvatureG(RunArgs),
    /// Higgs data to flat data, reporting the transformed operators.
    SimpsonForward(RunArgs),
    /// Flat data to Higgs data, reporting the transformed operators.
    SimpsonBackward(RunArgs),
    /// Allowability checks plus the curvature verdict for either side.
    HarmonicCheck(RunArgs),
    /// Analytic continuation of a rational ODE foliation along a base path.
    Monodromy(RunArgs),
    /// Jacobian degree growth over words in polynomial automorphisms.
    Autgroup(RunArgs),
    /// Harmonicity of the rank-one variation attached to a period map.
    Rank1(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Override every base-grid axis to n x n samples.
    #[arg(long)]
    grid: Option<usize>,
    /// Override the scenario tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Report format. CSV is one row per grid point per tensor
    /// component and is only available for grid-sweep kinds.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for sample-parallel runs.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (expected, args) = match &cli.cmd {
        Cmd::Chern(a) => ("chern", a),
        Cmd::CurvatureF(a) => ("curvature-f", a),
        Cmd::CurvatureG(a) => ("curvature-g", a),
        Cmd::SimpsonForward(a) => ("simpson-forward", a),
        Cmd::SimpsonBackward(a) => ("simpson-backward", a),
        Cmd::HarmonicCheck(a) => ("harmonic-check", a),
        Cmd::Monodromy(a) => ("monodromy", a),
        Cmd::Autgroup(a) => ("autgroup", a),
        Cmd::Rank1(a) => ("rank1", a),
    };
    match execute(expected, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(expected: &str, args: &RunArgs) -> Result<bool> {
    if let Some(threads) = args.threads {
        // A later build_global is a no-op; fine for repeated test use.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let started = Instant::now();
    let bytes = std::fs::read(&args.scenario)
        .with_context(|| format!("reading {}", args.scenario.display()))?;
    let sha = hex_sha256(&bytes);
    let text = String::from_utf8(bytes).context("scenario is not UTF-8")?;
    let mut scenario = scenario::parse_scenario(&text)?;
    if scenario.body.kind() != expected {
        bail!(
            "scenario kind `{}` does not match subcommand `{expected}`",
            scenario.body.kind()
        );
    }
    apply_overrides(
        &mut scenario,
        &Overrides {
            grid_n: args.grid,
            tol: args.tol,
        },
    );

    let outcome = run_scenario(&scenario, matches!(args.format, Format::Csv))?;
    let payload = match args.format {
        Format::Json => {
            // The echoed scenario has overrides baked in, so feeding it
            // back without flags reproduces this run.
            let report = serde_json::json!({
                "schema_version": scenario::SCHEMA_VERSION,
                "kind": scenario.body.kind(),
                "scenario_sha256": sha,
                "scenario": serde_json::to_value(&scenario)?,
                "results": outcome.results,
                "verdict": outcome.verdict,
                "timings": { "total_ms": started.elapsed().as_millis() as u64 },
            });
            serde_json::to_string_pretty(&report)? + "\n"
        }
        Format::Csv => outcome.csv.ok_or_else(|| {
            anyhow::anyhow!(
                "kind `{expected}` has no grid sweep; csv needs one of \
                 curvature-f, curvature-g, harmonic-check, rank1"
            )
        })?,
    };
    match &args.report {
        Some(path) => std::fs::write(path, payload)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{payload}"),
    }
    Ok(outcome.verdict)
}

fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
