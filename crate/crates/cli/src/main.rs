use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dmtopo::lindblad::{bell_measurement_demo, damping_gap_and_ness, LindbladConfig, NessReport};
use dmtopo::sweep::{
    hh_chern, hh_spectrum, hh_wilson, toy_classify, toy_phase_diagram, HhChernConfig,
    HhSpectrumConfig, Table, ToyClassifyConfig, ToyPhaseConfig,
};
use dmtopo::topology::TwistGrid;
use dmtopo::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Spectral structure and many-body Chern numbers of mixed states.
#[derive(Debug, Parser)]
#[command(name = "dmtopo", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Twist grid, e.g. `12x12`; overrides the config.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<TwistGrid>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write `elapsed_s=0` in CSV summaries so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-band toy model.
    #[command(subcommand)]
    Toy(ToyCommand),
    /// Interacting Hofstadter-Hubbard model.
    #[command(subcommand)]
    Hh(HhCommand),
    /// Open systems.
    #[command(subcommand)]
    Lindblad(LindbladCommand),
}

#[derive(Debug, Subcommand)]
enum ToyCommand {
    /// Gaps, merged manifolds and Chern numbers at one (J, T).
    Classify,
    /// Block count and Chern list over a (J/Δ, T) grid, as CSV.
    PhaseDiagram,
}

#[derive(Debug, Subcommand)]
enum HhCommand {
    /// Lowest levels over a g sweep, as CSV, plus a partition report.
    Spectrum,
    /// Chern number of one manifold, as JSON.
    Chern,
    /// arg det W(θy) track of one manifold, as CSV.
    Wilson,
}

#[derive(Debug, Subcommand)]
enum LindbladCommand {
    /// Damping gap and steady state of a qubit-register Liouvillian.
    Ness,
    /// Local dephasing of one half of a Bell pair.
    DemoBell,
}

fn parse_grid(s: &str) -> std::result::Result<TwistGrid, String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected <nx>x<ny>, got {s:?}"))?;
    let nx = a
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("{a:?}: {e}"))?;
    let ny = b
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("{b:?}: {e}"))?;
    TwistGrid::new(nx, ny).map_err(|e| e.to_string())
}

fn load<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let path = path.ok_or_else(|| Error::Config("this command needs --config <path>".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// `spectrum.csv` → `spectrum.partition.json`
fn companion_path(out: &Path) -> PathBuf {
    out.with_extension("partition.json")
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if let Some(n) = g.workers {
        if n == 0 {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    }
    let started = Instant::now();
    let csv = |t: &Table| {
        t.to_csv(if g.no_timing {
            None
        } else {
            Some(started.elapsed().as_secs_f64())
        })
    };
    let config = g.config.as_deref();
    let out = g.out.as_deref();

    match &cli.command {
        Command::Toy(ToyCommand::Classify) => {
            let cfg: ToyClassifyConfig = load(config)?;
            emit(out, &json(&toy_classify(&cfg)?)?)
        }
        Command::Toy(ToyCommand::PhaseDiagram) => {
            let cfg: ToyPhaseConfig = load(config)?;
            let table = toy_phase_diagram(&cfg)?;
            emit(out, &csv(&table))
        }
        Command::Hh(HhCommand::Spectrum) => {
            let cfg: HhSpectrumConfig = load(config)?;
            let (table, report) = hh_spectrum(&cfg)?;
            emit(out, &csv(&table))?;
            if let Some(p) = out {
                fs::write(companion_path(p), json(&report)?)?;
            }
            Ok(())
        }
        Command::Hh(HhCommand::Chern) => {
            let cfg: HhChernConfig = load(config)?;
            emit(out, &json(&hh_chern(&cfg, g.grid, g.seed)?)?)
        }
        Command::Hh(HhCommand::Wilson) => {
            let cfg: HhChernConfig = load(config)?;
            let table = hh_wilson(&cfg, g.grid)?;
            emit(out, &csv(&table))
        }
        Command::Lindblad(LindbladCommand::Ness) => {
            let cfg: LindbladConfig = load(config)?;
            let spectrum = damping_gap_and_ness(&cfg.build()?)?;
            emit(out, &json(&NessReport::from_spectrum(&spectrum))?)
        }
        Command::Lindblad(LindbladCommand::DemoBell) => {
            emit(out, &json(&bell_measurement_demo()?)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
