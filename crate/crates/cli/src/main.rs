//! `eprb`: run the coincidence-loophole experiments from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use eprb_core::runner::manifest::now_rfc3339;
use eprb_core::runner::report;
use eprb_core::runner::{
    reproduce_paper, run_bound_audit, run_chsh_experiment, run_correlation_sweep, RunInfo, RunManifest, RunResults,
};
use eprb_core::{CoincidenceMode, Error, ExperimentConfig, Simulator};

const EXIT_INVALID_CONFIG: u8 = 1;
const EXIT_EMPTY_ENSEMBLE: u8 = 2;
const EXIT_ACCEPTANCE_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "eprb", version, about = "EPRB simulation with coincidence-time post-selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Conditional correlation and coincidence rate versus setting angle
    Sweep,
    /// Four-setting CHSH experiment with the corrected-bound verdict
    Chsh,
    /// Simulated coincidence rates against the analytic bounds
    Bounds,
    /// Run all experiments at the defaults and grade them
    ReproducePaper,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Sweep => "sweep",
            Command::Chsh => "chsh",
            Command::Bounds => "bounds",
            Command::ReproducePaper => "reproduce-paper",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Table,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    SameBin,
    Continuous,
}

#[derive(clap::Args, Debug)]
struct Overrides {
    /// TOML file with ExperimentConfig fields; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Time resolution (units of the maximal delay)
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Coincidence window W
    #[arg(long, global = true)]
    window: Option<f64>,
    #[arg(long, value_enum, global = true)]
    mode: Option<Mode>,
    /// Delay exponent d
    #[arg(long, global = true)]
    d_exponent: Option<f64>,
    /// Events per setting pair
    #[arg(long, global = true)]
    events: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Comma-separated angles in degrees (sweep: correlation grid, bounds: audit grid)
    #[arg(long, value_delimiter = ',', global = true)]
    alpha_grid: Option<Vec<f64>>,
    /// Comma-separated resolutions for the bound audit
    #[arg(long, value_delimiter = ',', global = true)]
    tau_grid: Option<Vec<f64>>,
    /// CHSH settings a,b,c,d in degrees
    #[arg(long, value_delimiter = ',', global = true)]
    settings: Option<Vec<f64>>,
    /// Directory for the manifest and CSV tables
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: Format,
}

enum Failure {
    Config(anyhow::Error),
    Empty(anyhow::Error),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyEnsemble(_) => Failure::Empty(e.into()),
            Error::Io(_) => Failure::Other(e.into()),
            _ => Failure::Config(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn build_config(cmd: Command, o: &Overrides) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &o.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = o.tau {
        cfg.tau = v;
        if cmd == Command::Bounds && o.tau_grid.is_none() {
            cfg.tau_grid = vec![v];
        }
    }
    if let Some(v) = o.window {
        cfg.window = v;
    }
    if let Some(m) = o.mode {
        cfg.coincidence_mode = match m {
            Mode::SameBin => CoincidenceMode::SameBin,
            Mode::Continuous => CoincidenceMode::Continuous,
        };
    }
    if let Some(v) = o.d_exponent {
        cfg.d_exponent = v;
    }
    if let Some(v) = o.events {
        cfg.n_events = v;
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.workers {
        cfg.workers = Some(v);
    }
    if let Some(grid) = &o.alpha_grid {
        if cmd == Command::Bounds {
            cfg.bound_alpha_grid_deg = grid.clone();
        } else {
            cfg.alpha_grid_deg = grid.clone();
        }
    }
    if let Some(grid) = &o.tau_grid {
        cfg.tau_grid = grid.clone();
    }
    if let Some(s) = &o.settings {
        let arr: [f64; 4] = s
            .as_slice()
            .try_into()
            .map_err(|_| Failure::Config(anyhow::anyhow!("--settings takes exactly four angles, got {}", s.len())))?;
        cfg.settings_deg = arr;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_outputs(out: &Path, manifest: &RunManifest) -> anyhow::Result<()> {
    manifest.write(out).with_context(|| format!("writing manifest to {}", out.display()))?;
    let r = &manifest.results;
    let mut files: Vec<(&str, String)> = Vec::new();
    if let Some(t) = &r.sweep {
        files.push(("sweep.csv", report::sweep_csv(t)?));
    }
    if let Some(c) = &r.chsh {
        files.push(("chsh_pairs.csv", report::chsh_pairs_csv(c)?));
        files.push(("chsh_verdict.csv", report::chsh_verdict_csv(c)?));
    }
    if let Some(b) = &r.bounds {
        files.push(("bounds.csv", report::bounds_csv(b)?));
    }
    for (name, body) in files {
        std::fs::write(out.join(name), body).with_context(|| format!("writing {name}"))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let cfg = build_config(cli.command, &cli.overrides)?;
    let sim = Simulator::new(cfg.effective_workers())?;
    let started = Instant::now();
    let csv = cli.overrides.format == Format::Csv;
    let mut code = ExitCode::SUCCESS;

    let results = match cli.command {
        Command::Sweep => {
            let table = run_correlation_sweep(&cfg, &sim)?;
            print!("{}", if csv { report::sweep_csv(&table)? } else { report::sweep_table(&table) });
            for alpha in table.flagged() {
                eprintln!("warning: no coincidences at alpha = {alpha}; correlation undefined");
            }
            RunResults { sweep: Some(table), ..Default::default() }
        }
        Command::Chsh => {
            let outcome = run_chsh_experiment(&cfg, &sim)?;
            if csv {
                print!("{}", report::chsh_pairs_csv(&outcome)?);
                print!("{}", report::chsh_verdict_csv(&outcome)?);
            } else {
                print!("{}", report::chsh_table(&outcome));
            }
            RunResults { chsh: Some(outcome), ..Default::default() }
        }
        Command::Bounds => {
            let reports = run_bound_audit(&cfg, &sim)?;
            print!("{}", if csv { report::bounds_csv(&reports)? } else { report::bounds_table(&reports) });
            RunResults { bounds: Some(reports), ..Default::default() }
        }
        Command::ReproducePaper => {
            let rep = reproduce_paper(&cfg, &sim)?;
            for check in &rep.checks {
                println!("{}", check.line());
            }
            let passed = rep.checks.iter().filter(|c| c.passed).count();
            println!("{passed}/{} checks passed", rep.checks.len());
            if !rep.all_passed() {
                code = ExitCode::from(EXIT_ACCEPTANCE_FAILED);
            }
            rep.results
        }
    };

    if let Some(out) = &cli.overrides.out {
        let info = RunInfo {
            timestamp: now_rfc3339(),
            wall_clock_secs: started.elapsed().as_secs_f64(),
            workers: sim.workers(),
        };
        let manifest = RunManifest::new(cli.command.name(), &cfg, results, info);
        write_outputs(out, &manifest)?;
        eprintln!("wrote {}", out.display());
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID_CONFIG)
        }
        Err(Failure::Empty(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_EMPTY_ENSEMBLE)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID_CONFIG)
        }
    }
}
