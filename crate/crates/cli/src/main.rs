use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use hmaser_cli::config::{apply_override, DimsConfig, Methods, Observable, ParamsConfig, SweepConfig};
use hmaser_cli::figures::{reproduce_figure, FigureOptions, TAGS};
use hmaser_cli::sweep::{run_sweep, SweepResult};
use hmaser_cli::validate::{validate, CHECKS};

const EXIT_USAGE: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(name = "hmaser", version, about = "Hybrid micromaser sweeps, figures and validation")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Truncation as `Nc,Nm`.
    #[arg(long, global = true)]
    dims: Option<DimsConfig>,
    #[arg(long, global = true, value_enum)]
    method: Option<Methods>,
    /// Override a config value, `key=value`; bare keys address `params`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config.
    Sweep { config: PathBuf },
    /// Write the data and plot files of one figure panel.
    Figure {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(TAGS))]
        tag: String,
    },
    /// Phonon and photon trapping values along the sweep of a config.
    Roots { config: PathBuf },
    /// Run the oracle-equivalence battery.
    Validate {
        /// Comma-separated subset of checks; empty runs none.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        checks: Option<Vec<String>>,
    },
}

/// Failure carrying its exit status.
struct Fail(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(EXIT_USAGE, e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot size the worker pool")?;
    }
    match &cli.command {
        Command::Sweep { config } => {
            let cfg = load(&cli, config)?;
            finish(&cli, &cfg, run_sweep(&cfg))
        }
        Command::Roots { config } => {
            let mut cfg = load(&cli, config)?;
            cfg.observables = vec![Observable::Roots];
            cfg.methods = Methods::Analytic;
            cfg.validate()?;
            let result = run_sweep(&cfg);
            for r in &result.rows {
                println!("{} = {}\t{} = {}", r.axis, r.value, r.observable, r.result);
            }
            finish(&cli, &cfg, result)
        }
        Command::Figure { tag } => {
            let opts = FigureOptions { dims: cli.dims, methods: cli.method };
            let report = reproduce_figure(tag, &cli.out, &opts)?;
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            if report.converged {
                Ok(())
            } else {
                Err(Fail(EXIT_CONVERGENCE, anyhow::anyhow!("{tag}: some points did not converge")))
            }
        }
        Command::Validate { checks } => {
            let p = params_with_overrides(&cli.overrides)?.system();
            let report = validate(&p, checks.as_deref())?;
            println!("{report}");
            if report.pass() {
                Ok(())
            } else {
                Err(Fail(EXIT_VALIDATION, anyhow::anyhow!("validation failed (checks: {})", CHECKS.join(", "))))
            }
        }
    }
}

fn load(cli: &Cli, path: &std::path::Path) -> anyhow::Result<SweepConfig> {
    let mut cfg = SweepConfig::load(path, &cli.overrides)?;
    if let Some(d) = cli.dims {
        cfg.dims = d;
    }
    if let Some(m) = cli.method {
        cfg.methods = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn finish(cli: &Cli, cfg: &SweepConfig, result: SweepResult) -> Result<(), Fail> {
    let path = cli.out.join(&cfg.output);
    result.save(&path)?;
    println!("wrote {} rows to {} in {:.2} s", result.rows.len(), path.display(), result.wall_time_s);
    let bad: Vec<_> = result.unconverged().collect();
    if bad.is_empty() {
        return Ok(());
    }
    for r in &bad {
        eprintln!(
            "unconverged: {}={} {} {}: {}",
            r.axis,
            r.value,
            r.observable,
            r.method,
            r.failure.as_deref().unwrap_or_default()
        );
    }
    Err(Fail(EXIT_CONVERGENCE, anyhow::anyhow!("{} rows did not converge", bad.len())))
}

fn params_with_overrides(overrides: &[String]) -> anyhow::Result<ParamsConfig> {
    let mut table = toml::Table::new();
    table.insert("params".into(), toml::Value::try_from(ParamsConfig::default())?);
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let params = table.remove("params").context("params table")?;
    params.try_into().context("invalid parameter override")
}
