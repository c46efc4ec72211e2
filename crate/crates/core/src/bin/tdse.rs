use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cayley_tdse::cli::{list_presets, preset, run, Record, RunConfig};
use cayley_tdse::propagator::Strategy;
use cayley_tdse::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "tdse",
    version,
    about = "1D Schrodinger propagation with absorbing boundaries and sources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a bundled preset, writing NDJSON records.
    Run {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Output file; stdout when absent and the config names none.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        #[arg(long)]
        frame_stride: Option<usize>,
    },
    /// List bundled presets.
    Presets {
        /// Print the full config of each preset.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Dense,
    Solve,
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Presets { verbose } => {
            let mut out = io::stdout().lock();
            for p in list_presets() {
                writeln!(out, "{:<6} {}", p.name, p.description)?;
                if verbose {
                    for line in p.config.to_toml_string()?.lines() {
                        writeln!(out, "       {line}")?;
                    }
                }
            }
            Ok(())
        }
        Command::Run {
            config,
            preset: name,
            output,
            strategy,
            frame_stride,
        } => {
            let mut cfg: RunConfig = match (config, name) {
                (Some(path), _) => RunConfig::load(path)?,
                (None, Some(name)) => preset(&name)?,
                (None, None) => {
                    return Err(Error::InvalidConfig("need --config or --preset".into()))
                }
            };
            if let Some(s) = strategy {
                cfg.strategy = match s {
                    StrategyArg::Dense => Strategy::DenseInverse,
                    StrategyArg::Solve => Strategy::TridiagonalSolve,
                };
            }
            if let Some(k) = frame_stride {
                cfg.output.frame_stride = k;
            }
            let target = output.or_else(|| cfg.output.path.clone().map(PathBuf::from));
            let report = match target {
                Some(path) => run(&cfg, &mut BufWriter::new(File::create(path)?))?,
                None => run(&cfg, &mut BufWriter::new(io::stdout().lock()))?,
            };
            log::info!(
                "{} steps, {:.3e} s per step, final norm {:.12}",
                report.summary.steps,
                report.step_seconds,
                report.summary.final_norm
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::to_string(&Record::error(&e)).unwrap_or_else(|_| {
                format!("{{\"record\":\"error\",\"message\":{:?}}}", e.to_string())
            });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
