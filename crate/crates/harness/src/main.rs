use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cmabt_core::Action;
use cmabt_envs::InstanceSpec;
use cmabt_harness::{
    coverage_for, evaluate_gap, optimum, run_experiment, run_online, write_online_csv, write_outputs, EvalSpec,
    ExperimentConfig, HarnessError, OptimumMode, Result,
};
use cmabt_oracles::DEFAULT_MC_PER_EVAL;

#[derive(Parser)]
#[command(name = "offcmab", version, about = "Offline combinatorial bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw an offline dataset from an instance file and write it as JSON lines.
    GenDataset {
        instance: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every algorithm over the configured grid and write CSV plus a JSON summary.
    Run {
        config: PathBuf,
        /// Overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print coverage coefficients and gap bounds.
    Coverage {
        config: PathBuf,
        /// Emit JSON instead of the text table.
        #[arg(long)]
        json: bool,
    },
    /// Run the streaming cache learner and write per-round regret.
    Online {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Suboptimality gap of one action.
    Gap {
        instance: PathBuf,
        action: PathBuf,
        /// Diffusions per spread evaluation (influence instances only).
        #[arg(long, default_value_t = 10_000)]
        mc: usize,
        #[arg(long, default_value_t = 0)]
        eval_seed: u64,
    },
}

fn read_config_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))
}

fn output_sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            if let Some(dir) = p.parent() {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenDataset { instance, n, seed, out } => {
            let spec = InstanceSpec::from_json(&read_config_file(&instance)?)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let env = spec.build().map_err(|e| HarnessError::Config(e.to_string()))?;
            let data = env.generate(n, seed)?;
            let mut w = output_sink(out.as_deref())?;
            data.write_jsonl(&mut w)?;
            w.flush()?;
        }
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let path = out
                .or_else(|| cfg.output_path())
                .ok_or_else(|| HarnessError::Config("no output path: set `output` or pass --out".into()))?;
            let exp = run_experiment(&cfg)?;
            write_outputs(&exp, &path)?;
            println!("{} rows written to {}", exp.rows.len(), path.display());
        }
        Command::Coverage { config, json } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = coverage_for(&cfg)?;
            if json {
                let s = serde_json::to_string_pretty(&summary).map_err(|e| HarnessError::Runtime(e.to_string()))?;
                println!("{s}");
            } else {
                print!("{}", summary.render());
            }
        }
        Command::Online { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let runs = run_online(&cfg)?;
            let path = out.or_else(|| cfg.output_path());
            let mut w = output_sink(path.as_deref())?;
            write_online_csv(&runs, &mut w)?;
            w.flush()?;
        }
        Command::Gap {
            instance,
            action,
            mc,
            eval_seed,
        } => {
            let env = InstanceSpec::from_json(&read_config_file(&instance)?)
                .and_then(|s| s.build())
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let action: Action = serde_json::from_str(&read_config_file(&action)?)
                .map_err(|e| HarnessError::Config(format!("invalid action: {e}")))?;
            let eval = EvalSpec { mc, seed: eval_seed };
            let opt = optimum(&env, OptimumMode::BruteForce, DEFAULT_MC_PER_EVAL, eval)?;
            let gap = evaluate_gap(&env, &action, &opt, eval)?;
            println!("{gap}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("offcmab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
