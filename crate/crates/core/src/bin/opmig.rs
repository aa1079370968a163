use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opinion_migration::artifacts::{resolve_out_dir, write_bundle};
use opinion_migration::opinion::OpinionParams;
use opinion_migration::theorem::{check_theorem1, check_theorem2, LeaderOptions};
use opinion_migration::{list_presets, load_config, preset, run_batch, Result};

#[derive(Parser)]
#[command(name = "opmig", version, about = "Opinion dynamics and two-community migration simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifact bundle.
    Run(RunArgs),
    /// List the named scenario presets.
    ListPresets,
    /// Monte Carlo check of the consensus bound.
    CheckTheorem1(Theorem1Args),
    /// Monte Carlo check of the star-graph leader expectation.
    CheckTheorem2(Theorem2Args),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides OPMIG_OUT_DIR and the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct Theorem1Args {
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long, default_value_t = 0.5)]
    phi: f64,
    #[arg(long, default_value_t = 0.4)]
    sigma: f64,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    replicates: usize,
    #[arg(long, default_value_t = 20)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run even when phi + sigma >= 1.
    #[arg(long)]
    exploratory: bool,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct Theorem2Args {
    #[arg(long, default_value_t = 21)]
    n: usize,
    #[arg(long, default_value_t = 0.8)]
    delta: f64,
    #[arg(long, default_value_t = 2000)]
    replicates: usize,
    /// Steps allowed for opinions to reach consensus.
    #[arg(long, default_value_t = 200)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn write_json(path: &PathBuf, value: &impl serde::Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s).map_err(|e| opinion_migration::Error::Io {
        path: path.clone(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let mut config = match (&args.config, &args.preset) {
                (Some(path), _) => load_config(path)?,
                (None, Some(name)) => preset(name)?,
                (None, None) => unreachable!("clap requires one of --config/--preset"),
            };
            if let Some(s) = args.seed {
                config.seed = s;
            }
            if let Some(r) = args.replicates {
                config.replicates = r;
            }
            config.validate()?;
            let dir = resolve_out_dir(args.out.as_deref(), &config);
            let batch = run_batch(&config, args.workers)?;
            for path in write_bundle(&dir, &config, &batch)? {
                println!("wrote {}", path.display());
            }
            let s = &batch.summaries[0];
            match s.consensus_time {
                Some(t) => println!("consensus reached at t={t}"),
                None => println!("no consensus within {} steps", config.horizon),
            }
        }
        Command::ListPresets => {
            for p in list_presets() {
                let c = p.config();
                println!("{:<14} T={:<4} {}", p.name, c.horizon, p.summary);
            }
        }
        Command::CheckTheorem1(a) => {
            let params = OpinionParams::new(a.d, a.phi, a.sigma);
            let report = check_theorem1(&params, a.n, a.replicates, a.horizon, a.seed, a.exploratory)?;
            print!("{}", report.summary());
            if let Some(p) = &a.json {
                write_json(p, &report)?;
            }
        }
        Command::CheckTheorem2(a) => {
            let report = check_theorem2(a.n, a.delta, a.replicates, a.horizon, a.seed, &LeaderOptions::default())?;
            print!("{}", report.summary());
            if let Some(p) = &a.json {
                write_json(p, &report)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
