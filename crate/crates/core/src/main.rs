use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hazard_filter::harness::{exit_code, run_experiment, Settings};
use hazard_filter::Result;

#[derive(Parser)]
#[command(name = "hazard-filter", version, about = "Change-point hazard filtering and pricing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate scenarios (change point, default time, noisy observation).
    Simulate(Common),
    /// Simulate scenarios and run both filters on each.
    Filter(Common),
    /// Price a defaultable zero-coupon bond along one filtered scenario.
    Price(Common),
    /// Run the acceptance suite; exits with 2 if a criterion fails.
    Verify(Common),
    /// Threshold fractions of the filter for the three sensitivity cases.
    Sensitivity(Common),
    /// Mean, standard deviation and 95% interval of a rate series.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// Single-column CSV of decimal rates.
        input: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Parameter preset: table1 or table2.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long)]
    n_paths: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Any other configuration key, as `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn settings(experiment: &str, common: &Common, input: Option<&PathBuf>) -> Result<Settings> {
    let mut s = match &common.config {
        Some(path) => Settings::load(path)?,
        None => Settings::new(),
    };
    let mut flags = Settings::new();
    flags.set("experiment", experiment)?;
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| hazard_filter::Error::Config {
                path: "--set".into(),
                reason: format!("expected KEY=VALUE, got `{kv}`"),
            })?;
        flags.set(k.trim(), v.trim())?;
    }
    if let Some(v) = &common.preset {
        flags.set("preset", v.as_str())?;
    }
    if let Some(v) = common.seed {
        flags.set("seed", v.to_string())?;
    }
    if let Some(v) = common.dt {
        flags.set("dt", v.to_string())?;
    }
    if let Some(v) = common.n_paths {
        flags.set("n_paths", v.to_string())?;
    }
    if let Some(v) = &common.out {
        flags.set("out", v.display().to_string())?;
    }
    if let Some(v) = input {
        flags.set("input", v.display().to_string())?;
    }
    s.merge(&flags);
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are validation failures; 2 is reserved for verify.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (name, common, input) = match &cli.command {
        Command::Simulate(c) => ("simulate", c, None),
        Command::Filter(c) => ("filter", c, None),
        Command::Price(c) => ("price", c, None),
        Command::Verify(c) => ("verify", c, None),
        Command::Sensitivity(c) => ("sensitivity", c, None),
        Command::Calibrate { common, input } => ("calibrate", common, input.as_ref()),
    };
    let result = settings(name, common, input)
        .and_then(|s| s.resolve())
        .and_then(|cfg| run_experiment(&cfg));
    match &result {
        Ok(outcome) => {
            for m in &outcome.messages {
                println!("{m}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
