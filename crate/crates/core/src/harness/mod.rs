//! Experiment runner behind the command-line front end.
//!
//! Every CSV written here opens with `# config_hash=<hex>`, the SHA-256 of the
//! resolved configuration, followed by the writer's own comment lines and
//! column header.

pub mod calibrate;
pub mod config;
pub mod verify;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::filters::{run_filter_f_with, run_filter_g_with};
use crate::format::sig17;
use crate::model::simulate_scenario;
use crate::montecarlo::{sensitivity_study, SensitivityConfig};
use crate::pricing::write_price_curve_csv;
use crate::rng::derive_seed;

pub use calibrate::{estimate_rate_stats, parse_rate_series, read_rate_series, RateSeriesStats};
pub use config::{Experiment, RunConfig, Settings};

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// False only when a `verify` criterion failed.
    pub passed: bool,
    pub messages: Vec<String>,
}

/// 0 on success, 1 on invalid input or I/O failure, 2 on a failed
/// acceptance criterion.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 2,
        Err(_) => 1,
    }
}

struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvFile {
    fn create(dir: &Path, name: &str, hash: &str) -> Result<Self> {
        let path = dir.join(name);
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "# config_hash={hash}")?;
        Ok(Self { path, out })
    }

    fn finish(mut self, files: &mut Vec<PathBuf>) -> Result<()> {
        self.out.flush()?;
        files.push(self.path);
        Ok(())
    }
}

pub fn run_experiment(cfg: &RunConfig) -> Result<Outcome> {
    std::fs::create_dir_all(&cfg.out)?;
    let hash = cfg.config_hash();
    let mut files = Vec::new();
    let mut messages = Vec::new();
    let mut passed = true;
    let p = &cfg.params;
    match cfg.experiment {
        Experiment::Simulate | Experiment::Filter => {
            for i in 0..cfg.n_paths {
                let path = simulate_scenario(p, cfg.horizon, cfg.dt, derive_seed(cfg.seed, i as u64))?;
                let mut f = CsvFile::create(&cfg.out, &format!("scenario_{i}.csv"), &hash)?;
                path.write_csv(&mut f.out)?;
                f.finish(&mut files)?;
                if cfg.experiment == Experiment::Filter {
                    let mut g = run_filter_g_with(p, &path, cfg.scheme)?;
                    let obs = run_filter_f_with(p, &path, cfg.scheme)?;
                    g.pi_f = Some(obs.pi_f);
                    g.mu_hat_f = Some(obs.mu_hat_f);
                    let mut f = CsvFile::create(&cfg.out, &format!("filter_{i}.csv"), &hash)?;
                    g.write_csv(&mut f.out)?;
                    f.finish(&mut files)?;
                }
            }
        }
        Experiment::Price => {
            let path = simulate_scenario(p, cfg.horizon, cfg.dt, derive_seed(cfg.seed, 0))?;
            let g = run_filter_g_with(p, &path, cfg.scheme)?;
            for &delta in &cfg.deltas {
                let mut f = CsvFile::create(&cfg.out, &format!("price_curve_delta_{delta}.csv"), &hash)?;
                writeln!(f.out, "# delta={}", sig17(delta))?;
                writeln!(f.out, "# r={}", sig17(cfg.r))?;
                writeln!(f.out, "# xi={}", sig17(path.xi()))?;
                writeln!(f.out, "# tau={}", sig17(path.tau()))?;
                write_price_curve_csv(p, cfg.r, delta, cfg.horizon, &path, &g, &mut f.out)?;
                f.finish(&mut files)?;
            }
        }
        Experiment::Sensitivity => {
            let cases = [("A", 0.12, 1.0), ("B", 0.12, 2.0), ("C", 0.22, 2.0)];
            let variants = cases
                .iter()
                .map(|&(_, mu2, beta)| p.with_mu2(mu2)?.with_beta(beta))
                .collect::<Result<Vec<_>>>()?;
            let sc = SensitivityConfig {
                n: cfg.n_paths,
                dt: cfg.dt,
                horizon: cfg.horizon,
                seed: cfg.seed,
                ..Default::default()
            };
            let rep = sensitivity_study(&variants, &sc)?;
            let mut f = CsvFile::create(&cfg.out, "sensitivity.csv", &hash)?;
            writeln!(f.out, "# skipped={}", rep.skipped.len())?;
            writeln!(f.out, "case,beta,mu2,fraction_below,fraction_above,n_paths")?;
            for ((name, _, _), r) in cases.iter().zip(&rep.results) {
                writeln!(
                    f.out,
                    "{name},{},{},{},{},{}",
                    sig17(r.beta),
                    sig17(r.mu2),
                    sig17(r.fraction_below()),
                    sig17(r.fraction_above()),
                    r.n_paths()
                )?;
                messages.push(format!(
                    "case {name}: below {:.1}%, above {:.1}%",
                    100.0 * r.fraction_below(),
                    100.0 * r.fraction_above()
                ));
            }
            f.finish(&mut files)?;
        }
        Experiment::Calibrate => {
            let input = cfg
                .input
                .as_ref()
                .ok_or_else(|| Error::config("input", "calibrate needs an input rate series"))?;
            let stats = estimate_rate_stats(&read_rate_series(input)?)?;
            let mut f = CsvFile::create(&cfg.out, "calibrate.csv", &hash)?;
            writeln!(f.out, "mean,std_dev,ci_low,ci_high,n_obs")?;
            writeln!(
                f.out,
                "{},{},{},{},{}",
                sig17(stats.mean),
                sig17(stats.std_dev),
                sig17(stats.ci95.0),
                sig17(stats.ci95.1),
                stats.n_obs
            )?;
            f.finish(&mut files)?;
            messages.push(format!(
                "mean {:.4}, std {:.4}, 95% CI ({:.4}, {:.4}), n = {}",
                stats.mean, stats.std_dev, stats.ci95.0, stats.ci95.1, stats.n_obs
            ));
        }
        Experiment::Verify => {
            let outcomes = verify::run_all(cfg.verify_scale, cfg.seed)?;
            let mut f = CsvFile::create(&cfg.out, "verify.csv", &hash)?;
            verify::write_outcomes(&mut f.out, &outcomes)?;
            f.finish(&mut files)?;
            for o in &outcomes {
                passed &= o.pass();
                messages.push(o.summary());
            }
        }
    }
    Ok(Outcome {
        files,
        passed,
        messages,
    })
}
