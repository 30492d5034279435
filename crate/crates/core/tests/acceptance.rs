//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hazard_filter::harness::verify::{self, CriterionOutcome};
use hazard_filter::harness::{run_experiment, Settings};
use hazard_filter::rng::derive_seed;
use hazard_filter::Result;

const SEED: u64 = 18;

fn timed<T>(f: impl FnOnce() -> Result<T>) -> (Result<T>, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn report(outcome: &CriterionOutcome, elapsed: Duration, limit: Option<Duration>) -> bool {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let budget = limit.map(|l| format!(" limit {:.0}s", l.as_secs_f64())).unwrap_or_default();
    let mut line = outcome.summary();
    if !in_time {
        line = line.replacen(": PASS", ": FAIL", 1);
    }
    println!("{line} [{:.1}s{budget}]", elapsed.as_secs_f64());
    outcome.pass() && in_time
}

fn failed(id: u8, err: &hazard_filter::Error) -> bool {
    println!("criterion {id:>2}: FAIL (error: {err})");
    false
}

fn determinism() -> Result<(bool, String)> {
    let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
    let mut bytes = Vec::new();
    for dir in &dirs {
        let mut s = Settings::new();
        s.set("experiment", "verify")?;
        s.set("verify_scale", "0.002")?;
        s.set("out", dir.path().display().to_string())?;
        let outcome = run_experiment(&s.resolve()?)?;
        let file = outcome.files.first().expect("verify writes a file");
        bytes.push(std::fs::read(file)?);
    }
    let same = bytes[0] == bytes[1];
    let first_line = String::from_utf8_lossy(&bytes[0]).lines().next().unwrap_or("").to_string();
    Ok((same && first_line.starts_with("# config_hash="), format!("{} bytes", bytes[0].len())))
}

fn main() -> ExitCode {
    let s = |k: u64| derive_seed(SEED, k);
    let secs = Duration::from_secs;
    let mut ok = true;

    let (r, e) = timed(|| verify::survival_closed_form(1.0, s(1)));
    ok &= r.map_or_else(|err| failed(1, &err), |o| report(&o, e, Some(secs(10))));

    let (r, e) = timed(|| verify::dzcb_prices(1.0, s(2)));
    ok &= r.map_or_else(|err| failed(2, &err), |o| report(&o, e, Some(secs(20))));

    let (r, e) = timed(|| verify::tower_and_filter_mean(1.0, s(3)));
    match r {
        Ok((c3, c4)) => {
            ok &= report(&c3, e, Some(secs(60)));
            ok &= report(&c4, e, None);
        }
        Err(err) => {
            failed(3, &err);
            ok &= failed(4, &err);
        }
    }

    let (r, e) = timed(|| verify::scheme_equivalence(1.0, s(5)));
    ok &= r.map_or_else(|err| failed(5, &err), |o| report(&o, e, None));

    let (r, e) = timed(|| verify::jump_identity(1.0, s(6)));
    ok &= r.map_or_else(|err| failed(6, &err), |o| report(&o, e, None));

    let (r, e) = timed(verify::generator_residuals);
    ok &= r.map_or_else(|err| failed(7, &err), |o| report(&o, e, None));

    let (r, e) = timed(verify::density_consistency);
    ok &= r.map_or_else(|err| failed(8, &err), |o| report(&o, e, None));

    let (r, e) = timed(verify::degeneracy_continuity);
    ok &= r.map_or_else(|err| failed(9, &err), |o| report(&o, e, None));

    let (r, e) = timed(|| verify::mse_ordering(1.0, s(10)));
    ok &= r.map_or_else(|err| failed(10, &err), |o| report(&o, e, None));

    let (r, e) = timed(|| verify::sensitivity_bands(1.0, SEED));
    ok &= r.map_or_else(|err| failed(11, &err), |o| report(&o, e, None));

    let (r, e) = timed(determinism);
    match r {
        Ok((same, detail)) => {
            let verdict = if same { "PASS" } else { "FAIL" };
            println!(
                "criterion 12 verify output is byte-identical across runs: {verdict} ({detail}) [{:.1}s]",
                e.as_secs_f64()
            );
            ok &= same;
        }
        Err(err) => ok &= failed(12, &err),
    }

    println!("acceptance: {}", if ok { "all criteria passed" } else { "FAILED" });
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
