//! Runs the default-enlarged and observation-only filters on a scenario and
//! writes both to stdout as CSV.

use std::io::stdout;

use hazard_filter::filters::run_filters;
use hazard_filter::model::simulate_scenario;
use hazard_filter::{Preset, Result};

fn main() -> Result<()> {
    let params = Preset::CreditPricing.params();
    let path = simulate_scenario(&params, 10.0, 5e-2, 3)?;
    let filtered = run_filters(&params, &path)?;
    if let Some(j) = filtered.jump {
        eprintln!("default at t = {:.4}: pi {:.6} -> {:.6}", path.tau(), j.before, j.after);
    }
    filtered.write_csv(&mut stdout().lock())?;
    Ok(())
}
