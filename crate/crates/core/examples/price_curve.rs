//! Bond price along a filtered scenario, as CSV on stdout.

use std::io::stdout;

use hazard_filter::filters::run_filter_g;
use hazard_filter::model::simulate_scenario;
use hazard_filter::pricing::write_price_curve_csv;
use hazard_filter::{Preset, Result};

fn main() -> Result<()> {
    let preset = Preset::CreditPricing;
    let params = preset.params();
    let path = simulate_scenario(&params, preset.horizon(), 1e-1, 11)?;
    let filtered = run_filter_g(&params, &path)?;
    write_price_curve_csv(&params, preset.rate(), 0.5, preset.horizon(), &path, &filtered, &mut stdout().lock())?;
    Ok(())
}
