//! Fair CDS spread as a function of the filter state.

use hazard_filter::analytics::InfoState;
use hazard_filter::pricing::{cds_fair_spread, DiscountCurve, Schedule};
use hazard_filter::{Preset, Result};

fn main() -> Result<()> {
    let preset = Preset::CreditPricing;
    let params = preset.params();
    let maturity = 5.0;
    for pi in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let state = InfoState::partial(0.0, maturity, false, pi)?;
        let spread = cds_fair_spread(
            &params,
            maturity,
            Schedule::Constant(0.6),
            DiscountCurve::Flat(preset.rate()),
            &state,
        )?;
        println!("pi = {pi:.2}  spread = {:.2} bp", spread * 1e4);
    }
    Ok(())
}
