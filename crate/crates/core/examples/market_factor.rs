//! Pricing with payoffs that depend on an independent market factor, here a
//! geometric Brownian motion whose conditional expectations are known.

use hazard_filter::analytics::InfoState;
use hazard_filter::pricing::{price_with_market_factor, DiscountCurve, MarketFactorHooks};
use hazard_filter::{Preset, Result};

fn main() -> Result<()> {
    let preset = Preset::CreditPricing;
    let params = preset.params();
    let (x0, drift, maturity) = (100.0, 0.02, 5.0);
    // Recovery of 40% of the factor at default, the factor itself at maturity.
    let hooks = MarketFactorHooks {
        expect_psi_at: |s: f64| 0.4 * x0 * (drift * s).exp(),
        expect_phi_terminal: x0 * (drift * maturity).exp(),
    };
    let discount = DiscountCurve::Flat(preset.rate());
    for pi in [0.0, 0.5, 1.0] {
        let state = InfoState::partial(0.0, maturity, false, pi)?;
        let v = price_with_market_factor(&params, &hooks, &discount, &state, maturity)?;
        println!("pi = {pi:.1}  value = {v:.6}");
    }
    Ok(())
}
