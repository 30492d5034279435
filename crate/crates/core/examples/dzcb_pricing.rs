//! Defaultable zero-coupon bond prices, closed form against the generic
//! quadrature pricer, for a range of filter states.

use hazard_filter::analytics::InfoState;
use hazard_filter::pricing::{price_dzcb, price_general, ContractSpec, DiscountCurve};
use hazard_filter::{Preset, Result};

fn main() -> Result<()> {
    let preset = Preset::CreditPricing;
    let params = preset.params();
    let (r, maturity) = (preset.rate(), preset.horizon());
    for delta in [0.0, 0.5] {
        let bond = ContractSpec::zcb(maturity, delta, DiscountCurve::Flat(r))?;
        for pi in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let state = InfoState::partial(0.0, maturity, false, pi)?;
            println!(
                "delta = {delta:.1} pi = {pi:.1}  closed = {:.10}  quadrature = {:.10}",
                price_dzcb(&params, r, delta, &state)?,
                price_general(&params, &bond, &state)?
            );
        }
    }
    Ok(())
}
