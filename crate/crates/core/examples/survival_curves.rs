//! Survival probability and default density from time 0 under full and
//! partial information.

use hazard_filter::analytics::{density, survival, InfoState};
use hazard_filter::{Preset, Result};

fn main() -> Result<()> {
    let params = Preset::CreditPricing.params();
    println!("{:>5} {:>10} {:>10} {:>10}", "s", "S_partial", "S_full", "density");
    for s in [1.0, 2.0, 5.0, 10.0, 20.0] {
        let partial = InfoState::partial(0.0, s, false, params.pi0())?;
        // Full information with the change point still ahead.
        let full = InfoState::full(0.0, s, false, true)?;
        println!(
            "{s:5.1} {:10.6} {:10.6} {:10.6}",
            survival(&params, &partial),
            survival(&params, &full),
            density(&params, &partial, s)?
        );
    }
    Ok(())
}
