//! Monte Carlo checks of the closed-form survival and the filter mean.

use hazard_filter::analytics::{survival, InfoState};
use hazard_filter::montecarlo::{mc_filter_mean, mc_unconditional_survival};
use hazard_filter::{Preset, Result};

fn main() -> Result<()> {
    let params = Preset::CreditPricing.params();
    let mc = mc_unconditional_survival(&params, 10.0, 100_000, 1)?;
    let exact = survival(&params, &InfoState::partial(0.0, 10.0, false, params.pi0())?);
    println!("S(0,10): mc {:.6} +- {:.6}, exact {exact:.6}", mc.estimate, mc.std_error);

    let times = [1.0, 2.0, 4.0];
    for (t, r) in times.iter().zip(mc_filter_mean(&params, &times, 2_000, 1e-2, 2)?) {
        println!(
            "E[pi_{t}]: mc {:.5} +- {:.5}, prior {:.5}",
            r.estimate,
            r.std_error,
            params.change_point_cdf(*t)
        );
    }
    Ok(())
}
