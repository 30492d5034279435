//! Simulates one scenario and prints the latent times and a few nodes.

use hazard_filter::model::simulate_scenario;
use hazard_filter::{Preset, Result};

fn main() -> Result<()> {
    let preset = Preset::CreditPricing;
    let params = preset.params();
    let path = simulate_scenario(&params, preset.horizon(), 1e-2, 7)?;
    println!("xi = {:.4}, tau = {:.4}, nodes = {}", path.xi(), path.tau(), path.len());
    for t in [0.0, 2.5, 5.0, 7.5, 10.0] {
        let i = path.index_at(t).expect("inside the horizon");
        println!(
            "t = {:5.2}  Y = {:+.5}  H = {}  mu = {:.3}",
            path.grid()[i],
            path.y_obs()[i],
            u8::from(path.h_ind()[i]),
            path.mu_path()[i]
        );
    }
    Ok(())
}
