//! The acceptance criteria at a reduced Monte Carlo size.

use hazard_filter::harness::verify::run_all;
use hazard_filter::Result;

fn main() -> Result<()> {
    for outcome in run_all(0.01, 18)? {
        println!("{}", outcome.summary());
    }
    Ok(())
}
