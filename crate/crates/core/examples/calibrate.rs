//! Summary statistics of a rate series given as one value per line.

use hazard_filter::harness::{estimate_rate_stats, parse_rate_series};
use hazard_filter::Result;

const SERIES: &str = "rate
0.0512
0.0498
0.0535
0.0541
0.0507
0.0520
";

fn main() -> Result<()> {
    let stats = estimate_rate_stats(&parse_rate_series(SERIES)?)?;
    println!(
        "n = {}  mean = {:.5}  sd = {:.5}  95% CI = ({:.5}, {:.5})",
        stats.n_obs, stats.mean, stats.std_dev, stats.ci95.0, stats.ci95.1
    );
    Ok(())
}
