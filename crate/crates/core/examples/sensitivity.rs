//! Threshold fractions of the filter for three volatility / post-change
//! hazard combinations.

use hazard_filter::harness::verify::sensitivity_cases;
use hazard_filter::montecarlo::{sensitivity_study, SensitivityConfig};
use hazard_filter::Result;

fn main() -> Result<()> {
    let cases = sensitivity_cases()?;
    let cfg = SensitivityConfig { n: 300, ..Default::default() };
    let report = sensitivity_study(&cases, &cfg)?;
    for (name, r) in ["A", "B", "C"].iter().zip(&report.results) {
        println!(
            "case {name} (beta {}, mu2 {}): below {:.1}%, above {:.1}%",
            r.beta,
            r.mu2,
            100.0 * r.fraction_below(),
            100.0 * r.fraction_above()
        );
    }
    Ok(())
}
