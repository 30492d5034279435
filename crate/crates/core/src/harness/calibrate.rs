//! Summary statistics of an observed rate series.

use std::path::Path;

use crate::error::{Error, Result};
use crate::montecarlo::mean_and_variance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSeriesStats {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std_dev: f64,
    /// `mean -/+ 1.96 std_dev / sqrt(n)`.
    pub ci95: (f64, f64),
    pub n_obs: usize,
}

impl RateSeriesStats {
    /// Statistics implied by a given mean, standard deviation and count.
    pub fn from_moments(mean: f64, std_dev: f64, n_obs: usize) -> Self {
        let half = 1.96 * std_dev / (n_obs as f64).sqrt();
        Self {
            mean,
            std_dev,
            ci95: (mean - half, mean + half),
            n_obs,
        }
    }
}

pub fn estimate_rate_stats(series: &[f64]) -> Result<RateSeriesStats> {
    if series.len() < 2 {
        return Err(Error::Data(format!("need at least 2 observations, got {}", series.len())));
    }
    if let Some(i) = series.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data(format!("observation {i} is not finite")));
    }
    let (mean, var) = mean_and_variance(series);
    Ok(RateSeriesStats::from_moments(mean, var.max(0.0).sqrt(), series.len()))
}

/// Parses a single-column CSV of decimal rates. A non-numeric first line is
/// taken as a header; blank lines and `#` comments are skipped.
pub fn parse_rate_series(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut first = true;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split(',').next_back().unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if first => {}
            Err(_) => return Err(Error::Data(format!("line {}: `{field}` is not a number", lineno + 1))),
        }
        first = false;
    }
    if out.is_empty() {
        return Err(Error::Data("the series is empty".into()));
    }
    Ok(out)
}

pub fn read_rate_series(path: &Path) -> Result<Vec<f64>> {
    parse_rate_series(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series() {
        let s = estimate_rate_stats(&[0.05; 100]).unwrap();
        assert!((s.mean - 0.05).abs() < 1e-17);
        assert!(s.std_dev < 1e-17);
        assert!((s.ci95.0 - 0.05).abs() < 1e-16 && (s.ci95.1 - 0.05).abs() < 1e-16);
    }

    #[test]
    fn two_points() {
        let s = estimate_rate_stats(&[0.02, 0.04]).unwrap();
        assert!((s.mean - 0.03).abs() < 1e-16);
        assert!((s.std_dev - 0.02f64.sqrt() / 10.0).abs() < 1e-16);
        assert!((s.ci95.0 - 0.0104).abs() < 1e-4);
        assert!((s.ci95.1 - 0.0496).abs() < 1e-4);
    }

    #[test]
    fn monthly_series_interval() {
        let s = RateSeriesStats::from_moments(0.0263, 0.0222, 372);
        assert!((s.ci95.0 - 0.0240).abs() < 1e-4);
        assert!((s.ci95.1 - 0.0285).abs() < 1e-4);
        assert!(s.ci95.0 <= s.mean && s.mean <= s.ci95.1);
    }

    #[test]
    fn bad_input() {
        assert!(matches!(estimate_rate_stats(&[]), Err(Error::Data(_))));
        assert!(matches!(estimate_rate_stats(&[0.1]), Err(Error::Data(_))));
        assert!(matches!(estimate_rate_stats(&[0.1, f64::NAN]), Err(Error::Data(_))));
        assert!(matches!(parse_rate_series("rate\n"), Err(Error::Data(_))));
        assert!(matches!(parse_rate_series("rate\n0.1\nabc\n"), Err(Error::Data(_))));
    }

    #[test]
    fn header_and_comments() {
        let v = parse_rate_series("rate\n# monthly\n0.01\n\n0.03\n").unwrap();
        assert_eq!(v, vec![0.01, 0.03]);
        let v = parse_rate_series("0.01\n0.02\n").unwrap();
        assert_eq!(v, vec![0.01, 0.02]);
        let v = parse_rate_series("NaN\n").unwrap();
        assert!(v[0].is_nan());
    }
}
