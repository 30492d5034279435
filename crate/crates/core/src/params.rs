//! Static model constants.
//!
//! The latent change point `xi` has an atom `pi0` at zero and is otherwise
//! exponential with rate `lambda`. The hazard rate is `mu1` before `xi` and
//! `mu2` from `xi` on; the hazard is observed through additive Brownian noise
//! of scale `beta`.

use crate::error::{Error, Result};

/// Tolerance used to decide whether `mu2 == mu1 + lambda` when no explicit
/// tolerance is requested.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pi0: f64,
    lambda: f64,
    mu1: f64,
    mu2: f64,
    beta: f64,
    delta_mu: f64,
    kappa: Option<f64>,
    degeneracy_tol: f64,
}

impl ModelParams {
    pub fn new(
        pi0: f64,
        lambda: f64,
        mu1: f64,
        mu2: f64,
        beta: f64,
        degeneracy_tol: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&pi0) {
            return Err(Error::domain("pi0", format!("{pi0} is not in [0, 1]")));
        }
        positive("lambda", lambda)?;
        positive("mu1", mu1)?;
        positive("mu2", mu2)?;
        positive("beta", beta)?;
        if !(degeneracy_tol >= 0.0 && degeneracy_tol.is_finite()) {
            return Err(Error::domain(
                "degeneracy_tol",
                format!("{degeneracy_tol} must be finite and >= 0"),
            ));
        }
        let delta_mu = mu2 - mu1;
        let gap = delta_mu - lambda;
        let kappa = if gap.abs() > degeneracy_tol * lambda.max(1.0) {
            Some(delta_mu / gap)
        } else {
            None
        };
        Ok(Self {
            pi0,
            lambda,
            mu1,
            mu2,
            beta,
            delta_mu,
            kappa,
            degeneracy_tol,
        })
    }

    /// Same parameters with a different initial atom.
    pub fn with_pi0(&self, pi0: f64) -> Result<Self> {
        Self::new(pi0, self.lambda, self.mu1, self.mu2, self.beta, self.degeneracy_tol)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.pi0, self.lambda, self.mu1, self.mu2, beta, self.degeneracy_tol)
    }

    pub fn with_mu2(&self, mu2: f64) -> Result<Self> {
        Self::new(self.pi0, self.lambda, self.mu1, mu2, self.beta, self.degeneracy_tol)
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `mu2 - mu1`; may be negative.
    pub fn delta_mu(&self) -> f64 {
        self.delta_mu
    }

    /// `delta_mu / (delta_mu - lambda)`, absent in the degenerate case
    /// `mu2 == mu1 + lambda`.
    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn is_degenerate(&self) -> bool {
        self.kappa.is_none()
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    /// `P(xi <= t) = pi0 + (1 - pi0)(1 - e^{-lambda t})`.
    pub fn change_point_cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        1.0 - (1.0 - self.pi0) * (-self.lambda * t).exp()
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(field, format!("{value} must be finite and > 0")))
    }
}

/// Built-in parameter sets.
///
/// `CreditPricing` is the bond-pricing calibration (three-month bill rate,
/// BB and CCC high-yield spreads); `EstimateComparison` is the set used to
/// compare observation-only and default-enlarged hazard estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    CreditPricing,
    EstimateComparison,
}

impl Preset {
    /// CLI spelling.
    pub fn name(&self) -> &'static str {
        match self {
            Preset::CreditPricing => "table2",
            Preset::EstimateComparison => "table1",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "table2" => Some(Preset::CreditPricing),
            "table1" => Some(Preset::EstimateComparison),
            _ => None,
        }
    }

    pub fn params(&self) -> ModelParams {
        let p = match self {
            Preset::CreditPricing => ModelParams::new(0.0, 0.25, 0.0366, 0.1148, 0.15, DEFAULT_DEGENERACY_TOL),
            Preset::EstimateComparison => ModelParams::new(0.0, 0.06, 0.02, 0.22, 1.0, DEFAULT_DEGENERACY_TOL),
        };
        p.expect("preset parameters are valid")
    }

    /// Default horizon in years.
    pub fn horizon(&self) -> f64 {
        match self {
            Preset::CreditPricing => 10.0,
            Preset::EstimateComparison => 60.0,
        }
    }

    /// Constant risk-free rate used for pricing.
    pub fn rate(&self) -> f64 {
        0.0263
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn credit_pricing_kappa() {
        let p = ModelParams::new(0.0, 0.25, 0.0366, 0.1148, 0.15, 1e-12).unwrap();
        assert!((p.delta_mu() - 0.0782).abs() < 1e-15);
        // 0.0782 / (0.0782 - 0.25) = -782 / 1718 exactly.
        let exact = -782.0 / 1718.0;
        assert!((p.kappa().unwrap() - exact).abs() < 1e-14);
        assert!((p.kappa().unwrap() + 0.45518).abs() < 1e-5);
    }

    #[test]
    fn degenerate_case_has_no_kappa() {
        let (lambda, mu1) = (0.25, 0.0366);
        let p = ModelParams::new(0.2, lambda, mu1, mu1 + lambda, 0.15, 1e-12).unwrap();
        assert!(p.is_degenerate());
        let q = ModelParams::new(0.2, lambda, mu1, mu1 + lambda + 1e-9, 0.15, 1e-12).unwrap();
        assert!(!q.is_degenerate());
    }

    #[test]
    fn rejects_bad_fields() {
        let err = ModelParams::new(0.5, 0.25, -0.01, 0.1, 0.15, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Domain { field: "mu1", .. }));
        assert!(matches!(
            ModelParams::new(1.5, 0.25, 0.01, 0.1, 0.15, 0.0),
            Err(Error::Domain { field: "pi0", .. })
        ));
        assert!(matches!(
            ModelParams::new(0.5, 0.0, 0.01, 0.1, 0.15, 0.0),
            Err(Error::Domain { field: "lambda", .. })
        ));
        assert!(matches!(
            ModelParams::new(0.5, 0.1, 0.01, f64::NAN, 0.15, 0.0),
            Err(Error::Domain { field: "mu2", .. })
        ));
        assert!(matches!(
            ModelParams::new(0.5, 0.1, 0.01, 0.1, 0.0, 0.0),
            Err(Error::Domain { field: "beta", .. })
        ));
        assert!(matches!(
            ModelParams::new(0.5, 0.1, 0.01, 0.1, 0.1, -1.0),
            Err(Error::Domain { field: "degeneracy_tol", .. })
        ));
    }

    #[test]
    fn negative_delta_mu_is_accepted() {
        let p = ModelParams::new(0.1, 0.2, 0.3, 0.1, 0.5, 1e-9).unwrap();
        assert!(p.delta_mu() < 0.0);
        assert!(p.kappa().is_some());
    }

    #[test]
    fn presets_round_trip_names() {
        for preset in [Preset::CreditPricing, Preset::EstimateComparison] {
            assert_eq!(Preset::from_name(preset.name()), Some(preset));
        }
        assert_eq!(Preset::from_name("table3"), None);
    }
}
