//! Conditional survival probabilities and densities of the default time.
//!
//! Everything reduces to the weight `w` on the pre-change hazard level:
//! `w = 1{xi > t}` under full information and `w = 1 - pi_t` under partial
//! information. With `u = T - t` and `kappa = delta_mu / (delta_mu - lambda)`,
//! the survival probability before default is
//! `kappa w e^{-(mu1+lambda)u} + (1 - kappa w) e^{-mu2 u}`, or
//! `(1 + lambda u w) e^{-mu2 u}` when `mu2 = mu1 + lambda`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::filters::jump_map;
use crate::format::sig17;
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// The change point is observed; `pre_change` is `1{xi > t}`.
    Full { pre_change: bool },
    /// Only the filter value `pi_t = P(xi <= t | observations)` is known.
    Partial { pi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoState {
    t: f64,
    horizon: f64,
    defaulted: bool,
    regime: Regime,
}

impl InfoState {
    pub fn new(t: f64, horizon: f64, defaulted: bool, regime: Regime) -> Result<Self> {
        if !t.is_finite() || !horizon.is_finite() {
            return Err(Error::domain("t", "times must be finite"));
        }
        if t > horizon {
            return Err(Error::domain("horizon", format!("{horizon} is before t = {t}")));
        }
        if let Regime::Partial { pi } = regime {
            if !(0.0..=1.0).contains(&pi) {
                return Err(Error::domain("pi", format!("{pi} is not in [0, 1]")));
            }
        }
        Ok(Self { t, horizon, defaulted, regime })
    }

    pub fn partial(t: f64, horizon: f64, defaulted: bool, pi: f64) -> Result<Self> {
        Self::new(t, horizon, defaulted, Regime::Partial { pi })
    }

    pub fn full(t: f64, horizon: f64, defaulted: bool, pre_change: bool) -> Result<Self> {
        Self::new(t, horizon, defaulted, Regime::Full { pre_change })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn defaulted(&self) -> bool {
        self.defaulted
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Same information, different horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.t, horizon, self.defaulted, self.regime)
    }

    /// Weight on the pre-change hazard level.
    pub fn pre_change_weight(&self) -> f64 {
        match self.regime {
            Regime::Full { pre_change } => f64::from(u8::from(pre_change)),
            Regime::Partial { pi } => 1.0 - pi,
        }
    }
}

/// Hazard level of the four-state chain `(mu_t, H_t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Pre,
    Post,
}

/// Survival before default with pre-change weight `w` over a remaining time `u`.
pub(crate) fn survival_weighted(params: &ModelParams, w: f64, u: f64) -> f64 {
    if u == 0.0 {
        return 1.0;
    }
    match params.kappa() {
        None => (1.0 + params.lambda() * u * w) * (-params.mu2() * u).exp(),
        Some(k) => {
            let fast = params.mu1() + params.lambda();
            k * w * (-fast * u).exp() + (1.0 - k * w) * (-params.mu2() * u).exp()
        }
    }
}

pub(crate) fn density_weighted(params: &ModelParams, w: f64, v: f64) -> f64 {
    let mu2 = params.mu2();
    let lambda = params.lambda();
    match params.kappa() {
        None => (-mu2 * v).exp() * (mu2 * (1.0 + lambda * w * v) - lambda * w),
        Some(k) => {
            let fast = params.mu1() + lambda;
            fast * k * w * (-fast * v).exp() + mu2 * (1.0 - k * w) * (-mu2 * v).exp()
        }
    }
}

/// `f(t, x, h)`: survival to `horizon` for the chain started at level `x`
/// and default indicator `h` at time `t`.
pub fn survival_given_level(params: &ModelParams, t: f64, horizon: f64, level: Level, defaulted: bool) -> f64 {
    if defaulted {
        return 0.0;
    }
    let u = horizon - t;
    match level {
        Level::Pre => survival_weighted(params, 1.0, u),
        Level::Post => (-params.mu2() * u).exp(),
    }
}

/// Survival to `state.horizon()` under either regime.
pub fn survival(params: &ModelParams, state: &InfoState) -> f64 {
    if state.defaulted {
        return 0.0;
    }
    let (t, big_t) = (state.t, state.horizon);
    match state.regime {
        Regime::Full { pre_change } => {
            let level = if pre_change { Level::Pre } else { Level::Post };
            survival_given_level(params, t, big_t, level, false)
        }
        Regime::Partial { pi } => {
            survival_given_level(params, t, big_t, Level::Pre, false) * (1.0 - pi)
                + survival_given_level(params, t, big_t, Level::Post, false) * pi
        }
    }
}

/// [`survival`] restricted to the full-information regime.
pub fn survival_full(params: &ModelParams, state: &InfoState) -> Result<f64> {
    match state.regime {
        Regime::Full { .. } => Ok(survival(params, state)),
        Regime::Partial { .. } => Err(Error::domain("regime", "expected full information")),
    }
}

/// [`survival`] restricted to the partial-information regime.
pub fn survival_partial(params: &ModelParams, state: &InfoState) -> Result<f64> {
    match state.regime {
        Regime::Partial { .. } => Ok(survival(params, state)),
        Regime::Full { .. } => Err(Error::domain("regime", "expected partial information")),
    }
}

/// Conditional density of the default time at `s >= t`. The horizon of
/// `state` is not used.
pub fn density(params: &ModelParams, state: &InfoState, s: f64) -> Result<f64> {
    if !(s >= state.t) {
        return Err(Error::domain("s", format!("{s} is before t = {}", state.t)));
    }
    if state.defaulted {
        return Ok(0.0);
    }
    Ok(density_weighted(params, state.pre_change_weight(), s - state.t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCheck {
    pub min_value: f64,
    pub at_s: f64,
    pub at_pi: f64,
}

impl DensityCheck {
    pub fn nonnegative(&self) -> bool {
        self.min_value >= 0.0
    }
}

/// Smallest partial-information density over a `(s, pi)` lattice on
/// `[0, horizon] x [0, 1]`. Negative values are reported, never clipped.
pub fn density_sign_check(params: &ModelParams, horizon: f64, n_s: usize, n_pi: usize) -> DensityCheck {
    let mut worst = DensityCheck {
        min_value: f64::INFINITY,
        at_s: 0.0,
        at_pi: 0.0,
    };
    for i in 0..=n_s {
        let s = horizon * i as f64 / n_s.max(1) as f64;
        for j in 0..=n_pi {
            let pi = j as f64 / n_pi.max(1) as f64;
            let d = density_weighted(params, 1.0 - pi, s);
            if d < worst.min_value {
                worst = DensityCheck { min_value: d, at_s: s, at_pi: pi };
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorReport {
    /// Largest residual of the nested ODE system for `f(t, x, h)`.
    pub chain: f64,
    /// Largest residual of the filter-state generator applied to
    /// `g(t, pi, h) = f(t, mu1, h)(1 - pi) + f(t, mu2, h) pi`.
    pub filter_state: f64,
    /// Largest `|d^2 g / d pi^2|`.
    pub curvature: f64,
}

impl GeneratorReport {
    pub fn max_residual(&self) -> f64 {
        self.chain.max(self.filter_state)
    }
}

/// `n` equally spaced interior points of `(0, horizon)`.
pub fn interior_grid(horizon: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| horizon * i as f64 / (n + 1) as f64).collect()
}

/// Finite-difference step used by [`generator_residual`].
pub fn fd_step(horizon: f64) -> f64 {
    1e-5 * horizon.max(1.0)
}

/// Generator residuals of the closed-form survival function on `grid`.
pub fn generator_residual(params: &ModelParams, horizon: f64, grid: &[f64]) -> Result<GeneratorReport> {
    let f = |t: f64, level: Level, h: bool| survival_given_level(params, t, horizon, level, h);
    generator_residual_of(params, horizon, grid, f)
}

/// Generator residuals of an arbitrary candidate `f(t, level, h)`.
pub fn generator_residual_of<F>(params: &ModelParams, horizon: f64, grid: &[f64], f: F) -> Result<GeneratorReport>
where
    F: Fn(f64, Level, bool) -> f64,
{
    generator_residual_with_step(params, horizon, grid, fd_step(horizon), f)
}

/// [`generator_residual_of`] with an explicit time step for the differences.
pub fn generator_residual_with_step<F>(
    params: &ModelParams,
    horizon: f64,
    grid: &[f64],
    h_fd: f64,
    f: F,
) -> Result<GeneratorReport>
where
    F: Fn(f64, Level, bool) -> f64,
{
    if !(h_fd > 0.0) {
        return Err(Error::domain("h_fd", format!("{h_fd} must be > 0")));
    }
    for &t in grid {
        if !(t - h_fd >= 0.0 && t + h_fd <= horizon) {
            return Err(Error::domain("grid", format!("{t} is not an interior point of [0, {horizon})")));
        }
    }
    let (lambda, mu1, mu2, dm) = (params.lambda(), params.mu1(), params.mu2(), params.delta_mu());
    let dt = |level: Level, h: bool, t: f64| (f(t + h_fd, level, h) - f(t - h_fd, level, h)) / (2.0 * h_fd);

    let mut chain: f64 = 0.0;
    for &t in grid {
        let pre0 = f(t, Level::Pre, false);
        let post0 = f(t, Level::Post, false);
        let pre1 = f(t, Level::Pre, true);
        let post1 = f(t, Level::Post, true);
        let residuals = [
            dt(Level::Pre, false, t) + lambda * (post0 - pre0) + mu1 * (pre1 - pre0),
            dt(Level::Post, false, t) + mu2 * (post1 - post0),
            dt(Level::Pre, true, t) + lambda * (post1 - pre1),
            dt(Level::Post, true, t),
        ];
        for r in residuals {
            chain = chain.max(r.abs());
        }
    }

    let g = |t: f64, x: f64, h: bool| f(t, Level::Pre, h) * (1.0 - x) + f(t, Level::Post, h) * x;
    let noise = 0.5 * (dm / params.beta()).powi(2);
    let x_fd = 1e-5;
    let x_curv = 1e-2;
    let lattice: Vec<f64> = (1..20).map(|j| j as f64 / 20.0).collect();
    let mut filter_state: f64 = 0.0;
    let mut curvature: f64 = 0.0;
    for &t in grid {
        for &x in &lattice {
            for h in [false, true] {
                let g_t = (g(t + h_fd, x, h) - g(t - h_fd, x, h)) / (2.0 * h_fd);
                let g_x = (g(t, x + x_fd, h) - g(t, x - x_fd, h)) / (2.0 * x_fd);
                let g_xx = (g(t, x + x_curv, h) - 2.0 * g(t, x, h) + g(t, x - x_curv, h)) / (x_curv * x_curv);
                curvature = curvature.max(g_xx.abs());
                let spread = x * (1.0 - x);
                let mut r = g_t + lambda * (1.0 - x) * g_x + noise * spread * spread * g_xx;
                if !h {
                    r -= dm * spread * g_x;
                    r += (mu1 + dm * x) * (g(t, jump_map(params, x), true) - g(t, x, false));
                }
                filter_state = filter_state.max(r.abs());
            }
        }
    }
    Ok(GeneratorReport {
        chain,
        filter_state,
        curvature,
    })
}

/// Writes `s,survival,density` for each `s` in `s_grid` (all `>= t`).
pub fn write_curve_csv<W: Write>(params: &ModelParams, state: &InfoState, s_grid: &[f64], out: &mut W) -> Result<()> {
    writeln!(out, "s,survival,density")?;
    for &s in s_grid {
        let surv = survival(params, &state.with_horizon(s)?);
        let dens = density(params, state, s)?;
        writeln!(out, "{},{},{}", sig17(s), sig17(surv), sig17(dens))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;
    use crate::quadrature;
    use proptest::prelude::*;

    fn table2() -> ModelParams {
        Preset::CreditPricing.params()
    }

    fn degenerate(shift: f64) -> ModelParams {
        ModelParams::new(0.0, 0.25, 0.0366, 0.0366 + 0.25 + shift, 0.15, 1e-9).unwrap()
    }

    #[test]
    fn table2_survival_at_ten() {
        let p = table2();
        let s = survival(&p, &InfoState::partial(0.0, 10.0, false, 0.0).unwrap());
        assert!((s - 0.43581).abs() < 5e-5, "{s}");
        // Independent oracle: integrate e^{-Lambda_T} against the law of xi.
        let (l, m1, m2) = (p.lambda(), p.mu1(), p.mu2());
        let inner = quadrature::integrate(
            |x| l * (-l * x).exp() * (-(m1 * x + m2 * (10.0 - x))).exp(),
            0.0,
            10.0,
        )
        .unwrap();
        let oracle = inner + (-l * 10.0f64).exp() * (-m1 * 10.0f64).exp();
        assert!((s - oracle).abs() < 1e-10);
    }

    #[test]
    fn terminal_and_absorbed() {
        let p = table2();
        for pi in [0.0, 0.3, 1.0] {
            assert_eq!(survival(&p, &InfoState::partial(4.0, 4.0, false, pi).unwrap()), 1.0);
            assert_eq!(survival(&p, &InfoState::partial(4.0, 4.0, true, pi).unwrap()), 0.0);
            assert_eq!(survival(&p, &InfoState::partial(1.0, 9.0, true, pi).unwrap()), 0.0);
            assert_eq!(density(&p, &InfoState::partial(1.0, 9.0, true, pi).unwrap(), 3.0).unwrap(), 0.0);
        }
        let d = degenerate(0.0);
        assert_eq!(survival(&d, &InfoState::full(2.0, 2.0, false, true).unwrap()), 1.0);
    }

    #[test]
    fn partial_endpoints_match_full() {
        let p = table2();
        let a = survival(&p, &InfoState::partial(2.0, 7.0, false, 0.0).unwrap());
        let b = survival(&p, &InfoState::full(2.0, 7.0, false, true).unwrap());
        assert_eq!(a, b);
        let a = survival(&p, &InfoState::partial(2.0, 7.0, false, 1.0).unwrap());
        let b = survival(&p, &InfoState::full(2.0, 7.0, false, false).unwrap());
        assert_eq!(a, b);
        assert!((b - (-p.mu2() * 5.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_limit_is_continuous() {
        let exact = degenerate(0.0);
        assert!(exact.is_degenerate());
        for pi in [0.0, 0.4, 1.0] {
            let st = InfoState::partial(1.0, 9.0, false, pi).unwrap();
            let v = survival(&exact, &st);
            let closed = (1.0 + 0.25 * 8.0 * (1.0 - pi)) * (-exact.mu2() * 8.0).exp();
            assert!((v - closed).abs() < 1e-15);
            for shift in [1e-9, -1e-9] {
                let near = ModelParams::new(0.0, 0.25, 0.0366, 0.0366 + 0.25 + shift, 0.15, 0.0).unwrap();
                assert!(!near.is_degenerate());
                assert!((survival(&near, &st) - v).abs() < 1e-6);
                let dn = density(&near, &st, 4.0).unwrap();
                assert!((dn - density(&exact, &st, 4.0).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn density_special_values() {
        let p = table2();
        let st = InfoState::full(3.0, 10.0, false, true).unwrap();
        assert!((density(&p, &st, 3.0).unwrap() - p.mu1()).abs() < 1e-15);
        let post = InfoState::full(3.0, 10.0, false, false).unwrap();
        assert!((density(&p, &post, 5.0).unwrap() - p.mu2() * (-p.mu2() * 2.0f64).exp()).abs() < 1e-15);
        let one = InfoState::partial(3.0, 10.0, false, 1.0).unwrap();
        assert_eq!(density(&p, &one, 5.0).unwrap(), density(&p, &post, 5.0).unwrap());
        assert!(density(&p, &st, 2.0).is_err());
        // Degenerate case at s = t also gives the instantaneous hazard.
        let d = degenerate(0.0);
        assert!((density(&d, &st, 3.0).unwrap() - d.mu1()).abs() < 1e-15);
    }

    #[test]
    fn density_integrates_to_survival_loss() {
        for p in [table2(), degenerate(0.0), Preset::EstimateComparison.params()] {
            for pi in [0.0, 0.35, 1.0] {
                let st = InfoState::partial(1.5, 12.0, false, pi).unwrap();
                let mass = quadrature::integrate(|s| density(&p, &st, s).unwrap(), 1.5, 12.0).unwrap();
                assert!((mass + survival(&p, &st) - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn density_is_minus_survival_derivative() {
        let p = table2();
        let h = 1e-5;
        for pi in [0.0, 0.5, 0.9] {
            for big_t in [2.0, 5.0, 9.0] {
                let st = InfoState::partial(1.0, big_t, false, pi).unwrap();
                let up = survival(&p, &st.with_horizon(big_t + h).unwrap());
                let dn = survival(&p, &st.with_horizon(big_t - h).unwrap());
                let deriv = -(up - dn) / (2.0 * h);
                assert!((deriv - density(&p, &st, big_t).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn survival_nonincreasing_in_horizon() {
        let p = table2();
        for pi in [0.0, 0.5, 1.0] {
            let mut last = 1.0;
            for k in 0..=200 {
                let st = InfoState::partial(0.0, k as f64 * 0.1, false, pi).unwrap();
                let v = survival(&p, &st);
                assert!(v <= last + 1e-15);
                last = v;
            }
        }
    }

    #[test]
    fn generator_residual_of_closed_form() {
        for p in [table2(), degenerate(0.0)] {
            let grid = interior_grid(10.0, 100);
            let rep = generator_residual(&p, 10.0, &grid).unwrap();
            assert!(rep.chain <= 1e-6, "{rep:?}");
            assert!(rep.filter_state <= 1e-6, "{rep:?}");
            assert!(rep.curvature <= 1e-9, "{rep:?}");
        }
    }

    #[test]
    fn generator_residual_detects_perturbation() {
        let p = table2();
        let grid = interior_grid(10.0, 100);
        let c = 1e-3;
        let bumped = |t: f64, level: Level, h: bool| {
            survival_given_level(&p, t, 10.0, level, h) + if level == Level::Pre && !h { c } else { 0.0 }
        };
        let rep = generator_residual_of(&p, 10.0, &grid, bumped).unwrap();
        assert!(rep.chain >= p.lambda() * c / 2.0);
        assert!((rep.chain - (p.lambda() + p.mu1()) * c).abs() < 1e-6);
    }

    #[test]
    fn grid_must_be_interior() {
        let p = table2();
        assert!(generator_residual(&p, 10.0, &[0.0]).is_err());
        assert!(generator_residual(&p, 10.0, &[10.0]).is_err());
    }

    #[test]
    fn shipped_presets_have_nonnegative_density() {
        for preset in [Preset::CreditPricing, Preset::EstimateComparison] {
            let chk = density_sign_check(&preset.params(), preset.horizon(), 400, 50);
            assert!(chk.nonnegative(), "{chk:?}");
        }
    }

    #[test]
    fn negative_delta_mu_density_is_flagged_not_clipped() {
        // Faster hazard before the change and a slow change: kappa w > 1.
        let p = ModelParams::new(0.0, 0.05, 0.4, 0.01, 0.15, 1e-9).unwrap();
        let chk = density_sign_check(&p, 50.0, 500, 10);
        let st = InfoState::partial(0.0, 50.0, false, chk.at_pi).unwrap();
        assert_eq!(density(&p, &st, chk.at_s).unwrap(), chk.min_value);
    }

    #[test]
    fn state_validation() {
        assert!(InfoState::partial(2.0, 1.0, false, 0.5).is_err());
        assert!(InfoState::partial(0.0, 1.0, false, 1.5).is_err());
        let p = table2();
        let st = InfoState::partial(0.0, 1.0, false, 0.5).unwrap();
        assert!(survival_full(&p, &st).is_err());
        assert!(survival_partial(&p, &st).is_ok());
    }

    #[test]
    fn curve_csv_layout() {
        let p = table2();
        let st = InfoState::partial(0.0, 10.0, false, 0.2).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&p, &st, &[0.0, 5.0, 10.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s,survival,density");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.0000000000000000,1.0000000000000000,"));
    }

    proptest! {
        #[test]
        fn survival_is_affine_in_pi(pi in 0.0f64..=1.0, t in 0.0f64..5.0, u in 0.0f64..20.0, h in any::<bool>()) {
            let p = table2();
            let st = |x| InfoState::partial(t, t + u, h, x).unwrap();
            let v = survival(&p, &st(pi));
            let lin = (1.0 - pi) * survival(&p, &st(0.0)) + pi * survival(&p, &st(1.0));
            prop_assert!((v - lin).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn survival_in_unit_interval(
            lambda in 0.01f64..1.0,
            mu1 in 0.001f64..0.5,
            mu2 in 0.001f64..0.5,
            pi in 0.0f64..=1.0,
            u in 0.0f64..50.0,
        ) {
            let p = ModelParams::new(0.0, lambda, mu1, mu2, 1.0, 1e-9).unwrap();
            let v = survival(&p, &InfoState::partial(0.0, u, false, pi).unwrap());
            prop_assert!(v >= -1e-12 && v <= 1.0 + 1e-12, "{}", v);
        }
    }
}
