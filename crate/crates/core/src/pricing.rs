//! Prices of default-sensitive contracts given the current information.
//!
//! For a contract paying `face` at maturity if no default occurred, premium at
//! rate `p(s)` while alive, and `W(tau)` at default,
//! `price = face disc(t,T) S(T) + int_t^T S(s) disc(t,s) p(s) ds
//!        + int_t^T disc(t,s) W(s) f(s) ds`
//! with `S` the conditional survival and `f` the conditional density.

use std::io::Write;
use std::sync::Arc;

use crate::analytics::{density, survival, InfoState, Regime};
use crate::error::{Error, Result};
use crate::filters::FilterPath;
use crate::format::sig17;
use crate::model::ScenarioPath;
use crate::params::ModelParams;
use crate::quadrature::{Simpson, DEFAULT_MAX_DEPTH};

pub const PRICE_QUAD_TOL: f64 = 1e-10;

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A deterministic function of time: premium rates and recovery payments.
#[derive(Clone)]
pub enum Schedule {
    Zero,
    Constant(f64),
    Function(TimeFn),
}

impl Schedule {
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Schedule::Function(Arc::new(f))
    }

    pub fn at(&self, s: f64) -> f64 {
        match self {
            Schedule::Zero => 0.0,
            Schedule::Constant(c) => *c,
            Schedule::Function(f) => f(s),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Schedule::Zero) || matches!(self, Schedule::Constant(c) if *c == 0.0)
    }
}

impl std::fmt::Debug for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Schedule::Zero => write!(f, "Zero"),
            Schedule::Constant(c) => write!(f, "Constant({c})"),
            Schedule::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// Deterministic short rate.
#[derive(Clone)]
pub enum DiscountCurve {
    Flat(f64),
    Function(TimeFn),
}

impl DiscountCurve {
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        DiscountCurve::Function(Arc::new(f))
    }

    pub fn rate(&self, s: f64) -> f64 {
        match self {
            DiscountCurve::Flat(r) => *r,
            DiscountCurve::Function(f) => f(s),
        }
    }

    /// `exp(-int_t^s r(u) du)`.
    pub fn discount(&self, t: f64, s: f64) -> Result<f64> {
        match self {
            DiscountCurve::Flat(r) => Ok((-r * (s - t)).exp()),
            DiscountCurve::Function(f) => {
                let q = Simpson::new(PRICE_QUAD_TOL * 1e-2, DEFAULT_MAX_DEPTH);
                Ok((-q.integrate(|u| f(u), t, s)?).exp())
            }
        }
    }

    fn validate(&self, t0: f64, t1: f64) -> Result<()> {
        for k in 0..=100 {
            let s = t0 + (t1 - t0) * k as f64 / 100.0;
            let r = self.rate(s);
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::domain("discount_rate", format!("r({s}) = {r} must be > 0")));
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for DiscountCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiscountCurve::Flat(r) => write!(f, "Flat({r})"),
            DiscountCurve::Function(_) => write!(f, "Function(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContractKind {
    CouponBond,
    Cds,
    /// Zero-coupon bond paying `delta` at default.
    Zcb { delta: f64 },
}

#[derive(Debug, Clone)]
pub struct ContractSpec {
    pub maturity: f64,
    pub face: f64,
    pub premium: Schedule,
    pub recovery: Schedule,
    pub discount: DiscountCurve,
    pub kind: ContractKind,
}

impl ContractSpec {
    /// Defaultable zero-coupon bond with unit face and recovery `delta`.
    pub fn zcb(maturity: f64, delta: f64, discount: DiscountCurve) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::domain("delta", format!("{delta} is not in [0, 1]")));
        }
        Self {
            maturity,
            face: 1.0,
            premium: Schedule::Zero,
            recovery: Schedule::Constant(delta),
            discount,
            kind: ContractKind::Zcb { delta },
        }
        .validated()
    }

    pub fn coupon_bond(
        maturity: f64,
        face: f64,
        coupon: Schedule,
        recovery: Schedule,
        discount: DiscountCurve,
    ) -> Result<Self> {
        Self {
            maturity,
            face,
            premium: coupon,
            recovery,
            discount,
            kind: ContractKind::CouponBond,
        }
        .validated()
    }

    /// Unit-notional CDS: premium at rate `spread` until default or maturity,
    /// protection `recovery(tau)` at default.
    pub fn cds(maturity: f64, spread: Schedule, protection: Schedule, discount: DiscountCurve) -> Result<Self> {
        Self {
            maturity,
            face: 0.0,
            premium: spread,
            recovery: protection,
            discount,
            kind: ContractKind::Cds,
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(Error::domain("maturity", format!("{} must be > 0", self.maturity)));
        }
        if !(self.face >= 0.0 && self.face.is_finite()) {
            return Err(Error::domain("face", format!("{} must be >= 0", self.face)));
        }
        self.discount.validate(0.0, self.maturity)?;
        let cap = match self.kind {
            ContractKind::Cds => 1.0,
            _ => self.face,
        };
        for k in 0..=100 {
            let s = self.maturity * k as f64 / 100.0;
            let w = self.recovery.at(s);
            if !(0.0..=cap).contains(&w) {
                return Err(Error::domain("recovery", format!("W({s}) = {w} is not in [0, {cap}]")));
            }
        }
        Ok(self)
    }
}

fn quad() -> Simpson {
    Simpson::new(PRICE_QUAD_TOL, DEFAULT_MAX_DEPTH)
}

fn check_time(state: &InfoState, maturity: f64) -> Result<InfoState> {
    if state.t() > maturity {
        return Err(Error::domain("t", format!("{} is after maturity {maturity}", state.t())));
    }
    state.with_horizon(maturity)
}

struct Legs {
    face: f64,
    premium: f64,
    protection: f64,
}

fn legs(params: &ModelParams, contract: &ContractSpec, state: &InfoState) -> Result<Legs> {
    let st = check_time(state, contract.maturity)?;
    if st.defaulted() {
        return Ok(Legs {
            face: 0.0,
            premium: 0.0,
            protection: 0.0,
        });
    }
    let (t, big_t) = (st.t(), contract.maturity);
    let disc = &contract.discount;
    let face = contract.face * disc.discount(t, big_t)? * survival(params, &st);
    let premium = if contract.premium.is_zero() {
        0.0
    } else {
        let f = |s: f64| {
            let surv = survival(params, &st.with_horizon(s).expect("s lies in [t, T]"));
            surv * disc.discount(t, s).unwrap_or(f64::NAN) * contract.premium.at(s)
        };
        quad().integrate(f, t, big_t)?
    };
    let protection = if contract.recovery.is_zero() {
        0.0
    } else {
        let f = |s: f64| {
            let d = density(params, &st, s).unwrap_or(f64::NAN);
            disc.discount(t, s).unwrap_or(f64::NAN) * contract.recovery.at(s) * d
        };
        quad().integrate(f, t, big_t)?
    };
    Ok(Legs { face, premium, protection })
}

/// General pricing formula: face, premium and recovery legs.
pub fn price_general(params: &ModelParams, contract: &ContractSpec, state: &InfoState) -> Result<f64> {
    let l = legs(params, contract, state)?;
    Ok(l.face + l.premium + l.protection)
}

/// Value of a CDS to the protection buyer: protection leg minus premium leg.
pub fn price_cds(params: &ModelParams, contract: &ContractSpec, state: &InfoState) -> Result<f64> {
    if contract.kind != ContractKind::Cds {
        return Err(Error::domain("kind", "price_cds needs a CDS contract"));
    }
    let l = legs(params, contract, state)?;
    Ok(l.protection - l.premium)
}

/// Constant premium rate that makes the CDS worth zero, by bisection.
pub fn cds_fair_spread(
    params: &ModelParams,
    maturity: f64,
    protection: Schedule,
    discount: DiscountCurve,
    state: &InfoState,
) -> Result<f64> {
    let value = |p: f64| -> Result<f64> {
        let c = ContractSpec::cds(maturity, Schedule::Constant(p), protection.clone(), discount.clone())?;
        price_cds(params, &c, state)
    };
    if value(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while value(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::domain("spread", "no fair spread below 1e6"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if value(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1e-300) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Defaultable zero-coupon bond with flat rate `r` and recovery `delta`,
/// in closed form. Works for either information regime; the horizon of
/// `state` is the maturity.
pub fn price_dzcb(params: &ModelParams, r: f64, delta: f64, state: &InfoState) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain("r", format!("{r} must be > 0")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain("delta", format!("{delta} is not in [0, 1]")));
    }
    if state.defaulted() {
        return Ok(0.0);
    }
    let u = state.horizon() - state.t();
    let w = state.pre_change_weight();
    let (lambda, mu1, mu2) = (params.lambda(), params.mu1(), params.mu2());
    let a = r + mu2;
    let ea = (-a * u).exp();
    let post = ea + delta * mu2 / a * (1.0 - ea);
    Ok(match params.kappa() {
        None => {
            let slope = lambda * w;
            let tail = (1.0 + slope * u * (1.0 - delta * mu2 / a)) * ea;
            tail + delta / a * (mu2 - slope * (1.0 - mu2 / a)) * (1.0 - ea)
        }
        Some(k) => {
            let fast = mu1 + lambda;
            let b = r + fast;
            let eb = (-b * u).exp();
            let pre = eb + delta * fast / b * (1.0 - eb);
            k * w * pre + (1.0 - k * w) * post
        }
    })
}

/// [`price_dzcb`] for a partial-information state.
pub fn price_dzcb_partial(params: &ModelParams, r: f64, delta: f64, state: &InfoState) -> Result<f64> {
    match state.regime() {
        Regime::Partial { .. } => price_dzcb(params, r, delta, state),
        Regime::Full { .. } => Err(Error::domain("regime", "expected partial information")),
    }
}

/// [`price_dzcb`] for a full-information state.
pub fn price_dzcb_full(params: &ModelParams, r: f64, delta: f64, state: &InfoState) -> Result<f64> {
    match state.regime() {
        Regime::Full { .. } => price_dzcb(params, r, delta, state),
        Regime::Partial { .. } => Err(Error::domain("regime", "expected full information")),
    }
}

/// Conditional expectations of the payoffs driven by an independent market
/// factor, supplied by the caller.
pub struct MarketFactorHooks<F> {
    /// `s -> E[psi(X_s) | market info at t]`, paid at default time `s`.
    pub expect_psi_at: F,
    /// `E[phi(X_T) | market info at t]`, paid at maturity without default.
    pub expect_phi_terminal: f64,
}

/// `int_t^T disc(t,s) psi(s) f(s) ds + disc(t,T) phi S(T)`.
pub fn price_with_market_factor<F: Fn(f64) -> f64>(
    params: &ModelParams,
    hooks: &MarketFactorHooks<F>,
    discount: &DiscountCurve,
    state: &InfoState,
    maturity: f64,
) -> Result<f64> {
    let st = check_time(state, maturity)?;
    discount.validate(st.t(), maturity)?;
    if st.defaulted() {
        return Ok(0.0);
    }
    let t = st.t();
    let terminal = discount.discount(t, maturity)? * hooks.expect_phi_terminal * survival(params, &st);
    let f = |s: f64| {
        let d = density(params, &st, s).unwrap_or(f64::NAN);
        let psi = (hooks.expect_psi_at)(s);
        discount.discount(t, s).unwrap_or(f64::NAN) * psi * d
    };
    Ok(quad().integrate(f, t, maturity)? + terminal)
}

/// Writes `t,price_partial,price_full,pi` along a filtered scenario for every
/// node up to `maturity`.
pub fn write_price_curve_csv<W: Write>(
    params: &ModelParams,
    r: f64,
    delta: f64,
    maturity: f64,
    scenario: &ScenarioPath,
    filter: &FilterPath,
    out: &mut W,
) -> Result<()> {
    writeln!(out, "t,price_partial,price_full,pi")?;
    for (i, &t) in filter.grid.iter().enumerate() {
        if t > maturity {
            break;
        }
        let h = scenario.h_ind()[i];
        let pi = filter.pi_g[i];
        let partial = price_dzcb(params, r, delta, &InfoState::partial(t, maturity, h, pi)?)?;
        let full = price_dzcb(params, r, delta, &InfoState::full(t, maturity, h, scenario.xi() > t)?)?;
        writeln!(out, "{},{},{},{}", sig17(t), sig17(partial), sig17(full), sig17(pi))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;
    use proptest::prelude::*;

    const R: f64 = 0.0263;

    fn table2() -> ModelParams {
        Preset::CreditPricing.params()
    }

    fn at0(pi: f64) -> InfoState {
        InfoState::partial(0.0, 10.0, false, pi).unwrap()
    }

    #[test]
    fn headline_dzcb_prices() {
        let p = table2();
        let v0 = price_dzcb(&p, R, 0.0, &at0(0.0)).unwrap();
        assert!((v0 - 0.3350).abs() < 5e-4, "{v0}");
        assert!((v0 - (-R * 10.0f64).exp() * survival(&p, &at0(0.0))).abs() < 1e-14);
        let v5 = price_dzcb(&p, R, 0.5, &at0(0.0)).unwrap();
        assert!((v5 - 0.5832).abs() < 1e-3, "{v5}");
    }

    #[test]
    fn general_formula_matches_closed_form() {
        let params = [table2(), ModelParams::new(0.0, 0.25, 0.0366, 0.2866, 0.15, 1e-9).unwrap()];
        for p in params {
            for delta in [0.0, 0.5, 1.0] {
                for pi in [0.0, 0.4, 1.0] {
                    let st = InfoState::partial(2.0, 10.0, false, pi).unwrap();
                    let c = ContractSpec::zcb(10.0, delta, DiscountCurve::Flat(R)).unwrap();
                    let q = price_general(&p, &c, &st).unwrap();
                    let closed = price_dzcb(&p, R, delta, &st).unwrap();
                    assert!((q - closed).abs() < 1e-8, "{q} vs {closed}");
                }
            }
        }
    }

    #[test]
    fn degenerate_dzcb_is_the_limit_of_the_generic_one() {
        let exact = ModelParams::new(0.0, 0.25, 0.0366, 0.2866, 0.15, 1e-9).unwrap();
        assert!(exact.is_degenerate());
        let near = ModelParams::new(0.0, 0.25, 0.0366, 0.2866 + 1e-7, 0.15, 0.0).unwrap();
        for delta in [0.0, 0.5, 1.0] {
            let st = at0(0.3);
            let a = price_dzcb(&exact, R, delta, &st).unwrap();
            let b = price_dzcb(&near, R, delta, &st).unwrap();
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn trivial_cases() {
        let p = table2();
        let st = InfoState::partial(10.0, 10.0, false, 0.3).unwrap();
        assert_eq!(price_dzcb(&p, R, 0.5, &st).unwrap(), 1.0);
        let dead = InfoState::partial(3.0, 10.0, true, 0.3).unwrap();
        assert_eq!(price_dzcb(&p, R, 0.5, &dead).unwrap(), 0.0);
        let c = ContractSpec::zcb(10.0, 0.5, DiscountCurve::Flat(R)).unwrap();
        assert_eq!(price_general(&p, &c, &dead).unwrap(), 0.0);
        let zero = ContractSpec::zcb(10.0, 0.0, DiscountCurve::Flat(R)).unwrap();
        let st = at0(0.2);
        let v = price_general(&p, &zero, &st).unwrap();
        assert!((v - (-R * 10.0f64).exp() * survival(&p, &st)).abs() < 1e-14);
        assert!(price_general(&p, &zero, &InfoState::partial(11.0, 12.0, false, 0.0).unwrap()).is_err());
    }

    #[test]
    fn full_information_branches() {
        let p = table2();
        let t = 4.0;
        for delta in [0.0, 0.5] {
            let before = price_dzcb_full(&p, R, delta, &InfoState::full(t, 10.0, false, true).unwrap()).unwrap();
            let after = price_dzcb_full(&p, R, delta, &InfoState::full(t, 10.0, false, false).unwrap()).unwrap();
            let p0 = price_dzcb_partial(&p, R, delta, &InfoState::partial(t, 10.0, false, 0.0).unwrap()).unwrap();
            let p1 = price_dzcb_partial(&p, R, delta, &InfoState::partial(t, 10.0, false, 1.0).unwrap()).unwrap();
            assert_eq!(before, p0);
            assert_eq!(after, p1);
            assert!(before > after);
        }
        assert!(price_dzcb_full(&p, R, 0.0, &at0(0.0)).is_err());
    }

    #[test]
    fn nonincreasing_in_pi() {
        let p = table2();
        for delta in [0.0, 0.5] {
            let mut last = f64::INFINITY;
            for k in 0..=100 {
                let v = price_dzcb(&p, R, delta, &at0(k as f64 / 100.0)).unwrap();
                assert!(v <= last + 1e-15);
                assert!((0.0..=1.0).contains(&v));
                last = v;
            }
        }
    }

    #[test]
    fn high_recovery_reverses_pi_monotonicity() {
        // Early default pays delta sooner; near full recovery that outweighs
        // the lost face value.
        let p = table2();
        let lo = price_dzcb(&p, R, 0.9, &at0(0.0)).unwrap();
        let hi = price_dzcb(&p, R, 0.9, &at0(1.0)).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn full_recovery_bound() {
        let p = table2();
        for pi in [0.0, 0.5, 1.0] {
            let st = InfoState::partial(1.0, 10.0, false, pi).unwrap();
            let v = price_dzcb(&p, R, 1.0, &st).unwrap();
            assert!(v >= (-R * 9.0f64).exp());
            assert!(v <= 1.0);
        }
    }

    #[test]
    fn cds_legs_and_signs() {
        let p = table2();
        let st = at0(0.0);
        let flat = DiscountCurve::Flat(R);
        let prot = ContractSpec::cds(10.0, Schedule::Zero, Schedule::Constant(0.6), flat.clone()).unwrap();
        assert!(price_cds(&p, &prot, &st).unwrap() > 0.0);
        let prem = ContractSpec::cds(10.0, Schedule::Constant(0.02), Schedule::Zero, flat.clone()).unwrap();
        assert!(price_cds(&p, &prem, &st).unwrap() < 0.0);
        let bond = ContractSpec::zcb(10.0, 0.0, flat.clone()).unwrap();
        assert!(price_cds(&p, &bond, &st).is_err());

        let spread = cds_fair_spread(&p, 10.0, Schedule::Constant(0.6), flat.clone(), &st).unwrap();
        let fair = ContractSpec::cds(10.0, Schedule::Constant(spread), Schedule::Constant(0.6), flat).unwrap();
        assert!(price_cds(&p, &fair, &st).unwrap().abs() < 1e-10);
        // With a constant spread the value is affine in p, so the root is
        // protection / annuity.
        let protection = price_cds(&p, &prot, &st).unwrap();
        let annuity = -price_cds(&p, &prem, &st).unwrap() / 0.02;
        assert!((spread - protection / annuity).abs() < 1e-9);
    }

    #[test]
    fn cds_is_general_with_negated_premium() {
        let p = table2();
        let st = at0(0.25);
        let flat = DiscountCurve::Flat(R);
        let cds = ContractSpec::cds(10.0, Schedule::Constant(0.03), Schedule::Constant(0.4), flat.clone()).unwrap();
        let bond_like = ContractSpec::coupon_bond(10.0, 0.0, Schedule::Constant(-0.03), Schedule::Zero, flat.clone())
            .unwrap();
        let rec_only = ContractSpec::coupon_bond(10.0, 1.0, Schedule::Zero, Schedule::Constant(0.4), flat).unwrap();
        let face = (-R * 10.0f64).exp() * survival(&p, &st.with_horizon(10.0).unwrap());
        let expected = price_general(&p, &bond_like, &st).unwrap() + price_general(&p, &rec_only, &st).unwrap() - face;
        assert!((price_cds(&p, &cds, &st).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn time_varying_rate_discount() {
        let curve = DiscountCurve::function(|s| 0.02 + 0.001 * s);
        let d = curve.discount(1.0, 5.0).unwrap();
        let exact = (-(0.02 * 4.0 + 0.0005 * (25.0 - 1.0f64))).exp();
        assert!((d - exact).abs() < 1e-12);
        assert!(DiscountCurve::function(|s| 0.01 - 0.002 * s).validate(0.0, 10.0).is_err());
        let p = table2();
        let c = ContractSpec::zcb(10.0, 0.5, curve).unwrap();
        let v = price_general(&p, &c, &at0(0.0)).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn contract_validation() {
        let flat = DiscountCurve::Flat(R);
        assert!(ContractSpec::zcb(10.0, 1.2, flat.clone()).is_err());
        assert!(ContractSpec::zcb(0.0, 0.5, flat.clone()).is_err());
        assert!(ContractSpec::zcb(10.0, 0.5, DiscountCurve::Flat(0.0)).is_err());
        assert!(ContractSpec::coupon_bond(10.0, 1.0, Schedule::Zero, Schedule::Constant(1.5), flat.clone()).is_err());
        assert!(ContractSpec::cds(10.0, Schedule::Zero, Schedule::Constant(1.1), flat).is_err());
        let p = table2();
        assert!(price_dzcb(&p, 0.0, 0.5, &at0(0.0)).is_err());
        assert!(price_dzcb(&p, R, -0.1, &at0(0.0)).is_err());
    }

    #[test]
    fn market_factor_reductions() {
        let p = table2();
        let st = at0(0.3);
        let flat = DiscountCurve::Flat(R);
        let hooks = MarketFactorHooks {
            expect_psi_at: |_s: f64| 0.4,
            expect_phi_terminal: 1.0,
        };
        let v = price_with_market_factor(&p, &hooks, &flat, &st, 10.0).unwrap();
        let c = ContractSpec::coupon_bond(10.0, 1.0, Schedule::Zero, Schedule::Constant(0.4), flat.clone()).unwrap();
        assert!((v - price_general(&p, &c, &st).unwrap()).abs() < 1e-10);

        let bare = MarketFactorHooks {
            expect_psi_at: |_s: f64| 0.0,
            expect_phi_terminal: 1.0,
        };
        let v = price_with_market_factor(&p, &bare, &flat, &st, 10.0).unwrap();
        assert!((v - (-R * 10.0f64).exp() * survival(&p, &st)).abs() < 1e-14);
    }

    #[test]
    fn market_factor_growth_against_trapezoid_oracle() {
        let p = table2();
        let st = InfoState::partial(1.0, 10.0, false, 0.2).unwrap();
        let g = 0.03;
        let hooks = MarketFactorHooks {
            expect_psi_at: move |s: f64| (g * s).exp(),
            expect_phi_terminal: 0.7,
        };
        let flat = DiscountCurve::Flat(R);
        let v = price_with_market_factor(&p, &hooks, &flat, &st, 10.0).unwrap();
        // Composite trapezoid with Richardson extrapolation as an independent integrator.
        let f = |s: f64| (-R * (s - 1.0)).exp() * (g * s).exp() * density(&p, &st, s).unwrap();
        let trap = |n: usize| {
            let h = 9.0 / n as f64;
            let inner: f64 = (1..n).map(|i| f(1.0 + i as f64 * h)).sum();
            h * (0.5 * (f(1.0) + f(10.0)) + inner)
        };
        let integral = (4.0 * trap(20_000) - trap(10_000)) / 3.0;
        let oracle = integral + (-R * 9.0f64).exp() * 0.7 * survival(&p, &st);
        assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
    }

    proptest! {
        #[test]
        fn zcb_price_bounds(pi in 0.0f64..=1.0, delta in 0.0f64..=1.0, t in 0.0f64..10.0, h in any::<bool>()) {
            let p = table2();
            let v = price_dzcb(&p, R, delta, &InfoState::partial(t, 10.0, h, pi).unwrap()).unwrap();
            if h {
                prop_assert_eq!(v, 0.0);
            } else {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
