//! Filters for the change-point indicator.
//!
//! `pi_g` conditions on the noisy hazard observation and on the default
//! indicator; `pi_f` conditions on the observation only. Both are driven by
//! the observed increments `(dY, dH)`, never by the latent noise.
//!
//! The direct scheme steps the observation-driven filter SDE and applies the
//! default update as an exact map at the default node. The odds-ratio scheme
//! evaluates the closed representation
//! `phi_t = e^{lambda t} Z_t (pi/(1-pi) + lambda int_0^t e^{-lambda s}/Z_s ds)`,
//! with `log Z` accumulated exactly from the observations, and serves as an
//! independent oracle for the direct scheme.

use std::io::Write;

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::model::{node_at, ScenarioPath};
use crate::params::ModelParams;

/// Continuous steps are clamped to `[CLAMP_EPS, 1 - CLAMP_EPS]`.
pub const CLAMP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterScheme {
    DirectSde,
    OddsRatio,
}

/// Discretisation of the continuous part of the direct scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMethod {
    /// Explicit Euler-Maruyama (strong order 1/2).
    Euler,
    /// Euler plus the Milstein correction for the multiplicative noise
    /// (strong order 1).
    #[default]
    Milstein,
}

/// Default status over one step `[t_{i-1}, t_i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefaultState {
    /// No default up to and including `t_i`.
    Alive,
    /// Default at `t_i` exactly.
    DefaultsAtEnd,
    /// Default at or before `t_{i-1}`.
    Defaulted,
}

/// Posterior update at the default time:
/// `pi -> mu2 pi / (mu1 + delta_mu pi)`.
pub fn jump_map(params: &ModelParams, pi_minus: f64) -> f64 {
    let up = params.mu2() * pi_minus;
    up / (up + params.mu1() * (1.0 - pi_minus))
}

/// `mu1 + delta_mu * pi`.
pub fn hazard_estimate(params: &ModelParams, pi: f64) -> f64 {
    params.mu1() + params.delta_mu() * pi
}

fn check_step(pi_prev: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::domain("dt", format!("{dt} must be > 0")));
    }
    if !(0.0..=1.0).contains(&pi_prev) {
        return Err(Error::domain("pi_prev", format!("{pi_prev} is not in [0, 1]")));
    }
    Ok(())
}

#[inline]
fn continuous_step(params: &ModelParams, p: f64, dy: f64, dt: f64, alive: bool, method: StepMethod) -> f64 {
    if p == 1.0 {
        // pi = 1 is absorbing: every coefficient carries a (1 - pi) factor.
        return 1.0;
    }
    let dm = params.delta_mu();
    let beta = params.beta();
    let spread = p * (1.0 - p);
    let innovation = dy - dm * p * dt;
    let mut q = p + params.lambda() * (1.0 - p) * dt + dm / (beta * beta) * spread * innovation;
    if alive {
        q -= dm * spread * dt;
    }
    if method == StepMethod::Milstein {
        let s = dm / beta;
        q += 0.5 * s * s * spread * (1.0 - 2.0 * p) * (innovation * innovation / (beta * beta) - dt);
    }
    q.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS)
}

/// One step of the default-enlarged filter given the observation increment
/// `dy` over a step of length `dt`.
pub fn step_filter_g(
    params: &ModelParams,
    pi_prev: f64,
    dy: f64,
    dt: f64,
    state: DefaultState,
    method: StepMethod,
) -> Result<f64> {
    check_step(pi_prev, dt)?;
    let alive = state != DefaultState::Defaulted;
    let q = continuous_step(params, pi_prev, dy, dt, alive, method);
    Ok(match state {
        DefaultState::DefaultsAtEnd => jump_map(params, q),
        _ => q,
    })
}

/// One step of the observation-only filter.
pub fn step_filter_f(params: &ModelParams, pi_prev: f64, dy: f64, dt: f64, method: StepMethod) -> Result<f64> {
    check_step(pi_prev, dt)?;
    Ok(continuous_step(params, pi_prev, dy, dt, false, method))
}

/// Filter values on both sides of the default node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub index: usize,
    pub before: f64,
    pub after: f64,
}

/// Scenario metadata carried into filter output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMeta {
    pub xi: f64,
    pub theta: f64,
    pub tau: f64,
    pub seed: u64,
}

impl PathMeta {
    fn of(s: &ScenarioPath) -> Self {
        Self {
            xi: s.xi(),
            theta: s.theta(),
            tau: s.tau(),
            seed: s.seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterPath {
    pub grid: Vec<f64>,
    pub pi_g: Vec<f64>,
    pub mu_hat_g: Vec<f64>,
    pub pi_f: Option<Vec<f64>>,
    pub mu_hat_f: Option<Vec<f64>>,
    pub scheme: FilterScheme,
    pub jump: Option<JumpRecord>,
    pub meta: PathMeta,
}

impl FilterPath {
    /// `pi_g` at the last node not after `t`.
    pub fn pi_at(&self, t: f64) -> Option<f64> {
        node_at(&self.grid, t).map(|i| self.pi_g[i])
    }

    pub fn pi_f_at(&self, t: f64) -> Option<f64> {
        let pf = self.pi_f.as_ref()?;
        node_at(&self.grid, t).map(|i| pf[i])
    }

    /// Writes `t,pi_g,pi_f,mu_hat_g,mu_hat_f`; absent columns are left empty.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# xi={}", sig17(self.meta.xi))?;
        writeln!(out, "# theta={}", sig17(self.meta.theta))?;
        writeln!(out, "# tau={}", sig17(self.meta.tau))?;
        writeln!(out, "# seed={}", self.meta.seed)?;
        writeln!(out, "t,pi_g,pi_f,mu_hat_g,mu_hat_f")?;
        let opt = |v: &Option<Vec<f64>>, i: usize| v.as_ref().map(|v| sig17(v[i])).unwrap_or_default();
        for i in 0..self.grid.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                sig17(self.grid[i]),
                sig17(self.pi_g[i]),
                opt(&self.pi_f, i),
                sig17(self.mu_hat_g[i]),
                opt(&self.mu_hat_f, i)
            )?;
        }
        Ok(())
    }
}

/// Observation-only filter trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationFilterPath {
    pub grid: Vec<f64>,
    pub pi_f: Vec<f64>,
    pub mu_hat_f: Vec<f64>,
}

impl ObservationFilterPath {
    pub fn pi_at(&self, t: f64) -> Option<f64> {
        node_at(&self.grid, t).map(|i| self.pi_f[i])
    }
}

fn default_node(scenario: &ScenarioPath) -> Result<Option<usize>> {
    match scenario.default_index() {
        None => Ok(None),
        Some(0) => Err(Error::Grid("default indicator is set at t = 0".into())),
        Some(i) if scenario.grid()[i] == scenario.tau() => Ok(Some(i)),
        Some(i) => Err(Error::Grid(format!(
            "default time {} is not a grid node (first defaulted node is {})",
            scenario.tau(),
            scenario.grid()[i]
        ))),
    }
}

/// Direct integration of the default-enlarged filter with the default
/// [`StepMethod`].
pub fn run_filter_g(params: &ModelParams, scenario: &ScenarioPath) -> Result<FilterPath> {
    run_filter_g_with(params, scenario, StepMethod::default())
}

pub fn run_filter_g_with(params: &ModelParams, scenario: &ScenarioPath, method: StepMethod) -> Result<FilterPath> {
    let tau_node = default_node(scenario)?;
    let grid = scenario.grid();
    let y = scenario.y_obs();
    let mut pi = Vec::with_capacity(grid.len());
    let mut p = params.pi0();
    pi.push(p);
    let mut jump = None;
    for i in 1..grid.len() {
        let dt = grid[i] - grid[i - 1];
        let dy = y[i] - y[i - 1];
        let defaulted = tau_node.is_some_and(|k| k < i);
        p = continuous_step(params, p, dy, dt, !defaulted, method);
        if tau_node == Some(i) {
            let after = jump_map(params, p);
            jump = Some(JumpRecord { index: i, before: p, after });
            p = after;
        }
        pi.push(p);
    }
    let mu_hat_g = pi.iter().map(|&p| hazard_estimate(params, p)).collect();
    Ok(FilterPath {
        grid: grid.to_vec(),
        pi_g: pi,
        mu_hat_g,
        pi_f: None,
        mu_hat_f: None,
        scheme: FilterScheme::DirectSde,
        jump,
        meta: PathMeta::of(scenario),
    })
}

/// Direct filter on the `coarsen(factor)` sub-grid of `scenario`, calling
/// `visit(fine_index, pi)` at every kept node without materialising the
/// coarse path.
pub(crate) fn visit_filter_g_coarse(
    params: &ModelParams,
    scenario: &ScenarioPath,
    factor: usize,
    method: StepMethod,
    mut visit: impl FnMut(usize, f64),
) -> Result<()> {
    if factor == 0 {
        return Err(Error::domain("factor", "must be >= 1"));
    }
    let tau_node = default_node(scenario)?;
    let grid = scenario.grid();
    let y = scenario.y_obs();
    let mut p = params.pi0();
    let mut prev = 0;
    visit(0, p);
    for i in scenario.coarse_nodes(factor).skip(1) {
        let defaulted = tau_node.is_some_and(|k| k <= prev);
        p = continuous_step(params, p, y[i] - y[prev], grid[i] - grid[prev], !defaulted, method);
        if tau_node == Some(i) {
            p = jump_map(params, p);
        }
        visit(i, p);
        prev = i;
    }
    Ok(())
}

/// Odds-ratio representation of the default-enlarged filter.
pub fn run_filter_odds(params: &ModelParams, scenario: &ScenarioPath) -> Result<FilterPath> {
    if params.pi0() >= 1.0 {
        return Err(Error::domain("pi0", "the odds ratio is undefined for pi0 = 1"));
    }
    let tau_node = default_node(scenario)?;
    let grid = scenario.grid();
    let y = scenario.y_obs();
    let (lambda, dm, beta) = (params.lambda(), params.delta_mu(), params.beta());
    let obs_coef = dm / (beta * beta);
    let qv_coef = 0.5 * (dm / beta) * (dm / beta);
    let log_jump = (params.mu2() / params.mu1()).ln();
    let prior_odds = params.pi0() / (1.0 - params.pi0());

    let posterior = |t: f64, log_z: f64, integral: f64| -> f64 {
        let weight = prior_odds + integral;
        if weight <= 0.0 {
            return 0.0;
        }
        let log_phi = lambda * t + log_z + weight.ln();
        logistic(log_phi)
    };

    let mut pi = Vec::with_capacity(grid.len());
    pi.push(params.pi0());
    let mut log_z = 0.0;
    let mut integral = 0.0;
    let mut jump = None;
    for i in 1..grid.len() {
        let t_prev = grid[i - 1];
        let dt = grid[i] - t_prev;
        let dy = y[i] - y[i - 1];
        let alive_before = !tau_node.is_some_and(|k| k < i);
        // Left-endpoint Riemann sum for int e^{-lambda s} / Z_s ds.
        integral += lambda * (-lambda * t_prev - log_z).exp() * dt;
        log_z += obs_coef * dy - qv_coef * dt;
        if alive_before {
            log_z -= dm * dt;
        }
        if tau_node == Some(i) {
            let before = posterior(grid[i], log_z, integral);
            log_z += log_jump;
            let after = posterior(grid[i], log_z, integral);
            jump = Some(JumpRecord { index: i, before, after });
        }
        pi.push(posterior(grid[i], log_z, integral));
    }
    let mu_hat_g = pi.iter().map(|&p| hazard_estimate(params, p)).collect();
    Ok(FilterPath {
        grid: grid.to_vec(),
        pi_g: pi,
        mu_hat_g,
        pi_f: None,
        mu_hat_f: None,
        scheme: FilterScheme::OddsRatio,
        jump,
        meta: PathMeta::of(scenario),
    })
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Observation-only filter; ignores the default indicator entirely.
pub fn run_filter_f(params: &ModelParams, scenario: &ScenarioPath) -> Result<ObservationFilterPath> {
    run_filter_f_with(params, scenario, StepMethod::default())
}

pub fn run_filter_f_with(
    params: &ModelParams,
    scenario: &ScenarioPath,
    method: StepMethod,
) -> Result<ObservationFilterPath> {
    let grid = scenario.grid();
    let y = scenario.y_obs();
    let mut pi = Vec::with_capacity(grid.len());
    let mut p = params.pi0();
    pi.push(p);
    for i in 1..grid.len() {
        p = continuous_step(params, p, y[i] - y[i - 1], grid[i] - grid[i - 1], false, method);
        pi.push(p);
    }
    let mu_hat_f = pi.iter().map(|&p| hazard_estimate(params, p)).collect();
    Ok(ObservationFilterPath {
        grid: grid.to_vec(),
        pi_f: pi,
        mu_hat_f,
    })
}

/// Direct default-enlarged filter together with the observation-only filter
/// on the same scenario.
pub fn run_filters(params: &ModelParams, scenario: &ScenarioPath) -> Result<FilterPath> {
    let mut g = run_filter_g(params, scenario)?;
    let f = run_filter_f(params, scenario)?;
    g.pi_f = Some(f.pi_f);
    g.mu_hat_f = Some(f.mu_hat_f);
    Ok(g)
}
