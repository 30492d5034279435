//! Exact simulation of the change point, the default time and the noisy
//! hazard observation.
//!
//! The default time is the first passage of the piecewise-linear cumulative
//! hazard through an independent unit-exponential level, so it is obtained by
//! inverting the hazard analytically rather than by detecting a crossing on a
//! grid. Both event times are inserted into the simulation grid as extra nodes.

use std::io::Write;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::format::sig17;
use crate::params::ModelParams;
use crate::rng::{stream, StreamKind};

/// Draws `xi`: zero with probability `pi0`, otherwise `Exp(lambda)`.
pub fn sample_change_point<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> f64 {
    let atom: f64 = rng.random();
    let e: f64 = rng.sample(Exp1);
    if atom < params.pi0() {
        0.0
    } else {
        e / params.lambda()
    }
}

/// `Lambda_t = mu1 * min(t, xi) + mu2 * (t - xi)^+`.
pub fn cumulative_hazard(params: &ModelParams, xi: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain("t", format!("{t} must be >= 0")));
    }
    if !(xi >= 0.0) {
        return Err(Error::domain("xi", format!("{xi} must be >= 0")));
    }
    Ok(if t < xi {
        params.mu1() * t
    } else {
        params.mu1() * xi + params.mu2() * (t - xi)
    })
}

/// First time the cumulative hazard reaches `theta`.
pub fn sample_default_time(params: &ModelParams, xi: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::domain("theta", format!("{theta} must be > 0")));
    }
    if !(xi >= 0.0) {
        return Err(Error::domain("xi", format!("{xi} must be >= 0")));
    }
    let before = params.mu1() * xi;
    Ok(if theta <= before {
        theta / params.mu1()
    } else {
        xi + (theta - before) / params.mu2()
    })
}

/// The latent pair behind one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Latent {
    pub xi: f64,
    pub theta: f64,
}

impl Latent {
    pub fn sample<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Self {
        let xi = sample_change_point(params, rng);
        let theta: f64 = rng.sample(Exp1);
        // Exp1 can return exactly 0 with vanishing probability.
        let theta = if theta > 0.0 { theta } else { f64::MIN_POSITIVE };
        Self { xi, theta }
    }

    pub fn default_time(&self, params: &ModelParams) -> f64 {
        sample_default_time(params, self.xi, self.theta).expect("latent theta is positive")
    }
}

/// Origin of a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// `k * dt` (or the horizon for the last node).
    Uniform(usize),
    ChangePoint,
    Default,
}

/// One simulated world on a uniform grid with the change point and the
/// default time inserted as exact nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPath {
    grid: Vec<f64>,
    kinds: Vec<NodeKind>,
    xi: f64,
    theta: f64,
    tau: f64,
    brownian: Vec<f64>,
    y_obs: Vec<f64>,
    h_ind: Vec<bool>,
    mu_path: Vec<f64>,
    dt: f64,
    seed: u64,
}

impl ScenarioPath {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// May exceed the horizon.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn brownian(&self) -> &[f64] {
        &self.brownian
    }

    /// Drift-removed observation `Y_t = hat Y_t - mu1 t`.
    pub fn y_obs(&self) -> &[f64] {
        &self.y_obs
    }

    pub fn h_ind(&self) -> &[bool] {
        &self.h_ind
    }

    pub fn mu_path(&self) -> &[f64] {
        &self.mu_path
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> f64 {
        *self.grid.last().expect("grid is never empty")
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the node carrying the default, if it happened within the horizon.
    pub fn default_index(&self) -> Option<usize> {
        self.h_ind.iter().position(|&h| h)
    }

    /// Index of the last node with `t_i <= t` (within a relative slack of 1e-9).
    pub fn index_at(&self, t: f64) -> Option<usize> {
        node_at(&self.grid, t)
    }

    /// Keeps every `factor`-th uniform node together with all event nodes and
    /// the final node. Path values are subsampled, so the coarse path shares
    /// its Brownian motion with `self`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::domain("factor", "must be >= 1"));
        }
        let keep: Vec<usize> = self.coarse_nodes(factor).collect();
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Ok(Self {
            grid: pick(&self.grid),
            kinds: keep.iter().map(|&i| self.kinds[i]).collect(),
            xi: self.xi,
            theta: self.theta,
            tau: self.tau,
            brownian: pick(&self.brownian),
            y_obs: pick(&self.y_obs),
            h_ind: keep.iter().map(|&i| self.h_ind[i]).collect(),
            mu_path: pick(&self.mu_path),
            dt: self.dt * factor as f64,
            seed: self.seed,
        })
    }

    /// Fine-grid indices kept by `coarsen(factor)`: every `factor`-th uniform
    /// node, the last node, and all event nodes.
    pub(crate) fn coarse_nodes(&self, factor: usize) -> impl Iterator<Item = usize> + '_ {
        let last = self.grid.len() - 1;
        (0..self.grid.len()).filter(move |&i| match self.kinds[i] {
            NodeKind::Uniform(k) => k % factor == 0 || i == last,
            _ => true,
        })
    }

    /// Writes `t,B,Y,H,mu` preceded by `# xi=`, `# theta=`, `# tau=`, `# seed=`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# xi={}", sig17(self.xi))?;
        writeln!(out, "# theta={}", sig17(self.theta))?;
        writeln!(out, "# tau={}", sig17(self.tau))?;
        writeln!(out, "# seed={}", self.seed)?;
        writeln!(out, "t,B,Y,H,mu")?;
        for i in 0..self.grid.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                sig17(self.grid[i]),
                sig17(self.brownian[i]),
                sig17(self.y_obs[i]),
                u8::from(self.h_ind[i]),
                sig17(self.mu_path[i])
            )?;
        }
        Ok(())
    }
}

pub(crate) fn node_at(grid: &[f64], t: f64) -> Option<usize> {
    let slack = 1e-9 * t.abs().max(1.0);
    let n = grid.partition_point(|&g| g <= t + slack);
    n.checked_sub(1)
}

fn validate_grid_inputs(horizon: f64, dt: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain("horizon", format!("{horizon} must be finite and > 0")));
    }
    if !(dt > 0.0 && dt <= horizon) {
        return Err(Error::domain("dt", format!("{dt} must lie in (0, horizon]")));
    }
    Ok(())
}

/// Simulates a scenario; a pure function of `(params, horizon, dt, seed)`.
pub fn simulate_scenario(params: &ModelParams, horizon: f64, dt: f64, seed: u64) -> Result<ScenarioPath> {
    validate_grid_inputs(horizon, dt)?;
    let latent = Latent::sample(params, &mut stream(seed, StreamKind::Latent));
    simulate_with_latent(params, latent, horizon, dt, seed)
}

/// Simulates the observation noise for a given latent pair. Two calls with the
/// same `seed` share the Brownian increments on every uniform node whatever
/// the latent pair or the hazard levels are.
pub fn simulate_with_latent(
    params: &ModelParams,
    latent: Latent,
    horizon: f64,
    dt: f64,
    seed: u64,
) -> Result<ScenarioPath> {
    validate_grid_inputs(horizon, dt)?;
    if !(latent.xi >= 0.0) {
        return Err(Error::domain("xi", format!("{} must be >= 0", latent.xi)));
    }
    let tau = sample_default_time(params, latent.xi, latent.theta)?;
    let xi = latent.xi;

    let steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut uniform: Vec<f64> = (0..=steps).map(|k| (k as f64 * dt).min(horizon)).collect();
    uniform[steps] = horizon;

    let mut noise = stream(seed, StreamKind::Noise);
    let mut b_uniform = Vec::with_capacity(steps + 1);
    b_uniform.push(0.0);
    let mut b = 0.0;
    for k in 0..steps {
        let z: f64 = noise.sample(StandardNormal);
        b += (uniform[k + 1] - uniform[k]).sqrt() * z;
        b_uniform.push(b);
    }

    // One bridge normal per event, drawn unconditionally so the stream stays aligned.
    let mut bridge = stream(seed, StreamKind::Bridge);
    let z_xi: f64 = bridge.sample(StandardNormal);
    let z_tau: f64 = bridge.sample(StandardNormal);
    let mut events: Vec<(f64, NodeKind, f64)> = Vec::with_capacity(2);
    for (t, kind, z) in [(xi, NodeKind::ChangePoint, z_xi), (tau, NodeKind::Default, z_tau)] {
        if t > 0.0 && t < horizon && uniform.binary_search_by(|u| u.total_cmp(&t)).is_err() {
            events.push((t, kind, z));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    // tau == xi has probability zero; keep a single node (the default) if it happens.
    events.dedup_by(|later, earlier| {
        if later.0 == earlier.0 {
            earlier.1 = NodeKind::Default;
            true
        } else {
            false
        }
    });

    let n_nodes = uniform.len() + events.len();
    let mut grid = Vec::with_capacity(n_nodes);
    let mut kinds = Vec::with_capacity(n_nodes);
    let mut brownian = Vec::with_capacity(n_nodes);
    let mut ev = events.iter().peekable();
    for k in 0..=steps {
        if k > 0 {
            // Bridge the events inside (t_{k-1}, t_k) sequentially.
            let (mut left_t, mut left_b) = (uniform[k - 1], b_uniform[k - 1]);
            let (right_t, right_b) = (uniform[k], b_uniform[k]);
            while let Some(&&(s, kind, z)) = ev.peek() {
                if s >= right_t {
                    break;
                }
                let span = right_t - left_t;
                let w = (s - left_t) / span;
                let mean = left_b + w * (right_b - left_b);
                let var = (s - left_t) * (right_t - s) / span;
                let bs = mean + var.max(0.0).sqrt() * z;
                grid.push(s);
                kinds.push(kind);
                brownian.push(bs);
                left_t = s;
                left_b = bs;
                ev.next();
            }
        }
        grid.push(uniform[k]);
        kinds.push(NodeKind::Uniform(k));
        brownian.push(b_uniform[k]);
    }

    let dm = params.delta_mu();
    let beta = params.beta();
    let y_obs = grid
        .iter()
        .zip(&brownian)
        .map(|(&t, &b)| dm * (t - xi).max(0.0) + beta * b)
        .collect();
    let h_ind = grid.iter().map(|&t| t >= tau).collect();
    let mu_path = grid
        .iter()
        .map(|&t| if t < xi { params.mu1() } else { params.mu2() })
        .collect();

    Ok(ScenarioPath {
        grid,
        kinds,
        xi,
        theta: latent.theta,
        tau,
        brownian,
        y_obs,
        h_ind,
        mu_path,
        dt,
        seed,
    })
}

/// Scenario built from an explicit observation record, for replaying
/// externally supplied data through the filters.
pub fn scenario_from_observations(
    params: &ModelParams,
    grid: Vec<f64>,
    y_obs: Vec<f64>,
    latent: Latent,
) -> Result<ScenarioPath> {
    if grid.len() < 2 || grid.len() != y_obs.len() {
        return Err(Error::domain("grid", "needs >= 2 nodes and one observation per node"));
    }
    if grid[0] != 0.0 || y_obs[0] != 0.0 {
        return Err(Error::domain("grid", "must start at t = 0 with Y_0 = 0"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("grid", "must be strictly increasing"));
    }
    let tau = sample_default_time(params, latent.xi, latent.theta)?;
    let beta = params.beta();
    let dm = params.delta_mu();
    let brownian = grid
        .iter()
        .zip(&y_obs)
        .map(|(&t, &y)| (y - dm * (t - latent.xi).max(0.0)) / beta)
        .collect();
    let kinds = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if t == tau {
                NodeKind::Default
            } else if t == latent.xi {
                NodeKind::ChangePoint
            } else {
                NodeKind::Uniform(i)
            }
        })
        .collect();
    let h_ind = grid.iter().map(|&t| t >= tau).collect();
    let mu_path = grid
        .iter()
        .map(|&t| if t < latent.xi { params.mu1() } else { params.mu2() })
        .collect();
    let dt = grid[1] - grid[0];
    Ok(ScenarioPath {
        grid,
        kinds,
        xi: latent.xi,
        theta: latent.theta,
        tau,
        brownian,
        y_obs,
        h_ind,
        mu_path,
        dt,
        seed: 0,
    })
}
