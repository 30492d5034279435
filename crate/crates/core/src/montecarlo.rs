//! Monte Carlo oracles for the closed forms and the filters.
//!
//! Path `i` of an experiment with master seed `s` is driven by
//! `derive_seed(s, i)`. Paths are evaluated in parallel and collected in index
//! order, and every statistic is reduced sequentially with compensated
//! summation, so a report depends on `(inputs, seed)` only.

use std::io::Write;

use rayon::prelude::*;

use crate::analytics::{survival, InfoState};
use crate::error::{Error, Result};
use crate::filters::{run_filter_f_with, run_filter_g_with, visit_filter_g_coarse, StepMethod};
use crate::format::sig17;
use crate::model::{node_at, simulate_scenario, simulate_with_latent, Latent};
use crate::params::ModelParams;
use crate::pricing::{ContractKind, ContractSpec, DiscountCurve, Schedule};
use crate::quadrature::integrate;
use crate::rng::{derive_seed, stream, StreamKind};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sample mean and unbiased variance, two-pass.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut s = KahanSum::default();
    for &x in xs {
        s.add(x);
    }
    let mean = s.value() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let mut ss = KahanSum::default();
    for &x in xs {
        ss.add((x - mean) * (x - mean));
    }
    (mean, ss.value() / (n - 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub label: String,
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl McReport {
    pub fn from_samples(label: impl Into<String>, samples: &[f64], seed: u64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::domain("n", "a report needs at least 2 samples"));
        }
        let (mean, var) = mean_and_variance(samples);
        Ok(Self {
            label: label.into(),
            estimate: mean,
            std_error: (var / samples.len() as f64).sqrt(),
            n_samples: samples.len(),
            seed,
        })
    }

    /// `|estimate - comparator| <= k SE + budget`.
    pub fn agrees_with(&self, comparator: f64, k: f64, budget: f64) -> bool {
        (self.estimate - comparator).abs() <= k * self.std_error + budget
    }
}

pub const REPORT_HEADER: &str = "label,estimate,std_error,n,seed,comparator,pass";

/// One `label,estimate,std_error,n,seed,comparator,pass` row.
pub fn write_report_row<W: Write>(out: &mut W, report: &McReport, comparator: f64, pass: bool) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        report.label,
        sig17(report.estimate),
        sig17(report.std_error),
        report.n_samples,
        report.seed,
        sig17(comparator),
        pass
    )
}

fn par_paths<T, F>(n: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n as u64).into_par_iter().map(|i| f(derive_seed(seed, i))).collect()
}

fn at_least(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::domain("n", format!("{n} is below the minimum of {min}")));
    }
    Ok(())
}

/// `P(tau > T)` from the latent pair alone.
pub fn mc_unconditional_survival(params: &ModelParams, horizon: f64, n: usize, seed: u64) -> Result<McReport> {
    at_least(n, 1000)?;
    if !(horizon >= 0.0) {
        return Err(Error::domain("horizon", format!("{horizon} must be >= 0")));
    }
    let hits = par_paths(n, seed, |s| {
        let latent = Latent::sample(params, &mut stream(s, StreamKind::Latent));
        Ok(f64::from(u8::from(latent.default_time(params) > horizon)))
    })?;
    McReport::from_samples(format!("survival T={horizon}"), &hits, seed)
}

fn discounted_premium(discount: &DiscountCurve, premium: &Schedule, end: f64) -> Result<f64> {
    if end <= 0.0 {
        return Ok(0.0);
    }
    match (discount, premium) {
        (_, Schedule::Zero) => Ok(0.0),
        (DiscountCurve::Flat(r), Schedule::Constant(p)) => Ok(p * (1.0 - (-r * end).exp()) / r),
        _ => integrate(|s| discount.discount(0.0, s).unwrap_or(f64::NAN) * premium.at(s), 0.0, end),
    }
}

/// Discounted payoff at time 0 averaged over exact default times. For a CDS
/// the payoff is protection minus premium.
pub fn mc_price_check(params: &ModelParams, contract: &ContractSpec, n: usize, seed: u64) -> Result<McReport> {
    at_least(n, 2)?;
    let big_t = contract.maturity;
    let disc_t = contract.discount.discount(0.0, big_t)?;
    let payoffs = par_paths(n, seed, |s| {
        let latent = Latent::sample(params, &mut stream(s, StreamKind::Latent));
        let tau = latent.default_time(params);
        let end = tau.min(big_t);
        let premium = discounted_premium(&contract.discount, &contract.premium, end)?;
        let protection = if tau <= big_t {
            contract.discount.discount(0.0, tau)? * contract.recovery.at(tau)
        } else {
            0.0
        };
        let face = if tau > big_t { contract.face * disc_t } else { 0.0 };
        Ok(match contract.kind {
            ContractKind::Cds => protection - premium,
            _ => face + premium + protection,
        })
    })?;
    McReport::from_samples(format!("price {:?} T={big_t}", contract.kind), &payoffs, seed)
}

/// Filter values `(pi_t, H_t)` sampled on many paths at fixed times, for the
/// base step and for coarsened copies of every path.
#[derive(Debug, Clone)]
pub struct FilterStudy {
    pub times: Vec<f64>,
    /// Step of each level.
    pub dts: Vec<f64>,
    pub seed: u64,
    pub pi0: f64,
    pub lambda: f64,
    /// `samples[level][time][path] = (pi, defaulted)`.
    samples: Vec<Vec<Vec<(f64, bool)>>>,
}

/// Simulates `n` scenarios to `max(times)` at step `dt` and filters each
/// one at step `dt * factor` for every factor in `levels`. Coarse levels
/// subsample the fine path, so levels share their random numbers.
pub fn filter_study(
    params: &ModelParams,
    times: &[f64],
    n: usize,
    dt: f64,
    levels: &[usize],
    method: StepMethod,
    seed: u64,
) -> Result<FilterStudy> {
    at_least(n, 2)?;
    if times.is_empty() || levels.is_empty() {
        return Err(Error::domain("times", "need at least one time and one level"));
    }
    let horizon = times.iter().cloned().fold(f64::NAN, f64::max);
    if !(times.iter().all(|&t| t > 0.0)) {
        return Err(Error::domain("times", "evaluation times must be > 0"));
    }
    let per_path = par_paths(n, seed, |s| {
        let fine = simulate_scenario(params, horizon, dt, s)?;
        let h = fine.h_ind();
        let targets = times
            .iter()
            .map(|&t| fine.index_at(t).ok_or_else(|| Error::Grid(format!("time {t} is outside the grid"))))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(levels.len());
        for &factor in levels {
            // Each slot ends up holding the last kept node at or before its time.
            let mut row = vec![(f64::NAN, false); times.len()];
            visit_filter_g_coarse(params, &fine, factor, method, |i, pi| {
                for (slot, &k) in row.iter_mut().zip(&targets) {
                    if i <= k {
                        *slot = (pi, h[i]);
                    }
                }
            })?;
            out.push(row);
        }
        Ok(out)
    })?;
    let mut samples = vec![vec![Vec::with_capacity(n); times.len()]; levels.len()];
    for path in per_path {
        for (l, row) in path.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                samples[l][k].push(v);
            }
        }
    }
    Ok(FilterStudy {
        times: times.to_vec(),
        dts: levels.iter().map(|&f| dt * f as f64).collect(),
        seed,
        pi0: params.pi0(),
        lambda: params.lambda(),
        samples,
    })
}

impl FilterStudy {
    pub fn n_paths(&self) -> usize {
        self.samples[0][0].len()
    }

    /// `E[survival_partial(t, T, pi_t, H_t)]` per level and time.
    pub fn tower(&self, params: &ModelParams, maturity: f64) -> Result<Vec<Vec<McReport>>> {
        self.reports("tower", |t, pi, h| {
            Ok(survival(params, &InfoState::partial(t, maturity, h, pi)?))
        })
    }

    /// `E[pi_t]` per level and time.
    pub fn filter_mean(&self) -> Result<Vec<Vec<McReport>>> {
        self.reports("filter_mean", |_, pi, _| Ok(pi))
    }

    /// `1 - (1 - pi0) e^{-lambda t}`.
    pub fn prior_cdf(&self, t: f64) -> f64 {
        1.0 - (1.0 - self.pi0) * (-self.lambda * t).exp()
    }

    fn reports<F>(&self, what: &str, f: F) -> Result<Vec<Vec<McReport>>>
    where
        F: Fn(f64, f64, bool) -> Result<f64>,
    {
        let mut out = Vec::with_capacity(self.dts.len());
        for (l, level) in self.samples.iter().enumerate() {
            let mut row = Vec::with_capacity(self.times.len());
            for (k, vals) in level.iter().enumerate() {
                let t = self.times[k];
                let xs = vals.iter().map(|&(pi, h)| f(t, pi, h)).collect::<Result<Vec<_>>>()?;
                let label = format!("{what} t={t} dt={}", self.dts[l]);
                row.push(McReport::from_samples(label, &xs, self.seed)?);
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// Mean of the partial-information survival at `t` over filtered paths.
pub fn mc_tower_check(
    params: &ModelParams,
    t: f64,
    maturity: f64,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<McReport> {
    if !(t > 0.0 && t < maturity) {
        return Err(Error::domain("t", format!("{t} must lie in (0, {maturity})")));
    }
    let study = filter_study(params, &[t], n, dt, &[1], StepMethod::default(), seed)?;
    Ok(study.tower(params, maturity)?.remove(0).remove(0))
}

/// Mean of `pi_t` over filtered paths at each of `times`.
pub fn mc_filter_mean(params: &ModelParams, times: &[f64], n: usize, dt: f64, seed: u64) -> Result<Vec<McReport>> {
    let study = filter_study(params, times, n, dt, &[1], StepMethod::default(), seed)?;
    Ok(study.filter_mean()?.remove(0))
}

/// Straight-line fit `e(dt) = e0 + slope * dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasFit {
    pub intercept: f64,
    pub slope: f64,
}

impl BiasFit {
    /// Least squares through `(dt_k, e_k)`.
    pub fn fit(dts: &[f64], errors: &[f64]) -> Result<Self> {
        if dts.len() != errors.len() || dts.len() < 2 {
            return Err(Error::domain("dts", "need >= 2 matching (dt, error) pairs"));
        }
        let n = dts.len() as f64;
        let mx = dts.iter().sum::<f64>() / n;
        let my = errors.iter().sum::<f64>() / n;
        let sxx: f64 = dts.iter().map(|x| (x - mx) * (x - mx)).sum();
        if sxx == 0.0 {
            return Err(Error::domain("dts", "steps must differ"));
        }
        let sxy: f64 = dts.iter().zip(errors).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        Ok(Self {
            intercept: my - slope * mx,
            slope,
        })
    }

    /// Bias allowance `|slope| * dt`.
    pub fn budget(&self, dt: f64) -> f64 {
        self.slope.abs() * dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseRow {
    pub t: f64,
    pub mse_g: f64,
    pub mse_f: f64,
    /// Standard error of the paired difference `mse_g - mse_f`.
    pub se_diff: f64,
    pub n: usize,
}

impl MseRow {
    /// `mse_g <= mse_f + k se_diff`.
    pub fn ordered(&self, k: f64) -> bool {
        self.mse_g <= self.mse_f + k * self.se_diff
    }
}

/// Mean squared error of both hazard estimates against the true hazard.
pub fn mc_mse_compare(params: &ModelParams, times: &[f64], n: usize, dt: f64, seed: u64) -> Result<Vec<MseRow>> {
    at_least(n, 2)?;
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::domain("times", "need evaluation times > 0"));
    }
    let horizon = times.iter().cloned().fold(f64::NAN, f64::max);
    let method = StepMethod::default();
    let per_path = par_paths(n, seed, |s| {
        let path = simulate_scenario(params, horizon, dt, s)?;
        let g = run_filter_g_with(params, &path, method)?;
        let f = run_filter_f_with(params, &path, method)?;
        Ok(times
            .iter()
            .map(|&t| {
                let i = node_at(&g.grid, t).expect("times are inside the grid");
                let mu = path.mu_path()[i];
                ((g.mu_hat_g[i] - mu).powi(2), (f.mu_hat_f[i] - mu).powi(2))
            })
            .collect::<Vec<_>>())
    })?;
    let mut rows = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let eg: Vec<f64> = per_path.iter().map(|r| r[k].0).collect();
        let ef: Vec<f64> = per_path.iter().map(|r| r[k].1).collect();
        let diff: Vec<f64> = eg.iter().zip(&ef).map(|(a, b)| a - b).collect();
        let (_, var) = mean_and_variance(&diff);
        rows.push(MseRow {
            t,
            mse_g: mean_and_variance(&eg).0,
            mse_f: mean_and_variance(&ef).0,
            se_diff: (var / n as f64).sqrt(),
            n,
        });
    }
    Ok(rows)
}

/// Change point at 17.51 with a level that puts the default at 20.46 when
/// `mu1 = 0.02, mu2 = 0.12`.
pub const REFERENCE_LATENT: Latent = Latent { xi: 17.51, theta: 0.7042 };

/// How the latent pair is chosen across the paths of a sensitivity study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatentMode {
    /// The same given pair on every path; only the observation noise varies.
    Pinned(Latent),
    /// One pair drawn from the master seed (redrawn until `0 < 2 xi <= horizon`)
    /// and shared by every path.
    SharedDraw,
    /// An independent pair per path.
    PerPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityConfig {
    pub thresholds: (f64, f64),
    /// Evaluation times as multiples of `xi`.
    pub multiples: (f64, f64),
    pub n: usize,
    pub dt: f64,
    pub horizon: f64,
    pub latent: LatentMode,
    pub seed: u64,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self {
            thresholds: (0.3, 0.95),
            multiples: (0.5, 2.0),
            n: 1000,
            dt: 1e-2,
            horizon: 60.0,
            latent: LatentMode::Pinned(REFERENCE_LATENT),
            seed: 18,
        }
    }
}

/// A path left out of a sensitivity study.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipNote {
    pub path: usize,
    pub xi: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityResult {
    pub beta: f64,
    pub mu2: f64,
    pub multiples: (f64, f64),
    /// `pi < thresholds.0` at the early time, per kept path.
    pub below: Vec<bool>,
    /// `pi > thresholds.1` at the late time, per kept path.
    pub above: Vec<bool>,
}

impl SensitivityResult {
    pub fn n_paths(&self) -> usize {
        self.below.len()
    }

    pub fn fraction_below(&self) -> f64 {
        fraction(&self.below)
    }

    pub fn fraction_above(&self) -> f64 {
        fraction(&self.above)
    }
}

fn fraction(xs: &[bool]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().filter(|&&b| b).count() as f64 / xs.len() as f64
}

/// Mean and standard error of `a_i - b_i` over paired indicators.
pub fn paired_difference(a: &[bool], b: &[bool]) -> Result<(f64, f64)> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::domain("paths", "paired samples need equal length >= 2"));
    }
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| f64::from(u8::from(x)) - f64::from(u8::from(y)))
        .collect();
    let (m, v) = mean_and_variance(&d);
    Ok((m, (v / d.len() as f64).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub results: Vec<SensitivityResult>,
    pub skipped: Vec<SkipNote>,
}

/// Threshold fractions of the filter at `xi * multiples.0` and
/// `xi * multiples.1` for each parameter variant. Variants share the latent
/// pair and the observation noise of every path.
pub fn sensitivity_study(variants: &[ModelParams], cfg: &SensitivityConfig) -> Result<SensitivityReport> {
    at_least(cfg.n, 1)?;
    let Some(first) = variants.first() else {
        return Err(Error::domain("variants", "need at least one parameter set"));
    };
    let (m_lo, m_hi) = cfg.multiples;
    let fixed = match cfg.latent {
        LatentMode::Pinned(l) => Some(l),
        LatentMode::SharedDraw => {
            let mut rng = stream(derive_seed(cfg.seed, u64::MAX), StreamKind::Latent);
            let mut draw = Latent::sample(first, &mut rng);
            let mut tries = 0;
            while !(draw.xi > 0.0 && draw.xi * m_hi <= cfg.horizon) {
                draw = Latent::sample(first, &mut rng);
                tries += 1;
                if tries > 100_000 {
                    return Err(Error::domain("horizon", "no change point fits inside the horizon"));
                }
            }
            Some(draw)
        }
        LatentMode::PerPath => None,
    };

    let mut skipped = Vec::new();
    let mut kept = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let s = derive_seed(cfg.seed, i as u64);
        let latent = fixed.unwrap_or_else(|| Latent::sample(first, &mut stream(s, StreamKind::Latent)));
        if latent.xi <= 0.0 {
            skipped.push(SkipNote {
                path: i,
                xi: latent.xi,
                reason: "change point at time zero",
            });
        } else if latent.xi * m_hi > cfg.horizon {
            skipped.push(SkipNote {
                path: i,
                xi: latent.xi,
                reason: "late evaluation time exceeds the horizon",
            });
        } else {
            kept.push((s, latent));
        }
    }

    let mut results = Vec::with_capacity(variants.len());
    for params in variants {
        let flags = kept
            .par_iter()
            .map(|&(s, latent)| {
                let path = simulate_with_latent(params, latent, cfg.horizon, cfg.dt, s)?;
                let g = run_filter_g_with(params, &path, StepMethod::default())?;
                let early = g.pi_at(latent.xi * m_lo).expect("inside grid");
                let late = g.pi_at(latent.xi * m_hi).expect("inside grid");
                Ok((early < cfg.thresholds.0, late > cfg.thresholds.1))
            })
            .collect::<Result<Vec<_>>>()?;
        results.push(SensitivityResult {
            beta: params.beta(),
            mu2: params.mu2(),
            multiples: cfg.multiples,
            below: flags.iter().map(|f| f.0).collect(),
            above: flags.iter().map(|f| f.1).collect(),
        });
    }
    Ok(SensitivityReport { results, skipped })
}
