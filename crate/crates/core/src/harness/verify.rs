//! The acceptance suite: each criterion returns rows in the common report
//! layout plus an overall verdict.

use std::io::Write;

use crate::analytics::{
    density, generator_residual_with_step, interior_grid, survival, survival_given_level, InfoState, Level,
};
use crate::error::Result;
use crate::filters::{jump_map, run_filter_g_with, run_filter_odds, StepMethod};
use crate::model::simulate_scenario;
use crate::montecarlo::{
    filter_study, mc_mse_compare, mc_price_check, mc_unconditional_survival, paired_difference, sensitivity_study,
    write_report_row, BiasFit, McReport, SensitivityConfig, REPORT_HEADER,
};
use crate::params::{ModelParams, Preset};
use crate::pricing::{price_dzcb, ContractSpec, DiscountCurve};
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub report: McReport,
    pub comparator: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub rows: Vec<Row>,
}

impl CriterionOutcome {
    pub fn pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }

    /// One line: `criterion <id> <name>: PASS|FAIL (<rows>)`.
    pub fn summary(&self) -> String {
        let detail: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                format!(
                    "{}={:.6e} vs {:.6e}{}",
                    r.report.label,
                    r.report.estimate,
                    r.comparator,
                    if r.pass { "" } else { " FAIL" }
                )
            })
            .collect();
        format!(
            "criterion {:>2} {}: {} ({})",
            self.id,
            self.name,
            if self.pass() { "PASS" } else { "FAIL" },
            detail.join("; ")
        )
    }
}

/// A deterministic measurement in report form (zero standard error).
fn metric(label: impl Into<String>, value: f64, n: usize, seed: u64) -> McReport {
    McReport {
        label: label.into(),
        estimate: value,
        std_error: 0.0,
        n_samples: n,
        seed,
    }
}

fn row(report: McReport, comparator: f64, pass: bool) -> Row {
    Row {
        report,
        comparator,
        pass,
    }
}

fn scaled(n: usize, scale: f64, min: usize) -> usize {
    ((n as f64 * scale).round() as usize).max(min)
}

const R: f64 = 0.0263;

fn table2() -> ModelParams {
    Preset::CreditPricing.params()
}

fn s0(params: &ModelParams, maturity: f64) -> Result<f64> {
    Ok(survival(params, &InfoState::partial(0.0, maturity, false, params.pi0())?))
}

pub fn survival_closed_form(scale: f64, seed: u64) -> Result<CriterionOutcome> {
    let p = table2();
    let n = scaled(1_000_000, scale, 1000);
    let rep = mc_unconditional_survival(&p, 10.0, n, seed)?;
    let exact = s0(&p, 10.0)?;
    let pass = rep.agrees_with(exact, 3.0, 0.0);
    Ok(CriterionOutcome {
        id: 1,
        name: "survival closed form vs Monte Carlo",
        rows: vec![row(rep, exact, pass)],
    })
}

pub fn dzcb_prices(scale: f64, seed: u64) -> Result<CriterionOutcome> {
    let p = table2();
    let n = scaled(1_000_000, scale, 1000);
    let st = InfoState::partial(0.0, 10.0, false, 0.0)?;
    let mut rows = Vec::new();
    for (k, (delta, reference, tol)) in [(0.0, 0.3350, 5e-4), (0.5, 0.5832, 1e-3)].into_iter().enumerate() {
        let closed = price_dzcb(&p, R, delta, &st)?;
        let contract = ContractSpec::zcb(10.0, delta, DiscountCurve::Flat(R))?;
        let mut rep = mc_price_check(&p, &contract, n, derive_seed(seed, k as u64))?;
        rep.label = format!("dzcb_mc delta={delta}");
        let pass = rep.agrees_with(closed, 3.0, 0.0);
        rows.push(row(rep, closed, pass));
        rows.push(row(
            metric(format!("dzcb_closed delta={delta}"), closed, 1, seed),
            reference,
            (closed - reference).abs() <= tol,
        ));
    }
    Ok(CriterionOutcome {
        id: 2,
        name: "DZCB closed form vs Monte Carlo",
        rows,
    })
}

/// Criteria 3 and 4 share one set of filtered paths.
pub fn tower_and_filter_mean(scale: f64, seed: u64) -> Result<(CriterionOutcome, CriterionOutcome)> {
    let p = table2();
    let n = scaled(100_000, scale, 100);
    let tower_times = [2.5, 5.0, 7.5];
    let mean_times = [1.0, 2.0, 4.0, 8.0];
    let times: Vec<f64> = tower_times.iter().chain(&mean_times).copied().collect();
    let dt = 1e-3;
    let levels = [1, 2, 4];
    let study = filter_study(&p, &times, n, dt, &levels, StepMethod::default(), seed)?;
    let exact = s0(&p, 10.0)?;

    let tower = study.tower(&p, 10.0)?;
    let mut rows3 = Vec::new();
    for (k, _) in tower_times.iter().enumerate() {
        let errors: Vec<f64> = tower.iter().map(|lvl| lvl[k].estimate - exact).collect();
        let fit = BiasFit::fit(&study.dts, &errors)?;
        let budget = fit.budget(dt);
        let rep = tower[0][k].clone();
        let pass = rep.agrees_with(exact, 3.0, budget);
        rows3.push(row(rep, exact, pass));
    }

    let means = study.filter_mean()?;
    let mut rows4 = Vec::new();
    for (k, &t) in mean_times.iter().enumerate() {
        let rep = means[0][tower_times.len() + k].clone();
        let target = study.prior_cdf(t);
        let pass = rep.agrees_with(target, 3.0, 0.0);
        rows4.push(row(rep, target, pass));
    }
    Ok((
        CriterionOutcome {
            id: 3,
            name: "tower property of the partial-information survival",
            rows: rows3,
        },
        CriterionOutcome {
            id: 4,
            name: "filter mean equals the prior change-point law",
            rows: rows4,
        },
    ))
}

pub fn scheme_equivalence(scale: f64, seed: u64) -> Result<CriterionOutcome> {
    let p = table2();
    let n = scaled(100, scale, 4);
    let dt = 1e-4;
    let mut fine_gap: f64 = 0.0;
    let mut coarse_gap: f64 = 0.0;
    for i in 0..n {
        let path = simulate_scenario(&p, 10.0, dt, derive_seed(seed, i as u64))?;
        let coarse = path.coarsen(2)?;
        for (sc, acc) in [(&path, &mut fine_gap), (&coarse, &mut coarse_gap)] {
            let g = run_filter_g_with(&p, sc, StepMethod::default())?;
            let o = run_filter_odds(&p, sc)?;
            let gap = g.pi_g.iter().zip(&o.pi_g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            *acc = acc.max(gap);
        }
    }
    let ratio = coarse_gap / fine_gap;
    Ok(CriterionOutcome {
        id: 5,
        name: "direct scheme vs odds-ratio representation",
        rows: vec![
            row(metric("max_gap dt=1e-4", fine_gap, n, seed), 1e-3, fine_gap <= 1e-3),
            row(metric("gap_ratio dt=2e-4/1e-4", ratio, n, seed), 2.0, (1.5..=2.5).contains(&ratio)),
        ],
    })
}

pub fn jump_identity(scale: f64, seed: u64) -> Result<CriterionOutcome> {
    let p = table2();
    let n = scaled(2000, scale, 20);
    let mut worst_direct: f64 = 0.0;
    let mut worst_odds: f64 = 0.0;
    let mut jumps = 0;
    for i in 0..n {
        let path = simulate_scenario(&p, 10.0, 1e-2, derive_seed(seed, i as u64))?;
        let g = run_filter_g_with(&p, &path, StepMethod::default())?;
        let o = run_filter_odds(&p, &path)?;
        if let (Some(a), Some(b)) = (g.jump, o.jump) {
            jumps += 1;
            worst_direct = worst_direct.max((g.pi_g[a.index] - jump_map(&p, a.before)).abs());
            worst_odds = worst_odds.max((b.after - jump_map(&p, b.before)).abs());
        }
    }
    Ok(CriterionOutcome {
        id: 6,
        name: "posterior update at the default time",
        rows: vec![
            row(metric("jump_gap direct", worst_direct, jumps, seed), 1e-14, jumps > 0 && worst_direct <= 1e-14),
            row(metric("jump_gap odds", worst_odds, jumps, seed), 1e-14, jumps > 0 && worst_odds <= 1e-14),
        ],
    })
}

pub fn generator_residuals() -> Result<CriterionOutcome> {
    let p = table2();
    let big_t = 10.0;
    let grid = interior_grid(big_t, 100);
    let h_fd = 1e-5;
    let closed = |t: f64, l: Level, h: bool| survival_given_level(&p, t, big_t, l, h);
    let rep = generator_residual_with_step(&p, big_t, &grid, h_fd, closed)?;
    let c = 1e-3;
    let bumped = |t: f64, l: Level, h: bool| closed(t, l, h) + if l == Level::Pre && !h { c } else { 0.0 };
    let bump = generator_residual_with_step(&p, big_t, &grid, h_fd, bumped)?;
    let floor = p.lambda() * c / 2.0;
    Ok(CriterionOutcome {
        id: 7,
        name: "generator residual of the closed form",
        rows: vec![
            row(metric("residual chain", rep.chain, grid.len(), 0), 1e-6, rep.chain <= 1e-6),
            row(metric("residual filter_state", rep.filter_state, grid.len(), 0), 1e-6, rep.filter_state <= 1e-6),
            row(metric("curvature", rep.curvature, grid.len(), 0), 1e-9, rep.curvature <= 1e-9),
            row(metric("perturbed residual", bump.chain, grid.len(), 0), floor, bump.chain >= floor),
        ],
    })
}

pub fn density_consistency() -> Result<CriterionOutcome> {
    let p = table2();
    let big_t = 10.0;
    let h = 1e-5;
    let mut mass_gap: f64 = 0.0;
    let mut deriv_gap: f64 = 0.0;
    let mut count = 0;
    for &t in &[0.0, 2.0, 4.0, 6.0, 8.0] {
        for &pi in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            for defaulted in [false, true] {
                let st = InfoState::partial(t, big_t, defaulted, pi)?;
                let mass = crate::quadrature::integrate(|s| density(&p, &st, s).unwrap_or(f64::NAN), t, big_t)?;
                let target = if defaulted { 0.0 } else { 1.0 };
                mass_gap = mass_gap.max((mass + survival(&p, &st) - target).abs());
                let up = survival(&p, &st.with_horizon(big_t + h)?);
                let dn = survival(&p, &st.with_horizon(big_t - h)?);
                deriv_gap = deriv_gap.max((-(up - dn) / (2.0 * h) - density(&p, &st, big_t)?).abs());
                count += 1;
            }
        }
    }
    Ok(CriterionOutcome {
        id: 8,
        name: "density integrates to the survival loss",
        rows: vec![
            row(metric("mass_gap", mass_gap, count, 0), 1e-8, mass_gap <= 1e-8),
            row(metric("derivative_gap", deriv_gap, count, 0), 1e-6, deriv_gap <= 1e-6),
        ],
    })
}

pub fn degeneracy_continuity() -> Result<CriterionOutcome> {
    let (pi0, lambda, mu1, beta) = (0.0, 0.25, 0.0366, 0.15);
    let exact = ModelParams::new(pi0, lambda, mu1, mu1 + lambda, beta, 1e-9)?;
    let mut gaps = [0.0f64; 3];
    for shift in [1e-9, -1e-9] {
        let near = ModelParams::new(pi0, lambda, mu1, mu1 + lambda + shift, beta, 0.0)?;
        for &pi in &[0.0, 0.3, 0.7, 1.0] {
            for &t in &[0.0, 4.0] {
                let st = InfoState::partial(t, 10.0, false, pi)?;
                gaps[0] = gaps[0].max((survival(&near, &st) - survival(&exact, &st)).abs());
                gaps[1] = gaps[1].max((density(&near, &st, 7.0)? - density(&exact, &st, 7.0)?).abs());
                for delta in [0.0, 0.5] {
                    let a = price_dzcb(&near, R, delta, &st)?;
                    let b = price_dzcb(&exact, R, delta, &st)?;
                    gaps[2] = gaps[2].max((a - b).abs());
                }
            }
        }
    }
    let rows = ["survival", "density", "dzcb"]
        .iter()
        .zip(gaps)
        .map(|(name, g)| row(metric(format!("degenerate_gap {name}"), g, 1, 0), 1e-6, g <= 1e-6))
        .collect();
    Ok(CriterionOutcome {
        id: 9,
        name: "continuity at mu2 = mu1 + lambda",
        rows,
    })
}

pub fn mse_ordering(scale: f64, seed: u64) -> Result<CriterionOutcome> {
    let p = Preset::EstimateComparison.params();
    let n = scaled(10_000, scale, 100);
    let table = mc_mse_compare(&p, &[10.0, 20.0, 30.0, 40.0, 50.0], n, 1e-2, seed)?;
    let rows = table
        .iter()
        .map(|m| {
            let rep = McReport {
                label: format!("mse_g t={}", m.t),
                estimate: m.mse_g,
                std_error: m.se_diff,
                n_samples: m.n,
                seed,
            };
            row(rep, m.mse_f, m.ordered(3.0))
        })
        .collect();
    Ok(CriterionOutcome {
        id: 10,
        name: "default information lowers the hazard estimate error",
        rows,
    })
}

/// Case A: beta = 1, mu2 = 0.12; case B: beta = 2, mu2 = 0.12; case C: beta = 2, mu2 = 0.22.
pub fn sensitivity_cases() -> Result<[ModelParams; 3]> {
    let base = Preset::EstimateComparison.params();
    Ok([
        base.with_mu2(0.12)?.with_beta(1.0)?,
        base.with_mu2(0.12)?.with_beta(2.0)?,
        base.with_mu2(0.22)?.with_beta(2.0)?,
    ])
}

pub fn sensitivity_bands(scale: f64, seed: u64) -> Result<CriterionOutcome> {
    let cfg = SensitivityConfig {
        n: scaled(1000, scale.min(1.0), 100),
        seed,
        ..Default::default()
    };
    let rep = sensitivity_study(&sensitivity_cases()?, &cfg)?;
    let [a, b, c] = [&rep.results[0], &rep.results[1], &rep.results[2]];
    let (diff, se) = paired_difference(&a.above, &b.above)?;
    let ordering = McReport {
        label: "above_A_minus_B".into(),
        estimate: diff,
        std_error: se,
        n_samples: a.n_paths(),
        seed,
    };
    let band = metric("below_C", c.fraction_below(), c.n_paths(), seed);
    let band_pass = band.estimate >= 0.9;
    Ok(CriterionOutcome {
        id: 11,
        name: "sensitivity orderings",
        rows: vec![row(ordering, 0.0, diff > 3.0 * se), row(band, 0.9, band_pass)],
    })
}

/// Criteria 1 to 11.
pub fn run_all(scale: f64, seed: u64) -> Result<Vec<CriterionOutcome>> {
    let s = |k: u64| derive_seed(seed, k);
    let (c3, c4) = tower_and_filter_mean(scale, s(3))?;
    Ok(vec![
        survival_closed_form(scale, s(1))?,
        dzcb_prices(scale, s(2))?,
        c3,
        c4,
        scheme_equivalence(scale, s(5))?,
        jump_identity(scale, s(6))?,
        generator_residuals()?,
        density_consistency()?,
        degeneracy_continuity()?,
        mse_ordering(scale, s(10))?,
        sensitivity_bands(scale, 18)?,
    ])
}

/// Rows of every criterion in the common report layout, prefixed by the
/// criterion id.
pub fn write_outcomes<W: Write>(out: &mut W, outcomes: &[CriterionOutcome]) -> std::io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for o in outcomes {
        for r in &o.rows {
            let mut rep = r.report.clone();
            rep.label = format!("c{} {}", o.id, rep.label);
            write_report_row(out, &rep, r.comparator, r.pass)?;
        }
    }
    Ok(())
}
