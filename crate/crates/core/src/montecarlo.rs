//! Monte Carlo estimators built on the path simulator.
//!
//! Paths are distributed over a rayon pool but each path owns a counter-mode
//! stream keyed by its index, and reductions run sequentially over the
//! collected outcomes, so every estimate is a pure function of its inputs
//! and the master seed regardless of worker count.

use rayon::prelude::*;

use crate::claims::ClaimDistribution;
use crate::error::{Error, Result};
use crate::model::{InsuranceModel, Market, Strategy, Utility};
use crate::rng::{derive_seed, RngStream};
use crate::simulate::{simulate_path, PathOutcome, SimGrid};

/// 97.5% standard normal quantile, from an independent quantile routine.
const Z_95: f64 = 1.959_963_984_540_054;

/// Ruin probability estimate with a Wald standard error and a Wilson score
/// interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinEstimate {
    pub p_hat: f64,
    pub n_paths: usize,
    pub std_err: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

/// Sample mean of the accumulated running utility across paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueEstimate {
    pub v_hat: f64,
    pub n_paths: usize,
    pub std_err: f64,
}

/// One entry of a ruin probability sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub claims: ClaimDistribution,
    pub x0: f64,
    pub strategy: Strategy,
    pub estimate: RuinEstimate,
}

/// Gap between a direct value estimate and the best restart composite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DppGap {
    /// Direct estimate minus the best composite; zero in expectation when
    /// the best candidate is used on both sides.
    pub gap: f64,
    pub std_err: f64,
    pub best_fraction: f64,
    pub value_direct: f64,
    pub composite_best: f64,
}

/// Wilson score interval for a binomial proportion at the 95% level.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n_f;
    let center = p + z2 / (2.0 * n_f);
    let half = Z_95 * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half) / denom, (center + half) / denom)
}

fn run_paths(
    model: &InsuranceModel,
    market: &Market,
    utility: &Utility,
    strategy: &Strategy,
    grid: &SimGrid,
    n_paths: usize,
    master_seed: u64,
) -> Result<Vec<PathOutcome>> {
    if n_paths == 0 {
        return Err(Error::Domain(
            "estimation requires n_paths >= 1, got 0".to_string(),
        ));
    }
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            simulate_path(
                model,
                market,
                utility,
                strategy,
                grid,
                &RngStream::new(master_seed, i),
            )
        })
        .collect()
}

fn mean_and_std_err(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let ss = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

/// Estimates the probability of ruin before the horizon.
pub fn estimate_ruin(
    model: &InsuranceModel,
    market: &Market,
    utility: &Utility,
    strategy: &Strategy,
    grid: &SimGrid,
    n_paths: usize,
    master_seed: u64,
) -> Result<RuinEstimate> {
    let outcomes = run_paths(model, market, utility, strategy, grid, n_paths, master_seed)?;
    let successes = outcomes.iter().filter(|o| o.ruined).count();
    let p_hat = successes as f64 / n_paths as f64;
    let std_err = (p_hat * (1.0 - p_hat) / n_paths as f64).sqrt();
    let (ci95_low, ci95_high) = wilson_interval(successes, n_paths);
    Ok(RuinEstimate {
        p_hat,
        n_paths,
        std_err,
        ci95_low,
        ci95_high,
    })
}

/// Estimates the expected accumulated running utility over the horizon.
pub fn estimate_value(
    model: &InsuranceModel,
    market: &Market,
    utility: &Utility,
    strategy: &Strategy,
    grid: &SimGrid,
    n_paths: usize,
    master_seed: u64,
) -> Result<ValueEstimate> {
    let outcomes = run_paths(model, market, utility, strategy, grid, n_paths, master_seed)?;
    let samples: Vec<f64> = outcomes.iter().map(|o| o.accumulated_utility).collect();
    let (v_hat, std_err) = mean_and_std_err(&samples);
    Ok(ValueEstimate {
        v_hat,
        n_paths,
        std_err,
    })
}

/// Estimates ruin probabilities over a (distribution, initial surplus,
/// strategy) grid.
///
/// Cells are ordered with the distribution outermost and the strategy
/// innermost. Every cell reuses the same stream pool, so strategies are
/// coupled through common claim schedules and Brownian increments, and two
/// distributions that sample identically produce identical columns.
#[allow(clippy::too_many_arguments)]
pub fn sweep_table(
    template: &InsuranceModel,
    market: &Market,
    utility: &Utility,
    grid: &SimGrid,
    distributions: &[ClaimDistribution],
    x_values: &[f64],
    strategies: &[Strategy],
    n_paths: usize,
    master_seed: u64,
) -> Result<Vec<SweepCell>> {
    if distributions.is_empty() {
        return Err(Error::Domain(
            "sweep requires at least one claim distribution".to_string(),
        ));
    }
    if x_values.is_empty() {
        return Err(Error::Domain(
            "sweep requires at least one initial surplus value".to_string(),
        ));
    }
    if strategies.is_empty() {
        return Err(Error::Domain(
            "sweep requires at least one strategy".to_string(),
        ));
    }
    let mut cells = Vec::with_capacity(distributions.len() * x_values.len() * strategies.len());
    for claims in distributions {
        let base = InsuranceModel::new(template.x0, template.c, template.lambda, *claims)?;
        for &x0 in x_values {
            let model = base.with_x0(x0)?;
            for strategy in strategies {
                let estimate =
                    estimate_ruin(&model, market, utility, strategy, grid, n_paths, master_seed)?;
                cells.push(SweepCell {
                    claims: *claims,
                    x0,
                    strategy: *strategy,
                    estimate,
                });
            }
        }
    }
    Ok(cells)
}

/// Checks the restart decomposition of the value estimator.
///
/// The horizon is split at `h`. For each candidate fraction, paths run to
/// `h` under that candidate, and every surviving path continues with
/// `n_inner` fresh inner paths under the best candidate, whose discounted
/// mean estimates the continuation value. The best candidate is picked
/// beforehand by coupled direct full-horizon estimates. Since the best
/// candidate's composite matches its direct estimate in expectation, and no
/// switch away from the best candidate on `[0, h]` can beat it, the
/// reported gap should not be significantly negative; with a single
/// candidate it should vanish to within its standard error.
///
/// All candidates share the outer and inner stream pools; the direct
/// estimates run on a seed derived independently from the master seed.
#[allow(clippy::too_many_arguments)]
pub fn dpp_consistency(
    model: &InsuranceModel,
    market: &Market,
    utility: &Utility,
    grid: &SimGrid,
    h: f64,
    candidate_fractions: &[f64],
    n_outer: usize,
    n_inner: usize,
    master_seed: u64,
) -> Result<DppGap> {
    if candidate_fractions.is_empty() {
        return Err(Error::Domain(
            "restart check requires at least one candidate fraction".to_string(),
        ));
    }
    if n_outer < 2 {
        return Err(Error::Domain(format!(
            "restart check requires n_outer >= 2, got {n_outer}"
        )));
    }
    if n_inner == 0 {
        return Err(Error::Domain(
            "restart check requires n_inner >= 1, got 0".to_string(),
        ));
    }
    let horizon = utility.horizon;
    let delta = horizon / grid.n_steps as f64;
    let k_h = (h / delta).round() as usize;
    if k_h < 1 || k_h >= grid.n_steps || (k_h as f64 * delta - h).abs() > 1e-9 * horizon {
        return Err(Error::Domain(format!(
            "restart time h = {h} must land on an interior grid time (step {delta})"
        )));
    }

    let outer_utility = Utility::new(utility.alpha, utility.kappa, h)?;
    let inner_utility = Utility::new(utility.alpha, utility.kappa, horizon - h)?;
    let outer_grid = SimGrid::new(k_h)?;
    let inner_grid = SimGrid::new(grid.n_steps - k_h)?;
    let discount = if utility.kappa == 0.0 {
        1.0
    } else {
        (-utility.kappa * utility.alpha * h).exp()
    };
    let inner_master = derive_seed(master_seed, 2);
    let direct_seed = derive_seed(master_seed, 1);

    // Coupled direct estimates pick the best candidate; their shared
    // streams make the between-candidate differences low-noise.
    let mut direct_best: Option<(ValueEstimate, f64)> = None;
    for &fraction in candidate_fractions {
        let strategy = Strategy::constant_fraction(fraction)?;
        let direct = estimate_value(model, market, utility, &strategy, grid, n_outer, direct_seed)?;
        let better = match &direct_best {
            None => true,
            Some((current, _)) => direct.v_hat > current.v_hat,
        };
        if better {
            direct_best = Some((direct, fraction));
        }
    }
    let (direct, best_fraction) = direct_best.expect("candidate list is non-empty");
    let inner_strategy = Strategy::constant_fraction(best_fraction)?;

    let mut composite_best: Option<(f64, f64)> = None;
    for &fraction in candidate_fractions {
        let strategy = Strategy::constant_fraction(fraction)?;
        let contributions: Vec<f64> = (0..n_outer as u64)
            .into_par_iter()
            .map(|j| {
                let outer = simulate_path(
                    model,
                    market,
                    &outer_utility,
                    &strategy,
                    &outer_grid,
                    &RngStream::new(master_seed, j),
                )?;
                if outer.ruined {
                    return Ok(outer.accumulated_utility);
                }
                let restart = model.with_x0(outer.terminal_surplus)?;
                let mut inner_sum = 0.0;
                for l in 0..n_inner as u64 {
                    let inner = simulate_path(
                        &restart,
                        market,
                        &inner_utility,
                        &inner_strategy,
                        &inner_grid,
                        &RngStream::new(inner_master, j * n_inner as u64 + l),
                    )?;
                    inner_sum += inner.accumulated_utility;
                }
                Ok(outer.accumulated_utility + discount * inner_sum / n_inner as f64)
            })
            .collect::<Result<_>>()?;
        let (composite, se) = mean_and_std_err(&contributions);
        let better = match composite_best {
            None => true,
            Some((current, _)) => composite > current,
        };
        if better {
            composite_best = Some((composite, se));
        }
    }
    let (composite_best, se_composite) = composite_best.expect("candidate list is non-empty");

    Ok(DppGap {
        gap: direct.v_hat - composite_best,
        std_err: (direct.std_err * direct.std_err + se_composite * se_composite).sqrt(),
        best_fraction,
        value_direct: direct.v_hat,
        composite_best,
    })
}
