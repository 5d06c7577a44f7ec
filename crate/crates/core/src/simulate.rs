//! Path simulation for the insurer's surplus under a jump-diffusion scheme.
//!
//! A path merges two event sources: exact Poisson claim arrivals and a
//! uniform time grid of `n_steps` sub-intervals over `[0, horizon]`. Between
//! consecutive event times the surplus follows one Euler step of
//!
//! ```text
//! dX = [c + (mu theta + r (1 - theta)) X] dt + sigma theta X dW
//! ```
//!
//! with the investment fraction `theta` read from the strategy at the left
//! endpoint. The running utility integral accumulates a left-endpoint
//! rectangle before each step. Ruin is declared the first time the surplus
//! goes strictly negative at an event time; from then on the surplus is
//! frozen at zero, which also freezes the utility integral.
//!
//! Draw order per path is fixed: all interarrival uniforms, then one claim
//! size uniform per arrival, then one standard normal per sub-interval of
//! positive length. The normal draws do not depend on the state or the
//! strategy, so two strategies evaluated on the same stream see identical
//! claim schedules and Brownian increments.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{InsuranceModel, Market, Strategy, Utility};
use crate::rng::{standard_normal, uniform_open01, RngStream};

/// Uniform time grid with `n_steps` sub-intervals over the utility horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimGrid {
    pub n_steps: usize,
}

impl SimGrid {
    pub fn new(n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::Domain(
                "simulation grid requires n_steps >= 1, got 0".to_string(),
            ));
        }
        Ok(Self { n_steps })
    }
}

/// Everything observable about a single simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    /// Surplus went strictly negative at some event time before the horizon.
    pub ruined: bool,
    /// First event time with a negative surplus, if any.
    pub ruin_time: Option<f64>,
    /// Surplus at the horizon; zero on a ruined path.
    pub terminal_surplus: f64,
    /// Left-endpoint rectangle sum of the running utility integrand.
    pub accumulated_utility: f64,
    /// Claim arrivals on `[0, horizon)`, counted whether the path is alive
    /// or not.
    pub n_claims: usize,
}

/// Draws the Poisson claim arrival times on `[0, horizon)` for one stream.
///
/// Interarrival gaps are exponential with rate `lambda`; the cumulative sum
/// stops at the first arrival past the horizon, which is discarded.
pub fn draw_arrivals(lambda: f64, horizon: f64, stream: &RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    draw_arrivals_rng(lambda, horizon, &mut rng)
}

fn draw_arrivals_rng(lambda: f64, horizon: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut arrivals = Vec::new();
    let mut t = 0.0;
    loop {
        let u = uniform_open01(rng);
        t += -(-u).ln_1p() / lambda;
        if t >= horizon {
            return arrivals;
        }
        arrivals.push(t);
    }
}

/// Simulates one surplus path on the given stream.
pub fn simulate_path(
    model: &InsuranceModel,
    market: &Market,
    utility: &Utility,
    strategy: &Strategy,
    grid: &SimGrid,
    stream: &RngStream,
) -> Result<PathOutcome> {
    let mut rng = stream.rng();
    let arrivals = draw_arrivals_rng(model.lambda, utility.horizon, &mut rng);
    let claim_sizes: Vec<f64> = arrivals
        .iter()
        .map(|_| model.claims.sample(uniform_open01(&mut rng)))
        .collect::<Result<_>>()?;
    run_path(
        model,
        market,
        utility,
        strategy,
        grid,
        &arrivals,
        &claim_sizes,
        || standard_normal(&mut rng),
    )
}

/// Simulates one path with a fixed claim schedule and zero Brownian noise.
#[cfg(test)]
pub(crate) fn simulate_path_scheduled(
    model: &InsuranceModel,
    market: &Market,
    utility: &Utility,
    strategy: &Strategy,
    grid: &SimGrid,
    arrivals: &[f64],
    claim_sizes: &[f64],
) -> Result<PathOutcome> {
    run_path(
        model, market, utility, strategy, grid, arrivals, claim_sizes,
        || 0.0,
    )
}

/// Core event loop shared by the stochastic and the scheduled entry points.
///
/// Event times are the sorted merge of `arrivals` with the grid times
/// `horizon * k / n_steps` for `k = 1..=n_steps`; an arrival that collides
/// with a grid time is processed first, and the resulting zero-length grid
/// step consumes no normal draw.
#[allow(clippy::too_many_arguments)]
fn run_path<G: FnMut() -> f64>(
    model: &InsuranceModel,
    market: &Market,
    utility: &Utility,
    strategy: &Strategy,
    grid: &SimGrid,
    arrivals: &[f64],
    claim_sizes: &[f64],
    mut gaussian: G,
) -> Result<PathOutcome> {
    debug_assert_eq!(arrivals.len(), claim_sizes.len());
    let n = grid.n_steps;
    let horizon = utility.horizon;

    let mut x = model.x0;
    let mut t_prev = 0.0;
    let mut acc = 0.0;
    let mut ruined = false;
    let mut ruin_time = None;

    let mut ai = 0;
    let mut k = 1usize;
    while k <= n || ai < arrivals.len() {
        let next_grid = if k <= n {
            horizon * k as f64 / n as f64
        } else {
            f64::INFINITY
        };
        let next_arrival = arrivals.get(ai).copied().unwrap_or(f64::INFINITY);
        let is_claim = next_arrival <= next_grid;
        let t_event = if is_claim { next_arrival } else { next_grid };

        let dt = t_event - t_prev;
        if dt > 0.0 {
            acc += utility.phi(t_prev, x) * dt;
            let z = gaussian();
            if !ruined {
                let theta = strategy.evaluate(t_prev, x);
                let rate = market.mu * theta + market.r * (1.0 - theta);
                let drift = (model.c + rate * x) * dt;
                let diffusion = market.sigma * theta * x * z * dt.sqrt();
                x += drift + diffusion;
            }
        }

        if is_claim {
            if !ruined {
                x -= claim_sizes[ai];
            }
            ai += 1;
        } else {
            k += 1;
        }

        if !x.is_finite() {
            return Err(Error::Numerical(format!(
                "surplus became non-finite at t = {t_event}"
            )));
        }
        if !ruined && x < 0.0 {
            ruined = true;
            ruin_time = Some(t_event);
            x = 0.0;
        }
        t_prev = t_event;
    }

    Ok(PathOutcome {
        ruined,
        ruin_time,
        terminal_surplus: x,
        accumulated_utility: acc,
        n_claims: arrivals.len(),
    })
}
