//! Closed-form value profile of the constant-fraction policy.
//!
//! For running utility `phi(t, x) = e^(-kappa alpha t) x^(1-alpha)` the
//! candidate value function separates as `V(t, x) = f(t)^alpha x^(1-alpha)`.
//! Writing `z = f^alpha`, the time profile solves the linear ODE
//! `z'(t) = R z(t) - e^(-kappa alpha t)` with `z(T) = 0`, where the rate `R`
//! freezes the surplus-dependent generator coefficient `K(x)` at a reference
//! capital level `x_ref`:
//!
//! `R = K(x_ref) + (1/2) alpha (1-alpha) sigma^2 theta*^2`
//!
//! `K(x) = lambda (1 - M(x) / x^(1-alpha)) - c (1-alpha) / x
//!         - (r + (mu - r) theta*) (1-alpha)`
//!
//! with `M` the truncated fractional claim moment and `theta*` the clamped
//! optimal risky fraction. `K` varies with `x` (it diverges to -inf as
//! `x -> 0+`), so the profile is exact only where `K` is flat; `k_range`
//! reports that variation as a diagnostic. `R` can be negative; nothing here
//! assumes a sign.


use crate::error::{Error, Result};
use crate::model::{InsuranceModel, Market, Utility};

/// Optimal unconstrained risky fraction `(mu - r) / (sigma^2 alpha)`; zero
/// when the risky asset carries no excess return. Unclamped: callers that
/// need an admissible fraction clamp into [0, 1].
pub fn merton_fraction(market: &Market, utility: &Utility) -> f64 {
    if market.mu > market.r {
        (market.mu - market.r) / (market.sigma * market.sigma * utility.alpha)
    } else {
        0.0
    }
}

/// Surplus-dependent generator coefficient `K(x)` under the clamped optimal
/// fraction. Diverges to -inf as `x -> 0+` through the premium term.
///
/// Errors with `Domain` for `x <= 0` and propagates quadrature failures
/// from the truncated moment.
pub fn k_of_x(model: &InsuranceModel, market: &Market, utility: &Utility, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K(x) requires x > 0, got x = {x}")));
    }
    let theta = merton_fraction(market, utility).clamp(0.0, 1.0);
    let one_minus = 1.0 - utility.alpha;
    let m = model.claims.truncated_power_moment(x, utility.alpha)?;
    Ok(model.lambda * (1.0 - m / x.powf(one_minus))
        - model.c * one_minus / x
        - (market.r + (market.mu - market.r) * theta) * one_minus)
}

/// Nominal large-`x` reference level for `K`:
/// `lambda - (1-alpha) (r + theta* (mu - r))` with the clamped fraction.
///
/// Note that `K(x)` itself converges to
/// `-(1-alpha) (r + theta* (mu - r))` as `x -> inf`, because the moment
/// ratio `M(x) / x^(1-alpha)` saturates at 1 and kills the `lambda` term;
/// this constant keeps the `lambda` term by definition and therefore sits
/// `lambda` above that limit. See the tests for both behaviors.
pub fn k_limit(model: &InsuranceModel, market: &Market, utility: &Utility) -> f64 {
    let theta = merton_fraction(market, utility).clamp(0.0, 1.0);
    model.lambda - (1.0 - utility.alpha) * (market.r + theta * (market.mu - market.r))
}

fn check_profile_args(alpha: f64, horizon: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "time profile requires 0 < alpha < 1, got alpha = {alpha}"
        )));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!(
            "time profile requires horizon T > 0, got T = {horizon}"
        )));
    }
    if !(0.0..=horizon).contains(&t) {
        return Err(Error::Domain(format!(
            "time profile requires 0 <= t <= T = {horizon}, got t = {t}"
        )));
    }
    Ok(())
}

/// Solution `z(t) = f(t)^alpha` of `z' = R z - e^(-kappa alpha t)`,
/// `z(T) = 0`:
///
/// `z(t) = e^(-kappa alpha t) (1 - e^(-s (T-t))) / s`, `s = R + kappa alpha`.
///
/// The bracket is evaluated as `-expm1(-s (T-t)) / s`, which is exact for
/// either sign of `s`; the removable singularity at `s = 0` takes the limit
/// value `T - t`. Vanishes exactly at `t = T`.
pub fn z_of_t(rate: f64, alpha: f64, kappa: f64, horizon: f64, t: f64) -> Result<f64> {
    check_profile_args(alpha, horizon, t)?;
    let s = rate + kappa * alpha;
    let remaining = horizon - t;
    let bracket = if s == 0.0 {
        remaining
    } else {
        -(-s * remaining).exp_m1() / s
    };
    Ok((-kappa * alpha * t).exp() * bracket)
}

/// Time profile `f(t) = e^(-kappa t) [(1 - e^(-s (T-t))) / s]^(1/alpha)`
/// with `s = R + kappa alpha`; the bracket handling matches [`z_of_t`].
pub fn f_of_t(rate: f64, alpha: f64, kappa: f64, horizon: f64, t: f64) -> Result<f64> {
    check_profile_args(alpha, horizon, t)?;
    let s = rate + kappa * alpha;
    let remaining = horizon - t;
    let bracket = if s == 0.0 {
        remaining
    } else {
        -(-s * remaining).exp_m1() / s
    };
    Ok((-kappa * t).exp() * bracket.powf(1.0 / alpha))
}

/// Closed-form candidate value of the clamped-optimal constant-fraction
/// policy, with its frozen rate `R` and reference capital.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjbSolution {
    pub model: InsuranceModel,
    pub market: Market,
    pub utility: Utility,
    /// Capital level at which `K` was frozen.
    pub x_ref: f64,
    /// Unconstrained optimal fraction `(mu - r) / (sigma^2 alpha)`.
    pub theta_star: f64,
    /// `theta_star` clamped into [0, 1]; the fraction the policy holds.
    pub theta_clamped: f64,
    /// ODE rate `R = K(x_ref) + (1/2) alpha (1-alpha) sigma^2
    /// theta_clamped^2`. May be negative.
    pub rate: f64,
}

impl HjbSolution {
    /// Freezes `K` at the model's initial capital. Requires `x0 > 0`; start
    /// from [`HjbSolution::with_x_ref`] for models with zero initial
    /// capital.
    pub fn new(model: &InsuranceModel, market: &Market, utility: &Utility) -> Result<Self> {
        Self::with_x_ref(model, market, utility, model.x0)
    }

    /// Freezes `K` at an explicit reference capital `x_ref > 0`.
    pub fn with_x_ref(
        model: &InsuranceModel,
        market: &Market,
        utility: &Utility,
        x_ref: f64,
    ) -> Result<Self> {
        let theta_star = merton_fraction(market, utility);
        let theta_clamped = theta_star.clamp(0.0, 1.0);
        let k_ref = k_of_x(model, market, utility, x_ref)?;
        let sigma2 = market.sigma * market.sigma;
        let rate = k_ref
            + 0.5 * utility.alpha * (1.0 - utility.alpha) * sigma2 * theta_clamped * theta_clamped;
        Ok(Self {
            model: *model,
            market: *market,
            utility: *utility,
            x_ref,
            theta_star,
            theta_clamped,
            rate,
        })
    }

    /// `f(t)` under this solution's rate.
    pub fn f_profile(&self, t: f64) -> Result<f64> {
        f_of_t(
            self.rate,
            self.utility.alpha,
            self.utility.kappa,
            self.utility.horizon,
            t,
        )
    }

    /// `z(t) = f(t)^alpha` under this solution's rate.
    pub fn z_profile(&self, t: f64) -> Result<f64> {
        z_of_t(
            self.rate,
            self.utility.alpha,
            self.utility.kappa,
            self.utility.horizon,
            t,
        )
    }

    /// Candidate value `V(t, x) = z(t) x^(1-alpha)`.
    ///
    /// Homogeneous of degree `1 - alpha` in `x`; zero at `x = 0` and at
    /// `t = T`.
    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "value requires x >= 0, got x = {x}"
            )));
        }
        Ok(self.z_profile(t)? * x.powf(1.0 - self.utility.alpha))
    }

    /// Range of `K` over a capital grid: how far from flat the frozen
    /// coefficient really is. Large spread means the closed form is a rough
    /// candidate at best away from `x_ref`.
    pub fn k_range(&self, xs: &[f64]) -> Result<(f64, f64)> {
        if xs.is_empty() {
            return Err(Error::Domain(
                "k_range requires a nonempty capital grid".into(),
            ));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in xs {
            let k = k_of_x(&self.model, &self.market, &self.utility, x)?;
            lo = lo.min(k);
            hi = hi.max(k);
        }
        Ok((lo, hi))
    }
}
