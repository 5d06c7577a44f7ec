//! Core model types: the insurance surplus process, the investment market,
//! the running-utility objective, and investment strategies.

use crate::claims::{net_profit_holds, ClaimDistribution};
use crate::error::{Error, Result};

/// Surplus-process parameters: initial capital, premium rate, claim
/// frequency, and claim-size law.
///
/// Construction enforces the net profit condition `c / lambda > E[U]`
/// strictly; models that bleed money on average are rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsuranceModel {
    /// Initial capital, >= 0.
    pub x0: f64,
    /// Premium income per unit time, > 0.
    pub c: f64,
    /// Poisson claim frequency, > 0.
    pub lambda: f64,
    /// Claim-size law.
    pub claims: ClaimDistribution,
}

impl InsuranceModel {
    pub fn new(x0: f64, c: f64, lambda: f64, claims: ClaimDistribution) -> Result<Self> {
        if !(x0 >= 0.0) || !x0.is_finite() {
            return Err(Error::Domain(format!(
                "insurance model requires x0 >= 0, got x0 = {x0}"
            )));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!(
                "insurance model requires premium rate c > 0, got c = {c}"
            )));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "insurance model requires lambda > 0, got lambda = {lambda}"
            )));
        }
        if !net_profit_holds(c, lambda, &claims)? {
            return Err(Error::Domain(format!(
                "net profit condition failed: c / lambda = {} must exceed the mean claim {}",
                c / lambda,
                claims.mean()?
            )));
        }
        Ok(Self {
            x0,
            c,
            lambda,
            claims,
        })
    }

    /// The same model started from a different capital level.
    pub fn with_x0(&self, x0: f64) -> Result<Self> {
        Self::new(x0, self.c, self.lambda, self.claims)
    }
}

/// Black-Scholes market: risk-free rate and risky-asset drift/volatility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Market {
    /// Risk-free rate, >= 0.
    pub r: f64,
    /// Risky-asset drift.
    pub mu: f64,
    /// Risky-asset volatility, > 0 (standard deviation, not variance).
    pub sigma: f64,
}

impl Market {
    pub fn new(r: f64, mu: f64, sigma: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!(
                "market requires risk-free rate r >= 0, got r = {r}"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::Domain(format!(
                "market requires finite drift mu, got mu = {mu}"
            )));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!(
                "market requires volatility sigma > 0, got sigma = {sigma}"
            )));
        }
        Ok(Self { r, mu, sigma })
    }

    /// Advisory note for configurations where the risky asset has no excess
    /// return. This is a warning, not an error: the model stays valid, the
    /// optimal risky fraction is simply zero.
    pub fn warning(&self) -> Option<String> {
        (self.mu <= self.r).then(|| {
            format!(
                "mu = {} does not exceed r = {}: the risky asset carries no premium \
                 and the optimal risky fraction is 0",
                self.mu, self.r
            )
        })
    }
}

/// Running-utility objective: accumulate `phi(t, x) = e^(-kappa alpha t)
/// x^(1-alpha)` along the surplus path up to the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Utility {
    /// Risk-aversion exponent, strictly inside (0, 1).
    pub alpha: f64,
    /// Discount rate; any sign is admissible.
    pub kappa: f64,
    /// Time horizon, > 0.
    pub horizon: f64,
}

impl Utility {
    pub fn new(alpha: f64, kappa: f64, horizon: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "utility requires 0 < alpha < 1, got alpha = {alpha}"
            )));
        }
        if !kappa.is_finite() {
            return Err(Error::Domain(format!(
                "utility requires finite kappa, got kappa = {kappa}"
            )));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!(
                "utility requires horizon T > 0, got T = {horizon}"
            )));
        }
        Ok(Self {
            alpha,
            kappa,
            horizon,
        })
    }

    /// Instantaneous utility weight `e^(-kappa alpha t) x^(1-alpha)`;
    /// zero capital contributes zero.
    #[inline]
    pub fn phi(&self, t: f64, x: f64) -> f64 {
        let base = x.powf(1.0 - self.alpha);
        if self.kappa == 0.0 {
            base
        } else {
            base * (-self.kappa * self.alpha * t).exp()
        }
    }
}

/// Investment policy: the fraction of current surplus held in the risky
/// asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Everything stays in the risk-free account.
    NoInvestment,
    /// A fixed fraction `theta` of surplus in the risky asset, `0 <= theta
    /// <= 1`.
    ConstantFraction { theta: f64 },
    /// The optimal constant fraction `(mu - r) / (sigma^2 alpha)`, clamped
    /// into [0, 1] at construction.
    MertonClamped { theta: f64 },
}

impl Strategy {
    pub fn no_investment() -> Self {
        Self::NoInvestment
    }

    pub fn constant_fraction(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) || !theta.is_finite() {
            return Err(Error::Domain(format!(
                "constant fraction requires 0 <= theta <= 1, got theta = {theta}"
            )));
        }
        Ok(Self::ConstantFraction { theta })
    }

    /// Builds the clamped optimal-fraction policy for the given market and
    /// risk aversion. The fraction is fixed at construction; it does not
    /// depend on time or surplus.
    pub fn merton_clamped(market: &Market, utility: &Utility) -> Self {
        let raw = crate::hjb::merton_fraction(market, utility);
        Self::MertonClamped {
            theta: raw.clamp(0.0, 1.0),
        }
    }

    /// Risky fraction to hold at time `t` with surplus `x`. All current
    /// policies are constant; the arguments fix the signature for
    /// state-dependent policies.
    #[inline]
    pub fn evaluate(&self, _t: f64, _x: f64) -> f64 {
        match *self {
            Self::NoInvestment => 0.0,
            Self::ConstantFraction { theta } | Self::MertonClamped { theta } => theta,
        }
    }

    /// Stable identifier for table output: `none`, `merton`, or
    /// `fraction(theta)`.
    pub fn label(&self) -> String {
        match *self {
            Self::NoInvestment => "none".into(),
            Self::ConstantFraction { theta } => format!("fraction({theta})"),
            Self::MertonClamped { .. } => "merton".into(),
        }
    }
}
