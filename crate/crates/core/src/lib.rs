//! Simulation and valuation toolkit for an insurer's surplus under a
//! compound Poisson claims process with proportional investment in a
//! Black-Scholes risky asset.

pub mod claims;
pub mod error;
pub mod hjb;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod special;

pub use claims::{net_profit_holds, premium_from_loading, ClaimDistribution};
pub use error::{Error, Result};
pub use hjb::{f_of_t, k_limit, k_of_x, merton_fraction, z_of_t, HjbSolution};
pub use model::{InsuranceModel, Market, Strategy, Utility};
pub use montecarlo::{
    dpp_consistency, estimate_ruin, estimate_value, sweep_table, wilson_interval, DppGap,
    RuinEstimate, SweepCell, ValueEstimate,
};
pub use quadrature::{integrate, Quadrature};
pub use rng::RngStream;
pub use simulate::{draw_arrivals, simulate_path, PathOutcome, SimGrid};
