//! Shared fixtures for the criterion benches in `benches/`.

use ruinlab_core::{ClaimDistribution, InsuranceModel, Market, Utility};

/// Daily-scale market used across the benches.
pub fn market() -> Market {
    Market::new(8.4e-4, 1e-3, 1e-3_f64.sqrt()).unwrap()
}

/// Power utility with exponent 1 - alpha = 0.8 and no time discount.
pub fn utility() -> Utility {
    Utility::new(0.2, 0.0, 1.0).unwrap()
}

/// Portfolio with exponential claims of mean 50 and 30% safety loading.
pub fn model() -> InsuranceModel {
    InsuranceModel::new(
        100.0,
        65.0,
        1.0,
        ClaimDistribution::exponential(50.0).unwrap(),
    )
    .unwrap()
}
