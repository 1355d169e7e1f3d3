//! Scenario-based expected inventory at a DC under a continuous-review
//! policy: shortage, covered-by-safety-stock and surplus cases.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InventoryError {
    #[error("probability must lie in (0, 1), got {0}")]
    Domain(f64),
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile `Z_alpha`.
pub fn z_quantile(alpha: f64) -> Result<f64, InventoryError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(InventoryError::Domain(alpha));
    }
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let mut z = std.inverse_cdf(alpha);
    // Two Newton steps against the erfc-based CDF.
    for _ in 0..2 {
        let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf <= 0.0 {
            break;
        }
        z -= (normal_cdf(z) - alpha) / pdf;
    }
    Ok(z)
}

/// Aggregated state of one open DC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcInventoryState {
    /// Sum of assigned mean demands.
    pub mu_sum: f64,
    /// Sum of assigned demand variances.
    pub var_sum: f64,
    /// Orders per year.
    pub n: f64,
    /// Order quantity.
    pub q: f64,
    pub lead_time: f64,
    pub z_alpha: f64,
    pub t: bool,
    pub t_prime: bool,
}

impl DcInventoryState {
    /// Builds a state with the scenario bits forced by the inventory constraints.
    pub fn new(mu_sum: f64, var_sum: f64, n: f64, q: f64, lead_time: f64, z_alpha: f64) -> Self {
        let (t, t_prime) = classify(mu_sum, var_sum, n, q, lead_time, z_alpha);
        DcInventoryState {
            mu_sum,
            var_sum,
            n,
            q,
            lead_time,
            z_alpha,
            t,
            t_prime,
        }
    }

    /// Safety stock `Z * sqrt(l * var)`.
    pub fn safety_stock(&self) -> f64 {
        safety_stock(self.z_alpha, self.lead_time, self.var_sum)
    }
}

pub fn safety_stock(z_alpha: f64, lead_time: f64, var_sum: f64) -> f64 {
    z_alpha * (lead_time * var_sum).sqrt()
}

/// Scenario bits `(t, t')`. Equalities resolve to `false`.
pub fn classify(mu_sum: f64, var_sum: f64, n: f64, q: f64, lead_time: f64, z_alpha: f64) -> (bool, bool) {
    let received = n * q;
    let shortage = mu_sum - received;
    let t = shortage > 0.0;
    let t_prime = !t && (received - mu_sum) > safety_stock(z_alpha, lead_time, var_sum);
    (t, t_prime)
}

/// Expected inventory: the four-term scenario expression, term by term.
pub fn expected_inventory(state: &DcInventoryState) -> f64 {
    let t = f64::from(u8::from(state.t));
    let tp = f64::from(u8::from(state.t_prime));
    let received = state.n * state.q;
    let ss = state.safety_stock();
    t * (state.mu_sum - received)
        + t * ss
        + (1.0 - t) * (received - state.mu_sum)
        + (1.0 - t) * (1.0 - tp) * (ss - (received - state.mu_sum))
}
