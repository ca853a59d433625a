//! Fourier transform of the spread and basket-spread payoffs.
//!
//! For the unit-strike spread payoff `P(x1, x2) = (e^x1 - e^x2 - 1)^+`,
//!
//! ```text
//! P^(u) = Gamma(i(u1 + u2) - 1) Gamma(-i u2) / Gamma(i u1 + 1)
//! ```
//!
//! on the shifted contour `u = real + i eps` with `eps2 > 0`, `eps1 + eps2 < -1`.
//! The basket payoff `(e^x~ - sum e^x_m - 1)^+` has the analogous product of
//! gammas. Everything is assembled from log-gammas and exponentiated once,
//! because individual gamma factors underflow far out on the contour.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex_math::{gamma_real, log_gamma};
use crate::error::{Result, SpreadError};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Contour shift for the two-asset spread transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonShift2 {
    pub eps1: f64,
    pub eps2: f64,
}

impl EpsilonShift2 {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let e = EpsilonShift2 { eps1, eps2 };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps1.is_finite() && self.eps2.is_finite()) {
            return Err(SpreadError::Contour("non-finite shift".into()));
        }
        if self.eps2 <= 0.0 {
            return Err(SpreadError::Contour(format!(
                "eps2 = {} must be positive",
                self.eps2
            )));
        }
        if self.eps1 + self.eps2 >= -1.0 {
            return Err(SpreadError::Contour(format!(
                "eps1 + eps2 = {} must be below -1",
                self.eps1 + self.eps2
            )));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.eps1, self.eps2]
    }
}

impl Default for EpsilonShift2 {
    fn default() -> Self {
        EpsilonShift2 {
            eps1: -3.0,
            eps2: 1.0,
        }
    }
}

/// Contour shift for the basket transform: `eps` for the short legs and
/// `eps_tilde` for the long asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonShiftM {
    pub eps: Vec<f64>,
    pub eps_tilde: f64,
}

impl EpsilonShiftM {
    pub fn new(eps: Vec<f64>, eps_tilde: f64) -> Result<Self> {
        let e = EpsilonShiftM { eps, eps_tilde };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.is_empty() {
            return Err(SpreadError::Contour("basket needs at least one short leg".into()));
        }
        if self.eps.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(SpreadError::Contour(
                "every short-leg shift must be positive".into(),
            ));
        }
        let bound = -1.0 - self.eps.iter().sum::<f64>();
        if !self.eps_tilde.is_finite() || self.eps_tilde > bound {
            return Err(SpreadError::Contour(format!(
                "eps_tilde = {} must not exceed {}",
                self.eps_tilde, bound
            )));
        }
        Ok(())
    }

    /// Shifts in grid-axis order: long asset first, then the short legs.
    pub fn axis_shifts(&self) -> Vec<f64> {
        std::iter::once(self.eps_tilde)
            .chain(self.eps.iter().copied())
            .collect()
    }
}

/// Log of the basket transform. `short` are the frequencies of the short legs.
pub fn log_phat_m(short: &[Complex64], long: Complex64) -> Result<Complex64> {
    let total = short.iter().fold(long, |acc, u| acc + u);
    let mut acc = log_gamma(I * total - 1.0)?;
    for u in short {
        acc += log_gamma(-I * u)?;
    }
    Ok(acc - log_gamma(I * long + 1.0)?)
}

/// Basket-spread payoff transform at `(u, u_tilde)`.
pub fn phat_m(short: &[Complex64], long: Complex64) -> Result<Complex64> {
    Ok(log_phat_m(short, long)?.exp())
}

/// Spread payoff transform at `(u1, u2)`.
///
/// The spread is the one-leg basket with `u1` on the long asset.
pub fn phat2(u1: Complex64, u2: Complex64) -> Result<Complex64> {
    phat_m(&[u2], u1)
}

/// Upper bound on `|P^|` along the contour `eps2 = eps`, `eps1 = -1 - 2 eps`.
pub fn phat_bound(u: [f64; 2], eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(SpreadError::Domain(format!("bound needs eps > 0, got {eps}")));
    }
    let beta = gamma_real(eps)? * gamma_real(2.0 + eps)? / gamma_real(2.0 + 2.0 * eps)?;
    let z = (u[0] * u[0] + u[1] * u[1]) / 5.0;
    let q = (z + eps * eps) * (z + (1.0 + eps) * (1.0 + eps));
    Ok(beta / q.sqrt())
}

/// `(e^x1 - e^x2 - 1)^+`
pub fn payoff2(x1: f64, x2: f64) -> f64 {
    (x1.exp() - x2.exp() - 1.0).max(0.0)
}

/// `(e^x~ - sum_m e^x_m - 1)^+`
pub fn payoff_m(x_tilde: f64, x: &[f64]) -> f64 {
    (x_tilde.exp() - x.iter().map(|v| v.exp()).sum::<f64>() - 1.0).max(0.0)
}
