//! Frequency lattice and its reciprocal log-price lattice.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, SpreadError};

/// Square frequency lattice `u(k) = -u_bar + k eta`, `k = 0..n`, and the
/// reciprocal log-price lattice `x(l) = -x_bar + l eta_star` with
/// `eta * eta_star * n = 2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    n: usize,
    eta: f64,
}

impl Lattice {
    /// Lattice with `n` points per axis spanning `[-u_bar, u_bar)`.
    pub fn new(n: usize, u_bar: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(SpreadError::InvalidParameter(format!(
                "lattice size {n} must be a power of two >= 2"
            )));
        }
        if !(u_bar > 0.0) || !u_bar.is_finite() {
            return Err(SpreadError::InvalidParameter(format!(
                "u_bar = {u_bar} must be positive"
            )));
        }
        Ok(Lattice {
            n,
            eta: 2.0 * u_bar / n as f64,
        })
    }

    pub fn from_spacing(n: usize, eta: f64) -> Result<Self> {
        Self::new(n, n as f64 * eta / 2.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn u_bar(&self) -> f64 {
        self.n as f64 * self.eta / 2.0
    }

    pub fn eta_star(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.eta)
    }

    pub fn x_bar(&self) -> f64 {
        self.n as f64 * self.eta_star() / 2.0
    }

    pub fn u(&self, k: usize) -> f64 {
        -self.u_bar() + k as f64 * self.eta
    }

    pub fn x(&self, l: usize) -> f64 {
        -self.x_bar() + l as f64 * self.eta_star()
    }

    /// Fractional index of offset `x` on the reciprocal lattice.
    pub fn x_index(&self, x: f64) -> f64 {
        (x + self.x_bar()) / self.eta_star()
    }

    /// Phase `e^{i u_bar x_bar}` per axis; `+1` when `n` is a multiple of four.
    pub fn corner_sign(&self) -> f64 {
        if self.n.is_multiple_of(4) {
            1.0
        } else {
            -1.0
        }
    }
}
