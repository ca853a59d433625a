//! Characteristic functions of the joint terminal log-price.
//!
//! Every model is homogeneous: `E[exp(i u X_T')] = exp(i u X_0') Phi(u; T)`,
//! so only `Phi` is needed by the pricer. Frequencies are complex; the pricer
//! evaluates on `u = real + i eps`.

mod basket;
mod gbm;
mod sv;
mod vg;

pub use basket::GbmBasketParams;
pub use gbm::{greek_multiplier_gbm, GbmParams, Greek};
pub use sv::SvParams;
pub use vg::VgParams;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::Lattice;
use crate::payoff::EpsilonShift2;

/// A two-asset model exposing `Phi(u; T)`.
pub trait CharModel: Sync {
    fn name(&self) -> &'static str;
    fn rate(&self) -> f64;
    fn maturity(&self) -> f64;

    fn phi(&self, u: [Complex64; 2]) -> Result<Complex64>;

    /// Model-specific admissibility of the contour shift.
    fn check_contour(&self, _eps: &EpsilonShift2) -> Result<()> {
        Ok(())
    }

    /// `Phi(u(k) + i eps)` over the lattice, row-major in `(k1, k2)`.
    fn phi_grid(&self, lattice: &Lattice, eps: &EpsilonShift2) -> Result<Vec<Complex64>> {
        let n = lattice.n();
        (0..n * n)
            .into_par_iter()
            .map(|flat| {
                let z1 = Complex64::new(lattice.u(flat / n), eps.eps1);
                let z2 = Complex64::new(lattice.u(flat % n), eps.eps2);
                self.phi([z1, z2])
            })
            .collect()
    }
}

/// Any of the shipped two-asset models, as read from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Gbm(GbmParams),
    Sv(SvParams),
    Vg(VgParams),
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Gbm(p) => p.validate(),
            Model::Sv(p) => p.validate(),
            Model::Vg(p) => p.validate(),
        }
    }

    pub fn as_gbm(&self) -> Option<&GbmParams> {
        match self {
            Model::Gbm(p) => Some(p),
            _ => None,
        }
    }
}

impl CharModel for Model {
    fn name(&self) -> &'static str {
        match self {
            Model::Gbm(p) => p.name(),
            Model::Sv(p) => p.name(),
            Model::Vg(p) => p.name(),
        }
    }

    fn rate(&self) -> f64 {
        match self {
            Model::Gbm(p) => p.rate(),
            Model::Sv(p) => p.rate(),
            Model::Vg(p) => p.rate(),
        }
    }

    fn maturity(&self) -> f64 {
        match self {
            Model::Gbm(p) => p.maturity(),
            Model::Sv(p) => p.maturity(),
            Model::Vg(p) => p.maturity(),
        }
    }

    fn phi(&self, u: [Complex64; 2]) -> Result<Complex64> {
        match self {
            Model::Gbm(p) => p.phi(u),
            Model::Sv(p) => p.phi(u),
            Model::Vg(p) => p.phi(u),
        }
    }

    fn check_contour(&self, eps: &EpsilonShift2) -> Result<()> {
        match self {
            Model::Gbm(p) => p.check_contour(eps),
            Model::Sv(p) => p.check_contour(eps),
            Model::Vg(p) => p.check_contour(eps),
        }
    }

    fn phi_grid(&self, lattice: &Lattice, eps: &EpsilonShift2) -> Result<Vec<Complex64>> {
        match self {
            Model::Gbm(p) => p.phi_grid(lattice, eps),
            Model::Sv(p) => p.phi_grid(lattice, eps),
            Model::Vg(p) => p.phi_grid(lattice, eps),
        }
    }
}

/// `i u m' T - u C u' T / 2` for a Gaussian log-return with drift `m` and
/// covariance `C`, both per unit time.
/// Steps between direct re-evaluations in [`gaussian_row_fill`].
const RESEED: usize = 32;

/// Gaussian characteristic function along the last lattice axis with the
/// leading frequencies `head` held fixed. The exponent is quadratic in
/// `k`, so each value is the previous one times a running multiplier
/// `e^{b + (2k + 1) c}`; the row is re-seeded exactly every `RESEED` steps.
pub(crate) fn gaussian_row_fill(
    head: &[Complex64],
    shift: f64,
    lattice: &Lattice,
    drift: &[f64],
    cov: &[f64],
    t: f64,
    row: &mut [Complex64],
) {
    let d = head.len() + 1;
    let last = d - 1;
    let eta = lattice.eta();
    let n = row.len();
    let c = Complex64::new(-0.5 * cov[last * d + last] * t * eta * eta, 0.0);
    let accel = (2.0 * c).exp();
    let mut cross = Complex64::default();
    for j in 0..last {
        cross += head[j] * cov[j * d + last];
    }
    let mut u = head.to_vec();
    u.push(Complex64::default());
    let mut k0 = 0;
    while k0 < n {
        let z = Complex64::new(lattice.u(k0), shift);
        u[last] = z;
        let b = (Complex64::i() * drift[last] - (cross + z * cov[last * d + last])) * (t * eta);
        let mut val = gaussian_log_cf(&u, drift, cov, t).exp();
        let mut step = (b + c).exp();
        let end = (k0 + RESEED).min(n);
        for slot in &mut row[k0..end] {
            *slot = val;
            val *= step;
            step *= accel;
        }
        k0 = end;
    }
}

pub(crate) fn gaussian_log_cf(u: &[Complex64], drift: &[f64], cov: &[f64], t: f64) -> Complex64 {
    let d = u.len();
    let mut lin = Complex64::default();
    for j in 0..d {
        lin += u[j] * drift[j];
    }
    let mut quad = Complex64::default();
    for j in 0..d {
        for k in 0..d {
            quad += u[j] * u[k] * cov[j * d + k];
        }
    }
    Complex64::i() * lin * t - quad * (t / 2.0)
}
