use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{gaussian_log_cf, GbmParams};
use crate::error::{Result, SpreadError};

/// Correlated GBM on `M + 1` assets. Asset 0 is the long leg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbmBasketParams {
    pub r: f64,
    #[serde(rename = "T", alias = "maturity")]
    pub maturity: f64,
    pub sigma: Vec<f64>,
    pub corr: Vec<Vec<f64>>,
    pub delta: Vec<f64>,
}

impl GbmBasketParams {
    /// Equal pairwise correlation `rho` across all assets.
    pub fn uniform(r: f64, maturity: f64, sigma: Vec<f64>, rho: f64, delta: Vec<f64>) -> Self {
        let d = sigma.len();
        let corr = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { rho }).collect())
            .collect();
        GbmBasketParams {
            r,
            maturity,
            sigma,
            corr,
            delta,
        }
    }

    /// The bivariate model as a one-leg basket.
    pub fn from_pair(p: &GbmParams) -> Self {
        GbmBasketParams {
            r: p.r,
            maturity: p.maturity,
            sigma: vec![p.sigma1, p.sigma2],
            corr: vec![vec![1.0, p.rho], vec![p.rho, 1.0]],
            delta: vec![p.delta1, p.delta2],
        }
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d < 2 {
            return Err(SpreadError::InvalidParameter("basket needs at least two assets".into()));
        }
        if self.delta.len() != d || self.corr.len() != d || self.corr.iter().any(|row| row.len() != d) {
            return Err(SpreadError::InvalidParameter(format!(
                "basket parameter shapes disagree with {d} assets"
            )));
        }
        if self.sigma.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(SpreadError::InvalidParameter("volatilities must be positive".into()));
        }
        if !(self.maturity > 0.0) || !self.r.is_finite() || self.delta.iter().any(|v| !v.is_finite()) {
            return Err(SpreadError::InvalidParameter("invalid rate, yield or maturity".into()));
        }
        for i in 0..d {
            if self.corr[i][i] != 1.0 {
                return Err(SpreadError::InvalidParameter("correlation diagonal must be 1".into()));
            }
            for j in 0..i {
                if self.corr[i][j] != self.corr[j][i] || !self.corr[i][j].is_finite() {
                    return Err(SpreadError::InvalidParameter("correlation must be symmetric".into()));
                }
            }
        }
        self.cholesky().map(|_| ())
    }

    /// Lower Cholesky factor of the correlation matrix.
    pub fn cholesky(&self) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| self.corr[i][j]);
        m.cholesky()
            .map(|c| c.l())
            .ok_or_else(|| SpreadError::InvalidParameter("correlation is not positive definite".into()))
    }

    pub fn drift(&self) -> Vec<f64> {
        self.sigma
            .iter()
            .zip(&self.delta)
            .map(|(s, d)| self.r - d - 0.5 * s * s)
            .collect()
    }

    pub fn covariance(&self) -> Vec<f64> {
        let d = self.dim();
        let mut c = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                c[i * d + j] = self.corr[i][j] * self.sigma[i] * self.sigma[j];
            }
        }
        c
    }

    pub fn log_phi(&self, u: &[Complex64]) -> Complex64 {
        gaussian_log_cf(u, &self.drift(), &self.covariance(), self.maturity)
    }

    pub fn phi(&self, u: &[Complex64]) -> Complex64 {
        self.log_phi(u).exp()
    }
}
