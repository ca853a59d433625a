use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gaussian_log_cf, gaussian_row_fill, CharModel};
use crate::error::{Result, SpreadError};
use crate::lattice::Lattice;
use crate::payoff::EpsilonShift2;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Steps between exact re-evaluations in the recursive lattice fill.
/// Correlated two-asset geometric Brownian motion with dividend yields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbmParams {
    pub r: f64,
    #[serde(rename = "T", alias = "maturity")]
    pub maturity: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    #[serde(default)]
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
}

/// Sensitivities available in closed form under GBM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Greek {
    Delta1,
    Delta2,
    Theta,
    Vega1,
    Vega2,
    RhoCorr,
}

impl Greek {
    pub const ALL: [Greek; 6] = [
        Greek::Delta1,
        Greek::Delta2,
        Greek::Theta,
        Greek::Vega1,
        Greek::Vega2,
        Greek::RhoCorr,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Greek::Delta1 => "delta1",
            Greek::Delta2 => "delta2",
            Greek::Theta => "theta",
            Greek::Vega1 => "vega1",
            Greek::Vega2 => "vega2",
            Greek::RhoCorr => "rho_corr",
        }
    }
}

impl std::str::FromStr for Greek {
    type Err = SpreadError;

    fn from_str(s: &str) -> Result<Self> {
        Greek::ALL
            .into_iter()
            .find(|g| g.label() == s)
            .ok_or_else(|| SpreadError::InvalidParameter(format!("unknown greek '{s}'")))
    }
}

impl GbmParams {
    /// r = 0.1, T = 1, sigma = (0.2, 0.1), rho = 0.5, delta = (0.05, 0.05).
    pub fn reference() -> Self {
        GbmParams {
            r: 0.1,
            maturity: 1.0,
            sigma1: 0.2,
            sigma2: 0.1,
            rho: 0.5,
            delta1: 0.05,
            delta2: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.r,
            self.maturity,
            self.sigma1,
            self.sigma2,
            self.rho,
            self.delta1,
            self.delta2,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SpreadError::InvalidParameter("non-finite GBM parameter".into()));
        }
        if self.sigma1 <= 0.0 || self.sigma2 <= 0.0 {
            return Err(SpreadError::InvalidParameter("volatilities must be positive".into()));
        }
        if self.rho.abs() >= 1.0 {
            return Err(SpreadError::InvalidParameter(format!(
                "correlation {} must lie in (-1, 1)",
                self.rho
            )));
        }
        if self.maturity <= 0.0 {
            return Err(SpreadError::InvalidParameter("maturity must be positive".into()));
        }
        Ok(())
    }

    /// Per-unit-time log drift of each asset.
    pub fn drift(&self) -> [f64; 2] {
        [
            self.r - self.delta1 - 0.5 * self.sigma1 * self.sigma1,
            self.r - self.delta2 - 0.5 * self.sigma2 * self.sigma2,
        ]
    }

    /// Row-major covariance per unit time.
    pub fn covariance(&self) -> [f64; 4] {
        let s = [self.sigma1, self.sigma2];
        let c = self.rho * s[0] * s[1];
        [1.0 * s[0] * s[0], c, c, 1.0 * s[1] * s[1]]
    }

    pub fn log_phi(&self, u: [Complex64; 2]) -> Complex64 {
        gaussian_log_cf(&u, &self.drift(), &self.covariance(), self.maturity)
    }

    /// `m(u)` with `H_greek = m(u) H`. Delta multipliers still need the
    /// panel divided by the spot.
    pub fn greek_multiplier(&self, which: Greek, u: [Complex64; 2]) -> Complex64 {
        let t = self.maturity;
        let (s1, s2, rho) = (self.sigma1, self.sigma2, self.rho);
        let [u1, u2] = u;
        match which {
            Greek::Delta1 => I * u1,
            Greek::Delta2 => I * u2,
            Greek::Theta => {
                let m = self.drift();
                let c = self.covariance();
                let quad = u1 * u1 * c[0] + u1 * u2 * (2.0 * c[1]) + u2 * u2 * c[3];
                -self.r + I * (u1 * m[0] + u2 * m[1]) - quad * 0.5
            }
            Greek::Vega1 => {
                -(I * u1 * (2.0 * s1) + u1 * u1 * (2.0 * s1) + u1 * u2 * (2.0 * rho * s2)) * t / 2.0
            }
            Greek::Vega2 => {
                -(I * u2 * (2.0 * s2) + u2 * u2 * (2.0 * s2) + u1 * u2 * (2.0 * rho * s1)) * t / 2.0
            }
            Greek::RhoCorr => -(u1 * u2) * (s1 * s2 * t),
        }
    }

    /// Copy with one parameter bumped by `h`; used by finite differences.
    pub fn bumped(&self, which: Greek, h: f64) -> Self {
        let mut p = self.clone();
        match which {
            Greek::Theta => p.maturity += h,
            Greek::Vega1 => p.sigma1 += h,
            Greek::Vega2 => p.sigma2 += h,
            Greek::RhoCorr => p.rho += h,
            Greek::Delta1 | Greek::Delta2 => {}
        }
        p
    }
}

/// Free-function form of [`GbmParams::greek_multiplier`].
pub fn greek_multiplier_gbm(p: &GbmParams, which: Greek, u: [Complex64; 2]) -> Complex64 {
    p.greek_multiplier(which, u)
}

impl CharModel for GbmParams {
    fn name(&self) -> &'static str {
        "gbm"
    }

    fn rate(&self) -> f64 {
        self.r
    }

    fn maturity(&self) -> f64 {
        self.maturity
    }

    fn phi(&self, u: [Complex64; 2]) -> Result<Complex64> {
        Ok(self.log_phi(u).exp())
    }

    // The log of Phi is quadratic in k2 along a row, so
    // exp(f(k + 1)) = exp(f(k)) * exp(b + c (2k + 1)), and the step multiplier
    // itself advances by exp(2c).
    fn phi_grid(&self, lattice: &Lattice, eps: &EpsilonShift2) -> Result<Vec<Complex64>> {
        let n = lattice.n();
        let drift = self.drift();
        let cov = self.covariance();
        let mut out = vec![Complex64::default(); n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(k1, row)| {
            let z1 = Complex64::new(lattice.u(k1), eps.eps1);
            gaussian_row_fill(&[z1], eps.eps2, lattice, &drift, &cov, self.maturity, row);
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalization_and_martingale() {
        let p = GbmParams::reference();
        assert_eq!(p.phi([c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), c(1.0, 0.0));
        let m1 = p.phi([c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        assert!((m1 - c((0.05f64).exp(), 0.0)).norm() < 1e-12);
        let m2 = p.phi([c(0.0, 0.0), c(0.0, -1.0)]).unwrap();
        assert!((m2 - c((0.05f64).exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        let p = GbmParams::reference();
        let a = p.phi([c(3.1, -3.0), c(-7.2, 1.0)]).unwrap();
        let b = p.phi([c(-3.1, -3.0), c(7.2, 1.0)]).unwrap();
        assert!((a - b.conj()).norm() < 1e-14 * a.norm());
    }

    #[test]
    fn recursive_fill_matches_direct() {
        let p = GbmParams::reference();
        let eps = EpsilonShift2::default();
        for (n, ub) in [(64, 40.0), (256, 40.0), (128, 80.0), (4, 2.0)] {
            let lat = Lattice::new(n, ub).unwrap();
            let grid = p.phi_grid(&lat, &eps).unwrap();
            for k1 in 0..n {
                for k2 in 0..n {
                    let z = [c(lat.u(k1), eps.eps1), c(lat.u(k2), eps.eps2)];
                    let direct = p.phi(z).unwrap();
                    let got = grid[k1 * n + k2];
                    if direct.norm() > 1e-280 {
                        assert!(
                            (got - direct).norm() <= 1e-12 * direct.norm(),
                            "n={n} k=({k1},{k2}) {got} vs {direct}"
                        );
                    } else {
                        assert!(got.norm() < 1e-270);
                    }
                }
            }
        }
    }

    #[test]
    fn vega_multiplier_at_pure_shift() {
        let p = GbmParams::reference();
        let u = [c(0.0, -3.0), c(0.0, 1.0)];
        // -(2i s1 u1 + 2 s1 u1^2 + 2 rho s2 u1 u2) T / 2 with u1 = -3i, u2 = i
        let expect = -(c(0.0, 1.0) * 0.4 * c(0.0, -3.0)
            + 0.4 * c(0.0, -3.0) * c(0.0, -3.0)
            + 0.1 * c(0.0, -3.0) * c(0.0, 1.0))
            / 2.0;
        assert!((p.greek_multiplier(Greek::Vega1, u) - expect).norm() < 1e-15);
    }

    #[test]
    fn multipliers_match_parameter_derivatives() {
        let p = GbmParams::reference();
        let u = [c(1.7, -3.0), c(-0.4, 1.0)];
        let h = 1e-6;
        for g in [Greek::Vega1, Greek::Vega2, Greek::RhoCorr] {
            let up = p.bumped(g, h).log_phi(u);
            let dn = p.bumped(g, -h).log_phi(u);
            let fd = (up - dn) / (2.0 * h);
            assert!((fd - p.greek_multiplier(g, u)).norm() < 1e-6, "{g:?}");
        }
        let disc = |q: &GbmParams| q.log_phi(u) - q.r * q.maturity;
        let fd = (disc(&p.bumped(Greek::Theta, h)) - disc(&p.bumped(Greek::Theta, -h))) / (2.0 * h);
        assert!((fd - p.greek_multiplier(Greek::Theta, u)).norm() < 1e-6);
    }

    #[test]
    fn greek_names_round_trip() {
        for g in Greek::ALL {
            assert_eq!(g.label().parse::<Greek>().unwrap(), g);
        }
        assert!("gamma".parse::<Greek>().is_err());
    }

    #[test]
    fn validation() {
        let mut p = GbmParams::reference();
        assert!(p.validate().is_ok());
        p.rho = 1.0;
        assert!(p.validate().is_err());
        let mut p = GbmParams::reference();
        p.sigma2 = 0.0;
        assert!(p.validate().is_err());
    }
}
