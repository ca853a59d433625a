use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::CharModel;
use crate::error::{Result, SpreadError};
use crate::lattice::Lattice;
use crate::payoff::EpsilonShift2;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest phase change of the log argument tolerated between neighbouring
/// lattice points before the unwrapping is considered ambiguous.
const MAX_PHASE_STEP: f64 = 0.75 * PI;

/// Two assets sharing one square-root variance factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvParams {
    pub r: f64,
    #[serde(rename = "T", alias = "maturity")]
    pub maturity: f64,
    #[serde(default)]
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub v0: f64,
    pub kappa: f64,
    pub mu: f64,
    pub sigma_v: f64,
    /// Use `1 - e^{-theta T}` in the leading denominator. When false the
    /// factor is `1 - e^{-theta}`.
    #[serde(default = "default_true", rename = "sv_denominator_T", alias = "denominator_t")]
    pub denominator_t: bool,
}

fn default_true() -> bool {
    true
}

/// Pieces of the exponent at one frequency.
struct Parts {
    affine: Complex64,
    log_arg: Complex64,
    log_scale: f64,
}

impl SvParams {
    /// r = 0.1, T = 1, rho = 0.5, delta = (0.05, 0.05), sigma = (1.0, 0.5),
    /// rho1 = -0.5, rho2 = 0.25, v0 = mu = 0.04, kappa = 1, sigma_v = 0.05.
    pub fn reference() -> Self {
        SvParams {
            r: 0.1,
            maturity: 1.0,
            delta1: 0.05,
            delta2: 0.05,
            sigma1: 1.0,
            sigma2: 0.5,
            rho: 0.5,
            rho1: -0.5,
            rho2: 0.25,
            v0: 0.04,
            kappa: 1.0,
            mu: 0.04,
            sigma_v: 0.05,
            denominator_t: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.r,
            self.maturity,
            self.delta1,
            self.delta2,
            self.sigma1,
            self.sigma2,
            self.rho,
            self.rho1,
            self.rho2,
            self.v0,
            self.kappa,
            self.mu,
            self.sigma_v,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SpreadError::InvalidParameter("non-finite SV parameter".into()));
        }
        if self.kappa <= 0.0 || self.mu <= 0.0 || self.sigma_v <= 0.0 {
            return Err(SpreadError::InvalidParameter(
                "kappa, mu and sigma_v must be positive".into(),
            ));
        }
        if self.v0 < 0.0 {
            return Err(SpreadError::InvalidParameter("v0 must be non-negative".into()));
        }
        if self.sigma1 <= 0.0 || self.sigma2 <= 0.0 {
            return Err(SpreadError::InvalidParameter("volatilities must be positive".into()));
        }
        for (name, v) in [("rho", self.rho), ("rho1", self.rho1), ("rho2", self.rho2)] {
            if v.abs() >= 1.0 {
                return Err(SpreadError::InvalidParameter(format!(
                    "{name} = {v} must lie in (-1, 1)"
                )));
            }
        }
        if self.maturity <= 0.0 {
            return Err(SpreadError::InvalidParameter("maturity must be positive".into()));
        }
        Ok(())
    }

    fn parts(&self, u: [Complex64; 2]) -> Parts {
        let [u1, u2] = u;
        let (s1, s2) = (self.sigma1, self.sigma2);
        let t = self.maturity;
        let sv2 = self.sigma_v * self.sigma_v;

        let zeta = -0.5
            * ((u1 * u1 * (s1 * s1) + u2 * u2 * (s2 * s2) + u1 * u2 * (2.0 * self.rho * s1 * s2))
                + I * (u1 * (s1 * s1) + u2 * (s2 * s2)));
        let gamma = self.kappa - I * (u1 * (self.rho1 * s1) + u2 * (self.rho2 * s2)) * self.sigma_v;
        let theta = (gamma * gamma - 2.0 * sv2 * zeta).sqrt();

        let decay_t = 1.0 - (-theta * t).exp();
        let decay_lead = if self.denominator_t {
            decay_t
        } else {
            1.0 - (-theta).exp()
        };
        let lead = 2.0 * zeta * decay_t / (2.0 * theta - (theta - gamma) * decay_lead) * self.v0;
        let drift = I * (u1 * (self.r - self.delta1) + u2 * (self.r - self.delta2)) * t;
        let log_arg = (2.0 * theta - (theta - gamma) * decay_t) / (2.0 * theta);
        let scale = self.kappa * self.mu / sv2;

        Parts {
            affine: lead + drift - scale * (theta - gamma) * t,
            log_arg,
            log_scale: -2.0 * scale,
        }
    }

    fn assemble(p: &Parts, log: Complex64) -> Complex64 {
        (p.affine + p.log_scale * log).exp()
    }
}

impl CharModel for SvParams {
    fn name(&self) -> &'static str {
        "sv"
    }

    fn rate(&self) -> f64 {
        self.r
    }

    fn maturity(&self) -> f64 {
        self.maturity
    }

    /// Pointwise evaluation with the principal logarithm.
    fn phi(&self, u: [Complex64; 2]) -> Result<Complex64> {
        let p = self.parts(u);
        Ok(Self::assemble(&p, p.log_arg.ln()))
    }

    // The logarithm is unwrapped outward from the lattice centre, first along
    // the centre column and then along every row, so that it stays continuous
    // from u = 0 where the principal branch is correct.
    fn phi_grid(&self, lattice: &Lattice, eps: &EpsilonShift2) -> Result<Vec<Complex64>> {
        let n = lattice.n();
        let mid = n / 2;
        let z = |k: usize, e: f64| Complex64::new(lattice.u(k), e);

        let parts: Vec<Parts> = (0..n * n)
            .into_par_iter()
            .map(|flat| self.parts([z(flat / n, eps.eps1), z(flat % n, eps.eps2)]))
            .collect();

        let unwrap = |prev: Complex64, arg: Complex64, row: usize, col: usize| -> Result<Complex64> {
            let principal = arg.ln();
            let turns = ((prev.im - principal.im) / (2.0 * PI)).round();
            let lifted = Complex64::new(principal.re, principal.im + 2.0 * PI * turns);
            if (lifted.im - prev.im).abs() > MAX_PHASE_STEP {
                return Err(SpreadError::Branch { row, col });
            }
            Ok(lifted)
        };

        let mut spine = vec![Complex64::default(); n];
        spine[mid] = parts[mid * n + mid].log_arg.ln();
        for k1 in (mid + 1)..n {
            spine[k1] = unwrap(spine[k1 - 1], parts[k1 * n + mid].log_arg, k1, mid)?;
        }
        for k1 in (0..mid).rev() {
            spine[k1] = unwrap(spine[k1 + 1], parts[k1 * n + mid].log_arg, k1, mid)?;
        }

        let mut out = vec![Complex64::default(); n * n];
        out.par_chunks_mut(n)
            .enumerate()
            .try_for_each(|(k1, row)| -> Result<()> {
                let base = k1 * n;
                let mut logs = vec![Complex64::default(); n];
                logs[mid] = spine[k1];
                for k2 in (mid + 1)..n {
                    logs[k2] = unwrap(logs[k2 - 1], parts[base + k2].log_arg, k1, k2)?;
                }
                for k2 in (0..mid).rev() {
                    logs[k2] = unwrap(logs[k2 + 1], parts[base + k2].log_arg, k1, k2)?;
                }
                for (k2, slot) in row.iter_mut().enumerate() {
                    *slot = Self::assemble(&parts[base + k2], logs[k2]);
                }
                Ok(())
            })?;
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
    fn normalization() {
        let p = SvParams::reference();
        let v = p.phi([c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn martingale_per_asset() {
        let p = SvParams::reference();
        let v = p.phi([c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        assert!((v - c(0.05f64.exp(), 0.0)).norm() < 1e-12, "{v}");
        let v = p.phi([c(0.0, 0.0), c(0.0, -1.0)]).unwrap();
        assert!((v - c(0.05f64.exp(), 0.0)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn conjugate_symmetry() {
        let p = SvParams::reference();
        let a = p.phi([c(2.5, -3.0), c(-1.5, 1.0)]).unwrap();
        let b = p.phi([c(-2.5, -3.0), c(1.5, 1.0)]).unwrap();
        assert!((a - b.conj()).norm() < 1e-13 * a.norm());
    }

    #[test]
    fn reduces_to_gbm_without_vol_of_vol() {
        // sigma_v -> 0 with v0 = mu freezes the variance at v0.
        let mut p = SvParams::reference();
        p.sigma_v = 1e-4;
        let u = [c(0.8, -3.0), c(-0.3, 1.0)];
        let got = p.phi(u).unwrap();
        let g = crate::models::GbmParams {
            r: p.r,
            maturity: p.maturity,
            sigma1: p.sigma1 * p.v0.sqrt(),
            sigma2: p.sigma2 * p.v0.sqrt(),
            rho: p.rho,
            delta1: p.delta1,
            delta2: p.delta2,
        };
        let expect = g.phi(u).unwrap();
        assert!((got - expect).norm() < 1e-3 * expect.norm(), "{got} vs {expect}");
    }

    #[test]
    fn grid_agrees_with_principal_branch_at_unit_maturity() {
        let p = SvParams::reference();
        let lat = Lattice::new(64, 40.0).unwrap();
        let eps = EpsilonShift2::default();
        let grid = p.phi_grid(&lat, &eps).unwrap();
        for k1 in 0..64 {
            for k2 in 0..64 {
                let z = [c(lat.u(k1), eps.eps1), c(lat.u(k2), eps.eps2)];
                let d = p.phi(z).unwrap();
                assert!((grid[k1 * 64 + k2] - d).norm() <= 1e-12 * d.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn grid_stays_continuous_for_long_maturity() {
        let mut p = SvParams::reference();
        p.maturity = 30.0;
        p.sigma_v = 0.9;
        p.kappa = 0.3;
        let lat = Lattice::new(256, 20.0).unwrap();
        let eps = EpsilonShift2::default();
        match p.phi_grid(&lat, &eps) {
            Ok(g) => {
                // Unwrapping only rotates the phase.
                for k1 in (0..256).step_by(7) {
                    for k2 in (0..256).step_by(5) {
                        let z = [c(lat.u(k1), eps.eps1), c(lat.u(k2), eps.eps2)];
                        let d = p.phi(z).unwrap();
                        let got = g[k1 * 256 + k2];
                        assert!((got.norm() - d.norm()).abs() <= 1e-9 * d.norm().max(1e-300));
                    }
                }
            }
            Err(SpreadError::Branch { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn denominator_flag_is_inert_at_unit_maturity() {
        let mut p = SvParams::reference();
        let u = [c(3.0, -3.0), c(2.0, 1.0)];
        let a = p.phi(u).unwrap();
        p.denominator_t = false;
        let b = p.phi(u).unwrap();
        assert_eq!(a, b);
        p.maturity = 2.0;
        let c2 = p.phi(u).unwrap();
        p.denominator_t = true;
        assert_ne!(c2, p.phi(u).unwrap());
    }
}
