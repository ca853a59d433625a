use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CharModel;
use crate::error::{Result, SpreadError};
use crate::payoff::EpsilonShift2;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Bivariate variance gamma built from two idiosyncratic factors and one
/// common factor, all with tail rates `a_plus`, `a_minus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VgParams {
    pub r: f64,
    #[serde(rename = "T", alias = "maturity")]
    pub maturity: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub alpha: f64,
    pub lambda: f64,
    /// Add the per-asset drift that makes `e^{-rt} S_t` a martingale.
    #[serde(default)]
    pub martingale_drift: bool,
}

impl VgParams {
    /// a+ = 20.4499, a- = 24.4499, alpha = 0.4, lambda = 10, r = 0.1, T = 1.
    pub fn reference() -> Self {
        VgParams {
            r: 0.1,
            maturity: 1.0,
            a_plus: 20.4499,
            a_minus: 24.4499,
            alpha: 0.4,
            lambda: 10.0,
            martingale_drift: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.r,
            self.maturity,
            self.a_plus,
            self.a_minus,
            self.alpha,
            self.lambda,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SpreadError::InvalidParameter("non-finite VG parameter".into()));
        }
        if self.a_plus <= 0.0 || self.a_minus <= 0.0 {
            return Err(SpreadError::InvalidParameter("tail rates must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(SpreadError::InvalidParameter(format!(
                "alpha = {} must lie in [0, 1]",
                self.alpha
            )));
        }
        if self.lambda <= 0.0 {
            return Err(SpreadError::InvalidParameter("lambda must be positive".into()));
        }
        if self.maturity <= 0.0 {
            return Err(SpreadError::InvalidParameter("maturity must be positive".into()));
        }
        Ok(())
    }

    /// `log[1 + i(1/a- - 1/a+) u + u^2/(a- a+)]` as the sum of two logs, each
    /// with positive real part on the admissible strip.
    pub fn factor_log(&self, u: Complex64) -> Complex64 {
        (1.0 + I * u / self.a_minus).ln() + (1.0 - I * u / self.a_plus).ln()
    }

    /// Log drift per unit time added to each asset.
    pub fn drift(&self) -> f64 {
        if self.martingale_drift {
            self.r + self.lambda * ((1.0 + 1.0 / self.a_minus) * (1.0 - 1.0 / self.a_plus)).ln()
        } else {
            0.0
        }
    }

    /// Gamma-subordinator form of one factor with intensity `lam`:
    /// `(theta, sigma, nu)` so that the factor is `theta G + sigma W(G)` with
    /// `G_t ~ Gamma(shape t / nu, scale nu)`.
    pub fn subordinator(&self, lam: f64) -> (f64, f64, f64) {
        let theta = lam * (1.0 / self.a_plus - 1.0 / self.a_minus);
        let sigma = (2.0 * lam / (self.a_minus * self.a_plus)).sqrt();
        (theta, sigma, 1.0 / lam)
    }

    pub fn idiosyncratic_intensity(&self) -> f64 {
        (1.0 - self.alpha) * self.lambda
    }

    pub fn common_intensity(&self) -> f64 {
        self.alpha * self.lambda
    }
}

impl CharModel for VgParams {
    fn name(&self) -> &'static str {
        "vg"
    }

    fn rate(&self) -> f64 {
        self.r
    }

    fn maturity(&self) -> f64 {
        self.maturity
    }

    fn phi(&self, u: [Complex64; 2]) -> Result<Complex64> {
        let t = self.maturity;
        let [u1, u2] = u;
        let common = -self.common_intensity() * t * self.factor_log(u1 + u2);
        let own = -self.idiosyncratic_intensity() * t * (self.factor_log(u1) + self.factor_log(u2));
        Ok((common + own + I * (u1 + u2) * (self.drift() * t)).exp())
    }

    fn check_contour(&self, eps: &EpsilonShift2) -> Result<()> {
        for (name, e) in [
            ("eps1", eps.eps1),
            ("eps2", eps.eps2),
            ("eps1 + eps2", eps.eps1 + eps.eps2),
        ] {
            if !(e > -self.a_plus && e < self.a_minus) {
                return Err(SpreadError::Contour(format!(
                    "{name} = {e} outside ({}, {})",
                    -self.a_plus, self.a_minus
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn raw_power(p: &VgParams, u: Complex64, expo: f64) -> Complex64 {
        let base = 1.0
            + I * (1.0 / p.a_minus - 1.0 / p.a_plus) * u
            + u * u / (p.a_minus * p.a_plus);
        base.powf(-expo)
    }

    #[test]
    fn normalization() {
        let p = VgParams::reference();
        assert_eq!(p.phi([c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn factorizes_without_common_factor() {
        let mut p = VgParams::reference();
        p.alpha = 0.0;
        let u1 = c(1.3, -3.0);
        let u2 = c(-4.1, 1.0);
        let z = c(0.0, 0.0);
        let joint = p.phi([u1, u2]).unwrap();
        let prod = p.phi([u1, z]).unwrap() * p.phi([z, u2]).unwrap();
        assert!((joint - prod).norm() < 1e-14 * joint.norm());
    }

    #[test]
    fn full_common_factor_depends_on_sum() {
        let mut p = VgParams::reference();
        p.alpha = 1.0;
        let a = p.phi([c(1.0, -3.0), c(2.0, 1.0)]).unwrap();
        let b = p.phi([c(2.5, -2.5), c(0.5, 0.5)]).unwrap();
        assert!((a - b).norm() < 1e-14 * a.norm());
    }

    #[test]
    fn matches_three_factor_product_near_origin() {
        let p = VgParams::reference();
        let t = p.maturity;
        let u1 = c(1.0, -3.0);
        let u2 = c(1.0, 1.0);
        let expect = raw_power(&p, u1 + u2, p.common_intensity() * t)
            * raw_power(&p, u1, p.idiosyncratic_intensity() * t)
            * raw_power(&p, u2, p.idiosyncratic_intensity() * t);
        let got = p.phi([u1, u2]).unwrap();
        assert!((got - expect).norm() < 1e-12 * expect.norm(), "{got} vs {expect}");
    }

    #[test]
    fn martingale_with_drift() {
        let mut p = VgParams::reference();
        p.martingale_drift = true;
        let v = p.phi([c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        assert!((v - c(p.r.exp(), 0.0)).norm() < 1e-10);
        let v = p.phi([c(0.0, 0.0), c(0.0, -1.0)]).unwrap();
        assert!((v - c(p.r.exp(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn conjugate_symmetry() {
        let p = VgParams::reference();
        let a = p.phi([c(17.0, -3.0), c(-33.0, 1.0)]).unwrap();
        let b = p.phi([c(-17.0, -3.0), c(33.0, 1.0)]).unwrap();
        assert!((a - b.conj()).norm() < 1e-14 * a.norm());
    }

    #[test]
    fn strip_condition() {
        let p = VgParams::reference();
        assert!(p.check_contour(&EpsilonShift2::default()).is_ok());
        let bad = EpsilonShift2 {
            eps1: -30.0,
            eps2: 1.0,
        };
        assert!(matches!(p.check_contour(&bad), Err(SpreadError::Contour(_))));
    }

    #[test]
    fn subordinator_reproduces_factor_cf() {
        // E exp(iu(theta G + sigma W_G)) = (1 - i theta nu u + sigma^2 nu u^2 / 2)^{-t/nu}
        let p = VgParams::reference();
        let lam = 6.0;
        let (theta, sigma, nu) = p.subordinator(lam);
        let u = c(2.3, 0.0);
        let lhs = (1.0 - I * theta * nu * u + sigma * sigma * nu * u * u / 2.0).powf(-1.0 / nu);
        let rhs = (-lam * p.factor_log(u)).exp();
        assert!((lhs - rhs).norm() < 1e-13);
    }
}
