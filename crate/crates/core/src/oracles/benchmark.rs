use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Result, SpreadError};
use crate::models::GbmParams;
use crate::quadrature::integrate_adaptive;

/// Integration range for the conditioning normal.
const Z_MAX: f64 = 14.0;

/// GBM spread price by one-dimensional quadrature: conditional on the
/// second asset's normal driver, the first asset is lognormal and the
/// payoff is a call struck at `S2T + K`.
pub fn gbm_benchmark(p: &GbmParams, s1: f64, s2: f64, k: f64) -> Result<f64> {
    p.validate()?;
    if !(k > 0.0 && s1 > 0.0 && s2 > 0.0) {
        return Err(SpreadError::InvalidParameter(
            "benchmark needs positive spots and strike".into(),
        ));
    }
    let std = Normal::standard();
    let t = p.maturity;
    let m = p.drift();
    let sd1 = p.sigma1 * t.sqrt();
    let sd2 = p.sigma2 * t.sqrt();
    let cond_sd = sd1 * (1.0 - p.rho * p.rho).sqrt();
    let x1 = s1.ln() + m[0] * t;
    let x2 = s2.ln() + m[1] * t;

    let integrand = |z: f64| {
        let strike = (x2 + sd2 * z).exp() + k;
        let mean = x1 + p.rho * sd1 * z;
        let forward = (mean + 0.5 * cond_sd * cond_sd).exp();
        let call = if cond_sd > 0.0 {
            let d1 = ((forward / strike).ln() + 0.5 * cond_sd * cond_sd) / cond_sd;
            forward * std.cdf(d1) - strike * std.cdf(d1 - cond_sd)
        } else {
            (forward - strike).max(0.0)
        };
        call * std.pdf(z)
    };
    let v = integrate_adaptive(integrand, -Z_MAX, Z_MAX, 1e-300, 1e-13, 4000)?;
    Ok((-p.r * t).exp() * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_zero_strike_is_margrabe() {
        // With K -> 0 the price tends to the exchange option.
        let p = GbmParams::reference();
        let (s1, s2) = (100.0, 96.0);
        let t = p.maturity;
        let vol = (p.sigma1.powi(2) + p.sigma2.powi(2) - 2.0 * p.rho * p.sigma1 * p.sigma2).sqrt()
            * t.sqrt();
        let f1 = s1 * (-p.delta1 * t).exp();
        let f2 = s2 * (-p.delta2 * t).exp();
        let d1 = ((f1 / f2).ln() + 0.5 * vol * vol) / vol;
        let n = Normal::standard();
        let margrabe = f1 * n.cdf(d1) - f2 * n.cdf(d1 - vol);
        let got = gbm_benchmark(&p, s1, s2, 1e-12).unwrap();
        assert!((got - margrabe).abs() < 1e-9, "{got} vs {margrabe}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = GbmParams::reference();
        assert!(gbm_benchmark(&p, 100.0, 96.0, 0.0).is_err());
        assert!(gbm_benchmark(&p, -1.0, 96.0, 1.0).is_err());
    }
}
