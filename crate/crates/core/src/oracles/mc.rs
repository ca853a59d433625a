//! Monte Carlo simulation of terminal log-returns.
//!
//! Paths are generated in fixed-size chunks. Chunk `c` draws from its own
//! ChaCha8 stream `c` under the configured seed, and chunk statistics are
//! merged pairwise in chunk order, so results do not depend on the number
//! of worker threads.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpreadError};
use crate::models::{GbmBasketParams, GbmParams, Model, SvParams, VgParams};

/// Independent samples (paths, or antithetic pairs) per chunk.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    /// Total number of paths, counting both members of an antithetic pair.
    pub n_paths: u64,
    /// Time steps for models without an exact terminal sampler.
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 200_000,
            n_steps: 200,
            seed: 1,
            antithetic: true,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 4 {
            return Err(SpreadError::InvalidParameter(
                "Monte Carlo needs at least 4 paths".into(),
            ));
        }
        if self.n_steps == 0 {
            return Err(SpreadError::InvalidParameter("n_steps must be positive".into()));
        }
        Ok(())
    }

    /// Independent samples: pairs when antithetic.
    fn units(&self) -> u64 {
        if self.antithetic {
            self.n_paths.div_ceil(2)
        } else {
            self.n_paths
        }
    }
}

/// Discounted price estimate with its standard error, echoing the run
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub price: f64,
    pub std_error: f64,
    pub config: McConfig,
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Moments {
            n,
            mean: a.mean + d * b.n / n,
            m2: a.m2 + b.m2 + d * d * a.n * b.n / n,
        }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2.0 {
            return f64::NAN;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

fn merge_pairwise(mut level: Vec<Vec<Moments>>) -> Vec<Moments> {
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.into_iter().zip(b).map(|(x, y)| Moments::merge(x, y)).collect()),
                None => next.push(a),
            }
        }
        level = next;
    }
    level.pop().unwrap_or_default()
}

/// Draws terminal log-returns `X_T - X_0` for every asset. With `minus`
/// present the antithetic partner is written there.
trait Sampler: Sync {
    fn dims(&self) -> usize;
    fn draw(&self, rng: &mut ChaCha8Rng, plus: &mut [f64], minus: Option<&mut [f64]>);
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

struct GbmSampler {
    drift: [f64; 2],
    sd: [f64; 2],
    rho: f64,
}

impl GbmSampler {
    fn new(p: &GbmParams) -> Self {
        let t = p.maturity;
        let m = p.drift();
        GbmSampler {
            drift: [m[0] * t, m[1] * t],
            sd: [p.sigma1 * t.sqrt(), p.sigma2 * t.sqrt()],
            rho: p.rho,
        }
    }
}

impl Sampler for GbmSampler {
    fn dims(&self) -> usize {
        2
    }

    fn draw(&self, rng: &mut ChaCha8Rng, plus: &mut [f64], minus: Option<&mut [f64]>) {
        let z1 = normal(rng);
        let z2 = self.rho * z1 + (1.0 - self.rho * self.rho).sqrt() * normal(rng);
        plus[0] = self.drift[0] + self.sd[0] * z1;
        plus[1] = self.drift[1] + self.sd[1] * z2;
        if let Some(m) = minus {
            m[0] = self.drift[0] - self.sd[0] * z1;
            m[1] = self.drift[1] - self.sd[1] * z2;
        }
    }
}

struct BasketSampler {
    drift: Vec<f64>,
    chol: DMatrix<f64>,
    /// `sigma_i sqrt(T)` per asset.
    scale: Vec<f64>,
}

impl Sampler for BasketSampler {
    fn dims(&self) -> usize {
        self.drift.len()
    }

    fn draw(&self, rng: &mut ChaCha8Rng, plus: &mut [f64], minus: Option<&mut [f64]>) {
        let d = self.drift.len();
        let z: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        let mut shock = vec![0.0; d];
        for i in 0..d {
            let row: f64 = z[..=i].iter().enumerate().map(|(j, zj)| self.chol[(i, j)] * zj).sum();
            shock[i] = row * self.scale[i];
            plus[i] = self.drift[i] + shock[i];
        }
        if let Some(m) = minus {
            for i in 0..d {
                m[i] = self.drift[i] - shock[i];
            }
        }
    }
}

/// Full-truncation Euler scheme for the shared square-root variance.
struct SvSampler {
    p: SvParams,
    chol: Matrix3<f64>,
    steps: usize,
}

impl SvSampler {
    fn new(p: &SvParams, steps: usize) -> Result<Self> {
        let corr = Matrix3::new(
            1.0, p.rho, p.rho1, //
            p.rho, 1.0, p.rho2, //
            p.rho1, p.rho2, 1.0,
        );
        let chol = corr
            .cholesky()
            .ok_or_else(|| {
                SpreadError::InvalidParameter(
                    "SV correlations (rho, rho1, rho2) are not positive definite".into(),
                )
            })?
            .l();
        Ok(SvSampler {
            p: p.clone(),
            chol,
            steps,
        })
    }
}

#[derive(Clone, Copy)]
struct SvState {
    x1: f64,
    x2: f64,
    v: f64,
}

impl SvSampler {
    fn step(&self, s: &mut SvState, w: [f64; 3], dt: f64, sqrt_dt: f64) {
        let p = &self.p;
        let v = s.v.max(0.0);
        let sv = v.sqrt() * sqrt_dt;
        s.x1 += (p.r - p.delta1 - 0.5 * p.sigma1 * p.sigma1 * v) * dt + p.sigma1 * sv * w[0];
        s.x2 += (p.r - p.delta2 - 0.5 * p.sigma2 * p.sigma2 * v) * dt + p.sigma2 * sv * w[1];
        s.v += p.kappa * (p.mu - v) * dt + p.sigma_v * sv * w[2];
    }
}

impl Sampler for SvSampler {
    fn dims(&self) -> usize {
        2
    }

    fn draw(&self, rng: &mut ChaCha8Rng, plus: &mut [f64], minus: Option<&mut [f64]>) {
        let dt = self.p.maturity / self.steps as f64;
        let sqrt_dt = dt.sqrt();
        let start = SvState {
            x1: 0.0,
            x2: 0.0,
            v: self.p.v0,
        };
        let (mut a, mut b) = (start, start);
        let l = &self.chol;
        let anti = minus.is_some();
        for _ in 0..self.steps {
            let z = [normal(rng), normal(rng), normal(rng)];
            let w = [
                l[(0, 0)] * z[0],
                l[(1, 0)] * z[0] + l[(1, 1)] * z[1],
                l[(2, 0)] * z[0] + l[(2, 1)] * z[1] + l[(2, 2)] * z[2],
            ];
            self.step(&mut a, w, dt, sqrt_dt);
            if anti {
                self.step(&mut b, [-w[0], -w[1], -w[2]], dt, sqrt_dt);
            }
        }
        plus[0] = a.x1;
        plus[1] = a.x2;
        if let Some(m) = minus {
            m[0] = b.x1;
            m[1] = b.x2;
        }
    }
}

/// One variance gamma factor `theta G + sigma sqrt(G) Z`.
struct VgFactor {
    theta: f64,
    sigma: f64,
    clock: Gamma<f64>,
}

impl VgFactor {
    fn new(p: &VgParams, lam: f64) -> Result<Option<Self>> {
        if lam <= 0.0 {
            return Ok(None);
        }
        let (theta, sigma, nu) = p.subordinator(lam);
        let clock = Gamma::new(p.maturity / nu, nu)
            .map_err(|e| SpreadError::InvalidParameter(format!("VG subordinator: {e}")))?;
        Ok(Some(VgFactor { theta, sigma, clock }))
    }

    /// Returns the factor and its antithetic partner (same clock, negated
    /// Brownian increment).
    fn draw(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let g = self.clock.sample(rng);
        let w = self.sigma * g.sqrt() * normal(rng);
        let base = self.theta * g;
        (base + w, base - w)
    }
}

struct VgSampler {
    drift: f64,
    own: Option<VgFactor>,
    common: Option<VgFactor>,
}

impl VgSampler {
    fn new(p: &VgParams) -> Result<Self> {
        Ok(VgSampler {
            drift: p.drift() * p.maturity,
            own: VgFactor::new(p, p.idiosyncratic_intensity())?,
            common: VgFactor::new(p, p.common_intensity())?,
        })
    }
}

impl Sampler for VgSampler {
    fn dims(&self) -> usize {
        2
    }

    fn draw(&self, rng: &mut ChaCha8Rng, plus: &mut [f64], minus: Option<&mut [f64]>) {
        let mut f = |factor: &Option<VgFactor>| factor.as_ref().map_or((0.0, 0.0), |x| x.draw(rng));
        let y1 = f(&self.own);
        let y2 = f(&self.own);
        let y = f(&self.common);
        plus[0] = self.drift + y1.0 + y.0;
        plus[1] = self.drift + y2.0 + y.0;
        if let Some(m) = minus {
            m[0] = self.drift + y1.1 + y.1;
            m[1] = self.drift + y2.1 + y.1;
        }
    }
}

fn sampler_for(model: &Model, cfg: &McConfig) -> Result<Box<dyn Sampler>> {
    model.validate()?;
    Ok(match model {
        Model::Gbm(p) => Box::new(GbmSampler::new(p)),
        Model::Sv(p) => Box::new(SvSampler::new(p, cfg.n_steps)?),
        Model::Vg(p) => Box::new(VgSampler::new(p)?),
    })
}

/// Means and standard errors of `stat` over simulated log-returns.
fn simulate<F>(sampler: &dyn Sampler, cfg: &McConfig, n_out: usize, stat: F) -> Result<Vec<Moments>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    cfg.validate()?;
    let units = cfg.units();
    let chunks = units.div_ceil(CHUNK);
    let d = sampler.dims();
    let per_chunk: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let count = CHUNK.min(units - c * CHUNK);
            let mut acc = vec![Moments::default(); n_out];
            let (mut plus, mut minus) = (vec![0.0; d], vec![0.0; d]);
            let (mut a, mut b) = (vec![0.0; n_out], vec![0.0; n_out]);
            for _ in 0..count {
                if cfg.antithetic {
                    sampler.draw(&mut rng, &mut plus, Some(&mut minus));
                    stat(&plus, &mut a);
                    stat(&minus, &mut b);
                    for j in 0..n_out {
                        acc[j].push(0.5 * (a[j] + b[j]));
                    }
                } else {
                    sampler.draw(&mut rng, &mut plus, None);
                    stat(&plus, &mut a);
                    for j in 0..n_out {
                        acc[j].push(a[j]);
                    }
                }
            }
            acc
        })
        .collect();
    Ok(merge_pairwise(per_chunk))
}

fn check_strikes(strikes: &[f64]) -> Result<()> {
    if strikes.is_empty() {
        return Err(SpreadError::InvalidParameter("no strikes".into()));
    }
    if strikes.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
        return Err(SpreadError::InvalidParameter("strikes must be non-negative".into()));
    }
    Ok(())
}

fn results(moments: Vec<Moments>, discount: f64, cfg: &McConfig) -> Vec<McResult> {
    moments
        .into_iter()
        .map(|m| McResult {
            price: discount * m.mean,
            std_error: discount * m.std_error(),
            config: *cfg,
        })
        .collect()
}

/// Spread option prices `e^{-rT} E[(S1_T - S2_T - K)^+]`, one per strike,
/// all from the same paths.
pub fn mc_prices(model: &Model, s1: f64, s2: f64, strikes: &[f64], cfg: &McConfig) -> Result<Vec<McResult>> {
    check_strikes(strikes)?;
    if !(s1 > 0.0 && s2 > 0.0) {
        return Err(SpreadError::InvalidParameter("spots must be positive".into()));
    }
    let sampler = sampler_for(model, cfg)?;
    let m = simulate(sampler.as_ref(), cfg, strikes.len(), |x, out| {
        let spread = s1 * x[0].exp() - s2 * x[1].exp();
        for (o, k) in out.iter_mut().zip(strikes) {
            *o = (spread - k).max(0.0);
        }
    })?;
    let (r, t) = match model {
        Model::Gbm(p) => (p.r, p.maturity),
        Model::Sv(p) => (p.r, p.maturity),
        Model::Vg(p) => (p.r, p.maturity),
    };
    Ok(results(m, (-r * t).exp(), cfg))
}

pub fn mc_price(model: &Model, s1: f64, s2: f64, k: f64, cfg: &McConfig) -> Result<McResult> {
    Ok(mc_prices(model, s1, s2, &[k], cfg)?.remove(0))
}

/// Basket prices `e^{-rT} E[(S~_T - sum S_m,T - K)^+]`; `spots` lists the
/// long asset first.
pub fn mc_basket_prices(
    model: &GbmBasketParams,
    spots: &[f64],
    strikes: &[f64],
    cfg: &McConfig,
) -> Result<Vec<McResult>> {
    model.validate()?;
    check_strikes(strikes)?;
    if spots.len() != model.dim() || spots.iter().any(|s| !(*s > 0.0)) {
        return Err(SpreadError::InvalidParameter(format!(
            "basket needs {} positive spots",
            model.dim()
        )));
    }
    let t = model.maturity;
    let sampler = BasketSampler {
        drift: model.drift().iter().map(|m| m * t).collect(),
        chol: model.cholesky()?,
        scale: model.sigma.iter().map(|s| s * t.sqrt()).collect(),
    };
    let m = simulate(&sampler, cfg, strikes.len(), |x, out| {
        let mut spread = spots[0] * x[0].exp();
        for (s, xi) in spots[1..].iter().zip(&x[1..]) {
            spread -= s * xi.exp();
        }
        for (o, k) in out.iter_mut().zip(strikes) {
            *o = (spread - k).max(0.0);
        }
    })?;
    Ok(results(m, (-model.r * t).exp(), cfg))
}

/// Sample estimate of `Phi(u; T) = E[exp(i u (X_T - X_0))]` and the
/// standard error of its modulus.
pub fn mc_char_fn(model: &Model, u: [Complex64; 2], cfg: &McConfig) -> Result<(Complex64, f64)> {
    let sampler = sampler_for(model, cfg)?;
    let i = Complex64::new(0.0, 1.0);
    let m = simulate(sampler.as_ref(), cfg, 2, |x, out| {
        let v = (i * (u[0] * x[0] + u[1] * x[1])).exp();
        out[0] = v.re;
        out[1] = v.im;
    })?;
    let se = m[0].std_error().hypot(m[1].std_error());
    Ok((Complex64::new(m[0].mean, m[1].mean), se))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u64, antithetic: bool) -> McConfig {
        McConfig {
            n_paths: n,
            n_steps: 50,
            seed: 7,
            antithetic,
        }
    }

    #[test]
    fn moments_merge_matches_direct() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 * 0.3).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let parts: Vec<Vec<Moments>> = xs
            .chunks(17)
            .map(|c| {
                let mut m = Moments::default();
                c.iter().for_each(|&x| m.push(x));
                vec![m]
            })
            .collect();
        let merged = merge_pairwise(parts)[0];
        assert!((merged.mean - all.mean).abs() < 1e-14);
        assert!((merged.m2 - all.m2).abs() < 1e-11);
    }

    #[test]
    fn deterministic_given_seed() {
        let m = Model::Gbm(GbmParams::reference());
        let a = mc_price(&m, 100.0, 96.0, 4.0, &cfg(20_000, true)).unwrap();
        let b = mc_price(&m, 100.0, 96.0, 4.0, &cfg(20_000, true)).unwrap();
        assert_eq!(a, b);
        let mut other = cfg(20_000, true);
        other.seed = 8;
        let c = mc_price(&m, 100.0, 96.0, 4.0, &other).unwrap();
        assert_ne!(a.price, c.price);
    }

    #[test]
    fn gbm_martingale() {
        let p = GbmParams::reference();
        let m = Model::Gbm(p.clone());
        // K = 0 and a negligible second spot price the discounted first asset.
        let r = mc_price(&m, 100.0, 1e-12, 0.0, &cfg(200_000, true)).unwrap();
        let expect = 100.0 * (-p.delta1 * p.maturity).exp();
        assert!((r.price - expect).abs() < 4.0 * r.std_error + 1e-9, "{r:?} vs {expect}");
    }

    #[test]
    fn sv_correlation_must_be_positive_definite() {
        let mut p = SvParams::reference();
        p.rho = 0.95;
        p.rho1 = 0.95;
        p.rho2 = -0.95;
        assert!(mc_price(&Model::Sv(p), 100.0, 96.0, 4.0, &cfg(100, false)).is_err());
    }

    #[test]
    fn vg_without_common_factor() {
        let mut p = VgParams::reference();
        p.alpha = 0.0;
        let r = mc_price(&Model::Vg(p), 100.0, 96.0, 4.0, &cfg(1000, true)).unwrap();
        assert!(r.price.is_finite() && r.price > 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let m = Model::Gbm(GbmParams::reference());
        assert!(mc_price(&m, 100.0, 96.0, 4.0, &cfg(2, false)).is_err());
        assert!(mc_prices(&m, 100.0, 96.0, &[], &cfg(100, false)).is_err());
        let mut c = cfg(100, false);
        c.n_steps = 0;
        assert!(mc_price(&m, 100.0, 96.0, 4.0, &c).is_err());
    }
}
