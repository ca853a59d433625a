//! FFT pricing of spread panels, Greeks and basket panels.

mod basket;
mod engine;
mod panel;

pub use basket::{price_basket_panel, BasketPanel, BASKET_BUDGET};
pub use panel::{OffNode, PricePanel, PricePath, DEFAULT_TRUST, NEG_CLIP, RESIDUE_FAIL};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpreadError};
use crate::lattice::Lattice;
use crate::models::{CharModel, GbmParams, Greek, Model};
use crate::payoff::EpsilonShift2;
use engine::Frame;
use panel::check_spots;

/// `H(k)` for a panel centred at absolute log-prices `center`. With a zero
/// centre this is `(-1)^{k1+k2} Phi(u(k) + i eps) P^(u(k) + i eps)`.
pub fn build_h<M: CharModel + ?Sized>(
    model: &M,
    lattice: &Lattice,
    eps: &EpsilonShift2,
    center: [f64; 2],
) -> Result<Vec<Complex64>> {
    eps.validate()?;
    model.check_contour(eps)?;
    let mut grid = model.phi_grid(lattice, eps)?;
    let shifts = eps.as_array();
    let frame = Frame {
        lattice,
        shifts: &shifts,
        center: &center,
    };
    engine::build_h(&frame, &mut grid)?;
    Ok(grid)
}

/// Unit-strike price panel centred at absolute log-prices `center`.
pub fn price_panel<M: CharModel + ?Sized>(
    model: &M,
    lattice: &Lattice,
    eps: &EpsilonShift2,
    center: [f64; 2],
) -> Result<PricePanel> {
    let h = build_h(model, lattice, eps, center)?;
    finish(model, lattice, eps, center, h, true)
}

fn finish<M: CharModel + ?Sized>(
    model: &M,
    lattice: &Lattice,
    eps: &EpsilonShift2,
    center: [f64; 2],
    h: Vec<Complex64>,
    clip: bool,
) -> Result<PricePanel> {
    let shifts = eps.as_array();
    let frame = Frame {
        lattice,
        shifts: &shifts,
        center: &center,
    };
    let (raw, paired_im) = engine::invert_paired(&frame, h, model.rate(), model.maturity());
    PricePanel::extract(
        raw,
        &paired_im,
        *lattice,
        *eps,
        center,
        (model.name(), model.rate(), model.maturity()),
        clip,
    )
}

/// Price of one spread option from a panel centred on `log(S / K)`.
pub fn price_at<M: CharModel + ?Sized>(
    model: &M,
    s1: f64,
    s2: f64,
    k: f64,
    lattice: &Lattice,
    eps: &EpsilonShift2,
) -> Result<f64> {
    check_spots(s1, s2, k)?;
    let center = [(s1 / k).ln(), (s2 / k).ln()];
    let panel = price_panel(model, lattice, eps, center)?;
    let mid = lattice.n() / 2;
    Ok(k * panel.value(mid, mid))
}

/// Prices for many strikes at one spot pair from a single panel, by the
/// diagonal polynomial fit. The panel is centred at the geometric middle of
/// the strike range.
pub fn price_strikes<M: CharModel + ?Sized>(
    model: &M,
    s1: f64,
    s2: f64,
    strikes: &[f64],
    lattice: &Lattice,
    eps: &EpsilonShift2,
    degree: usize,
) -> Result<Vec<f64>> {
    if strikes.is_empty() {
        return Err(SpreadError::InvalidParameter("no strikes".into()));
    }
    for &k in strikes {
        check_spots(s1, s2, k)?;
    }
    let lo = strikes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = strikes.iter().copied().fold(0.0, f64::max);
    let k_mid = (lo * hi).sqrt();
    let panel = price_panel(model, lattice, eps, [(s1 / k_mid).ln(), (s2 / k_mid).ln()])?;
    panel.interpolate_strikes(s1, s2, strikes, degree)
}

/// Sensitivity panel: unit-strike derivative with respect to the log-price
/// for deltas (already divided by the spot), and with respect to the
/// parameter otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreekPanel {
    pub greek: Greek,
    pub panel: PricePanel,
}

impl GreekPanel {
    /// Greek of `Spr(S; K)` at a node of the panel.
    pub fn at(&self, s1: f64, s2: f64, k: f64) -> Result<f64> {
        let (v, _) = self.panel.price_at(s1, s2, k)?;
        Ok(match self.greek {
            // price_at multiplied by K; a delta carries none.
            Greek::Delta1 | Greek::Delta2 => v / k,
            _ => v,
        })
    }
}

/// Analytic Greek panel under GBM.
pub fn greek_panel(
    model: &GbmParams,
    lattice: &Lattice,
    eps: &EpsilonShift2,
    which: Greek,
    center: [f64; 2],
) -> Result<GreekPanel> {
    let mut h = build_h(model, lattice, eps, center)?;
    let n = lattice.n();
    h.par_iter_mut().enumerate().for_each(|(flat, v)| {
        let z = [
            Complex64::new(lattice.u(flat / n), eps.eps1),
            Complex64::new(lattice.u(flat % n), eps.eps2),
        ];
        *v *= model.greek_multiplier(which, z);
    });
    let mut panel = finish(model, lattice, eps, center, h, false)?;
    match which {
        Greek::Delta1 | Greek::Delta2 => {
            let axis = if which == Greek::Delta1 { 0 } else { 1 };
            for l1 in 0..n {
                for l2 in 0..n {
                    let x = panel.log_spot(l1, l2)[axis];
                    panel.values[l1 * n + l2] /= x.exp();
                }
            }
        }
        _ => {}
    }
    Ok(GreekPanel {
        greek: which,
        panel,
    })
}

/// Analytic Greek panel for any model; only GBM has closed forms.
pub fn greek_panel_for(
    model: &Model,
    lattice: &Lattice,
    eps: &EpsilonShift2,
    which: Greek,
    center: [f64; 2],
) -> Result<GreekPanel> {
    match model {
        Model::Gbm(p) => greek_panel(p, lattice, eps, which, center),
        other => Err(SpreadError::UnsupportedGreek {
            greek: which.label().into(),
            model: other.name().into(),
        }),
    }
}

/// One Greek at `(S1, S2, K)` from a panel centred on the spot pair.
pub fn greek_at(
    model: &GbmParams,
    which: Greek,
    s1: f64,
    s2: f64,
    k: f64,
    lattice: &Lattice,
    eps: &EpsilonShift2,
) -> Result<f64> {
    check_spots(s1, s2, k)?;
    let center = [(s1 / k).ln(), (s2 / k).ln()];
    greek_panel(model, lattice, eps, which, center)?.at(s1, s2, k)
}

/// Two-point central difference with a relative displacement `rel` of the
/// spot (deltas) or of the parameter (others).
pub fn fd_greek_gbm(
    model: &GbmParams,
    which: Greek,
    s: [f64; 2],
    k: f64,
    lattice: &Lattice,
    eps: &EpsilonShift2,
    rel: f64,
) -> Result<f64> {
    if !(rel > 0.0) || !rel.is_finite() {
        return Err(SpreadError::InvalidParameter(format!(
            "finite-difference displacement {rel} must be positive"
        )));
    }
    let price = |m: &GbmParams, s1: f64, s2: f64| price_at(m, s1, s2, k, lattice, eps);
    let (up, dn, h) = match which {
        Greek::Delta1 => {
            let h = rel * s[0];
            return Ok((price(model, s[0] + h, s[1])? - price(model, s[0] - h, s[1])?) / (2.0 * h));
        }
        Greek::Delta2 => {
            let h = rel * s[1];
            return Ok((price(model, s[0], s[1] + h)? - price(model, s[0], s[1] - h)?) / (2.0 * h));
        }
        Greek::Theta => {
            let h = rel * model.maturity;
            (model.bumped(which, h), model.bumped(which, -h), h)
        }
        Greek::Vega1 => {
            let h = rel * model.sigma1;
            (model.bumped(which, h), model.bumped(which, -h), h)
        }
        Greek::Vega2 => {
            let h = rel * model.sigma2;
            (model.bumped(which, h), model.bumped(which, -h), h)
        }
        Greek::RhoCorr => {
            let h = rel * model.rho.abs();
            (model.bumped(which, h), model.bumped(which, -h), h)
        }
    };
    if h == 0.0 {
        return Err(SpreadError::InvalidParameter(format!(
            "cannot bump {} from zero by a relative displacement",
            which.label()
        )));
    }
    up.validate()?;
    dn.validate()?;
    Ok((price(&up, s[0], s[1])? - price(&dn, s[0], s[1])?) / (2.0 * h))
}

/// Payoff reconstructed from the inverse transform of `P^` alone, on the
/// centred lattice `x(l)`.
pub fn reconstruct_payoff(lattice: &Lattice, eps: &EpsilonShift2) -> Result<Vec<f64>> {
    eps.validate()?;
    let shifts = eps.as_array();
    let center = [0.0, 0.0];
    let frame = Frame {
        lattice,
        shifts: &shifts,
        center: &center,
    };
    let mut grid = vec![Complex64::new(1.0, 0.0); frame.len()];
    engine::build_h(&frame, &mut grid)?;
    Ok(engine::invert(&frame, grid, 0.0, 0.0).into_iter().map(|v| v.re).collect())
}
