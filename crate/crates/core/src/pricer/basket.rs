use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{self, Frame};
use crate::error::{Result, SpreadError};
use crate::lattice::Lattice;
use crate::models::{gaussian_row_fill, GbmBasketParams};
use crate::payoff::EpsilonShiftM;

/// Largest basket grid, in complex values.
pub const BASKET_BUDGET: u128 = 1 << 28;

/// Unit-strike basket prices on a `d`-dimensional lattice, long asset on
/// axis 0, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasketPanel {
    pub values: Vec<f64>,
    pub lattice: Lattice,
    pub dims: usize,
    pub shifts: Vec<f64>,
    pub center: Vec<f64>,
    pub max_residue: f64,
}

impl BasketPanel {
    pub fn at(&self, l: &[usize]) -> f64 {
        let n = self.lattice.n();
        self.values[l.iter().fold(0, |acc, &k| acc * n + k)]
    }

    /// Value at the centre node, i.e. at absolute log-prices `center`.
    pub fn center_value(&self) -> f64 {
        self.at(&vec![self.lattice.n() / 2; self.dims])
    }
}

/// FFT panel for the payoff `(S~ - sum S_m - 1)^+` under correlated GBM.
/// `center` lists absolute log-prices, long asset first.
pub fn price_basket_panel(
    model: &GbmBasketParams,
    lattice: &Lattice,
    eps: &EpsilonShiftM,
    center: &[f64],
) -> Result<BasketPanel> {
    model.validate()?;
    eps.validate()?;
    let dims = model.dim();
    if eps.eps.len() + 1 != dims || center.len() != dims {
        return Err(SpreadError::InvalidParameter(format!(
            "basket of {dims} assets needs {} short-leg shifts and {dims} centre coordinates",
            dims - 1
        )));
    }
    let requested = (lattice.n() as u128).pow(dims as u32);
    if requested > BASKET_BUDGET {
        return Err(SpreadError::MemoryBudget {
            requested,
            budget: BASKET_BUDGET,
        });
    }
    let shifts = eps.axis_shifts();
    let frame = Frame {
        lattice,
        shifts: &shifts,
        center,
    };
    let drift = model.drift();
    let cov = model.covariance();
    let n = lattice.n();
    let mut grid = vec![Complex64::default(); frame.len()];
    grid.par_chunks_mut(n).enumerate().for_each_init(
        || (vec![0usize; dims], vec![Complex64::default(); dims - 1]),
        |(k, head), (row_index, row)| {
            frame.index(row_index * n, k);
            for axis in 0..dims - 1 {
                head[axis] = frame.z(axis, k[axis]);
            }
            gaussian_row_fill(head, shifts[dims - 1], lattice, &drift, &cov, model.maturity, row);
        },
    );
    engine::build_h(&frame, &mut grid)?;
    let (raw, paired_im) = engine::invert_paired(&frame, grid, model.r, model.maturity);

    let half = super::panel::trusted_half_width(super::DEFAULT_TRUST, lattice, &shifts);
    let steps = (half / lattice.eta_star() + 1e-9).floor() as usize;
    let (lo, hi) = (n / 2 - steps.min(n / 2), (n / 2 + steps).min(n - 1));
    let (mut max_re, mut worst) = (0.0f64, (0.0, 0usize));
    let mut k = vec![0usize; dims];
    let mut values = Vec::with_capacity(raw.len());
    for (flat, v) in raw.into_iter().enumerate() {
        frame.index(flat, &mut k);
        let mut re = v.re;
        if k.iter().all(|&kj| (lo..=hi).contains(&kj)) {
            max_re = max_re.max(v.re.abs());
            if paired_im[flat].abs() > worst.0 {
                worst = (paired_im[flat].abs(), flat);
            }
            if re < 0.0 && re > -super::NEG_CLIP {
                re = 0.0;
            }
        }
        values.push(re);
    }
    let residue = worst.0 / (1.0 + max_re);
    if residue > super::RESIDUE_FAIL {
        return Err(SpreadError::Residue {
            residue,
            row: worst.1 / n,
            col: worst.1 % n,
        });
    }
    Ok(BasketPanel {
        values,
        lattice: *lattice,
        dims,
        shifts,
        center: center.to_vec(),
        max_residue: residue,
    })
}
