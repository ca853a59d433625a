//! Dimension-generic assembly of `H` and its inversion to prices.
//!
//! Axis 0 is the long asset; axes `1..d` are short legs. A panel centred at
//! absolute log-price `c` has nodes `X(l) = c + x(l)`. The centring phase
//! `e^{i u c}` is folded into `H`, so prices at `X` are
//!
//! ```text
//! (-1)^{sum l} corner^d e^{-rT} (eta N / 2 pi)^d e^{-eps X} ifft(H)(l)
//! ```

use num_complex::Complex64;
use rayon::prelude::*;

use crate::complex_math::log_gamma;
use crate::error::Result;
use crate::fft::ifft_nd;
use crate::lattice::Lattice;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Lattice plus contour shift and centre, one entry per axis.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame<'a> {
    pub lattice: &'a Lattice,
    pub shifts: &'a [f64],
    pub center: &'a [f64],
}

impl Frame<'_> {
    pub fn dims(&self) -> usize {
        self.shifts.len()
    }

    pub fn len(&self) -> usize {
        self.lattice.n().pow(self.dims() as u32)
    }

    pub fn z(&self, axis: usize, k: usize) -> Complex64 {
        Complex64::new(self.lattice.u(k), self.shifts[axis])
    }

    /// Multi-index of a row-major flat position.
    pub fn index(&self, flat: usize, out: &mut [usize]) {
        let n = self.lattice.n();
        let bits = n.trailing_zeros();
        let d = self.dims();
        for (axis, slot) in out.iter_mut().enumerate() {
            *slot = (flat >> (bits as usize * (d - 1 - axis))) & (n - 1);
        }
    }
}

/// `log P^` factored into one table per gamma argument: the total frequency
/// depends only on `sum k`, the others on a single axis.
pub(crate) struct PhatTables {
    total: Vec<Complex64>,
    long: Vec<Complex64>,
    short: Vec<Vec<Complex64>>,
}

impl PhatTables {
    pub fn new(frame: &Frame) -> Result<Self> {
        let n = frame.lattice.n();
        let d = frame.dims();
        let eta = frame.lattice.eta();
        let shift_sum: f64 = frame.shifts.iter().sum();
        let base = -(d as f64) * frame.lattice.u_bar();
        let total = (0..d * (n - 1) + 1)
            .map(|s| log_gamma(I * Complex64::new(base + s as f64 * eta, shift_sum) - 1.0))
            .collect::<Result<Vec<_>>>()?;
        let long = (0..n)
            .map(|k| log_gamma(I * frame.z(0, k) + 1.0))
            .collect::<Result<Vec<_>>>()?;
        let short = (1..d)
            .map(|axis| {
                (0..n)
                    .map(|k| log_gamma(-I * frame.z(axis, k)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PhatTables { total, long, short })
    }

    pub fn at(&self, k: &[usize]) -> Complex64 {
        let s: usize = k.iter().sum();
        let mut acc = self.total[s] - self.long[k[0]];
        for (table, &kj) in self.short.iter().zip(&k[1..]) {
            acc += table[kj];
        }
        acc
    }
}

/// Turns a grid of `Phi(u(k) + i eps)` into `H` in place.
pub(crate) fn build_h(frame: &Frame, phi: &mut [Complex64]) -> Result<()> {
    assert_eq!(phi.len(), frame.len());
    let tables = PhatTables::new(frame)?;
    let d = frame.dims();
    let n = frame.lattice.n();
    let phases: Vec<Vec<f64>> = (0..d)
        .map(|axis| (0..n).map(|k| frame.lattice.u(k) * frame.center[axis]).collect())
        .collect();
    phi.par_iter_mut()
        .enumerate()
        .for_each_init(
            || vec![0usize; d],
            |k, (flat, slot)| {
                frame.index(flat, k);
                let mut log = tables.at(k);
                let mut phase = 0.0;
                for axis in 0..d {
                    phase += phases[axis][k[axis]];
                }
                log.im += phase;
                let s: usize = k.iter().sum();
                let v = *slot * log.exp();
                *slot = if s.is_multiple_of(2) { v } else { -v };
            },
        );
    Ok(())
}

/// Inverse transform of `H` into complex prices at `X(l)`, unit strike.
pub(crate) fn invert(frame: &Frame, h: Vec<Complex64>, rate: f64, maturity: f64) -> Vec<Complex64> {
    invert_inner(frame, h, rate, maturity, None)
}

/// As [`invert`], also returning the imaginary part left after removing
/// the frequencies with some `k_j = 0`. Every other frequency has its
/// conjugate partner on the lattice, so what remains is round-off unless the
/// contour or a branch is misconfigured.
///
/// The unpaired part is assembled by inclusion-exclusion over the sets of
/// zeroed axes; each term is a lower-dimensional inverse transform that is
/// constant along the zeroed axes.
pub(crate) fn invert_paired(
    frame: &Frame,
    h: Vec<Complex64>,
    rate: f64,
    maturity: f64,
) -> (Vec<Complex64>, Vec<f64>) {
    let n = frame.lattice.n();
    let d = frame.dims();
    let inv_n = 1.0 / n as f64;
    let mut slices = Vec::with_capacity((1 << d) - 1);
    for zeroed in 1usize..(1 << d) {
        let free: Vec<usize> = (0..d).filter(|a| zeroed & (1 << a) == 0).collect();
        let mut sub = vec![Complex64::default(); n.pow(free.len() as u32)];
        let mut k = vec![0usize; d];
        for (idx, slot) in sub.iter_mut().enumerate() {
            let mut rest = idx;
            for &a in free.iter().rev() {
                k[a] = rest % n;
                rest /= n;
            }
            *slot = h[k.iter().fold(0, |acc, &kj| acc * n + kj)];
        }
        if !free.is_empty() {
            ifft_nd(&mut sub, n, free.len());
        }
        let count = d - free.len();
        let sign = if count % 2 == 1 { 1.0 } else { -1.0 };
        let scale = sign * inv_n.powi(count as i32);
        sub.iter_mut().for_each(|v| *v *= scale);
        slices.push(Slice { free, values: sub });
    }
    let mut residue = vec![0.0; frame.len()];
    let v = invert_inner(frame, h, rate, maturity, Some((&slices, &mut residue)));
    (v, residue)
}

/// One inclusion-exclusion term, indexed by the free axes only.
struct Slice {
    free: Vec<usize>,
    values: Vec<Complex64>,
}

impl Slice {
    fn at(&self, l: &[usize], n: usize) -> Complex64 {
        self.values[self.free.iter().fold(0, |acc, &a| acc * n + l[a])]
    }
}

fn invert_inner(
    frame: &Frame,
    mut h: Vec<Complex64>,
    rate: f64,
    maturity: f64,
    paired: Option<(&[Slice], &mut Vec<f64>)>,
) -> Vec<Complex64> {
    let n = frame.lattice.n();
    let d = frame.dims();
    ifft_nd(&mut h, n, d);
    let corner = frame.lattice.corner_sign().powi(d as i32);
    let log_scale = -rate * maturity
        + d as f64 * (frame.lattice.eta() * n as f64 / (2.0 * std::f64::consts::PI)).ln();
    let damp: Vec<Vec<f64>> = (0..d)
        .map(|axis| {
            (0..n)
                .map(|l| -frame.shifts[axis] * (frame.center[axis] + frame.lattice.x(l)))
                .collect()
        })
        .collect();
    let factor = |flat: usize, l: &mut [usize]| {
        frame.index(flat, l);
        let mut expo = log_scale;
        for axis in 0..d {
            expo += damp[axis][l[axis]];
        }
        let s: usize = l.iter().sum();
        let sign = if s.is_multiple_of(2) { corner } else { -corner };
        sign * expo.exp()
    };
    match paired {
        None => h.par_iter_mut().enumerate().for_each_init(
            || vec![0usize; d],
            |l, (flat, v)| *v *= factor(flat, l),
        ),
        Some((slices, residue)) => h
            .par_iter_mut()
            .zip(residue.par_iter_mut())
            .enumerate()
            .for_each_init(
                || vec![0usize; d],
                |l, (flat, (v, res))| {
                    let f = factor(flat, l);
                    let edge: Complex64 = slices.iter().map(|s| s.at(l, n)).sum();
                    *res = (v.im - edge.im) * f;
                    *v *= f;
                },
            ),
    }
    h
}
