#![allow(dead_code)]

use nalgebra::DMatrix;
use spread_fft::{EpsilonShift2, Lattice};

/// Nodes and weights for `E[f(Z)]`, `Z ~ N(0, 1)`, by Golub–Welsch on the
/// probabilists' Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

pub fn eps() -> EpsilonShift2 {
    EpsilonShift2::default()
}

pub fn lattice(n: usize, u_bar: f64) -> Lattice {
    Lattice::new(n, u_bar).unwrap()
}

/// Reference strike ladder 0.4, 0.8, ..., 4.0.
pub fn table_strikes() -> Vec<f64> {
    (1..=10).map(|i| 0.4 * i as f64).collect()
}
