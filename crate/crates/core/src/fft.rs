//! Multidimensional inverse DFT on row-major complex grids.
//!
//! `ifft_nd` includes the `1 / n^d` factor. rustfft's inverse transform is
//! unnormalized; the scaling is applied once at the end of [`ifft_nd`].

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

/// In-place inverse DFT over a `d`-dimensional cube of side `n`, stored
/// row-major (last axis fastest). Computes
/// `out[l] = n^{-d} sum_k exp(2 pi i k.l / n) in[k]`.
pub fn ifft_nd(data: &mut [Complex64], n: usize, dims: usize) {
    assert_eq!(data.len(), n.pow(dims as u32), "grid size mismatch");
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);

    for axis in 0..dims {
        let stride = n.pow((dims - 1 - axis) as u32);
        if stride == 1 {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                |scratch, line| fft.process_with_scratch(line, scratch),
            );
        } else {
            // Lines along this axis: for each outer block of size n*stride,
            // `stride` interleaved lines.
            let block = n * stride;
            data.par_chunks_mut(block).for_each_init(
                || {
                    (
                        vec![Complex64::default(); n * stride.min(64)],
                        vec![Complex64::default(); fft.get_inplace_scratch_len()],
                    )
                },
                |(buf, scratch), chunk| {
                    let lanes = stride.min(64);
                    let mut start = 0;
                    while start < stride {
                        let width = lanes.min(stride - start);
                        // Gather `width` lines contiguously.
                        for j in 0..width {
                            for k in 0..n {
                                buf[j * n + k] = chunk[k * stride + start + j];
                            }
                        }
                        for line in buf[..width * n].chunks_mut(n) {
                            fft.process_with_scratch(line, scratch);
                        }
                        for j in 0..width {
                            for k in 0..n {
                                chunk[k * stride + start + j] = buf[j * n + k];
                            }
                        }
                        start += width;
                    }
                },
            );
        }
    }

    let scale = 1.0 / (data.len() as f64);
    data.par_iter_mut().for_each(|v| *v *= scale);
}
