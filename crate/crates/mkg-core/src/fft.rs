//! Multi-axis FFT plumbing on row-major complex arrays.
//!
//! Forward transforms are unnormalized DFTs, inverses divide by the total
//! sample count, so `F(x) = (1/|grid|) Σ_κ F̂(κ) e^{+i⟨κ,x⟩}` and the symbol
//! of `∂` is `+iξ`. Layout is row-major with time slowest:
//! `index = (((t·N + x₁)·N + x₂)·N + x₃)·N + x₄`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let dir = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                planner.plan_fft(len, dir)
            })
            .clone()
    })
}

/// Minimum block size before a strided axis pass is parallelized.
const PAR_THRESHOLD: usize = 1 << 14;

/// FFT along one axis of a row-major array.
///
/// `dims` are the extents, slowest first; `axis` indexes into `dims`.
fn transform_axis(data: &mut [Complex64], dims: &[usize], axis: usize, forward: bool) {
    let len: usize = dims.iter().product();
    assert_eq!(data.len(), len);
    let extent = dims[axis];
    if extent == 1 {
        return;
    }
    let stride: usize = dims[axis + 1..].iter().product();
    let block = extent * stride;
    let fft = plan(extent, forward);

    if stride == 1 {
        // Contiguous lines.
        if len >= PAR_THRESHOLD {
            data.par_chunks_exact_mut(extent)
                .for_each(|line| plan(extent, forward).process(line));
        } else {
            for line in data.chunks_exact_mut(extent) {
                fft.process(line);
            }
        }
    } else {
        let work = |chunk: &mut [Complex64]| {
            let fft = plan(extent, forward);
            let mut line = vec![Complex64::default(); extent];
            for inner in 0..stride {
                for (j, v) in line.iter_mut().enumerate() {
                    *v = chunk[inner + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    chunk[inner + j * stride] = *v;
                }
            }
        };
        if len >= PAR_THRESHOLD && len / block > 1 {
            data.par_chunks_exact_mut(block).for_each(work);
        } else {
            for chunk in data.chunks_exact_mut(block) {
                work(chunk);
            }
        }
    }
}

/// In-place forward DFT over all listed axes.
pub fn forward(data: &mut [Complex64], dims: &[usize]) {
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, true);
    }
}

/// In-place inverse DFT over all listed axes (normalized by the total count).
pub fn inverse(data: &mut [Complex64], dims: &[usize]) {
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, false);
    }
    let scale = 1.0 / dims.iter().product::<usize>() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(dims: &[usize]) {
        let len: usize = dims.iter().product();
        let mut rng = 1234u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let orig: Vec<Complex64> = (0..len).map(|_| Complex64::new(next(), next())).collect();
        let mut data = orig.clone();
        forward(&mut data, dims);
        inverse(&mut data, dims);
        let err: f64 = data
            .iter()
            .zip(&orig)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "roundtrip error {err}");
    }

    #[test]
    fn roundtrip_multi_axis() {
        roundtrip(&[8]);
        roundtrip(&[4, 8, 2]);
        roundtrip(&[2, 4, 4, 4, 4]);
    }

    #[test]
    fn single_mode_forward() {
        // e^{2πi·m·j/n} transforms to n·δ at bin m.
        let n = 8;
        let m = 3usize;
        let mut data: Vec<Complex64> = (0..n)
            .map(|j| (Complex64::i() * std::f64::consts::TAU * (m * j) as f64 / n as f64).exp())
            .collect();
        forward(&mut data, &[n]);
        // Forward DFT uses e^{-i}, so the e^{+i m...} input lands in bin m.
        for (i, v) in data.iter().enumerate() {
            let expect = if i == m { n as f64 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-10 && v.im.abs() < 1e-10);
        }
    }
}
