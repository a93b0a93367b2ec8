//! Minimal n-dimensional FFT on a flat row-major buffer (last axis fastest),
//! axis by axis over rustfft plans. Lines are independent, so results are
//! deterministic for a fixed input regardless of thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Smallest n >= target whose prime factors are all in {2, 3, 5}.
pub fn next_fast_len(target: usize) -> usize {
    let mut n = target.max(1);
    loop {
        let mut r = n;
        for p in [2usize, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return n;
        }
        n += 1;
    }
}

struct SendPtr(*mut Complex64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

fn plan(planner: &mut FftPlanner<f64>, len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    if forward {
        planner.plan_fft_forward(len)
    } else {
        planner.plan_fft_inverse(len)
    }
}

/// Transform every axis of `data` (row-major, `dims`, last axis fastest).
/// The inverse direction leaves the usual 1/N normalization to the caller.
pub fn fft_nd(data: &mut [Complex64], dims: &[usize], forward: bool) {
    assert_eq!(data.len(), dims.iter().product::<usize>());
    let mut planner = FftPlanner::new();
    let n_axes = dims.len();
    for axis in 0..n_axes {
        let len = dims[axis];
        let stride: usize = dims[axis + 1..].iter().product();
        let fft = plan(&mut planner, len, forward);
        if stride == 1 {
            // contiguous lines: process in place
            let scratch_len = fft.get_inplace_scratch_len();
            data.par_chunks_mut(len).for_each_init(
                || vec![Complex64::default(); scratch_len],
                |scratch, line| {
                    fft.process_with_scratch(line, scratch);
                },
            );
        } else {
            // strided lines: gather into scratch, transform, scatter back.
            // Line (outer, inner) starts at outer*len*stride + inner; all
            // index sets are disjoint, so parallel raw access is sound.
            let outer_count = data.len() / (len * stride);
            let ptr = SendPtr(data.as_mut_ptr());
            let scratch_len = fft.get_inplace_scratch_len();
            (0..outer_count * stride).into_par_iter().for_each_init(
                || {
                    (
                        vec![Complex64::default(); len],
                        vec![Complex64::default(); scratch_len],
                    )
                },
                |(line_buf, scratch), id| {
                    let outer = id / stride;
                    let inner = id % stride;
                    let base = outer * len * stride + inner;
                    let p = &ptr;
                    unsafe {
                        for (i, v) in line_buf.iter_mut().enumerate() {
                            *v = *p.0.add(base + i * stride);
                        }
                        fft.process_with_scratch(line_buf, scratch);
                        for (i, v) in line_buf.iter().enumerate() {
                            *p.0.add(base + i * stride) = *v;
                        }
                    }
                },
            );
        }
    }
}
