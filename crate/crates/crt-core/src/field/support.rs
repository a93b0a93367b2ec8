//! Numerical support detection: bounding boxes and half-space bounds at an
//! absolute tolerance.

use super::ScalarField;

/// Smallest axis-aligned index box outside which all |values| <= tol.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportBox {
    /// Inclusive per-axis index interval lower bounds.
    pub lo: Vec<usize>,
    /// Inclusive per-axis index interval upper bounds.
    pub hi: Vec<usize>,
    /// Largest |value| found outside the box (always <= the tolerance used).
    pub max_abs_outside: f64,
}

impl SupportBox {
    /// Cells between the box and the nearest face, minimized over axes.
    pub fn min_face_margin(&self, counts: &[usize]) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(counts)
            .map(|((&lo, &hi), &c)| lo.min(c - 1 - hi))
            .min()
            .unwrap_or(0)
    }
}

/// Detect the support box of `f` at absolute tolerance `tol`.
/// Returns `None` when every |value| <= tol ("empty support").
pub fn detect_support(f: &ScalarField, tol: f64) -> Option<SupportBox> {
    assert!(tol > 0.0, "tolerance must be positive");
    let na = f.grid().num_axes();
    let counts: Vec<usize> = f.grid().axes().iter().map(|a| a.count).collect();
    let mut lo = vec![usize::MAX; na];
    let mut hi = vec![0usize; na];
    let mut any = false;
    let mut idx = vec![0usize; na];
    for (flat, v) in f.values().iter().enumerate() {
        if v.abs() > tol {
            any = true;
            let mut rem = flat;
            for i in (0..na).rev() {
                idx[i] = rem % counts[i];
                rem /= counts[i];
            }
            for i in 0..na {
                lo[i] = lo[i].min(idx[i]);
                hi[i] = hi[i].max(idx[i]);
            }
        }
    }
    if !any {
        return None;
    }
    // second pass: largest |value| outside the box
    let mut max_abs_outside = 0.0f64;
    for (flat, v) in f.values().iter().enumerate() {
        let mut rem = flat;
        let mut outside = false;
        for i in (0..na).rev() {
            idx[i] = rem % counts[i];
            rem /= counts[i];
        }
        for i in 0..na {
            if idx[i] < lo[i] || idx[i] > hi[i] {
                outside = true;
                break;
            }
        }
        if outside {
            max_abs_outside = max_abs_outside.max(v.abs());
        }
    }
    Some(SupportBox {
        lo,
        hi,
        max_abs_outside,
    })
}

/// Result of half-space detection along t.
///
/// `t0` is the largest grid t-value such that every sample with t < t0 has
/// |value| <= tol. A finite window can only certify "no mass below t0 within
/// the window"; `bottom_slab_clean` records whether the t-minimum slab itself
/// was clean. When it is not, the window was too small to certify any
/// half-space and strict callers should treat the condition as violated.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceBound {
    pub t0: f64,
    pub t0_index: usize,
    pub bottom_slab_clean: bool,
}

pub fn detect_halfspace(f: &ScalarField, tol: f64) -> HalfspaceBound {
    assert!(tol > 0.0, "tolerance must be positive");
    let nt = f.num_t();
    let nsp = f.grid().spatial_len();
    // first t-slab (smallest t index) containing any |value| > tol
    let mut first_dirty = nt; // nt = all clean
    for sp in 0..nsp {
        let line = f.t_line(sp);
        for (j, v) in line.iter().enumerate().take(first_dirty) {
            if v.abs() > tol {
                first_dirty = j;
                break;
            }
        }
        if first_dirty == 0 {
            break;
        }
    }
    let t_axis = f.grid().t_axis();
    let t0_index = if first_dirty == nt { nt - 1 } else { first_dirty };
    HalfspaceBound {
        t0: t_axis.coord(t0_index),
        t0_index,
        bottom_slab_clean: first_dirty > 0,
    }
}
