//! Compactly supported smooth test functions.
//!
//! The default phantom is the classic bump `exp(1 - 1/(1 - r^2))` on r < 1,
//! a genuine C0-infinity function, so compact-support hypotheses hold exactly
//! on the grid. Gaussians are available for closed-form crosschecks where
//! their tails are negligible.

use crate::error::{CrtError, Result};
use crate::field::{GridSpec, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    /// `amp * exp(1 - 1/(1 - r^2))` for r < 1, with r the radii-scaled
    /// distance to the center; identically 0 outside.
    Bump,
    /// `amp * exp(-r^2 / 2)` with r the sigma-scaled distance; quasi-compact
    /// (treated as supported within 8 sigma).
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomTerm {
    pub kind: PhantomKind,
    /// Center in full coordinates `[x..., t]`.
    pub center: Vec<f64>,
    /// Per-axis radius (Bump) or sigma (Gaussian); all positive.
    pub radii: Vec<f64>,
    pub amplitude: f64,
}

/// A sum of smooth terms. Evaluable at arbitrary points, which is what keeps
/// quadrature oracles independent of any grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    terms: Vec<PhantomTerm>,
}

impl PhantomSpec {
    pub fn new(terms: Vec<PhantomTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(CrtError::Domain("phantom needs at least one term".into()));
        }
        for t in &terms {
            if t.center.len() != t.radii.len() {
                return Err(CrtError::Domain(
                    "phantom center/radii dimension mismatch".into(),
                ));
            }
            if t.radii.iter().any(|&r| !(r.is_finite() && r > 0.0)) {
                return Err(CrtError::Domain("phantom radii must be positive".into()));
            }
            if !t.amplitude.is_finite() || t.center.iter().any(|c| !c.is_finite()) {
                return Err(CrtError::Domain("phantom parameters must be finite".into()));
            }
        }
        Ok(Self { terms })
    }

    pub fn bump(center: Vec<f64>, radii: Vec<f64>, amplitude: f64) -> Result<Self> {
        Self::new(vec![PhantomTerm {
            kind: PhantomKind::Bump,
            center,
            radii,
            amplitude,
        }])
    }

    /// Isotropic bump: same radius on every axis.
    pub fn ball_bump(center: Vec<f64>, radius: f64, amplitude: f64) -> Result<Self> {
        let radii = vec![radius; center.len()];
        Self::bump(center, radii, amplitude)
    }

    pub fn gaussian(center: Vec<f64>, sigmas: Vec<f64>, amplitude: f64) -> Result<Self> {
        Self::new(vec![PhantomTerm {
            kind: PhantomKind::Gaussian,
            center,
            radii: sigmas,
            amplitude,
        }])
    }

    pub fn plus(mut self, other: PhantomSpec) -> PhantomSpec {
        self.terms.extend(other.terms);
        self
    }

    pub fn terms(&self) -> &[PhantomTerm] {
        &self.terms
    }

    pub fn num_axes(&self) -> usize {
        self.terms[0].center.len()
    }

    /// Analytic value at a point `[x..., t]`.
    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut v = 0.0;
        for term in &self.terms {
            let mut r2 = 0.0;
            for ((p, c), r) in point.iter().zip(&term.center).zip(&term.radii) {
                let u = (p - c) / r;
                r2 += u * u;
            }
            v += match term.kind {
                PhantomKind::Bump => {
                    if r2 < 1.0 {
                        term.amplitude * (1.0 - 1.0 / (1.0 - r2)).exp()
                    } else {
                        0.0
                    }
                }
                PhantomKind::Gaussian => term.amplitude * (-0.5 * r2).exp(),
            };
        }
        v
    }

    /// Per-axis interval certainly containing the support (8 sigma for
    /// Gaussian terms).
    pub fn support_interval(&self, axis: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &self.terms {
            let reach = match t.kind {
                PhantomKind::Bump => t.radii[axis],
                PhantomKind::Gaussian => 8.0 * t.radii[axis],
            };
            lo = lo.min(t.center[axis] - reach);
            hi = hi.max(t.center[axis] + reach);
        }
        (lo, hi)
    }

    /// True when the support lies inside the grid with at least
    /// `margin[axis]` physical units to spare on every face.
    pub fn fits_with_margin(&self, grid: &GridSpec, margin: &[f64]) -> bool {
        if self.num_axes() != grid.num_axes() || margin.len() != grid.num_axes() {
            return false;
        }
        (0..grid.num_axes()).all(|ax| {
            let (lo, hi) = self.support_interval(ax);
            let a = grid.axis(ax);
            lo - margin[ax] > a.origin && hi + margin[ax] < a.max_coord()
        })
    }
}

/// Sample a phantom on a grid. Errors when the support (8 sigma for
/// Gaussians) is not strictly inside the grid.
pub fn render_phantom(spec: &PhantomSpec, grid: &GridSpec) -> Result<ScalarField> {
    if spec.num_axes() != grid.num_axes() {
        return Err(CrtError::DimensionMismatch(format!(
            "phantom has {} axes, grid has {}",
            spec.num_axes(),
            grid.num_axes()
        )));
    }
    if !spec.fits_with_margin(grid, &vec![0.0; grid.num_axes()]) {
        return Err(CrtError::Domain(
            "phantom support is not strictly inside the grid".into(),
        ));
    }
    ScalarField::from_fn(grid.clone(), |c| spec.eval(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_value_at_center_is_amplitude_and_zero_outside() {
        let p = PhantomSpec::ball_bump(vec![0.2, 1.0], 0.5, 2.5).unwrap();
        assert!((p.eval(&[0.2, 1.0]) - 2.5).abs() < 1e-15);
        assert_eq!(p.eval(&[0.2 + 0.5, 1.0]), 0.0);
        assert_eq!(p.eval(&[0.2, 1.0 + 0.7]), 0.0);
        assert_eq!(p.eval(&[5.0, 5.0]), 0.0);
    }

    #[test]
    fn render_rejects_overflowing_support() {
        let g = GridSpec::from_parts(&[16, 16], &[0.1, 0.1], &[0.0, 0.0]).unwrap();
        // grid covers [0, 1.5]^2; bump sticks out
        let p = PhantomSpec::ball_bump(vec![0.2, 0.7], 0.5, 1.0).unwrap();
        assert!(render_phantom(&p, &g).is_err());
        let ok = PhantomSpec::ball_bump(vec![0.7, 0.7], 0.5, 1.0).unwrap();
        assert!(render_phantom(&ok, &g).is_ok());
    }

    #[test]
    fn sum_of_bumps_adds() {
        let a = PhantomSpec::ball_bump(vec![0.0, 0.0], 1.0, 1.0).unwrap();
        let b = PhantomSpec::ball_bump(vec![0.0, 0.0], 1.0, 2.0).unwrap();
        let s = a.clone().plus(b);
        assert!((s.eval(&[0.0, 0.0]) - 3.0).abs() < 1e-15);
    }
}
