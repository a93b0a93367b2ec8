//! Uniform-grid scalar fields on `R^m x R_t`.
//!
//! A field samples a function of `m` spatial coordinates and one temporal
//! coordinate `t` on a uniform Cartesian grid. Axis order is fixed: spatial
//! axes first, the t-axis last, and values are stored row-major so the
//! t index varies fastest (t-lines are contiguous).

mod calculus;
mod support;

pub use calculus::{cumulative_t_integral, partial_t, total_t_integral};
pub use support::{detect_halfspace, detect_support, HalfspaceBound, SupportBox};

use crate::error::{CrtError, Result};

pub const MAX_SPATIAL_DIM: usize = 3;
pub const MIN_AXIS_COUNT: usize = 4;

/// One uniform axis: `count` samples at `origin + i * spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub count: usize,
    pub spacing: f64,
    pub origin: f64,
}

impl AxisSpec {
    pub fn new(count: usize, spacing: f64, origin: f64) -> Self {
        Self {
            count,
            spacing,
            origin,
        }
    }

    pub fn coord(&self, index: usize) -> f64 {
        self.origin + index as f64 * self.spacing
    }

    /// Coordinate of the last sample.
    pub fn max_coord(&self) -> f64 {
        self.coord(self.count - 1)
    }

    /// Physical length spanned by the samples, `(count-1) * spacing`.
    pub fn extent(&self) -> f64 {
        (self.count - 1) as f64 * self.spacing
    }
}

/// Grid over `R^m_x x R_t`; spatial axes first, t-axis last.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<AxisSpec>,
}

impl GridSpec {
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self> {
        let n = axes.len();
        if n < 2 || n - 1 > MAX_SPATIAL_DIM {
            return Err(CrtError::InvalidGrid(format!(
                "need {} to {} axes (spatial + t), got {n}",
                2,
                MAX_SPATIAL_DIM + 1
            )));
        }
        let mut total: usize = 1;
        for (i, ax) in axes.iter().enumerate() {
            if ax.count < MIN_AXIS_COUNT {
                return Err(CrtError::InvalidGrid(format!(
                    "axis {i} has {} samples, need >= {MIN_AXIS_COUNT}",
                    ax.count
                )));
            }
            if !(ax.spacing.is_finite() && ax.spacing > 0.0) {
                return Err(CrtError::InvalidGrid(format!(
                    "axis {i} spacing {} must be finite and positive",
                    ax.spacing
                )));
            }
            if !ax.origin.is_finite() {
                return Err(CrtError::InvalidGrid(format!("axis {i} origin not finite")));
            }
            total = total.checked_mul(ax.count).ok_or_else(|| {
                CrtError::InvalidGrid("total sample count overflows usize".into())
            })?;
        }
        // Keep byte size addressable as well.
        total.checked_mul(std::mem::size_of::<f64>()).ok_or_else(|| {
            CrtError::InvalidGrid("total byte size overflows usize".into())
        })?;
        Ok(Self { axes })
    }

    /// Convenience constructor from parallel slices (spatial first, t last).
    pub fn from_parts(counts: &[usize], spacings: &[f64], origins: &[f64]) -> Result<Self> {
        if counts.len() != spacings.len() || counts.len() != origins.len() {
            return Err(CrtError::InvalidGrid(
                "counts/spacings/origins length mismatch".into(),
            ));
        }
        let axes = counts
            .iter()
            .zip(spacings)
            .zip(origins)
            .map(|((&c, &s), &o)| AxisSpec::new(c, s, o))
            .collect();
        Self::new(axes)
    }

    pub fn num_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn spatial_dim(&self) -> usize {
        self.axes.len() - 1
    }

    pub fn axis(&self, i: usize) -> &AxisSpec {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn spatial_axes(&self) -> &[AxisSpec] {
        &self.axes[..self.spatial_dim()]
    }

    pub fn t_axis(&self) -> &AxisSpec {
        self.axes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of spatial sample points (product over spatial axes only).
    pub fn spatial_len(&self) -> usize {
        self.spatial_axes().iter().map(|a| a.count).product()
    }

    /// Volume of one grid cell, `prod(spacings)`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).product()
    }

    /// Volume of one spatial cell, `prod(spatial spacings)`.
    pub fn spatial_cell_volume(&self) -> f64 {
        self.spatial_axes().iter().map(|a| a.spacing).product()
    }

    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).fold(0.0, f64::max)
    }

    /// Row-major strides (t-axis stride is 1).
    pub fn strides(&self) -> Vec<usize> {
        let n = self.axes.len();
        let mut s = vec![1usize; n];
        for i in (0..n - 1).rev() {
            s[i] = s[i + 1] * self.axes[i + 1].count;
        }
        s
    }

    /// Decompose a flat spatial index into per-axis spatial indices.
    pub fn unravel_spatial(&self, mut flat: usize, out: &mut [usize]) {
        let m = self.spatial_dim();
        debug_assert_eq!(out.len(), m);
        for i in (0..m).rev() {
            let c = self.axes[i].count;
            out[i] = flat % c;
            flat /= c;
        }
    }

    /// Spatial coordinates of a flat spatial index.
    pub fn spatial_coords(&self, flat: usize, out: &mut [f64]) {
        let m = self.spatial_dim();
        let mut idx = vec![0usize; m];
        self.unravel_spatial(flat, &mut idx);
        for i in 0..m {
            out[i] = self.axes[i].coord(idx[i]);
        }
    }

    /// The grid restricted to its spatial axes.
    pub fn spatial_only(&self) -> Vec<AxisSpec> {
        self.spatial_axes().to_vec()
    }

    pub fn same_shape(&self, other: &GridSpec) -> bool {
        self.axes.len() == other.axes.len()
            && self
                .axes
                .iter()
                .zip(&other.axes)
                .all(|(a, b)| a.count == b.count)
    }
}

/// Dense real-valued samples on a [`GridSpec`]. Values are finite by
/// construction; every operation output re-checks this.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CrtError::LengthMismatch {
                got: values.len(),
                want: grid.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(CrtError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Sample a function of the full coordinate vector `[x..., t]`.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = grid.len();
        let na = grid.num_axes();
        let mut values = vec![0.0; n];
        let mut idx = vec![0usize; na];
        let mut coords = vec![0.0; na];
        for (flat, v) in values.iter_mut().enumerate() {
            let mut rem = flat;
            for i in (0..na).rev() {
                let c = grid.axis(i).count;
                idx[i] = rem % c;
                rem /= c;
            }
            for i in 0..na {
                coords[i] = grid.axis(i).coord(idx[i]);
            }
            *v = f(&coords);
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn num_t(&self) -> usize {
        self.grid.t_axis().count
    }

    /// Contiguous t-line for a flat spatial index.
    pub fn t_line(&self, spatial_flat: usize) -> &[f64] {
        let nt = self.num_t();
        &self.values[spatial_flat * nt..(spatial_flat + 1) * nt]
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Integral-weighted l2 norm, `sqrt(sum v^2 * cell_volume)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v * v).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn scale(&self, c: f64) -> Result<ScalarField> {
        let values = self.values.iter().map(|v| v * c).collect();
        ScalarField::new(self.grid.clone(), values)
    }

    /// Replace every |value| <= tol with exactly 0. Useful to give
    /// quasi-compact fields (Gaussian tails) genuinely compact support
    /// before transforms that require it.
    pub fn clip_small(&self, tol: f64) -> ScalarField {
        let values = self
            .values
            .iter()
            .map(|&v| if v.abs() <= tol { 0.0 } else { v })
            .collect();
        ScalarField {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn subtract(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(CrtError::ShapeMismatch(
                "fields live on different grids".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ScalarField::new(self.grid.clone(), values)
    }

    /// l2 norm over samples at least `margin` cells away from every grid
    /// face. Used for interior error measures where boundary stencils and
    /// window truncation are excluded by design.
    pub fn l2_norm_interior(&self, margin: usize) -> f64 {
        let mut s = 0.0;
        self.for_each_interior(margin, |v| s += v * v);
        (s * self.grid.cell_volume()).sqrt()
    }

    /// Max |value| over samples strictly within `margin` cells of a face.
    pub fn linf_norm_boundary(&self, margin: usize) -> f64 {
        let mut mx = 0.0f64;
        let na = self.grid.num_axes();
        let counts: Vec<usize> = self.grid.axes().iter().map(|a| a.count).collect();
        let mut idx = vec![0usize; na];
        for (flat, v) in self.values.iter().enumerate() {
            let mut rem = flat;
            for i in (0..na).rev() {
                idx[i] = rem % counts[i];
                rem /= counts[i];
            }
            let boundary = idx
                .iter()
                .zip(&counts)
                .any(|(&j, &c)| j < margin || j + margin >= c);
            if boundary {
                mx = mx.max(v.abs());
            }
        }
        mx
    }

    fn for_each_interior(&self, margin: usize, mut f: impl FnMut(f64)) {
        let na = self.grid.num_axes();
        let counts: Vec<usize> = self.grid.axes().iter().map(|a| a.count).collect();
        if counts.iter().any(|&c| c < 2 * margin + 1) {
            return;
        }
        let mut idx = vec![0usize; na];
        for (flat, v) in self.values.iter().enumerate() {
            let mut rem = flat;
            let mut interior = true;
            for i in (0..na).rev() {
                idx[i] = rem % counts[i];
                rem /= counts[i];
            }
            for i in 0..na {
                if idx[i] < margin || idx[i] + margin >= counts[i] {
                    interior = false;
                    break;
                }
            }
            if interior {
                f(*v);
            }
        }
    }
}

/// Relative interior l2 difference `|a - b|_2 / |b|_2`, both restricted to
/// samples >= `margin` cells from every face.
pub fn relative_interior_l2(a: &ScalarField, b: &ScalarField, margin: usize) -> Result<f64> {
    let diff = a.subtract(b)?;
    let denom = b.l2_norm_interior(margin);
    if denom == 0.0 {
        return Ok(if diff.l2_norm_interior(margin) == 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    Ok(diff.l2_norm_interior(margin) / denom)
}

/// Real samples on the spatial axes only (the result of integrating out t).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    axes: Vec<AxisSpec>,
    values: Vec<f64>,
}

impl SpatialField {
    pub fn new(axes: Vec<AxisSpec>, values: Vec<f64>) -> Result<Self> {
        let want: usize = axes.iter().map(|a| a.count).product();
        if values.len() != want {
            return Err(CrtError::LengthMismatch {
                got: values.len(),
                want,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(CrtError::NonFinite { index });
        }
        Ok(Self { axes, values })
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
