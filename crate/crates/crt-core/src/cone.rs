//! Spatial-domain conical Radon transforms by direct quadrature.
//!
//! The forward transform pairs the field with the cone kernel in the symbol
//! convention `<D_phi, psi> = int psi(y, cot(phi) |y|) dy` (no metric
//! factor); the classical surface-measure transform is this output scaled by
//! `1/sin(phi)`, available as a post-scale option. The weighted transform
//! carries the kernel weight `|(y, cot(phi)|y|)|^{-1} = sin(phi)/|y|`.
//!
//! Complexity is O(N_out * N_spatial) on purpose: this module is the trusted
//! slow path the spectral module is checked against.

use crate::error::{CrtError, Result};
use crate::field::{GridSpec, ScalarField};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

/// Cone geometry: half-opening angle, axis fixed to the t-direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    half_opening: f64,
}

impl ConeParams {
    pub fn new(half_opening: f64) -> Result<Self> {
        if !(half_opening > 0.0 && half_opening < FRAC_PI_2 && half_opening.is_finite()) {
            return Err(CrtError::InvalidAngle { phi: half_opening });
        }
        Ok(Self { half_opening })
    }

    pub fn half_opening(&self) -> f64 {
        self.half_opening
    }

    pub fn tan(&self) -> f64 {
        self.half_opening.tan()
    }

    pub fn cot(&self) -> f64 {
        1.0 / self.half_opening.tan()
    }

    pub fn sin(&self) -> f64 {
        self.half_opening.sin()
    }
}

/// Interpolation order for off-grid t lookups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpOrder {
    Linear,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub t_interp: InterpOrder,
}

impl QuadratureSpec {
    pub fn linear() -> Self {
        Self {
            t_interp: InterpOrder::Linear,
        }
    }

    pub fn cubic() -> Self {
        Self {
            t_interp: InterpOrder::Cubic,
        }
    }

    pub fn from_order(order: u8) -> Result<Self> {
        match order {
            1 => Ok(Self::linear()),
            3 => Ok(Self::cubic()),
            _ => Err(CrtError::Domain(format!(
                "interpolation order must be 1 or 3, got {order}"
            ))),
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::linear()
    }
}

/// Kernel orientation. `Upward` evaluates f at `t - cot(phi)|y|` (the
/// convolution form all identities are stated in); `Flipped` reverses the
/// kernel's t-axis for callers wanting the cone opening downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Upward,
    Flipped,
}

/// Output normalization. `Symbol` leaves the symbol-convention pairing as is;
/// `Surface` multiplies by `1/sin(phi)` to get the surface-measure integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    #[default]
    Symbol,
    Surface,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ForwardOptions {
    pub orientation: Orientation,
    pub measure: Measure,
}

/// Add `w * src(l - shift)` to `out[l]` for all l, with `src` read at an
/// off-grid position by linear or cubic interpolation and out-of-range taps
/// treated as zero (exact for compactly supported input).
fn add_shifted(out: &mut [f64], src: &[f64], shift: f64, w: f64, order: InterpOrder) {
    let nt = out.len() as isize;
    let c = shift.ceil();
    let theta = c - shift; // in [0, 1)
    let ci = c as isize;
    // tap d adds wt * src[l - ci + d] to out[l]; src-indexed, src[i]
    // contributes to out[i + ci - d]
    let mut tap = |d: isize, wt: f64| {
        if wt == 0.0 {
            return;
        }
        let off = ci - d;
        let i_lo = (-off).max(0);
        let i_hi = (nt - off).min(nt);
        if i_lo >= i_hi {
            return;
        }
        let (i_lo, i_hi) = (i_lo as usize, i_hi as usize);
        let o = (i_lo as isize + off) as usize;
        for (s, dst) in src[i_lo..i_hi].iter().zip(&mut out[o..]) {
            *dst += wt * s;
        }
    };
    match order {
        InterpOrder::Linear => {
            // src(i0 + theta) = (1-theta) src[i0] + theta src[i0+1],
            // where out[l] reads position l - shift = (l - ci) + theta
            tap(0, w * (1.0 - theta));
            tap(1, w * theta);
        }
        InterpOrder::Cubic => {
            let t = theta;
            let lm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
            let l0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
            let l1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
            let l2 = (t + 1.0) * t * (t - 1.0) / 6.0;
            tap(-1, w * lm1);
            tap(0, w * l0);
            tap(1, w * l1);
            tap(2, w * l2);
        }
    }
}

struct SourceInfo {
    /// Per spatial line: does it hold any nonzero sample?
    nonzero: Vec<bool>,
    /// Per-axis inclusive index bounds of the nonzero spatial lines.
    lo: Vec<usize>,
    hi: Vec<usize>,
    any: bool,
}

fn scan_source(f: &ScalarField) -> SourceInfo {
    let grid = f.grid();
    let m = grid.spatial_dim();
    let nsp = grid.spatial_len();
    let mut nonzero = vec![false; nsp];
    let mut lo = vec![usize::MAX; m];
    let mut hi = vec![0usize; m];
    let mut any = false;
    let mut idx = vec![0usize; m];
    for (sp, nz) in nonzero.iter_mut().enumerate() {
        *nz = f.t_line(sp).iter().any(|&v| v != 0.0);
        if *nz {
            any = true;
            grid.unravel_spatial(sp, &mut idx);
            for ax in 0..m {
                lo[ax] = lo[ax].min(idx[ax]);
                hi[ax] = hi[ax].max(idx[ax]);
            }
        }
    }
    SourceInfo {
        nonzero,
        lo,
        hi,
        any,
    }
}

/// Enforce that the nonzero samples sit strictly inside the grid: one zero
/// cell on each face at minimum. Reads below the t-axis then are exactly
/// zero and compact support is certified on the window.
fn check_support_margins(f: &ScalarField, src: &SourceInfo) -> Result<()> {
    if !src.any {
        return Ok(());
    }
    let grid = f.grid();
    let m = grid.spatial_dim();
    for ax in 0..m {
        if src.lo[ax] == 0 || src.hi[ax] + 1 >= grid.axis(ax).count {
            return Err(CrtError::SupportTouchesBoundary {
                axis: ax,
                needed_cells: 1,
            });
        }
    }
    // t-axis: scan first/last slabs
    let nt = f.num_t();
    for sp in 0..grid.spatial_len() {
        if !src.nonzero[sp] {
            continue;
        }
        let line = f.t_line(sp);
        if line[0] != 0.0 || line[nt - 1] != 0.0 {
            return Err(CrtError::SupportTouchesBoundary {
                axis: m,
                needed_cells: 1,
            });
        }
    }
    Ok(())
}

/// Per-axis tables of (offset * spacing)^2 for fast pair distances.
fn squared_offset_tables(grid: &GridSpec) -> Vec<Vec<f64>> {
    grid.spatial_axes()
        .iter()
        .map(|a| {
            (0..a.count)
                .map(|d| {
                    let x = d as f64 * a.spacing;
                    x * x
                })
                .collect()
        })
        .collect()
}

enum Weighting {
    Plain,
    /// weight sin(phi)/|y| with the vertex cell's inscribed-ball polar value
    VertexRegularized {
        vertex_weight: f64,
    },
}

fn cone_sum(
    f: &ScalarField,
    cone: &ConeParams,
    quad: QuadratureSpec,
    orientation: Orientation,
    weighting: Weighting,
) -> Result<ScalarField> {
    let grid = f.grid();
    let m = grid.spatial_dim();
    let nt = f.num_t();
    let dt = grid.t_axis().spacing;
    let src = scan_source(f);
    check_support_margins(f, &src)?;
    if !src.any {
        return Ok(ScalarField::zeros(grid.clone()));
    }

    let sq = squared_offset_tables(grid);
    let counts: Vec<usize> = grid.spatial_axes().iter().map(|a| a.count).collect();
    let cell = grid.spatial_cell_volume();
    let sin_phi = cone.sin();
    let shift_per_dist = cone.cot() / dt
        * match orientation {
            Orientation::Upward => 1.0,
            Orientation::Flipped => -1.0,
        };
    let vals = f.values();

    let mut out = vec![0.0; grid.len()];
    out.par_chunks_mut(nt)
        .enumerate()
        .for_each(|(i, line_out)| {
            let mut iidx = [0usize; 3];
            grid.unravel_spatial(i, &mut iidx[..m]);
            // odometer over the nonzero source box, fixed ascending order
            let mut jidx = [0usize; 3];
            jidx[..m].copy_from_slice(&src.lo);
            'lines: loop {
                let mut jflat = 0usize;
                for ax in 0..m {
                    jflat = jflat * counts[ax] + jidx[ax];
                }
                if src.nonzero[jflat] {
                    let mut d2 = 0.0;
                    for ax in 0..m {
                        d2 += sq[ax][iidx[ax].abs_diff(jidx[ax])];
                    }
                    let line = &vals[jflat * nt..(jflat + 1) * nt];
                    match weighting {
                        Weighting::Plain => {
                            let dist = d2.sqrt();
                            add_shifted(
                                line_out,
                                line,
                                shift_per_dist * dist,
                                cell,
                                quad.t_interp,
                            );
                        }
                        Weighting::VertexRegularized { vertex_weight } => {
                            if jflat == i {
                                add_shifted(line_out, line, 0.0, vertex_weight, quad.t_interp);
                            } else {
                                let dist = d2.sqrt();
                                add_shifted(
                                    line_out,
                                    line,
                                    shift_per_dist * dist,
                                    cell * sin_phi / dist,
                                    quad.t_interp,
                                );
                            }
                        }
                    }
                }
                // advance multi-index within [lo, hi], last axis fastest
                let mut ax = m;
                while ax > 0 {
                    ax -= 1;
                    if jidx[ax] < src.hi[ax] {
                        jidx[ax] += 1;
                        for a in ax + 1..m {
                            jidx[a] = src.lo[a];
                        }
                        continue 'lines;
                    }
                }
                break;
            }
        });
    ScalarField::new(grid.clone(), out)
}

/// Forward conical Radon transform `g(x,t) = sum_y f(x-y, t - cot(phi)|y|) dY`
/// by direct quadrature on the field's own grid, with linear or cubic
/// interpolation for off-grid t values. Output grid equals input grid.
pub fn forward_crt(
    f: &ScalarField,
    cone: &ConeParams,
    quad: QuadratureSpec,
) -> Result<ScalarField> {
    forward_crt_opts(f, cone, quad, ForwardOptions::default())
}

pub fn forward_crt_opts(
    f: &ScalarField,
    cone: &ConeParams,
    quad: QuadratureSpec,
    opts: ForwardOptions,
) -> Result<ScalarField> {
    let g = cone_sum(f, cone, quad, opts.orientation, Weighting::Plain)?;
    match opts.measure {
        Measure::Symbol => Ok(g),
        Measure::Surface => g.scale(1.0 / cone.sin()),
    }
}

/// Max |g| over samples that violate geometric support containment:
/// every sample of `g` above `tol` must be reachable from the support box of
/// `f` along the upward cone `t = cot(phi)|y|`, with one grid cell of slack.
/// Returns 0 when support propagation holds exactly.
pub fn support_propagation_leak(f: &ScalarField, g: &ScalarField, cone: &ConeParams, tol: f64) -> f64 {
    let grid = g.grid();
    let m = grid.spatial_dim();
    let src = scan_source(f);
    if !src.any {
        return g.linf_norm();
    }
    // support box of f in physical coordinates, expanded by one cell
    let mut xlo = vec![0.0; m];
    let mut xhi = vec![0.0; m];
    for ax in 0..m {
        let a = grid.axis(ax);
        xlo[ax] = a.coord(src.lo[ax]) - a.spacing;
        xhi[ax] = a.coord(src.hi[ax]) + a.spacing;
    }
    // t-extent of the nonzero samples of f
    let nt = f.num_t();
    let mut t_lo_idx = nt;
    let mut t_hi_idx = 0usize;
    for sp in 0..grid.spatial_len() {
        if !src.nonzero[sp] {
            continue;
        }
        let line = f.t_line(sp);
        for (j, v) in line.iter().enumerate() {
            if *v != 0.0 {
                t_lo_idx = t_lo_idx.min(j);
                t_hi_idx = t_hi_idx.max(j);
            }
        }
    }
    let ta = grid.t_axis();
    let t_lo = ta.coord(t_lo_idx) - ta.spacing;
    let t_hi = ta.coord(t_hi_idx) + ta.spacing;

    let cot = cone.cot();
    let mut leak = 0.0f64;
    let mut x = vec![0.0; m];
    for sp in 0..grid.spatial_len() {
        grid.spatial_coords(sp, &mut x);
        let mut dmin2 = 0.0;
        let mut dmax2 = 0.0;
        for ax in 0..m {
            let below = (xlo[ax] - x[ax]).max(0.0);
            let above = (x[ax] - xhi[ax]).max(0.0);
            let dm = below.max(above);
            dmin2 += dm * dm;
            let far = (x[ax] - xlo[ax]).abs().max((x[ax] - xhi[ax]).abs());
            dmax2 += far * far;
        }
        let dmin = dmin2.sqrt();
        let dmax = dmax2.sqrt();
        let line = g.t_line(sp);
        for (j, v) in line.iter().enumerate() {
            if v.abs() <= tol {
                continue;
            }
            let t = ta.coord(j);
            let contained = t - cot * dmax <= t_hi && t - cot * dmin >= t_lo;
            if !contained {
                leak = leak.max(v.abs());
            }
        }
    }
    leak
}

/// Weighted forward transform `C'[f]` with kernel weight `sin(phi)/|y|`.
/// The vertex cell contributes the exact polar integral of the weight over
/// the cell-inscribed ball times f at the vertex. Needs m >= 2: the weight
/// is not integrable across a 1-dimensional vertex.
pub fn weighted_forward_crt(
    f: &ScalarField,
    cone: &ConeParams,
    quad: QuadratureSpec,
) -> Result<ScalarField> {
    let m = f.grid().spatial_dim();
    if m < 2 {
        return Err(CrtError::WeightNonIntegrable);
    }
    let r_in = f
        .grid()
        .spatial_axes()
        .iter()
        .map(|a| a.spacing)
        .fold(f64::INFINITY, f64::min)
        / 2.0;
    // int over inscribed ball of sin(phi)/|y| = sin(phi) S_{m-1} r^{m-1}/(m-1)
    let sphere_area = match m {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!("grid caps spatial dim at 3"),
    };
    let vertex_weight =
        cone.sin() * sphere_area * r_in.powi(m as i32 - 1) / (m as f64 - 1.0);
    cone_sum(
        f,
        cone,
        quad,
        Orientation::Upward,
        Weighting::VertexRegularized { vertex_weight },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{detect_halfspace, relative_interior_l2, GridSpec, ScalarField};
    use crate::oracle::oracle_forward_crt;
    use crate::phantom::PhantomSpec;
    use std::f64::consts::FRAC_PI_4;

    fn grid_1p1(n: usize, t_extent: f64) -> GridSpec {
        GridSpec::from_parts(
            &[n, n],
            &[2.0 / n as f64, t_extent / n as f64],
            &[-1.0, 0.0],
        )
        .unwrap()
    }

    fn grid_2p1(nx: usize, nt: usize, t_extent: f64) -> GridSpec {
        let h = 2.0 / nx as f64;
        GridSpec::from_parts(
            &[nx, nx, nt],
            &[h, h, t_extent / nt as f64],
            &[-1.0, -1.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn zero_in_zero_out() {
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let f = ScalarField::zeros(grid_1p1(32, 2.0));
        let g = forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        assert_eq!(g.linf_norm(), 0.0);
    }

    #[test]
    fn rejects_support_touching_boundary() {
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let g = grid_1p1(32, 2.0);
        let f = ScalarField::from_fn(g, |c| if c[0] < -0.9 { 1.0 } else { 0.0 }).unwrap();
        match forward_crt(&f, &cone, QuadratureSpec::linear()) {
            Err(CrtError::SupportTouchesBoundary { axis: 0, .. }) => {}
            other => panic!("expected boundary error, got {other:?}"),
        }
    }

    #[test]
    fn weighted_rejects_one_spatial_dimension() {
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let f = ScalarField::zeros(grid_1p1(16, 2.0));
        assert!(matches!(
            weighted_forward_crt(&f, &cone, QuadratureSpec::linear()),
            Err(CrtError::WeightNonIntegrable)
        ));
    }

    #[test]
    fn matches_gaussian_oracle_m1() {
        // f(x,t) = G(x) G(t); the oracle integrates the analytic phantom in
        // polar coordinates, fully off the grid quadrature path.
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let spec = PhantomSpec::gaussian(vec![0.0, 1.0], vec![0.11, 0.11], 1.0).unwrap();
        let g = grid_1p1(128, 2.2);
        let f = crate::phantom::render_phantom(&spec, &g)
            .unwrap()
            .clip_small(1e-13);
        let fwd = forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        let pts: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![g.axis(0).coord(34 + 8 * i), g.axis(1).coord(70 + 4 * i)])
            .collect();
        let want = oracle_forward_crt(&spec, &pts, FRAC_PI_4, 64).unwrap();
        let nt = g.t_axis().count;
        for (p, w) in pts.iter().zip(&want) {
            let i = ((p[0] - g.axis(0).origin) / g.axis(0).spacing).round() as usize;
            let j = ((p[1] - g.axis(1).origin) / g.axis(1).spacing).round() as usize;
            let got = fwd.values()[i * nt + j];
            assert!(
                (got - w).abs() < 6e-4,
                "at {p:?}: grid {got} vs oracle {w}"
            );
        }
    }

    #[test]
    fn grid_convergence_against_oracle_m1() {
        // At phi = pi/4 with equal spacings every kernel shift is
        // grid-aligned and the quadrature superconverges; pi/3 exercises the
        // generic second-order regime of the t-interpolation.
        let phi = std::f64::consts::FRAC_PI_3;
        let cone = ConeParams::new(phi).unwrap();
        let spec = PhantomSpec::ball_bump(vec![0.0, 0.75], 0.45, 1.0).unwrap();
        // physical probe points aligned with both grids (even indices of fine)
        let err_at = |n: usize| -> f64 {
            let g = grid_1p1(n, 2.0);
            let f = crate::phantom::render_phantom(&spec, &g).unwrap();
            let fwd = forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
            let nt = g.t_axis().count;
            let pts: Vec<(usize, usize)> = (1..11)
                .map(|i| (n / 4 + i * n / 20, n / 2 + i * n / 32))
                .collect();
            let coords: Vec<Vec<f64>> = pts
                .iter()
                .map(|&(i, j)| vec![g.axis(0).coord(i), g.axis(1).coord(j)])
                .collect();
            let want = oracle_forward_crt(&spec, &coords, phi, 64).unwrap();
            let mut s = 0.0;
            for (&(i, j), w) in pts.iter().zip(&want) {
                let d = fwd.values()[i * nt + j] - w;
                s += d * d;
            }
            s.sqrt()
        };
        let e1 = err_at(80);
        let e2 = err_at(160);
        let ratio = e1 / e2;
        assert!(
            (3.0..5.0).contains(&ratio),
            "quadrature should be second order: e(80) = {e1}, e(160) = {e2}, ratio {ratio}"
        );
    }

    #[test]
    fn shift_covariance_is_exact_on_aligned_shifts() {
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let g = grid_1p1(64, 2.0);
        let spec = PhantomSpec::ball_bump(vec![-0.2, 0.7], 0.3, 1.0).unwrap();
        let f = crate::phantom::render_phantom(&spec, &g).unwrap();
        let (sx, st) = (5usize, 7usize);
        let shifted_spec = PhantomSpec::ball_bump(
            vec![
                -0.2 + sx as f64 * g.axis(0).spacing,
                0.7 + st as f64 * g.axis(1).spacing,
            ],
            0.3,
            1.0,
        )
        .unwrap();
        let fs = crate::phantom::render_phantom(&shifted_spec, &g).unwrap();
        let a = forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        let b = forward_crt(&fs, &cone, QuadratureSpec::linear()).unwrap();
        let nt = g.t_axis().count;
        let nx = g.axis(0).count;
        for i in sx..nx {
            for j in st..nt {
                let want = a.values()[(i - sx) * nt + j - st];
                let got = b.values()[i * nt + j];
                assert!(
                    (got - want).abs() <= 1e-13 * want.abs().max(1e-3),
                    "shifted forward differs at ({i},{j}): {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn linearity_to_machine_precision() {
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let g = grid_1p1(48, 2.0);
        let pa = PhantomSpec::ball_bump(vec![-0.2, 0.6], 0.3, 1.0).unwrap();
        let pb = PhantomSpec::ball_bump(vec![0.3, 1.0], 0.25, 1.0).unwrap();
        let fa = crate::phantom::render_phantom(&pa, &g).unwrap();
        let fb = crate::phantom::render_phantom(&pb, &g).unwrap();
        let combo = fa.scale(2.5).unwrap().add(&fb.scale(-1.5).unwrap()).unwrap();
        let lhs = forward_crt(&combo, &cone, QuadratureSpec::linear()).unwrap();
        let rhs = forward_crt(&fa, &cone, QuadratureSpec::linear())
            .unwrap()
            .scale(2.5)
            .unwrap()
            .add(
                &forward_crt(&fb, &cone, QuadratureSpec::linear())
                    .unwrap()
                    .scale(-1.5)
                    .unwrap(),
            )
            .unwrap();
        let rel = lhs.subtract(&rhs).unwrap().linf_norm() / lhs.linf_norm();
        assert!(rel < 1e-12, "linearity violated: {rel}");
    }

    #[test]
    fn support_and_halfspace_propagation() {
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let g = grid_1p1(96, 2.0);
        let spec = PhantomSpec::ball_bump(vec![0.1, 0.6], 0.35, 1.0).unwrap();
        let f = crate::phantom::render_phantom(&spec, &g).unwrap();
        let fwd = forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        let tol = 1e-12 * fwd.linf_norm();
        let leak = support_propagation_leak(&f, &fwd, &cone, tol);
        assert!(leak <= tol, "support leak {leak} above {tol}");
        // half-space: t0(g) >= t0(f) - one t-spacing
        let hf = detect_halfspace(&f, 1e-12 * f.linf_norm());
        let hg = detect_halfspace(&fwd, tol.max(f64::MIN_POSITIVE));
        assert!(hg.bottom_slab_clean);
        assert!(hg.t0 >= hf.t0 - g.t_axis().spacing, "{} vs {}", hg.t0, hf.t0);
    }

    #[test]
    fn weighted_output_radially_symmetric() {
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let g = grid_2p1(32, 48, 2.0);
        let spec = PhantomSpec::ball_bump(vec![0.0, 0.0, 0.6], 0.3, 1.0).unwrap();
        let f = crate::phantom::render_phantom(&spec, &g).unwrap();
        let w = weighted_forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        let n = 32usize;
        let nt = 48usize;
        let linf = w.linf_norm();
        let mut worst = 0.0f64;
        for i1 in 1..n {
            for i2 in 1..n {
                let a = &w.values()[(i1 * n + i2) * nt..(i1 * n + i2 + 1) * nt];
                // reflection through the center index n/2 maps coord x -> -x
                let j1 = n - i1;
                let j2 = n - i2;
                if j1 >= n || j2 >= n {
                    continue;
                }
                let b = &w.values()[(j1 * n + j2) * nt..(j1 * n + j2 + 1) * nt];
                for (va, vb) in a.iter().zip(b) {
                    worst = worst.max((va - vb).abs());
                }
                // axis swap symmetry (grid is square, phantom isotropic)
                let c = &w.values()[(i2 * n + i1) * nt..(i2 * n + i1 + 1) * nt];
                for (va, vc) in a.iter().zip(c) {
                    worst = worst.max((va - vc).abs());
                }
            }
        }
        assert!(worst <= 1e-10 * linf, "asymmetry {} rel", worst / linf);
    }

    #[test]
    fn weighted_consistent_with_kernel_relation_at_quarter_pi() {
        // sqrt(2) (t - t_vertex) C'[f] ~ C[f] for a narrow bump at the
        // spatial origin, away from the vertex
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let g = grid_2p1(64, 96, 2.2);
        let t_c = 0.35;
        let spec = PhantomSpec::ball_bump(vec![0.0, 0.0, t_c], 0.15, 1.0).unwrap();
        let f = crate::phantom::render_phantom(&spec, &g).unwrap();
        let c = forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        let w = weighted_forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        let nt = g.t_axis().count;
        let peak = c.linf_norm();
        let mut checked = 0usize;
        for sp in 0..g.spatial_len() {
            let lc = c.t_line(sp);
            let lw = w.t_line(sp);
            for j in 0..nt {
                let t = g.t_axis().coord(j);
                if t - t_c < 0.6 || lc[j].abs() < 0.3 * peak {
                    continue;
                }
                let predicted = (2.0f64).sqrt() * (t - t_c) * lw[j];
                let rel = (predicted - lc[j]).abs() / lc[j].abs();
                assert!(rel < 0.15, "at sp={sp} t={t}: rel {rel}");
                checked += 1;
            }
        }
        assert!(checked > 50, "relation probed at too few samples: {checked}");
    }

    #[test]
    fn flipped_orientation_mirrors_kernel() {
        // flipping the kernel's t-axis then flipping both input and output
        // fields in t must reproduce the upward transform (on symmetric grids)
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let g = grid_1p1(48, 2.0);
        let spec = PhantomSpec::ball_bump(vec![0.0, 1.0], 0.3, 1.0).unwrap();
        let f = crate::phantom::render_phantom(&spec, &g).unwrap();
        let up = forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        let nt = g.t_axis().count;
        let flip = |x: &ScalarField| -> ScalarField {
            let mut v = vec![0.0; x.values().len()];
            for sp in 0..x.grid().spatial_len() {
                for j in 0..nt {
                    v[sp * nt + j] = x.t_line(sp)[nt - 1 - j];
                }
            }
            ScalarField::new(x.grid().clone(), v).unwrap()
        };
        let down = forward_crt_opts(
            &flip(&f),
            &cone,
            QuadratureSpec::linear(),
            ForwardOptions {
                orientation: Orientation::Flipped,
                measure: Measure::Symbol,
            },
        )
        .unwrap();
        let back = flip(&down);
        let rel = relative_interior_l2(&back, &up, 0).unwrap();
        assert!(rel < 1e-12, "flip mismatch {rel}");
    }

    #[test]
    fn surface_measure_rescales_by_inverse_sin() {
        let cone = ConeParams::new(FRAC_PI_4).unwrap();
        let g = grid_1p1(48, 2.0);
        let spec = PhantomSpec::ball_bump(vec![0.0, 1.0], 0.3, 1.0).unwrap();
        let f = crate::phantom::render_phantom(&spec, &g).unwrap();
        let sym = forward_crt(&f, &cone, QuadratureSpec::linear()).unwrap();
        let surf = forward_crt_opts(
            &f,
            &cone,
            QuadratureSpec::linear(),
            ForwardOptions {
                orientation: Orientation::Upward,
                measure: Measure::Surface,
            },
        )
        .unwrap();
        let want = sym.scale(1.0 / cone.sin()).unwrap();
        assert!(surf.subtract(&want).unwrap().linf_norm() == 0.0);
    }
}
