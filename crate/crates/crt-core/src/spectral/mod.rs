//! Distributional Fourier symbols of the cone kernels and fast multiplier
//! application on the damped contour `Im(sigma) = -eps`.
//!
//! For spatial dimension m and half-opening phi the kernel symbols are
//!
//! ```text
//!   D_hat(w, s)  = tan^m(phi) * alpha(m) * i s / W^{(m+1)/2},
//!   D'_hat(w, s) = beta(m) / W^{(m-1)/2}            (phi = pi/4 only),
//!   W = s^2 - tan^2(phi) |w|^2,
//! ```
//!
//! with the fractional power taken on the branch `arg W in (-2 pi, 0]`,
//! paired with the phase `(-i)^{m+1}` inside `alpha`. That pairing is a
//! calibrated choice: it reproduces the positive damped radial integrals at
//! `s = -i tau` for m = 1, 2, 3 (see the oracle tests), which is the
//! acceptance gate for everything downstream.
//!
//! `apply_multiplier` realizes a multiplier operator along `Im(s) = -eps`:
//! damp by `exp(-eps t)`, zero-pad, FFT, multiply by `M(w, s - i eps)`,
//! inverse FFT, crop, undamp. The imaginary residue of the output is
//! reported as a diagnostic; for operators that are real in theory it must
//! stay below 1e-8 of the output's sup-norm.

mod fft;

pub use fft::next_fast_len;

use crate::error::{CrtError, Result};
use crate::field::ScalarField;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

/// `alpha(m) = (-i)^{m+1} 2^m pi^{(m-1)/2} Gamma((m+1)/2)`; real for odd m,
/// purely imaginary for even m. alpha(1) = -2 exactly.
pub fn alpha(m: usize) -> Complex64 {
    assert!(m >= 1, "alpha needs m >= 1");
    if m % 2 == 1 {
        // k = (m+1)/2: alpha = (-1)^k 2^m pi^{k-1} (k-1)!
        let k = (m + 1) / 2;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let mut v = sign * 2f64.powi(m as i32);
        for _ in 1..k {
            v *= PI;
        }
        v *= factorial(k - 1);
        Complex64::new(v, 0.0)
    } else {
        // k = m/2: alpha = (-1)^k (-i) 2^m pi^k (2k)! / (4^k k!)
        let k = m / 2;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let mut v = sign * 2f64.powi(m as i32);
        for _ in 0..k {
            v *= PI;
        }
        v *= factorial(2 * k) / (4f64.powi(k as i32) * factorial(k));
        Complex64::new(0.0, -v)
    }
}

/// `beta(m) = alpha(m) / (sqrt(2) (1 - m))`; m = 1 divides by zero.
pub fn beta(m: usize) -> Result<Complex64> {
    if m == 1 {
        return Err(CrtError::Domain(
            "beta(1) divides by 1 - m = 0; the weighted kernel needs m >= 2".into(),
        ));
    }
    Ok(alpha(m) / (std::f64::consts::SQRT_2 * (1.0 - m as f64)))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `W^s` on the branch `arg W in (-2 pi, 0]`. Integer exponents reduce to
/// the exact algebraic power.
pub fn branch_pow(w: Complex64, s: f64) -> Complex64 {
    if s == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if s.fract() == 0.0 && s.abs() <= 64.0 {
        return w.powi(s as i32);
    }
    let theta_p = w.arg();
    let theta = if theta_p > 0.0 { theta_p - TAU } else { theta_p };
    let r = w.norm().powf(s);
    Complex64::new(r * (s * theta).cos(), r * (s * theta).sin())
}

fn check_damped(sigma: Complex64) -> Result<()> {
    if sigma.im >= 0.0 {
        return Err(CrtError::SigmaNotDamped { im: sigma.im });
    }
    Ok(())
}

fn w_of(omega: &[f64], sigma: Complex64, phi: f64) -> Complex64 {
    let tan = phi.tan();
    let w2: f64 = omega.iter().map(|v| v * v).sum();
    sigma * sigma - Complex64::new(tan * tan * w2, 0.0)
}

/// Symbol of the cone kernel, `tan^m(phi) alpha(m) i sigma / W^{(m+1)/2}`.
pub fn symbol_d(omega: &[f64], sigma: Complex64, m: usize, phi: f64) -> Result<Complex64> {
    check_damped(sigma)?;
    if !(phi > 0.0 && phi < FRAC_PI_2) {
        return Err(CrtError::InvalidAngle { phi });
    }
    let w = w_of(omega, sigma, phi);
    let num = alpha(m) * Complex64::i() * sigma;
    Ok(phi.tan().powi(m as i32) * num / branch_pow(w, (m as f64 + 1.0) / 2.0))
}

/// Symbol of the weighted cone kernel at phi = pi/4,
/// `beta(m) / W^{(m-1)/2}`. General angles are handled upstream by the
/// coordinate rescale `(x, t) -> (cot(phi) x, t)`.
pub fn symbol_dprime(omega: &[f64], sigma: Complex64, m: usize, phi: f64) -> Result<Complex64> {
    check_damped(sigma)?;
    if (phi - FRAC_PI_4).abs() > 1e-12 {
        return Err(CrtError::AngleNotQuarterPi { phi });
    }
    let w2: f64 = omega.iter().map(|v| v * v).sum();
    let w = sigma * sigma - Complex64::new(w2, 0.0);
    Ok(beta(m)? / branch_pow(w, (m as f64 - 1.0) / 2.0))
}

/// Symbol of the iterated d'Alembertian, `(-1)^k (sigma^2 - tan^2 |w|^2)^k`.
/// Integer power, branch-free; no damping requirement.
pub fn box_symbol(omega: &[f64], sigma: Complex64, phi: f64, k: usize) -> Complex64 {
    let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
    sign * w_of(omega, sigma, phi).powi(k as i32)
}

/// Immutable bundle of (m, phi, eps) for symbol evaluation on a damped line.
#[derive(Debug, Clone, Copy)]
pub struct SymbolEvaluator {
    m: usize,
    phi: f64,
    epsilon: f64,
}

impl SymbolEvaluator {
    pub fn new(m: usize, phi: f64, epsilon: f64) -> Result<Self> {
        if m < 1 {
            return Err(CrtError::UnsupportedDimension { m, max: 3 });
        }
        if !(phi > 0.0 && phi < FRAC_PI_2) {
            return Err(CrtError::InvalidAngle { phi });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(CrtError::Domain(format!(
                "regularization eps must be positive, got {epsilon}"
            )));
        }
        Ok(Self { m, phi, epsilon })
    }

    pub fn spatial_dim(&self) -> usize {
        self.m
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn symbol_d(&self, omega: &[f64], sigma: Complex64) -> Result<Complex64> {
        symbol_d(omega, sigma, self.m, self.phi)
    }

    pub fn symbol_dprime(&self, omega: &[f64], sigma: Complex64) -> Result<Complex64> {
        symbol_dprime(omega, sigma, self.m, self.phi)
    }

    pub fn box_symbol(&self, omega: &[f64], sigma: Complex64, k: usize) -> Complex64 {
        box_symbol(omega, sigma, self.phi, k)
    }
}

#[derive(Debug, Clone)]
pub struct MultiplierOptions {
    /// Contour depth; defaults to 4 / (t-extent of the grid).
    pub epsilon: Option<f64>,
    /// Zero-padding factor per axis before the transforms (>= 1; default 2).
    pub pad_factor: f64,
}

impl Default for MultiplierOptions {
    fn default() -> Self {
        Self {
            epsilon: None,
            pad_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDiagnostics {
    pub epsilon: f64,
    pub padded_dims: Vec<usize>,
    /// linf of the imaginary residue relative to linf of the real output
    /// (absolute when the output vanishes).
    pub imag_residual: f64,
    /// Set when the residue exceeds 1e-8: for theoretically real outputs
    /// this signals a branch or eps misconfiguration.
    pub warning: bool,
}

pub const IMAG_RESIDUAL_LIMIT: f64 = 1e-8;

/// Apply a Fourier multiplier along the contour `Im(sigma) = -eps`:
/// `exp(+eps t) IFFT[ M(w, s - i eps) FFT[exp(-eps t) f] ]`, zero-padded per
/// axis and cropped back. Returns the real part and the residue diagnostics.
pub fn apply_multiplier<M>(
    f: &ScalarField,
    multiplier: M,
    opts: &MultiplierOptions,
) -> Result<(ScalarField, SpectralDiagnostics)>
where
    M: Fn(&[f64], Complex64) -> Complex64 + Sync,
{
    let grid = f.grid();
    let n_axes = grid.num_axes();
    let m = grid.spatial_dim();
    let t_axis = grid.t_axis();
    let t_extent = t_axis.extent();
    let eps = match opts.epsilon {
        Some(e) if e > 0.0 && e.is_finite() => e,
        Some(e) => {
            return Err(CrtError::Domain(format!(
                "regularization eps must be positive, got {e}"
            )))
        }
        None => 4.0 / t_extent,
    };
    if !(opts.pad_factor >= 1.0 && opts.pad_factor.is_finite()) {
        return Err(CrtError::Domain(format!(
            "pad factor must be >= 1, got {}",
            opts.pad_factor
        )));
    }

    let dims: Vec<usize> = grid.axes().iter().map(|a| a.count).collect();
    let padded: Vec<usize> = dims
        .iter()
        .map(|&n| next_fast_len(((n as f64) * opts.pad_factor).ceil() as usize))
        .collect();
    let padded_len: usize = padded.iter().product();
    let nt = dims[n_axes - 1];
    let pt = padded[n_axes - 1];
    let dt = t_axis.spacing;

    // damp and embed: the data block sits at the low corner of the padded box
    let mut buf = vec![Complex64::default(); padded_len];
    {
        let damp: Vec<f64> = (0..nt).map(|j| (-eps * dt * j as f64).exp()).collect();
        let n_lines = grid.spatial_len();
        // padded flat index of the start of spatial line `sp`
        let line_starts: Vec<usize> = (0..n_lines)
            .map(|sp| {
                let mut idx = vec![0usize; m];
                grid.unravel_spatial(sp, &mut idx);
                let mut flat = 0usize;
                for (ax, &i) in idx.iter().enumerate() {
                    flat = flat * padded[ax] + i;
                }
                flat * pt
            })
            .collect();
        // writes are to disjoint slices; keep it simple and sequential
        for (sp, &start) in line_starts.iter().enumerate() {
            let src = f.t_line(sp);
            let dst = &mut buf[start..start + nt];
            for ((d, s), w) in dst.iter_mut().zip(src).zip(&damp) {
                *d = Complex64::new(s * w, 0.0);
            }
        }
    }

    fft::fft_nd(&mut buf, &padded, true);

    // frequency tables: 2 pi k / (count * spacing), k in [-n/2, n/2]
    let freqs: Vec<Vec<f64>> = (0..n_axes)
        .map(|ax| {
            let p = padded[ax];
            let d = grid.axis(ax).spacing;
            (0..p)
                .map(|q| {
                    let k = if q <= p / 2 { q as isize } else { q as isize - p as isize };
                    TAU * k as f64 / (p as f64 * d)
                })
                .collect()
        })
        .collect();

    // With radial (even-in-omega) symbols every bin is conjugate-paired
    // through the sigma axis alone; the sigma-Nyquist slab is its own pair
    // and needs a real multiplier value, so project it.
    let sigma_nyquist = if pt % 2 == 0 { Some(pt / 2) } else { None };
    buf.par_chunks_mut(pt)
        .enumerate()
        .try_for_each(|(line, chunk)| -> Result<()> {
            let mut rem = line;
            let mut omega = [0.0f64; 3];
            for ax in (0..m).rev() {
                omega[ax] = freqs[ax][rem % padded[ax]];
                rem /= padded[ax];
            }
            for (q, v) in chunk.iter_mut().enumerate() {
                let sigma = Complex64::new(freqs[m][q], -eps);
                let mut mv = multiplier(&omega[..m], sigma);
                if !mv.re.is_finite() || !mv.im.is_finite() {
                    return Err(CrtError::Domain(format!(
                        "multiplier returned a non-finite value at omega={:?} sigma={sigma}",
                        &omega[..m]
                    )));
                }
                if Some(q) == sigma_nyquist {
                    mv = Complex64::new(mv.re, 0.0);
                }
                *v *= mv;
            }
            Ok(())
        })?;

    fft::fft_nd(&mut buf, &padded, false);

    // crop, undamp, normalize, split
    let norm = 1.0 / padded_len as f64;
    let mut out = vec![0.0; grid.len()];
    let mut imag_linf = 0.0f64;
    {
        let undamp: Vec<f64> = (0..nt)
            .map(|j| (eps * dt * j as f64).exp() * norm)
            .collect();
        let mut idx = vec![0usize; m];
        for (sp, chunk) in out.chunks_mut(nt).enumerate() {
            grid.unravel_spatial(sp, &mut idx);
            let mut flat = 0usize;
            for (ax, &i) in idx.iter().enumerate() {
                flat = flat * padded[ax] + i;
            }
            let src = &buf[flat * pt..flat * pt + nt];
            for ((o, s), w) in chunk.iter_mut().zip(src).zip(&undamp) {
                *o = s.re * w;
                imag_linf = imag_linf.max((s.im * w).abs());
            }
        }
    }
    let field = ScalarField::new(grid.clone(), out)?;
    let linf = field.linf_norm();
    let imag_residual = if linf > 0.0 { imag_linf / linf } else { imag_linf };
    let diagnostics = SpectralDiagnostics {
        epsilon: eps,
        padded_dims: padded,
        imag_residual,
        warning: imag_residual > IMAG_RESIDUAL_LIMIT,
    };
    Ok((field, diagnostics))
}


#[cfg(test)]
mod debug_probe {
    use super::*;
    use crate::dalembertian::apply_box;
    use crate::field::GridSpec;
    use crate::phantom::{render_phantom, PhantomSpec};

    #[test]
    fn probe_box_diff() {
        let n = 64usize;
        let g = GridSpec::from_parts(&[n, n], &[2.0 / n as f64, 2.0 / n as f64], &[-1.0, 0.0])
            .unwrap();
        let spec = PhantomSpec::ball_bump(vec![0.0, 0.9], 0.5, 1.0).unwrap();
        let f = render_phantom(&spec, &g).unwrap();
        let (sb, diag) = apply_multiplier(
            &f,
            |w, s| box_symbol(w, s, FRAC_PI_4, 1),
            &MultiplierOptions::default(),
        )
        .unwrap();
        let fd = apply_box(&f, FRAC_PI_4, 1).unwrap();
        println!("imag_residual {}", diag.imag_residual);
        println!("linf spec {} fd {}", sb.linf_norm(), fd.linf_norm());
        let nt = n;
        // profile along t at x-center and along x at bump t-center
        let sp = n / 2;
        for j in (0..n).step_by(4) {
            let a = sb.values()[sp * nt + j];
            let b = fd.values()[sp * nt + j];
            println!("t[{j}] = {:>7.3}: spec {a:>12.5} fd {b:>12.5} diff {:>10.2e}", g.t_axis().coord(j), a - b);
        }
        let j = (0.9 / g.t_axis().spacing).round() as usize;
        for i in (0..n).step_by(8) {
            let a = sb.values()[i * nt + j];
            let b = fd.values()[i * nt + j];
            println!("x[{i}] = {:>7.3}: spec {a:>12.5} fd {b:>12.5} diff {:>10.2e}", g.axis(0).coord(i), a - b);
        }
    }
}
