//! Trapezoid t-integrals and second-order t-derivatives.

use super::{ScalarField, SpatialField};

/// Running trapezoid integral along t: `out(x, t_j) = int_{t_min}^{t_j} f(x, z) dz`.
pub fn cumulative_t_integral(f: &ScalarField) -> ScalarField {
    let nt = f.num_t();
    let dt = f.grid().t_axis().spacing;
    let nsp = f.grid().spatial_len();
    let mut out = vec![0.0; f.values().len()];
    for sp in 0..nsp {
        let line = f.t_line(sp);
        let o = &mut out[sp * nt..(sp + 1) * nt];
        let mut acc = 0.0;
        o[0] = 0.0;
        for j in 1..nt {
            acc += 0.5 * dt * (line[j - 1] + line[j]);
            o[j] = acc;
        }
    }
    ScalarField::new(f.grid().clone(), out).expect("finite input yields finite integral")
}

/// Trapezoid integral over the whole t-axis, one value per spatial sample.
pub fn total_t_integral(f: &ScalarField) -> SpatialField {
    let nt = f.num_t();
    let dt = f.grid().t_axis().spacing;
    let nsp = f.grid().spatial_len();
    let mut out = vec![0.0; nsp];
    for (sp, o) in out.iter_mut().enumerate() {
        let line = f.t_line(sp);
        let mut acc = 0.5 * (line[0] + line[nt - 1]);
        for v in &line[1..nt - 1] {
            acc += v;
        }
        *o = acc * dt;
    }
    SpatialField::new(f.grid().spatial_only(), out).expect("finite")
}

/// Second-order d/dt: central differences inside, one-sided second-order
/// stencils on the two boundary slabs (exact on polynomials of degree <= 2).
pub fn partial_t(f: &ScalarField) -> ScalarField {
    let nt = f.num_t();
    let dt = f.grid().t_axis().spacing;
    let nsp = f.grid().spatial_len();
    let inv2 = 1.0 / (2.0 * dt);
    let mut out = vec![0.0; f.values().len()];
    for sp in 0..nsp {
        let line = f.t_line(sp);
        let o = &mut out[sp * nt..(sp + 1) * nt];
        o[0] = (-3.0 * line[0] + 4.0 * line[1] - line[2]) * inv2;
        for j in 1..nt - 1 {
            o[j] = (line[j + 1] - line[j - 1]) * inv2;
        }
        o[nt - 1] = (3.0 * line[nt - 1] - 4.0 * line[nt - 2] + line[nt - 3]) * inv2;
    }
    ScalarField::new(f.grid().clone(), out).expect("finite")
}
