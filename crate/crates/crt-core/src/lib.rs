//! Numerical toolkit for the axis-aligned conical Radon transform.
//!
//! The transform integrates a function on `R^m_x x R_t` over shifted copies
//! of the cone `t = cot(phi) |x|`. This crate provides:
//!
//! * gridded scalar fields with the integral/differential primitives the
//!   operators need ([`field`]);
//! * the forward and weighted forward transforms by direct quadrature
//!   ([`cone`]);
//! * distributional Fourier symbols of the cone kernels and fast multiplier
//!   application on the damped contour `Im(sigma) = -eps` ([`spectral`]);
//! * the iterated d'Alembertian filter `box_phi^k` ([`dalembertian`]);
//! * inversion and range verification in even and odd total dimension
//!   ([`range`]);
//! * compactly supported phantoms and independent quadrature oracles used to
//!   validate everything else ([`phantom`], [`oracle`]).

pub mod cone;
pub mod dalembertian;
pub mod error;
pub mod field;
pub mod oracle;
pub mod phantom;
pub mod spectral;

pub use cone::{
    forward_crt, forward_crt_opts, weighted_forward_crt, ConeParams, ForwardOptions, InterpOrder,
    Measure, Orientation, QuadratureSpec,
};
pub use dalembertian::apply_box;
pub use error::{CrtError, Result};
pub use field::{
    cumulative_t_integral, detect_halfspace, detect_support, partial_t, relative_interior_l2,
    total_t_integral, AxisSpec, GridSpec, HalfspaceBound, ScalarField, SpatialField, SupportBox,
};
pub use phantom::{render_phantom, PhantomKind, PhantomSpec, PhantomTerm};
