//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::{Complex, ComplexField, RealField};

/// Real floating-point scalar the library is generic over (`f32` or `f64`).
///
/// The associated tolerances are the absolute thresholds used for the
/// built-in validity checks. They are tuned for double precision and scaled
/// up for single precision so that the same checks remain meaningful.
pub trait Real: RealField + Copy + Into<f64> {
    /// Residual allowed in algebraic identities (orthonormality, closure).
    const ALGEBRA_TOL: f64;
    /// Residual allowed when checking unitarity or orthogonality of inputs.
    const ORTHO_TOL: f64;
    /// Most negative eigenvalue accepted as positive semidefinite.
    const PSD_TOL: f64;
    /// Residual allowed between the two routes of the disturbance computation.
    const CONSISTENCY_TOL: f64;
}

impl Real for f64 {
    const ALGEBRA_TOL: f64 = 1e-12;
    const ORTHO_TOL: f64 = 1e-10;
    const PSD_TOL: f64 = 1e-10;
    const CONSISTENCY_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const ALGEBRA_TOL: f64 = 1e-5;
    const ORTHO_TOL: f64 = 1e-4;
    const PSD_TOL: f64 = 1e-5;
    const CONSISTENCY_TOL: f64 = 1e-4;
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts the working scalar to `f64`.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.into()
}

#[inline]
pub(crate) fn abs<T: Real>(x: T) -> T {
    ComplexField::abs(x)
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn c_real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}
