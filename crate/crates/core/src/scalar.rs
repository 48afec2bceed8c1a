//! Scalar abstraction shared by the numerical modules.
//!
//! Everything that does arithmetic is written against [`Real`], which is
//! satisfied by `f32` and `f64`. Tolerances are expressed in `f64` and lifted
//! through [`tol`], which never goes below a small multiple of the type's
//! machine epsilon, so the same contract checks stay meaningful in `f32`.

use nalgebra::{Complex, RealField};
use num_traits::ToPrimitive;

/// Real scalar usable by the dense complex linear algebra.
pub trait Real: RealField + Copy + ToPrimitive {}

impl<T> Real for T where T: RealField + Copy + ToPrimitive {}

/// Lift an `f64` constant into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Tolerance `x`, floored at 64 ulps of one for low-precision scalars.
#[inline]
pub fn tol<T: Real>(x: f64) -> T {
    let floor = T::default_epsilon() * lit(64.0);
    let x = lit::<T>(x);
    if x > floor {
        x
    } else {
        floor
    }
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// `exp(i * angle)`.
#[inline]
pub fn cis<T: Real>(angle: T) -> Complex<T> {
    Complex::new(angle.cos(), angle.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(tol::<f64>(1e-12), 1e-12);
        assert!(tol::<f32>(1e-12) > 1e-6);
    }

    #[test]
    fn cis_is_on_unit_circle() {
        let z = cis(0.7_f64);
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }
}
