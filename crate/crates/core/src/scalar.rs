//! Scalar abstraction shared by every numeric module.
//!
//! All geometry is written against [`Scalar`], so the same code runs in
//! `f32`, `f64` and (with the `quad` feature) IEEE binary128.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// A real floating point type usable as the base field of all computations.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug
    + Send + Sync + 'static
{
    /// Machine epsilon relative to `f64`, clamped below at 1.
    ///
    /// Tolerances are written for double precision; narrower types scale
    /// them up, wider types keep them as they are.
    fn tol_scale() -> f64 {
        let ratio = Self::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
        ratio.max(1.0)
    }

    /// Converts an `f64` constant.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Tolerance `x` (stated for f64) adapted to this type.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::c(x * Self::tol_scale())
    }

    fn pi() -> Self {
        Self::one().atan() * Self::c(4.0)
    }

    fn two_pi() -> Self {
        Self::pi() * Self::c(2.0)
    }

    #[inline]
    fn f(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Short name used in reports.
    fn precision_name() -> &'static str;
}

impl Scalar for f32 {
    fn pi() -> Self {
        std::f32::consts::PI
    }
    fn precision_name() -> &'static str {
        "single"
    }
}

impl Scalar for f64 {
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn precision_name() -> &'static str {
        "double"
    }
}

#[cfg(feature = "quad")]
impl Scalar for f128::f128 {
    fn precision_name() -> &'static str {
        "extended"
    }
}

/// Complex numbers over a [`Scalar`].
pub type Cx<T> = Complex<T>;

#[inline]
pub fn cx<T: Scalar>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cr<T: Scalar>(re: f64) -> Cx<T> {
    Complex::new(T::c(re), T::zero())
}

#[inline]
pub fn c64<T: Scalar>(re: f64, im: f64) -> Cx<T> {
    Complex::new(T::c(re), T::c(im))
}

/// The imaginary unit times `x`.
#[inline]
pub fn i_times<T: Scalar>(x: T) -> Cx<T> {
    Complex::new(T::zero(), x)
}

/// Lossy conversion to `[re, im]` in double precision.
#[inline]
pub fn to_pair<T: Scalar>(z: Cx<T>) -> [f64; 2] {
    [z.re.f(), z.im.f()]
}

#[inline]
pub fn from_pair<T: Scalar>(p: [f64; 2]) -> Cx<T> {
    c64(p[0], p[1])
}

/// Converts between scalar types through `f64` (used when promoting
/// double-precision input to the extended type).
#[inline]
pub fn convert<S: Scalar, T: Scalar>(z: Cx<S>) -> Cx<T> {
    c64(z.re.f(), z.im.f())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_is_accurate_for_every_type() {
        assert!((f64::pi() - std::f64::consts::PI).abs() < 1e-16);
        assert!((f32::pi() - std::f32::consts::PI).abs() < 1e-7);
        #[cfg(feature = "quad")]
        {
            let p = f128::f128::pi();
            assert!((p.f() - std::f64::consts::PI).abs() < 1e-15);
            assert!(f128::f128::tol_scale() == 1.0);
        }
    }

    #[test]
    fn tolerances_widen_only_for_narrow_types() {
        assert_eq!(f64::tol(1e-12), 1e-12);
        assert!(f32::tol(1e-12) > 1e-5);
    }
}
