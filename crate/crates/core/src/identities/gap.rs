//! The gap functions `G`, `S`, their logarithmic forms, the trace form
//! `h`, and the Weierstrass summand.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::moebius::{atan_principal, atanh_principal, principal_log, wrap_strip};
use crate::scalar::{i_times, Cx, Scalar};

fn nonzero<T: Scalar>(den: Cx<T>, scale: T) -> Result<()> {
    if den.norm() <= T::tol(1e-15) * scale || !den.norm().is_finite() {
        Err(Error::ZeroDenominator)
    } else {
        Ok(())
    }
}

/// `G(x, y, z) = 2 atanh(sinh x / (cosh x + exp(y + z)))`.
pub fn gap_g<T: Scalar>(x: Cx<T>, y: Cx<T>, z: Cx<T>) -> Result<Cx<T>> {
    let s = y + z;
    let (num, den, scale) = if s.re > T::zero() {
        // divide through by exp(s) so large lengths do not overflow
        let e = (-s).exp();
        let c = x.cosh() * e;
        (x.sinh() * e, c + Cx::one(), c.norm() + T::one())
    } else {
        let e = s.exp();
        let c = x.cosh();
        (x.sinh(), c + e, c.norm() + e.norm())
    };
    nonzero(den, scale)?;
    Ok(atanh_principal(num / den)? * T::c(2.0))
}

/// `S(x, y, z) = atanh(sinh x sinh y / (cosh z + cosh x cosh y))`.
pub fn gap_s<T: Scalar>(x: Cx<T>, y: Cx<T>, z: Cx<T>) -> Result<Cx<T>> {
    let cc = x.cosh() * y.cosh();
    let cz = z.cosh();
    let den = cz + cc;
    nonzero(den, cz.norm() + cc.norm())?;
    atanh_principal(x.sinh() * y.sinh() / den)
}

/// `log((exp x + exp(y+z)) / (exp(-x) + exp(y+z)))`.
pub fn gap_g_log<T: Scalar>(x: Cx<T>, y: Cx<T>, z: Cx<T>) -> Result<Cx<T>> {
    let s = y + z;
    let ratio = if s.re > T::zero() {
        ((x - s).exp() + Cx::one()) / ((-x - s).exp() + Cx::one())
    } else {
        (x.exp() + s.exp()) / ((-x).exp() + s.exp())
    };
    if !ratio.norm().is_finite() {
        return Err(Error::ZeroArgument);
    }
    principal_log(ratio)
}

/// `log((cosh z + cosh(x+y)) / (cosh z + cosh(x-y))) / 2`.
pub fn gap_s_log<T: Scalar>(x: Cx<T>, y: Cx<T>, z: Cx<T>) -> Result<Cx<T>> {
    let cz = z.cosh();
    let den = cz + (x - y).cosh();
    if den.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let ratio = (cz + (x + y).cosh()) / den;
    if !ratio.norm().is_finite() {
        return Err(Error::ZeroArgument);
    }
    Ok(principal_log(ratio)? * T::c(0.5))
}

fn same_mod_two_pi_i<T: Scalar>(a: Cx<T>, b: Cx<T>, tol: T) -> bool {
    wrap_strip(a - b).norm() <= tol * (T::one() + a.norm())
}

/// Whether `G` and `S` are unchanged (mod `2 pi i`) when `pi i` is added
/// to any two of the three arguments.
pub fn shift_invariance_check<T: Scalar>(x: Cx<T>, y: Cx<T>, z: Cx<T>) -> Result<bool> {
    let pi = i_times(T::pi());
    let g0 = gap_g(x, y, z)?;
    let s0 = gap_s(x, y, z)?;
    let tol = T::tol(1e-9);
    let shifts = [(pi, pi, Cx::zero()), (pi, Cx::zero(), pi), (Cx::zero(), pi, pi)];
    for (dx, dy, dz) in shifts {
        let g = gap_g(x + dx, y + dy, z + dz)?;
        let s = gap_s(x + dx, y + dy, z + dz)?;
        if !same_mod_two_pi_i(g, g0, tol) || !same_mod_two_pi_i(s, s0, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `h(x) = (1 - sqrt(1 - 4/x^2)) / 2` with the root of positive real part,
/// evaluated as `(2/x^2) / (1 + sqrt(1 - 4/x^2))`.
pub fn h_of_trace<T: Scalar>(x: Cx<T>) -> Result<Cx<T>> {
    if x.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let u = Cx::from(T::c(4.0)) / (x * x);
    let root = (Cx::<T>::one() - u).sqrt();
    Ok(u * T::c(0.5) / (Cx::<T>::one() + root))
}

/// `log((1 + (e^nu - 1) h(x)) / (1 + (e^-nu - 1) h(x)))`.
pub fn frak_h<T: Scalar>(x: Cx<T>, nu: Cx<T>) -> Result<Cx<T>> {
    let h = h_of_trace(x)?;
    let one = Cx::<T>::one();
    let num = one + (nu.exp() - one) * h;
    let den = one + ((-nu).exp() - one) * h;
    if den.is_zero() {
        return Err(Error::BranchPole);
    }
    principal_log(num / den).map_err(|_| Error::BranchPole)
}

/// `atan(cosh(quarter) / sinh(half))` with the principal complex arctangent.
pub fn weierstrass_term<T: Scalar>(quarter: Cx<T>, half: Cx<T>) -> Result<Cx<T>> {
    let sh = half.sinh();
    nonzero(sh, T::one())?;
    atan_principal(quarter.cosh() / sh)
}
