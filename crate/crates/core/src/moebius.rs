//! Complex 2x2 matrix algebra, the Moebius action on the extended plane,
//! circles, and the complex length / half length conventions.
//!
//! Lengths live in `C / 2 pi i Z`. We store the representative whose
//! imaginary part lies in `(-pi, pi]`; arguments that land within
//! [`BRANCH_SNAP`] of `-pi` are moved to `+pi` so that roundoff on a branch
//! cut never flips a value to the other side.

use std::fmt;
use std::ops::{Mul, Neg};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, cx, i_times, Cx, Scalar};

/// Angular distance from `-pi` under which an argument is treated as `+pi`.
pub const BRANCH_SNAP: f64 = 1e-12;

/// Tolerance on `dist(tr^2, [0, 4])` below which an element is not strictly loxodromic.
pub const LOXODROMY_TOL: f64 = 1e-10;

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_angle<T: Scalar>(theta: T) -> T {
    let two_pi = T::two_pi();
    let pi = T::pi();
    let mut t = theta - two_pi * (theta / two_pi).round();
    if t <= -pi + T::tol(BRANCH_SNAP) {
        t = t + two_pi;
    }
    if t > pi {
        t = t - two_pi;
    }
    t
}

/// Brings the imaginary part of `z` into `(-pi, pi]`.
pub fn wrap_strip<T: Scalar>(z: Cx<T>) -> Cx<T> {
    cx(z.re, wrap_angle(z.im))
}

/// Principal logarithm with imaginary part in `(-pi, pi]`.
pub fn principal_log<T: Scalar>(z: Cx<T>) -> Result<Cx<T>> {
    let r = z.norm();
    if r == T::zero() || !r.is_finite() {
        return Err(Error::ZeroArgument);
    }
    let mut arg = z.im.atan2(z.re);
    if arg <= -T::pi() + T::tol(BRANCH_SNAP) {
        arg = arg + T::two_pi();
    }
    Ok(cx(r.ln(), arg))
}

/// `tanh^-1` with imaginary part in `(-pi/2, pi/2]`, computed as
/// `log((1+w)/(1-w)) / 2` with the principal logarithm.
pub fn atanh_principal<T: Scalar>(w: Cx<T>) -> Result<Cx<T>> {
    let one = Cx::<T>::one();
    let pole = T::tol(1e-14);
    if (w - one).norm() <= pole || (w + one).norm() <= pole {
        return Err(Error::BranchPole);
    }
    // log((1+w)/(1-w)) = log1p(2w/(1-w)), which keeps small w accurate
    let l = principal_log1p(w * T::c(2.0) / (one - w))?;
    Ok(l * T::c(0.5))
}

/// `log(1 + z)` on the principal branch, accurate for small `z`.
pub fn principal_log1p<T: Scalar>(z: Cx<T>) -> Result<Cx<T>> {
    let one = T::one();
    let re1 = one + z.re;
    if (re1 == T::zero() && z.im == T::zero()) || !z.norm().is_finite() {
        return Err(Error::ZeroArgument);
    }
    let modulus = if z.norm() < T::c(0.5) {
        (z.re * T::c(2.0) + z.norm_sqr()).ln_1p() * T::c(0.5)
    } else {
        cx(re1, z.im).norm().ln()
    };
    let mut arg = z.im.atan2(re1);
    if arg <= -T::pi() + T::tol(BRANCH_SNAP) {
        arg = arg + T::two_pi();
    }
    Ok(cx(modulus, arg))
}

/// `cosh^-1` with real part `>= 0` and imaginary part in `(-pi, pi]`.
pub fn acosh_positive<T: Scalar>(w: Cx<T>) -> Cx<T> {
    let one = Cx::<T>::one();
    let mut s = (w - one).sqrt() * (w + one).sqrt();
    // (w + s)(w - s) = 1; take the factor of modulus >= 1 so nothing cancels
    if (w + s).norm_sqr() < (w - s).norm_sqr() {
        s = -s;
    }
    let mut v = match principal_log(w + s) {
        Ok(v) => v,
        Err(_) => Cx::zero(),
    };
    if v.re < T::zero() {
        v = -v;
    }
    wrap_strip(v)
}

/// Complex arctangent via `atanh(i w) / i`.
pub fn atan_principal<T: Scalar>(w: Cx<T>) -> Result<Cx<T>> {
    let iw = cx(-w.im, w.re);
    let a = atanh_principal(iw)?;
    // divide by i
    Ok(cx(a.im, -a.re))
}

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedPoint<T: Scalar> {
    Finite(Cx<T>),
    Infinity,
}

impl<T: Scalar> ExtendedPoint<T> {
    pub fn finite(re: f64, im: f64) -> Self {
        ExtendedPoint::Finite(cx(T::c(re), T::c(im)))
    }

    /// Wraps a complex value, sending non-finite values to infinity.
    pub fn from_complex(z: Cx<T>) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ExtendedPoint::Finite(z)
        } else {
            ExtendedPoint::Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Cx<T>> {
        match self {
            ExtendedPoint::Finite(z) => Some(*z),
            ExtendedPoint::Infinity => None,
        }
    }

    /// Chordal distance on the Riemann sphere of diameter 2 (bounded by 2).
    pub fn chordal(&self, other: &Self) -> T {
        let two = T::c(2.0);
        match (self, other) {
            (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => T::zero(),
            (ExtendedPoint::Finite(z), ExtendedPoint::Infinity)
            | (ExtendedPoint::Infinity, ExtendedPoint::Finite(z)) => {
                two / (T::one() + z.norm_sqr()).sqrt()
            }
            (ExtendedPoint::Finite(z), ExtendedPoint::Finite(w)) => {
                two * (*z - *w).norm()
                    / ((T::one() + z.norm_sqr()) * (T::one() + w.norm_sqr())).sqrt()
            }
        }
    }

    pub fn is_real(&self, tol: T) -> bool {
        match self {
            ExtendedPoint::Infinity => true,
            ExtendedPoint::Finite(z) => z.im.abs() <= tol * (T::one() + z.re.abs()),
        }
    }
}

impl<T: Scalar> fmt::Display for ExtendedPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Infinity => write!(f, "inf"),
            ExtendedPoint::Finite(z) => write!(f, "{}{:+}i", z.re.f(), z.im.f()),
        }
    }
}

/// A 2x2 complex matrix of determinant one: a lift of a Moebius map to SL(2,C).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T: Scalar> {
    pub a: Cx<T>,
    pub b: Cx<T>,
    pub c: Cx<T>,
    pub d: Cx<T>,
}

impl<T: Scalar> Mat2<T> {
    /// Builds a unimodular matrix from arbitrary non-singular entries,
    /// dividing by the principal square root of the determinant if needed.
    pub fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Result<Self> {
        let m = Mat2 { a, b, c, d };
        let det = m.det();
        let scale = m.max_abs().max(T::min_positive_value());
        if !det.norm().is_finite() || det.norm() <= T::tol(1e-300) * scale * scale {
            return Err(Error::Singular);
        }
        Ok(m.renormalized())
    }

    /// Like [`Mat2::new`] but for entries already known to be unimodular.
    pub(crate) fn raw(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::raw(Cx::one(), Cx::zero(), Cx::zero(), Cx::one())
    }

    pub fn diag(lambda: Cx<T>) -> Result<Self> {
        if lambda.norm() == T::zero() {
            return Err(Error::Singular);
        }
        Ok(Mat2::raw(lambda, Cx::zero(), Cx::zero(), lambda.inv()))
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Mat2::new(cr(a), cr(b), cr(c), cr(d))
    }

    pub fn det(&self) -> Cx<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Cx<T> {
        self.a + self.d
    }

    pub fn max_abs(&self) -> T {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    /// Entry-wise maximum distance to another matrix.
    pub fn distance(&self, o: &Self) -> T {
        (self.a - o.a)
            .norm()
            .max((self.b - o.b).norm())
            .max((self.c - o.c).norm())
            .max((self.d - o.d).norm())
    }

    /// Distance in PSL(2,C): the smaller of the distances to `o` and `-o`.
    pub fn projective_distance(&self, o: &Self) -> T {
        self.distance(o).min(self.distance(&-*o))
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Self {
        Mat2::raw(self.d, -self.b, -self.c, self.a)
    }

    /// `g * self * g^-1`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        *g * *self * g.inverse()
    }

    fn renormalized(self) -> Self {
        let det = self.det();
        if (det - Cx::one()).norm() > T::tol(1e-14) {
            let s = det.sqrt();
            if s.norm() > T::zero() {
                return Mat2::raw(self.a / s, self.b / s, self.c / s, self.d / s);
            }
        }
        self
    }

    /// `dist(tr^2, [0, 4])` measured in the complex plane.
    pub fn loxodromy_margin(&self) -> T {
        loxodromy_margin(self.trace())
    }

    pub fn is_strictly_loxodromic(&self) -> bool {
        self.loxodromy_margin() > T::tol(LOXODROMY_TOL)
    }

    fn require_loxodromic(&self) -> Result<()> {
        if self.is_strictly_loxodromic() {
            Ok(())
        } else {
            let t2 = self.trace() * self.trace();
            Err(Error::NotLoxodromic {
                re: t2.re.f(),
                im: t2.im.f(),
            })
        }
    }

    pub fn is_real(&self, tol: T) -> bool {
        let s = tol * (T::one() + self.max_abs());
        [self.a, self.b, self.c, self.d]
            .iter()
            .all(|z| z.im.abs() <= s)
    }
}

/// `dist(tr^2, [0, 4])` for a trace value.
pub fn loxodromy_margin<T: Scalar>(trace: Cx<T>) -> T {
    let t2 = trace * trace;
    let four = T::c(4.0);
    if t2.re >= T::zero() && t2.re <= four {
        t2.im.abs()
    } else {
        t2.norm().min((t2 - cr::<T>(4.0)).norm())
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, o: Mat2<T>) -> Mat2<T> {
        Mat2::raw(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl<T: Scalar> Neg for Mat2<T> {
    type Output = Mat2<T>;

    fn neg(self) -> Mat2<T> {
        Mat2::raw(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Action `z -> (az + b)/(cz + d)` on the extended plane.
pub fn mobius_apply<T: Scalar>(m: &Mat2<T>, z: ExtendedPoint<T>) -> ExtendedPoint<T> {
    match z {
        ExtendedPoint::Infinity => {
            if m.c.norm() == T::zero() {
                ExtendedPoint::Infinity
            } else {
                ExtendedPoint::from_complex(m.a / m.c)
            }
        }
        ExtendedPoint::Finite(z) => {
            let den = m.c * z + m.d;
            if den.norm() == T::zero() {
                ExtendedPoint::Infinity
            } else {
                ExtendedPoint::from_complex((m.a * z + m.b) / den)
            }
        }
    }
}

/// Attracting and repelling fixed points of a strictly loxodromic element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoints<T: Scalar> {
    pub attracting: ExtendedPoint<T>,
    pub repelling: ExtendedPoint<T>,
}

pub fn fixed_points<T: Scalar>(m: &Mat2<T>) -> Result<FixedPoints<T>> {
    m.require_loxodromic()?;
    if m.c.norm() == T::zero() {
        let finite = ExtendedPoint::from_complex(m.b / (m.d - m.a));
        return Ok(if m.a.norm() > m.d.norm() {
            FixedPoints {
                attracting: ExtendedPoint::Infinity,
                repelling: finite,
            }
        } else {
            FixedPoints {
                attracting: finite,
                repelling: ExtendedPoint::Infinity,
            }
        });
    }
    let tr = m.trace();
    let disc = (tr * tr - cr::<T>(4.0)).sqrt();
    let u = m.a - m.d;
    let w = if (u + disc).norm() >= (u - disc).norm() {
        u + disc
    } else {
        u - disc
    };
    let two = T::c(2.0);
    let z1 = w / (m.c * two);
    let z2 = -(m.b * two) / w;
    let k1 = (m.c * z1 + m.d).norm();
    let k2 = (m.c * z2 + m.d).norm();
    let (att, rep) = if k1 > k2 { (z1, z2) } else { (z2, z1) };
    Ok(FixedPoints {
        attracting: ExtendedPoint::from_complex(att),
        repelling: ExtendedPoint::from_complex(rep),
    })
}

/// Complex translation length, canonical in the strip `re > 0, im in (-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexLength<T: Scalar> {
    value: Cx<T>,
}

impl<T: Scalar> ComplexLength<T> {
    pub fn new(value: Cx<T>) -> Result<Self> {
        if !(value.re > T::zero()) || !value.im.is_finite() {
            return Err(Error::InvalidInput(format!(
                "complex length needs positive real part, got {}",
                value.re.f()
            )));
        }
        Ok(ComplexLength {
            value: wrap_strip(value),
        })
    }

    pub fn real(l: f64) -> Result<Self> {
        Self::new(cr(l))
    }

    pub fn value(&self) -> Cx<T> {
        self.value
    }
}

/// Half length `l/2` of a lift, fixed by `cosh(l/2) = -tr/2`.
///
/// `branch_offset` counts multiples of `2 pi i` by which a continued value
/// has left the canonical strip; `value + 2 pi i * branch_offset` is the
/// continued half length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfLength<T: Scalar> {
    pub value: Cx<T>,
    pub branch_offset: i64,
}

impl<T: Scalar> HalfLength<T> {
    pub fn from_trace(trace: Cx<T>) -> Self {
        HalfLength {
            value: acosh_positive(-trace * T::c(0.5)),
            branch_offset: 0,
        }
    }

    /// The continued (unreduced) value.
    pub fn unreduced(&self) -> Cx<T> {
        self.value + i_times(T::two_pi() * T::c(self.branch_offset as f64))
    }
}

pub fn complex_length<T: Scalar>(m: &Mat2<T>) -> Result<ComplexLength<T>> {
    m.require_loxodromic()?;
    let v = acosh_positive(m.trace() * T::c(0.5));
    ComplexLength::new(v * T::c(2.0))
}

pub fn half_length<T: Scalar>(m: &Mat2<T>) -> Result<HalfLength<T>> {
    m.require_loxodromic()?;
    Ok(HalfLength::from_trace(m.trace()))
}

/// Unimodular matrix sending `z1 -> 0`, `z2 -> inf` and (if given) `z3 -> 1`.
pub fn normalizing_map<T: Scalar>(
    z1: ExtendedPoint<T>,
    z2: ExtendedPoint<T>,
    z3: Option<ExtendedPoint<T>>,
) -> Result<Mat2<T>> {
    use ExtendedPoint::*;
    let tol = T::tol(1e-12);
    if z1.chordal(&z2) <= tol {
        return Err(Error::DegenerateFixedPoints);
    }
    if let Some(z3) = z3 {
        if z3.chordal(&z1) <= tol || z3.chordal(&z2) <= tol {
            return Err(Error::DegenerateFixedPoints);
        }
    }
    let one = Cx::<T>::one();
    let zero = Cx::<T>::zero();
    // N(z) = k (z - z1) / (z - z2) with the obvious limits at infinity
    let base = match (z1, z2) {
        (Finite(p), Finite(q)) => Mat2::new(one, -p, one, -q)?,
        (Finite(p), Infinity) => Mat2::new(one, -p, zero, one)?,
        (Infinity, Finite(q)) => Mat2::new(zero, one, one, -q)?,
        (Infinity, Infinity) => unreachable!(),
    };
    let Some(z3) = z3 else { return Ok(base) };
    let image = mobius_apply(&base, z3)
        .as_finite()
        .ok_or(Error::DegenerateFixedPoints)?;
    // scale z -> z / image
    let s = image.sqrt();
    let scale = Mat2::raw(s.inv(), zero, zero, s);
    Ok(scale * base)
}

/// Loxodromic lift with repelling fixed point `fix_minus`, attracting
/// fixed point `fix_plus`, complex length `length` and trace `+2 cosh(length/2)`.
pub fn loxodromic_from<T: Scalar>(
    fix_minus: ExtendedPoint<T>,
    fix_plus: ExtendedPoint<T>,
    length: ComplexLength<T>,
) -> Result<Mat2<T>> {
    let n = normalizing_map(fix_minus, fix_plus, None)?;
    let half = length.value() * T::c(0.5);
    let d = Mat2::diag(half.exp())?;
    Ok(n.inverse() * d * n)
}

/// A round circle in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle<T: Scalar> {
    pub center: Cx<T>,
    pub radius: T,
}

impl<T: Scalar> Circle<T> {
    pub fn new(center: Cx<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() || !center.re.is_finite() {
            return Err(Error::InvalidInput("circle radius must be positive".into()));
        }
        Ok(Circle { center, radius })
    }

    /// Whether `z` lies in the open disk.
    pub fn contains(&self, z: Cx<T>) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Point on the circle at angle `theta`.
    pub fn point_at(&self, theta: T) -> Cx<T> {
        self.center + Cx::from_polar(self.radius, theta)
    }
}

/// Image of a circle under a Moebius map.
pub fn map_circle<T: Scalar>(m: &Mat2<T>, circle: &Circle<T>) -> Result<Circle<T>> {
    let c0 = circle.center;
    let r = circle.radius;
    if m.c.norm() == T::zero() {
        let k = m.a / m.d;
        return Circle::new(k * c0 + m.b / m.d, r * k.norm());
    }
    let pole = -m.d / m.c;
    let offset = pole - c0;
    if (offset.norm() - r).abs() <= T::tol(1e-12) * r.max(T::one()) {
        return Err(Error::ImageIsLine);
    }
    // the centre of the image is the image of the reflection of the pole
    let center = if offset.norm() == T::zero() {
        m.a / m.c
    } else {
        let reflected = c0 + Cx::from(r * r) / offset.conj();
        mobius_apply(m, ExtendedPoint::Finite(reflected))
            .as_finite()
            .ok_or(Error::ImageIsLine)?
    };
    let on = mobius_apply(m, ExtendedPoint::Finite(c0 + Cx::from(r)))
        .as_finite()
        .ok_or(Error::ImageIsLine)?;
    Circle::new(center, (on - center).norm())
}

/// Inversive distance `(|c1 - c2|^2 - r1^2 - r2^2) / (2 r1 r2)`.
pub fn inversive_distance<T: Scalar>(c1: &Circle<T>, c2: &Circle<T>) -> T {
    let d2 = (c1.center - c2.center).norm_sqr();
    (d2 - c1.radius * c1.radius - c2.radius * c2.radius) / (T::c(2.0) * c1.radius * c2.radius)
}

/// Hyperbolic distance between the geodesic planes bounded by two circles.
pub fn plane_distance<T: Scalar>(c1: &Circle<T>, c2: &Circle<T>) -> Result<T> {
    let delta = inversive_distance(c1, c2);
    if delta.abs() <= T::one() + T::tol(1e-12) {
        return Err(Error::CirclesMeet { delta: delta.f() });
    }
    Ok(delta.abs().acosh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Cx<f64>;
    type P = ExtendedPoint<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn with_trace(t: f64) -> Mat2<f64> {
        // [[t, -1], [1, 0]] has trace t and determinant 1
        Mat2::from_real(t, -1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = Mat2::<f64>::identity();
        assert_eq!(
            mobius_apply(&id, P::finite(5.0, 0.0)),
            P::finite(5.0, 0.0)
        );
        let m = Mat2::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(
            mobius_apply(&m, P::finite(1.0, 0.0)),
            P::finite(4.0, 0.0)
        );
        let s = Mat2::from_real(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(
            mobius_apply(&s, P::Infinity),
            P::finite(0.0, 0.0)
        );
        assert_eq!(
            mobius_apply(&s, P::finite(0.0, 0.0)),
            P::Infinity
        );
    }

    #[test]
    fn fixed_point_examples() {
        let m = Mat2::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        let f = fixed_points(&m).unwrap();
        assert_eq!(f.attracting, P::Infinity);
        assert_eq!(f.repelling.as_finite().unwrap().norm(), 0.0);
        let f = fixed_points(&m.inverse()).unwrap();
        assert_eq!(f.repelling, P::Infinity);
        assert_eq!(f.attracting.as_finite().unwrap().norm(), 0.0);

        let parabolic = Mat2::<f64>::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            fixed_points(&parabolic),
            Err(Error::NotLoxodromic { .. })
        ));
        let elliptic = with_trace(1.0);
        assert!(fixed_points(&elliptic).is_err());
    }

    #[test]
    fn attracting_point_attracts() {
        let m = with_trace(3.0);
        let f = fixed_points(&m).unwrap();
        let mut z = P::finite(0.3, 0.7);
        for _ in 0..60 {
            z = mobius_apply(&m, z);
        }
        assert!(z.chordal(&f.attracting) < 1e-10);
        assert!(mobius_apply(&m, f.repelling).chordal(&f.repelling) < 1e-12);
    }

    #[test]
    fn complex_length_examples() {
        let m = with_trace(4.0);
        let l = complex_length(&m).unwrap().value();
        assert!(close(l, c(2.633_915_793_849_633_4, 0.0), 1e-13));
        // eigenvalue oracle: l = 2 log(lambda) with |lambda| > 1
        let lambda = 2.0 + 3f64.sqrt();
        assert!((l.re - 2.0 * lambda.ln()).abs() < 1e-13);
        assert!(close(
            complex_length(&-m).unwrap().value(),
            complex_length(&m).unwrap().value(),
            1e-15
        ));

        let target = c(3.0, 0.3);
        let d = Mat2::diag((target * 0.5).exp()).unwrap();
        assert!(close(complex_length(&d).unwrap().value(), target, 1e-13));
    }

    #[test]
    fn half_length_examples() {
        let h = half_length(&with_trace(-4.0)).unwrap().value;
        assert!(close(h, c(1.316_957_896_924_816_7, 0.0), 1e-13));
        let h = half_length(&with_trace(4.0)).unwrap().value;
        assert!(close(h, c(1.316_957_896_924_816_7, std::f64::consts::PI), 1e-13));
        let h = half_length(&with_trace(-2.0 * 1f64.cosh())).unwrap().value;
        assert!(close(h, c(1.0, 0.0), 1e-13));
    }

    #[test]
    fn loxodromic_from_examples() {
        let m = loxodromic_from(
            P::finite(0.0, 0.0),
            P::Infinity,
            ComplexLength::real(2.0).unwrap(),
        )
        .unwrap();
        let e = std::f64::consts::E;
        assert!(m.distance(&Mat2::from_real(e, 0.0, 0.0, 1.0 / e).unwrap()) < 1e-14);

        let m = loxodromic_from(
            P::finite(1.0, 0.0),
            P::finite(-1.0, 0.0),
            ComplexLength::real(2.0).unwrap(),
        )
        .unwrap();
        let f = fixed_points(&m).unwrap();
        assert!(f.repelling.chordal(&P::finite(1.0, 0.0)) < 1e-13);
        assert!(f.attracting.chordal(&P::finite(-1.0, 0.0)) < 1e-13);
        assert!(close(m.trace(), c(2.0 * 1f64.cosh(), 0.0), 1e-13));

        let len = ComplexLength::new(c(3.0, 0.3)).unwrap();
        let m = loxodromic_from(
            P::finite(0.0, 0.0),
            P::Infinity,
            len,
        )
        .unwrap();
        assert!(close(m.a, c(1.5, 0.15).exp(), 1e-13));
        assert!(close(complex_length(&m).unwrap().value(), len.value(), 1e-13));

        assert_eq!(
            loxodromic_from(
                P::finite(2.0, 0.0),
                P::finite(2.0, 0.0),
                len
            ),
            Err(Error::DegenerateFixedPoints)
        );
    }

    #[test]
    fn map_circle_examples() {
        let circle = Circle::new(c(3.0, 0.0), 1.0).unwrap();
        let id = Mat2::<f64>::identity();
        assert_eq!(map_circle(&id, &circle).unwrap(), circle);

        let dil = Mat2::diag(c(2f64.sqrt(), 0.0)).unwrap();
        let img = map_circle(&dil, &circle).unwrap();
        assert!(close(img.center, c(6.0, 0.0), 1e-13));
        assert!((img.radius - 2.0).abs() < 1e-13);

        let inv = Mat2::<f64>::from_real(0.0, 1.0, 1.0, 0.0).unwrap(); // det -1, rescaled by i
        let img = map_circle(&inv, &circle).unwrap();
        assert!(close(img.center, c(0.375, 0.0), 1e-14));
        assert!((img.radius - 0.125).abs() < 1e-14);
        // three-point check
        for k in 0..3 {
            let z = circle.point_at(2.0 * k as f64);
            let w = mobius_apply(&inv, P::Finite(z)).as_finite().unwrap();
            assert!(((w - img.center).norm() - img.radius).abs() < 1e-14);
        }

        let through_pole = Circle::new(c(1.0, 0.0), 1.0).unwrap();
        assert_eq!(map_circle(&inv, &through_pole), Err(Error::ImageIsLine));
    }

    #[test]
    fn plane_distance_examples() {
        let u0 = Circle::new(c(0.0, 0.0), 1.0).unwrap();
        let u10 = Circle::new(c(10.0, 0.0), 1.0).unwrap();
        assert!((inversive_distance(&u0, &u10) - 49.0).abs() < 1e-13);
        let d = plane_distance(&u0, &u10).unwrap();
        assert!((d - 4.584_863_339_122_355_4).abs() < 1e-13);

        let u2 = Circle::new(c(2.0, 0.0), 1.0).unwrap();
        assert!(matches!(
            plane_distance(&u0, &u2),
            Err(Error::CirclesMeet { .. })
        ));

        let big = Circle::new(c(0.0, 0.0), 2f64.exp()).unwrap();
        assert!((plane_distance(&u0, &big).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn plane_distance_matches_sampled_geodesic_distance() {
        // hemispheres over two real-centred circles meet the vertical plane
        // Im z = 0 in two geodesics; their distance in the upper half plane
        // is the plane distance. Minimise the pointwise distance by sampling.
        let c1 = Circle::new(c(0.0, 0.0), 1.0).unwrap();
        let c2 = Circle::new(c(10.0, 0.0), 1.0).unwrap();
        let dist = |t: f64, s: f64| {
            let (x1, y1) = (t.cos(), t.sin());
            let (x2, y2) = (10.0 + s.cos(), s.sin());
            (1.0 + ((x1 - x2).powi(2) + (y1 - y2).powi(2)) / (2.0 * y1 * y2)).acosh()
        };
        let mut best = f64::MAX;
        let n = 400;
        for i in 1..n {
            for j in 1..n {
                let t = std::f64::consts::PI * i as f64 / n as f64;
                let s = std::f64::consts::PI * j as f64 / n as f64;
                best = best.min(dist(t, s));
            }
        }
        let exact = plane_distance(&c1, &c2).unwrap();
        assert!(best >= exact - 1e-9);
        assert!(best - exact < 1e-3);
    }

    #[test]
    fn inverse_hyperbolic_examples() {
        assert_eq!(atanh_principal(C::new(0.0, 0.0)).unwrap(), C::new(0.0, 0.0));
        assert!(close(
            acosh_positive(c(2.0, 0.0)),
            c((2.0 + 3f64.sqrt()).ln(), 0.0),
            1e-15
        ));
        let v = acosh_positive(c(-27.9834, 0.0));
        assert!((v.re - 4.024_439_248_802_681_6).abs() < 1e-12);
        assert_eq!(v.im, std::f64::consts::PI);
        // the negative-zero side of the cut lands on +pi as well
        let v = acosh_positive(c(-27.9834, -0.0));
        assert_eq!(v.im, std::f64::consts::PI);
        assert_eq!(atanh_principal(c(1.0, 0.0)), Err(Error::BranchPole));
        assert_eq!(atanh_principal(c(-1.0, 0.0)), Err(Error::BranchPole));
    }

    #[test]
    fn atanh_strip_is_half_open() {
        let v = atanh_principal(c(2.0, 0.0)).unwrap();
        assert!((v.im - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let v = atanh_principal(c(2.0, -1e-18)).unwrap();
        assert!((v.im - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn inverse_functions_invert_on_a_grid() {
        for i in -20..=20 {
            for j in -20..=20 {
                let w = c(i as f64 * 0.37, j as f64 * 0.29);
                if (w - 1.0).norm() < 1e-3 || (w + 1.0).norm() < 1e-3 {
                    continue;
                }
                let a = atanh_principal(w).unwrap();
                assert!(a.im > -std::f64::consts::FRAC_PI_2 && a.im <= std::f64::consts::FRAC_PI_2);
                assert!((a.tanh() - w).norm() <= 1e-12 * (1.0 + w.norm()));
                let h = acosh_positive(w);
                assert!(h.re >= 0.0);
                assert!((h.cosh() - w).norm() <= 1e-12 * (1.0 + w.norm()));
            }
        }
    }

    #[test]
    fn single_precision_still_works() {
        let m = Mat2::<f32>::from_real(4.0, -1.0, 1.0, 0.0).unwrap();
        let l = complex_length(&m).unwrap().value();
        assert!((l.re - 2.633_915_8).abs() < 1e-5);
    }

    #[cfg(feature = "quad")]
    #[test]
    fn quad_precision_half_length() {
        use f128::f128;
        let m = Mat2::<f128>::from_real(-4.0, -1.0, 1.0, 0.0).unwrap();
        let h = half_length(&m).unwrap().value;
        // cosh(h) = 2 to quad accuracy
        let err = (h.cosh() - cr::<f128>(2.0)).norm();
        assert!(err.f() < 1e-30);
    }

    fn arb_unimodular() -> impl Strategy<Value = Mat2<f64>> {
        (
            -2.0..2.0f64,
            -2.0..2.0f64,
            -2.0..2.0f64,
            -2.0..2.0f64,
            -2.0..2.0f64,
            -2.0..2.0f64,
        )
            .prop_filter_map("non-singular", |(ar, ai, br, bi, cr_, ci)| {
                let a = c(ar, ai);
                let b = c(br, bi);
                let cc = c(cr_, ci);
                if a.norm() < 0.2 {
                    return None;
                }
                // choose d so that ad - bc = 1
                let d = (C::new(1.0, 0.0) + b * cc) / a;
                Some(Mat2::raw(a, b, cc, d))
            })
    }

    fn arb_su2() -> impl Strategy<Value = Mat2<f64>> {
        (0.0..6.3f64, 0.0..6.3f64, 0.0..1.6f64).prop_map(|(s, t, th)| {
            let a = C::from_polar(th.cos(), s);
            let b = C::from_polar(th.sin(), t);
            Mat2::raw(a, b, -b.conj(), a.conj())
        })
    }

    #[test]
    fn products_with_large_entries_match_quad() {
        type Q = f128::f128;
        let a = Mat2::<f64>::diag(C::new(4f64.exp(), 0.0)).unwrap();
        let b = Mat2::raw(
            C::new(-41.03367545043095, -12.790697565193101),
            C::new(41.05199108931968, 12.790697565193103),
            C::new(-95.63182548358762, -12.79069756519931),
            C::new(95.65014112247637, 12.790697565199313),
        );
        let q = |m: &Mat2<f64>| {
            let [ea, eb, ec, ed] = [m.a, m.b, m.c, m.d].map(crate::scalar::convert::<f64, Q>);
            Mat2::raw(ea, eb, ec, ed)
        };
        let fast = (b * a * a * a * b).trace();
        let slow: C = crate::scalar::convert((q(&b) * q(&a) * q(&a) * q(&a) * q(&b)).trace());
        assert!((fast - slow).norm() <= 1e-12 * slow.norm(), "{fast} vs {slow}");
    }

    proptest! {
        #[test]
        fn long_unitary_products_stay_unimodular(ms in prop::collection::vec(arb_su2(), 100)) {
            let mut p = Mat2::identity();
            for m in &ms {
                p = p * *m;
                prop_assert!((p.det() - 1.0).norm() <= 1e-12);
            }
        }

        #[test]
        fn long_products_keep_relative_determinant(ms in prop::collection::vec(arb_unimodular(), 100)) {
            let mut p = Mat2::identity();
            for m in &ms {
                p = p * *m;
                let scale = p.max_abs().powi(2).max(1.0);
                prop_assert!((p.det() - 1.0).norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn length_is_conjugation_invariant(m in arb_unimodular(), g in arb_unimodular()) {
            prop_assume!(m.loxodromy_margin() > 1e-3);
            let l = complex_length(&m).unwrap().value();
            let li = complex_length(&m.inverse()).unwrap().value();
            let lc = complex_length(&m.conjugate_by(&g)).unwrap().value();
            let tol = 1e-9 * (1.0 + g.max_abs().powi(2));
            // compare mod 2 pi i
            let d1 = wrap_strip(l - li).norm();
            let d2 = wrap_strip(l - lc).norm();
            prop_assert!(d1 <= tol, "inverse {:?} {:?}", l, li);
            prop_assert!(d2 <= tol, "conj {:?} {:?}", l, lc);
        }

        #[test]
        fn half_lengths_of_opposite_lifts_differ_by_pi_i(m in arb_unimodular()) {
            prop_assume!(m.loxodromy_margin() > 1e-3);
            let h = half_length(&m).unwrap().value;
            let hn = half_length(&-m).unwrap().value;
            let diff = wrap_strip(h - hn - C::new(0.0, std::f64::consts::PI));
            prop_assert!(diff.norm() <= 1e-9, "{:?} {:?}", h, hn);
        }

        #[test]
        fn loxodromic_from_inverts_fixed_points_and_length(m in arb_unimodular()) {
            prop_assume!(m.loxodromy_margin() > 1e-2);
            let f = fixed_points(&m).unwrap();
            prop_assume!(f.attracting.chordal(&f.repelling) > 1e-3);
            let l = complex_length(&m).unwrap();
            let back = loxodromic_from(f.repelling, f.attracting, l).unwrap();
            let tol = 1e-8 * (1.0 + m.max_abs());
            prop_assert!(back.projective_distance(&m) <= tol, "{:?} vs {:?}", back, m);
        }
    }
}
