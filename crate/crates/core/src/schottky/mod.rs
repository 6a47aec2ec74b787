//! Marked Schottky groups: generator lifts, circle-pairing certificates,
//! the normalized parametrization, fuchsian markings and the constant kappa.

mod certify;
mod word;

pub use certify::attempt_classical_certificate;
pub use word::{Letter, Word};

use num_traits::One;

use crate::error::{Error, Result};
use crate::moebius::{
    complex_length, fixed_points, inversive_distance, loxodromic_from, map_circle, mobius_apply,
    normalizing_map, plane_distance, Circle, ComplexLength, ExtendedPoint, Mat2,
};
use crate::scalar::{Cx, Scalar};

/// Margin by which pairwise inversive distances must exceed one.
pub const DISJOINT_MARGIN: f64 = 1e-9;

/// Paired circles `(C_i, C'_i)`, one pair per generator.
///
/// Each circle bounds a disk. Normally that is the bounded side; when one
/// circle encloses all the others (which happens when infinity is a limit
/// point of the group) its disk is the unbounded side.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleSystem<T: Scalar> {
    pub pairs: Vec<(Circle<T>, Circle<T>)>,
}

impl<T: Scalar> CircleSystem<T> {
    pub fn new(pairs: Vec<(Circle<T>, Circle<T>)>) -> Self {
        CircleSystem { pairs }
    }

    /// All `2n` circles in the order `C_1, C'_1, C_2, C'_2, ...`.
    pub fn circles(&self) -> Vec<Circle<T>> {
        self.pairs.iter().flat_map(|(c, d)| [*c, *d]).collect()
    }

    /// Index (into [`CircleSystem::circles`]) of the circle whose disk is unbounded.
    pub fn outer(&self) -> Option<usize> {
        let cs = self.circles();
        (0..cs.len()).find(|&i| {
            (0..cs.len()).any(|j| {
                j != i
                    && cs[i].radius > cs[j].radius
                    && inversive_distance(&cs[i], &cs[j]) < -T::one()
            })
        })
    }
}

/// Which clause of the circle-pairing test failed.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    PairCount { expected: usize, found: usize },
    Disjointness { first: usize, second: usize, delta: f64 },
    Nesting,
    Mapping { pair: usize, center_error: f64, radius_error: f64 },
    EmptyDomain,
    Orientation { pair: usize },
}

/// Outcome of [`verify_circle_pairing`].
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Pass,
    Fail(Violation),
}

impl Certificate {
    pub fn is_pass(&self) -> bool {
        matches!(self, Certificate::Pass)
    }
}

/// Rank-n marked group given by ordered generator lifts in SL(2,C).
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedSchottkyGroup<T: Scalar> {
    generators: Vec<Mat2<T>>,
    circles: Option<CircleSystem<T>>,
}

impl<T: Scalar> MarkedSchottkyGroup<T> {
    pub fn new(generators: Vec<Mat2<T>>) -> Result<Self> {
        if generators.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "rank must be at least 2, got {}",
                generators.len()
            )));
        }
        for g in &generators {
            fixed_points(g)?;
        }
        Ok(MarkedSchottkyGroup {
            generators,
            circles: None,
        })
    }

    /// Attaches a circle system after checking it.
    pub fn with_circles(mut self, cs: CircleSystem<T>) -> Result<Self> {
        match verify_circle_pairing(&self, &cs, T::tol(1e-9)) {
            Certificate::Pass => {
                self.circles = Some(cs);
                Ok(self)
            }
            Certificate::Fail(_) => Err(Error::NotCertified),
        }
    }

    /// Searches for a certificate and attaches it if one is found.
    pub fn certified(mut self) -> Self {
        if self.circles.is_none() {
            self.circles = attempt_classical_certificate(&self);
        }
        self
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Mat2<T>] {
        &self.generators
    }

    pub fn circles(&self) -> Option<&CircleSystem<T>> {
        self.circles.as_ref()
    }

    pub fn without_circles(&self) -> Self {
        MarkedSchottkyGroup {
            generators: self.generators.clone(),
            circles: None,
        }
    }

    /// Conjugates generators (and circles, when present) by `g`.
    pub fn conjugate_by(&self, g: &Mat2<T>) -> Result<Self> {
        let generators = self.generators.iter().map(|m| m.conjugate_by(g)).collect();
        let circles = match &self.circles {
            None => None,
            Some(cs) => {
                let mut pairs = Vec::with_capacity(cs.pairs.len());
                for (c, d) in &cs.pairs {
                    pairs.push((map_circle(g, c)?, map_circle(g, d)?));
                }
                Some(CircleSystem::new(pairs))
            }
        };
        Ok(MarkedSchottkyGroup {
            generators,
            circles,
        })
    }
}

/// Normalized coordinates: fixed points after `Fix-(a1) = 0`,
/// `Fix+(a1) = inf`, `Fix-(a2) = 1`, and the complex lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct SchottkyParameters<T: Scalar> {
    pub fixed_points: Vec<ExtendedPoint<T>>,
    pub lengths: Vec<ComplexLength<T>>,
}

impl<T: Scalar> SchottkyParameters<T> {
    pub fn rank(&self) -> usize {
        self.lengths.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.lengths.len();
        if n < 2 {
            return Err(Error::InvalidInput("rank must be at least 2".into()));
        }
        if self.fixed_points.len() != 2 * n - 3 {
            return Err(Error::InvalidInput(format!(
                "rank {n} needs {} fixed points, got {}",
                2 * n - 3,
                self.fixed_points.len()
            )));
        }
        let tol = T::tol(1e-12);
        let mut all = vec![
            ExtendedPoint::Finite(Cx::from(T::zero())),
            ExtendedPoint::Infinity,
            ExtendedPoint::Finite(Cx::one()),
        ];
        all.extend(self.fixed_points.iter().copied());
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if all[i].chordal(&all[j]) <= tol {
                    return Err(Error::DegenerateFixedPoints);
                }
            }
        }
        Ok(())
    }
}

pub fn from_parameters<T: Scalar>(p: &SchottkyParameters<T>) -> Result<MarkedSchottkyGroup<T>> {
    p.validate()?;
    let zero = ExtendedPoint::Finite(Cx::from(T::zero()));
    let one = ExtendedPoint::Finite(Cx::one());
    let mut gens = vec![
        loxodromic_from(zero, ExtendedPoint::Infinity, p.lengths[0])?,
        loxodromic_from(one, p.fixed_points[0], p.lengths[1])?,
    ];
    for i in 2..p.rank() {
        gens.push(loxodromic_from(
            p.fixed_points[2 * i - 3],
            p.fixed_points[2 * i - 2],
            p.lengths[i],
        )?);
    }
    MarkedSchottkyGroup::new(gens)
}

/// Matrix conjugating `g` into normalized position.
pub fn normalizer<T: Scalar>(g: &MarkedSchottkyGroup<T>) -> Result<Mat2<T>> {
    let f0 = fixed_points(&g.generators[0])?;
    let f1 = fixed_points(&g.generators[1])?;
    normalizing_map(f0.repelling, f0.attracting, Some(f1.repelling))
}

pub fn to_parameters<T: Scalar>(g: &MarkedSchottkyGroup<T>) -> Result<SchottkyParameters<T>> {
    let n = normalizer(g)?;
    let mut fps = Vec::with_capacity(2 * g.rank() - 3);
    fps.push(mobius_apply(&n, fixed_points(&g.generators[1])?.attracting));
    for m in &g.generators[2..] {
        let f = fixed_points(m)?;
        fps.push(mobius_apply(&n, f.repelling));
        fps.push(mobius_apply(&n, f.attracting));
    }
    let lengths = g
        .generators
        .iter()
        .map(complex_length)
        .collect::<Result<Vec<_>>>()?;
    let p = SchottkyParameters {
        fixed_points: fps,
        lengths,
    };
    p.validate()?;
    Ok(p)
}

/// Ordered product of generator lifts and inverses.
pub fn word_matrix<T: Scalar>(g: &MarkedSchottkyGroup<T>, w: &Word) -> Mat2<T> {
    let mut m = Mat2::identity();
    for l in w.letters() {
        let gen = g.generators[l.generator];
        m = m * if l.inverse { gen.inverse() } else { gen };
    }
    m
}

/// Negates generator `i` iff `signs[i]`.
pub fn change_lift<T: Scalar>(g: &MarkedSchottkyGroup<T>, signs: &[bool]) -> Result<MarkedSchottkyGroup<T>> {
    if signs.len() != g.rank() {
        return Err(Error::InvalidInput(format!(
            "lift needs {} signs, got {}",
            g.rank(),
            signs.len()
        )));
    }
    let generators = g
        .generators
        .iter()
        .zip(signs)
        .map(|(m, &s)| if s { -*m } else { *m })
        .collect();
    Ok(MarkedSchottkyGroup {
        generators,
        circles: g.circles.clone(),
    })
}

/// Rank-2 lift with `tr A = x`, `tr B = y`, `tr AB = z`, `A` diagonal.
pub fn group_from_traces<T: Scalar>(x: Cx<T>, y: Cx<T>, z: Cx<T>) -> Result<MarkedSchottkyGroup<T>> {
    let half = x * T::c(0.5);
    let one = Cx::<T>::one();
    let mut lambda = half + (half - one).sqrt() * (half + one).sqrt();
    if lambda.norm() < T::one() {
        lambda = lambda.inv();
    }
    let spread = lambda - lambda.inv();
    if spread.norm() <= T::tol(1e-12) {
        return Err(Error::NotLoxodromic {
            re: (x * x).re.f(),
            im: (x * x).im.f(),
        });
    }
    let p = (z - y / lambda) / spread;
    let s = y - p;
    let qr = p * s - one;
    let scale = T::one() + p.norm() * s.norm();
    if qr.norm() <= T::tol(1e-12) * scale {
        return Err(Error::DegenerateFixedPoints);
    }
    let (q, r) = if qr.im.abs() <= T::tol(1e-14) * qr.norm() {
        let q = qr.re.abs().sqrt();
        (Cx::from(q), Cx::from(qr.re / q))
    } else {
        let q = qr.sqrt();
        (q, q)
    };
    let a = Mat2::diag(lambda)?;
    let b = Mat2::new(p, q, r, s)?;
    MarkedSchottkyGroup::new(vec![a, b])
}

/// Fuchsian one-holed torus with trace triple `(x, y, z)`.
pub fn torus_fuchsian_marking<T: Scalar>(x: T, y: T, z: T) -> Result<MarkedSchottkyGroup<T>> {
    let two = T::c(2.0);
    let comm = x * x + y * y + z * z - x * y * z - two;
    let scale = T::one() + x.abs() * y.abs() * z.abs();
    let bad = Error::NotHyperbolicTriple {
        x: x.f(),
        y: y.f(),
        z: z.f(),
    };
    if !(x > two && y > two && z > two) {
        return Err(bad);
    }
    if (comm + two).abs() <= T::tol(1e-12) * scale {
        return Err(Error::CuspDegenerate);
    }
    if comm > -two {
        return Err(bad);
    }
    Ok(group_from_traces(Cx::from(x), Cx::from(y), Cx::from(z))?.certified())
}

/// Fuchsian pair of pants whose classes `[a], [b], [ab]` have lengths `l0, l1, l2`.
pub fn pants_fuchsian_marking<T: Scalar>(l0: T, l1: T, l2: T) -> Result<MarkedSchottkyGroup<T>> {
    for l in [l0, l1, l2] {
        if !(l > T::zero()) || !l.is_finite() {
            return Err(Error::InvalidInput(format!(
                "boundary lengths must be positive, got {}",
                l.f()
            )));
        }
    }
    let two = T::c(2.0);
    let half = T::c(0.5);
    let x = two * (l0 * half).cosh();
    let y = two * (l1 * half).cosh();
    let z = -two * (l2 * half).cosh();
    Ok(group_from_traces(Cx::from(x), Cx::from(y), Cx::from(z))?.certified())
}

pub fn is_fuchsian<T: Scalar>(g: &MarkedSchottkyGroup<T>) -> Result<bool> {
    let p = to_parameters(g)?;
    let tol = T::tol(1e-9);
    Ok(p.fixed_points.iter().all(|z| z.is_real(tol))
        && p.lengths.iter().all(|l| l.value().im.abs() <= tol))
}

fn in_disk<T: Scalar>(c: &Circle<T>, outer: bool, z: ExtendedPoint<T>) -> bool {
    match z {
        ExtendedPoint::Infinity => outer,
        ExtendedPoint::Finite(w) => c.contains(w) != outer,
    }
}

/// A point outside every disk, found by probing just off each circle.
fn domain_point<T: Scalar>(circles: &[Circle<T>], outer: Option<usize>) -> Option<ExtendedPoint<T>> {
    let inside_none = |z: ExtendedPoint<T>| {
        circles
            .iter()
            .enumerate()
            .all(|(i, c)| !in_disk(c, Some(i) == outer, z))
    };
    if outer.is_none() {
        return Some(ExtendedPoint::Infinity);
    }
    let factors = [1.001, 1.01, 1.1, 1.5, 0.999, 0.99, 0.9];
    for c in circles {
        for k in 0..16 {
            let theta = T::two_pi() * T::c(k as f64 / 16.0);
            for f in factors {
                let z = ExtendedPoint::Finite(
                    c.center + Cx::from_polar(c.radius * T::c(f), theta),
                );
                if inside_none(z) {
                    return Some(z);
                }
            }
        }
    }
    None
}

/// Checks that `cs` witnesses `g` as a classical Schottky group.
pub fn verify_circle_pairing<T: Scalar>(
    g: &MarkedSchottkyGroup<T>,
    cs: &CircleSystem<T>,
    tol: T,
) -> Certificate {
    use Certificate::Fail;
    if cs.pairs.len() != g.rank() {
        return Fail(Violation::PairCount {
            expected: g.rank(),
            found: cs.pairs.len(),
        });
    }
    let circles = cs.circles();
    let margin = T::one() + T::tol(DISJOINT_MARGIN);
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let d = inversive_distance(&circles[i], &circles[j]);
            if !(d.abs() > margin) {
                return Fail(Violation::Disjointness {
                    first: i,
                    second: j,
                    delta: d.f(),
                });
            }
        }
    }
    let outer = cs.outer();
    if let Some(k) = outer {
        let all_enclosed = (0..circles.len()).all(|j| {
            j == k || inversive_distance(&circles[k], &circles[j]) < -T::one()
        });
        let others_flat = (0..circles.len()).all(|i| {
            (i + 1..circles.len()).all(|j| {
                i == k || j == k || inversive_distance(&circles[i], &circles[j]) > T::one()
            })
        });
        if !all_enclosed || !others_flat {
            return Fail(Violation::Nesting);
        }
    } else if (0..circles.len()).any(|i| {
        (i + 1..circles.len()).any(|j| inversive_distance(&circles[i], &circles[j]) < -T::one())
    }) {
        return Fail(Violation::Nesting);
    }
    for (i, (c, d)) in cs.pairs.iter().enumerate() {
        let (center_error, radius_error) = match map_circle(&g.generators[i], c) {
            Ok(img) => (
                (img.center - d.center).norm() / d.radius.max(T::one()).max(d.center.norm()),
                (img.radius - d.radius).abs() / d.radius.max(T::one()),
            ),
            Err(_) => (T::infinity(), T::infinity()),
        };
        if !(center_error <= tol && radius_error <= tol) {
            return Fail(Violation::Mapping {
                pair: i,
                center_error: center_error.f(),
                radius_error: radius_error.f(),
            });
        }
    }
    let Some(z) = domain_point(&circles, outer) else {
        return Fail(Violation::EmptyDomain);
    };
    for (i, m) in g.generators.iter().enumerate() {
        let into_image = in_disk(&circles[2 * i + 1], outer == Some(2 * i + 1), mobius_apply(m, z));
        let into_source = in_disk(&circles[2 * i], outer == Some(2 * i), mobius_apply(&m.inverse(), z));
        if !into_image || !into_source {
            return Fail(Violation::Orientation { pair: i });
        }
    }
    Certificate::Pass
}

/// Minimum hyperbolic distance between the planes over any two circles.
pub fn kappa<T: Scalar>(cs: &CircleSystem<T>) -> Result<T> {
    let circles = cs.circles();
    let mut best = T::infinity();
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            best = best.min(plane_distance(&circles[i], &circles[j])?);
        }
    }
    Ok(best)
}

/// `b^-1 a^-1 b a`.
pub fn commutator_word() -> Word {
    Word::parse("BAba").expect("fixed word")
}

/// Real-line reflection check used for fuchsian certificates.
pub fn orthogonal_to_real_line<T: Scalar>(c: &Circle<T>, tol: T) -> bool {
    c.center.im.abs() <= tol * (T::one() + c.radius)
}
