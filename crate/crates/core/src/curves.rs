//! Rank-2 simple closed curves: Farey slopes, Christoffel words, the
//! Markoff trace recursion and Weierstrass parity classes.
//!
//! Conventions: slope `0/1` is `a`, `1/0` is `b`, `1/1` is `ab`. Slopes
//! with negative numerator use `b^-1` in place of `b`.

use std::fmt;

use crate::error::{Error, Result};
use crate::schottky::{word_matrix, Letter, MarkedSchottkyGroup, Word};
use crate::scalar::{Cx, Scalar};
use crate::moebius::Mat2;

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeierstrassClass {
    OddOdd,
    OddEven,
    EvenOdd,
}

impl WeierstrassClass {
    pub const ALL: [WeierstrassClass; 3] = [
        WeierstrassClass::OddOdd,
        WeierstrassClass::OddEven,
        WeierstrassClass::EvenOdd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeierstrassClass::OddOdd => "oddodd",
            WeierstrassClass::OddEven => "oddeven",
            WeierstrassClass::EvenOdd => "evenodd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        WeierstrassClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for WeierstrassClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coprime pair `p/q` with `q >= 0`; infinity is `1/0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    /// Normalizes the sign so that `q >= 0` and rejects non-coprime pairs.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        let (p, q) = if q < 0 || (q == 0 && p < 0) { (-p, -q) } else { (p, q) };
        if gcd(p, q) != 1 {
            return Err(Error::InvalidInput(format!("{p}/{q} is not a reduced slope")));
        }
        Ok(Slope { p, q })
    }

    pub fn infinity() -> Self {
        Slope { p: 1, q: 0 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `|p| + q`, the word length of the representative.
    pub fn size(&self) -> i64 {
        self.p.abs() + self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    pub fn class(&self) -> WeierstrassClass {
        weierstrass_class(*self)
    }

    /// Sort key: by `|p| + q`, then by `p`.
    pub fn order_key(&self) -> (i64, i64) {
        (self.size(), self.p)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl std::str::FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad slope {s:?}"));
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        Slope::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)
    }
}

/// Non-negative slopes `p/q` with `p + q <= max_sum`, plus infinity, each once,
/// found by Stern-Brocot descent and ordered by `(p + q, p)`.
pub fn slopes_up_to(max_sum: i64) -> Vec<Slope> {
    let mut out = Vec::new();
    if max_sum < 1 {
        return out;
    }
    out.push(Slope { p: 0, q: 1 });
    out.push(Slope::infinity());
    // stack of (left, right) parents whose mediant is still unvisited
    let mut stack = vec![((0i64, 1i64), (1i64, 0i64))];
    while let Some(((lp, lq), (rp, rq))) = stack.pop() {
        let (mp, mq) = (lp + rp, lq + rq);
        if mp + mq > max_sum {
            continue;
        }
        out.push(Slope { p: mp, q: mq });
        stack.push(((lp, lq), (mp, mq)));
        stack.push(((mp, mq), (rp, rq)));
    }
    out.sort_by_key(|s| s.order_key());
    out
}

/// All slopes with `|p| + q <= max_sum`, including negative ones; `0/1`
/// and `1/0` appear once. These index every simple closed curve class of
/// the one-holed torus up to orientation.
pub fn signed_slopes_up_to(max_sum: i64) -> Vec<Slope> {
    let mut out = slopes_up_to(max_sum);
    let negatives: Vec<Slope> = out
        .iter()
        .filter(|s| s.p > 0 && s.q > 0)
        .map(|s| Slope { p: -s.p, q: s.q })
        .collect();
    out.extend(negatives);
    out.sort_by_key(|s| s.order_key());
    out
}

/// Christoffel lower word: `q` letters `a`, `|p|` letters `b` (or `b^-1`).
pub fn christoffel_word(s: Slope) -> Word {
    let p = s.p.abs();
    let n = p + s.q;
    let b = Letter::new(1, s.p < 0);
    let a = Letter::new(0, false);
    let letters = (0..n)
        .map(|i| if ((i + 1) * p) / n == (i * p) / n { a } else { b })
        .collect();
    Word::new(letters).expect("positive words are reduced")
}

pub fn weierstrass_class(s: Slope) -> WeierstrassClass {
    match (s.p.abs() % 2, s.q % 2) {
        (1, 1) => WeierstrassClass::OddOdd,
        (1, 0) => WeierstrassClass::OddEven,
        _ => WeierstrassClass::EvenOdd,
    }
}

/// Traces `(tr a, tr b, tr ab)` of a chosen lift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceTriple<T: Scalar> {
    pub x: Cx<T>,
    pub y: Cx<T>,
    pub z: Cx<T>,
}

impl<T: Scalar> TraceTriple<T> {
    pub fn new(x: Cx<T>, y: Cx<T>, z: Cx<T>) -> Self {
        TraceTriple { x, y, z }
    }

    pub fn real(x: f64, y: f64, z: f64) -> Self {
        TraceTriple::new(Cx::from(T::c(x)), Cx::from(T::c(y)), Cx::from(T::c(z)))
    }

    pub fn of_group(g: &MarkedSchottkyGroup<T>) -> Result<Self> {
        if g.rank() != 2 {
            return Err(Error::InvalidInput(format!("rank 2 required, got {}", g.rank())));
        }
        let [a, b] = [g.generators()[0], g.generators()[1]];
        Ok(TraceTriple::new(a.trace(), b.trace(), (a * b).trace()))
    }

    /// The triple seen by negative slopes, where `b` is replaced by `b^-1`.
    fn mirrored(&self) -> Self {
        TraceTriple::new(self.x, self.y, self.x * self.y - self.z)
    }
}

/// `x^2 + y^2 + z^2 - xyz - 2`, the trace of `b^-1 a^-1 b a`.
pub fn commutator_trace<T: Scalar>(t: &TraceTriple<T>) -> Cx<T> {
    t.x * t.x + t.y * t.y + t.z * t.z - t.x * t.y * t.z - Cx::from(T::c(2.0))
}

/// Trace of the Christoffel word of `s`, by descent through the Stern-Brocot
/// tree carrying (left, right, mediant) traces.
pub fn trace_of_slope<T: Scalar>(t: &TraceTriple<T>, s: Slope) -> Cx<T> {
    let t = if s.p < 0 { t.mirrored() } else { *t };
    let (p, q) = (s.p.abs(), s.q);
    if (p, q) == (0, 1) {
        return t.x;
    }
    if (p, q) == (1, 0) {
        return t.y;
    }
    let (mut l, mut r) = ((0i64, 1i64), (1i64, 0i64));
    let (mut tl, mut tr, mut tm) = (t.x, t.y, t.z);
    loop {
        let m = (l.0 + r.0, l.1 + r.1);
        if m == (p, q) {
            return tm;
        }
        if p * m.1 < m.0 * q {
            let next = tl * tm - tr;
            r = m;
            tr = tm;
            tm = next;
        } else {
            let next = tm * tr - tl;
            l = m;
            tl = tm;
            tm = next;
        }
    }
}

/// Traces of every signed slope with `|p| + q <= max_sum`, in
/// [`signed_slopes_up_to`] order, from one sweep of the tree.
pub fn slope_traces<T: Scalar>(t: &TraceTriple<T>, max_sum: i64) -> Vec<(Slope, Cx<T>)> {
    let mut out = Vec::new();
    if max_sum < 1 {
        return out;
    }
    out.push((Slope { p: 0, q: 1 }, t.x));
    out.push((Slope::infinity(), t.y));
    for (sign, triple) in [(1i64, *t), (-1i64, t.mirrored())] {
        let mut stack = vec![((0i64, 1i64), (1i64, 0i64), triple.x, triple.y, triple.z)];
        while let Some((l, r, tl, tr, tm)) = stack.pop() {
            let m = (l.0 + r.0, l.1 + r.1);
            if m.0 + m.1 > max_sum {
                continue;
            }
            out.push((Slope { p: sign * m.0, q: m.1 }, tm));
            stack.push((l, m, tl, tm, tl * tm - tr));
            stack.push((m, r, tm, tr, tm * tr - tl));
        }
    }
    out.sort_by_key(|(s, _)| s.order_key());
    out
}

/// Half turns with `a = -H3 H2` and `b = -H1 H3`.
pub fn weierstrass_involutions<T: Scalar>(
    g: &MarkedSchottkyGroup<T>,
) -> Result<(Mat2<T>, Mat2<T>, Mat2<T>)> {
    if g.rank() != 2 {
        return Err(Error::InvalidInput(format!("rank 2 required, got {}", g.rank())));
    }
    let [a, b] = [g.generators()[0], g.generators()[1]];
    // tr(H A) = alpha (A11 - A22) + beta A21 + gamma A12 for H = [[alpha, beta], [gamma, -alpha]]
    let u = [a.a - a.d, a.c, a.b];
    let v = [b.a - b.d, b.c, b.b];
    let w = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let norm = |x: &[Cx<T>; 3]| x.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, v| s + v).sqrt();
    if norm(&w) <= T::tol(1e-12) * norm(&u) * norm(&v) {
        return Err(Error::DegenerateFactorization);
    }
    let (alpha, beta, gamma) = (w[0], w[1], w[2]);
    let det = -alpha * alpha - beta * gamma;
    if det.norm() <= T::tol(1e-12) * norm(&w) * norm(&w) {
        return Err(Error::DegenerateFactorization);
    }
    let s = det.sqrt().inv();
    let mut h3 = Mat2::raw(alpha * s, beta * s, gamma * s, -alpha * s);
    let zero = T::zero();
    if h3.b.re < zero || (h3.b.re == zero && h3.b.im < zero) {
        h3 = -h3;
    }
    let h2 = h3 * a;
    let h1 = b * h3;
    Ok((h1, h2, h3))
}

/// Matrix of the Christoffel word of `s`.
pub fn slope_matrix<T: Scalar>(g: &MarkedSchottkyGroup<T>, s: Slope) -> Mat2<T> {
    word_matrix(g, &christoffel_word(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::{group_from_traces, torus_fuchsian_marking};
    use crate::scalar::{c64, cr};
    use proptest::prelude::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn slope_enumeration_examples() {
        let three: Vec<String> = slopes_up_to(2).iter().map(|s| s.to_string()).collect();
        assert_eq!(three, ["0/1", "1/0", "1/1"]);
        let five: Vec<String> = slopes_up_to(3).iter().map(|s| s.to_string()).collect();
        assert_eq!(five, ["0/1", "1/0", "1/1", "1/2", "2/1"]);
        // brute-force coprime scan
        let n = 10;
        let mut brute = 0;
        for p in 0..=n {
            for q in 0..=n {
                if p + q <= n && gcd(p, q) == 1 {
                    brute += 1;
                }
            }
        }
        assert_eq!(slopes_up_to(n).len(), brute);
        assert_eq!(brute, 33);
        assert!(slopes_up_to(40).iter().all(|s| gcd(s.p(), s.q()) == 1));
    }

    #[test]
    fn signed_enumeration() {
        let all = signed_slopes_up_to(10);
        assert_eq!(all.len(), 2 * 33 - 2);
        let mut seen = std::collections::HashSet::new();
        assert!(all.iter().all(|s| seen.insert(*s)));
    }

    #[test]
    fn slope_parsing_normalizes_sign() {
        assert_eq!("-1/-2".parse::<Slope>().unwrap(), s(1, 2));
        assert_eq!("1/-2".parse::<Slope>().unwrap(), s(-1, 2));
        assert!("2/4".parse::<Slope>().is_err());
        assert!(Slope::new(0, 0).is_err());
        assert_eq!(Slope::new(-1, 0).unwrap(), Slope::infinity());
    }

    #[test]
    fn christoffel_examples() {
        let w = |p, q| christoffel_word(s(p, q)).to_string();
        assert_eq!(w(0, 1), "a");
        assert_eq!(w(1, 0), "b");
        assert_eq!(w(1, 1), "ab");
        assert_eq!(w(1, 2), "aab");
        assert_eq!(w(2, 3), "aabab");
        assert_eq!(w(-1, 1), "aB");
        assert_eq!(w(-2, 3), "aaBaB");
    }

    #[test]
    fn trace_examples() {
        let t = TraceTriple::<f64>::real(3.0, 3.0, 4.0);
        assert_eq!(trace_of_slope(&t, s(0, 1)), cr(3.0));
        assert_eq!(trace_of_slope(&t, s(1, 0)), cr(3.0));
        assert_eq!(trace_of_slope(&t, s(1, 1)), cr(4.0));
        assert_eq!(trace_of_slope(&t, s(1, 2)), cr(9.0));
        assert_eq!(trace_of_slope(&t, s(2, 1)), cr(9.0));
        assert_eq!(trace_of_slope(&t, s(-1, 1)), cr(5.0));

        let g = torus_fuchsian_marking(3.0f64, 3.0, 4.0).unwrap();
        for (sl, tr) in [(s(1, 2), 9.0), (s(2, 1), 9.0)] {
            assert!((slope_matrix(&g, sl).trace() - cr(tr)).norm() < 1e-12);
        }
    }

    #[test]
    fn class_examples() {
        assert_eq!(weierstrass_class(s(1, 1)), WeierstrassClass::OddOdd);
        assert_eq!(weierstrass_class(s(1, 2)), WeierstrassClass::OddEven);
        assert_eq!(weierstrass_class(s(2, 1)), WeierstrassClass::EvenOdd);
        assert_eq!(weierstrass_class(Slope::infinity()), WeierstrassClass::OddEven);
        assert_eq!(weierstrass_class(s(0, 1)), WeierstrassClass::EvenOdd);
        assert_eq!(weierstrass_class(s(-1, 2)), WeierstrassClass::OddEven);
    }

    #[test]
    fn classes_partition() {
        for n in [1, 2, 5, 17, 100] {
            let all = slopes_up_to(n);
            let total: usize = WeierstrassClass::ALL
                .iter()
                .map(|c| all.iter().filter(|s| s.class() == *c).count())
                .sum();
            assert_eq!(total, all.len());
            assert!(all.iter().all(|s| !(s.p() % 2 == 0 && s.q() % 2 == 0)));
        }
    }

    #[test]
    fn commutator_trace_examples() {
        assert_eq!(commutator_trace(&TraceTriple::<f64>::real(3.0, 3.0, 4.0)), cr(-4.0));
        assert_eq!(commutator_trace(&TraceTriple::<f64>::real(3.0, 3.0, 3.0)), cr(-2.0));
        let c = 2.0 * 1f64.cosh();
        let v = commutator_trace(&TraceTriple::<f64>::real(c, c, -c));
        assert!((v.re - 55.966_981_946_948_783).abs() < 1e-12);
    }

    #[test]
    fn commutator_trace_sign_flips() {
        let t = TraceTriple::new(c64::<f64>(2.1, 0.3), c64(-1.7, 0.8), c64(3.3, -0.2));
        let k = commutator_trace(&t);
        for (sx, sy, sz) in [(1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
            let u = TraceTriple::new(t.x * sx, t.y * sy, t.z * sz);
            assert!((commutator_trace(&u) - k).norm() < 1e-12);
        }
    }

    #[test]
    fn involution_examples() {
        let g = torus_fuchsian_marking(3.0f64, 3.0, 4.0).unwrap();
        let (h1, h2, h3) = weierstrass_involutions(&g).unwrap();
        let [a, b] = [g.generators()[0], g.generators()[1]];
        let minus_id = -Mat2::<f64>::identity();
        for h in [h1, h2, h3] {
            assert!(h.trace().norm() < 1e-10);
            assert!((h * h).distance(&minus_id) < 1e-10);
        }
        assert!((-(h3 * h2)).distance(&a) < 1e-10);
        assert!((-(h1 * h3)).distance(&b) < 1e-10);
        assert!(h3.b.re >= 0.0);

        // the other sign of H3 flips H1 and H2 and keeps both products
        let (f1, f2, f3) = (-h1, -h2, -h3);
        assert!((-(f3 * f2)).distance(&a) < 1e-10);
        assert!((-(f1 * f3)).distance(&b) < 1e-10);
    }

    #[test]
    fn commuting_generators_are_degenerate() {
        let a = Mat2::<f64>::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        let b = Mat2::<f64>::from_real(3.0, 0.0, 0.0, 1.0 / 3.0).unwrap();
        let g = MarkedSchottkyGroup::new(vec![a, b]).unwrap();
        assert_eq!(weierstrass_involutions(&g), Err(Error::DegenerateFactorization));
    }

    #[test]
    fn sweep_matches_descent() {
        let t = TraceTriple::new(c64::<f64>(2.5, 0.4), c64(3.1, -0.2), c64(1.9, 0.7));
        for (sl, tr) in slope_traces(&t, 15) {
            assert_eq!(tr, trace_of_slope(&t, sl), "{sl}");
        }
        let order: Vec<Slope> = slope_traces(&t, 15).into_iter().map(|(s, _)| s).collect();
        assert_eq!(order, signed_slopes_up_to(15));
    }

    #[cfg(feature = "quad")]
    #[test]
    fn farey_neighbours_generate() {
        // the commutator of neighbouring Christoffel words is conjugate to [a, b]^{+-1};
        // products of long words need the wider type to resolve the trace
        use f128::f128;
        let g = torus_fuchsian_marking(f128::c(3.0), f128::c(3.0), f128::c(4.0)).unwrap();
        let k = commutator_trace(&TraceTriple::of_group(&g).unwrap());
        for sl in slopes_up_to(8).into_iter().filter(|s| s.p() > 0 && s.q() > 0) {
            let (mut l, mut r) = ((0i64, 1i64), (1i64, 0i64));
            loop {
                let m = (l.0 + r.0, l.1 + r.1);
                if m == (sl.p(), sl.q()) {
                    break;
                }
                if sl.p() * m.1 < m.0 * sl.q() { r = m } else { l = m }
            }
            let u = slope_matrix(&g, s(l.0, l.1));
            let v = slope_matrix(&g, sl);
            let c = v.inverse() * u.inverse() * v * u;
            assert!((c.trace() - k).norm().f() < 1e-20, "{sl}");
        }
    }

    proptest! {
        #[test]
        fn recursion_matches_matrices(
            xr in -4.0..4.0f64, xi in -2.0..2.0f64,
            yr in -4.0..4.0f64, yi in -2.0..2.0f64,
            zr in -4.0..4.0f64, zi in -2.0..2.0f64,
        ) {
            let (x, y, z) = (c64::<f64>(xr, xi), c64(yr, yi), c64(zr, zi));
            prop_assume!(crate::moebius::loxodromy_margin(x) > 0.1);
            let Ok(g) = group_from_traces(x, y, z) else { return Ok(()) };
            let t = TraceTriple::of_group(&g).unwrap();
            #[cfg(feature = "quad")]
            let oracle = {
                use crate::scalar::convert;
                let gq = group_from_traces::<f128::f128>(convert(x), convert(y), convert(z)).unwrap();
                move |sl| -> Cx<f64> { convert(slope_matrix(&gq, sl).trace()) }
            };
            #[cfg(not(feature = "quad"))]
            let oracle = |sl| -> Cx<f64> { slope_matrix(&g, sl).trace() };
            for (sl, tr) in slope_traces(&t, 12) {
                let m = oracle(sl);
                let tol = if cfg!(feature = "quad") { 1e-9 } else { 1e-6 };
                prop_assert!((tr - m).norm() <= tol * m.norm().max(1.0), "{} {:?} {:?}", sl, tr, m);
            }
        }
    }
}
