//! Deformation paths in normalized parameter space and analytic
//! continuation of half lengths along them.
//!
//! Groups along a path use the lift `diag(e^{l/2}, e^{-l/2})` of each
//! generator with `l` interpolated linearly, so the lift varies
//! continuously with the parameter.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::identities::par_map;
use crate::moebius::{acosh_positive, loxodromy_margin, ComplexLength, ExtendedPoint, HalfLength, LOXODROMY_TOL};
use crate::scalar::{i_times, Cx, Scalar};
use crate::schottky::{
    attempt_classical_certificate, from_parameters, to_parameters, word_matrix, MarkedSchottkyGroup,
    SchottkyParameters, Word,
};

/// Bisection depth at which a branch jump is declared unresolvable.
const MAX_REFINE_DEPTH: u32 = 40;

/// Piecewise-linear path through normalized parameters; the legs share
/// `[0, 1]` equally.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationPath<T: Scalar> {
    waypoints: Vec<SchottkyParameters<T>>,
}

fn params_close<T: Scalar>(a: &SchottkyParameters<T>, b: &SchottkyParameters<T>, tol: T) -> bool {
    a.rank() == b.rank()
        && a.fixed_points.iter().zip(&b.fixed_points).all(|(x, y)| x.chordal(y) <= tol)
        && a.lengths.iter().zip(&b.lengths).all(|(x, y)| (x.value() - y.value()).norm() <= tol)
}

impl<T: Scalar> DeformationPath<T> {
    pub fn new(waypoints: Vec<SchottkyParameters<T>>) -> Result<Self> {
        let Some(first) = waypoints.first() else {
            return Err(Error::InvalidInput("a path needs at least one waypoint".into()));
        };
        let rank = first.rank();
        for (i, w) in waypoints.iter().enumerate() {
            w.validate()?;
            if w.rank() != rank {
                return Err(Error::InvalidInput(format!("waypoint {i} has rank {}, expected {rank}", w.rank())));
            }
        }
        for (i, pair) in waypoints.windows(2).enumerate() {
            if params_close(&pair[0], &pair[1], T::zero()) {
                return Err(Error::InvalidInput(format!("waypoints {i} and {} coincide", i + 1)));
            }
            let finite = |p: &SchottkyParameters<T>| p.fixed_points.iter().all(|z| !z.is_infinite());
            if !finite(&pair[0]) || !finite(&pair[1]) {
                return Err(Error::InvalidInput("cannot interpolate through a fixed point at infinity".into()));
            }
        }
        Ok(DeformationPath { waypoints })
    }

    pub fn constant(p: SchottkyParameters<T>) -> Result<Self> {
        DeformationPath::new(vec![p])
    }

    pub fn waypoints(&self) -> &[SchottkyParameters<T>] {
        &self.waypoints
    }

    pub fn rank(&self) -> usize {
        self.waypoints[0].rank()
    }

    pub fn reversed(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        DeformationPath { waypoints }
    }

    /// Parameters at `t` in `[0, 1]`.
    pub fn at(&self, t: T) -> Result<SchottkyParameters<T>> {
        let legs = self.waypoints.len() - 1;
        if legs == 0 {
            return Ok(self.waypoints[0].clone());
        }
        let t = t.max(T::zero()).min(T::one());
        let x = t * T::c(legs as f64);
        let leg = x.floor().to_usize().unwrap_or(0).min(legs - 1);
        let s = x - T::c(leg as f64);
        let (a, b) = (&self.waypoints[leg], &self.waypoints[leg + 1]);
        let lerp = |u: Cx<T>, v: Cx<T>| u + (v - u) * s;
        let fixed_points = a
            .fixed_points
            .iter()
            .zip(&b.fixed_points)
            .map(|(u, v)| match (u.as_finite(), v.as_finite()) {
                (Some(u), Some(v)) => ExtendedPoint::Finite(lerp(u, v)),
                _ => *u,
            })
            .collect();
        let lengths = a
            .lengths
            .iter()
            .zip(&b.lengths)
            .map(|(u, v)| ComplexLength::new(lerp(u.value(), v.value())))
            .collect::<Result<Vec<_>>>()?;
        Ok(SchottkyParameters { fixed_points, lengths })
    }

    /// Group at `t`; a degenerate sample is reported as leaving loxodromy.
    pub fn group_at(&self, t: T) -> Result<MarkedSchottkyGroup<T>> {
        let p = self.at(t)?;
        from_parameters(&p).map_err(|e| match e {
            Error::NotLoxodromic { .. } | Error::DegenerateFixedPoints | Error::InvalidInput(_) => {
                Error::PathExitsLoxodromy {
                    t: t.f(),
                    word: "generator".into(),
                }
            }
            e => e,
        })
    }
}

/// Continued half lengths, keyed by word.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BranchState<T: Scalar> {
    values: BTreeMap<Word, HalfLength<T>>,
}

impl<T: Scalar> BranchState<T> {
    pub fn new() -> Self {
        BranchState { values: BTreeMap::new() }
    }

    pub fn get(&self, w: &Word) -> Option<&HalfLength<T>> {
        self.values.get(w)
    }

    pub fn insert(&mut self, w: Word, h: HalfLength<T>) {
        self.values.insert(w, h);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &HalfLength<T>)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Result of continuing one word along a path.
#[derive(Clone, Debug, PartialEq)]
pub struct Continued<T: Scalar> {
    /// Canonical value at the endpoint plus the `2 pi i` winding.
    pub half: HalfLength<T>,
    pub min_re: T,
    /// Parameter values and continued values at every accepted sample.
    pub trace: Vec<(T, Cx<T>)>,
}

impl<T: Scalar> Continued<T> {
    pub fn value(&self) -> Cx<T> {
        self.half.unreduced()
    }
}

fn word_trace<T: Scalar>(g: &MarkedSchottkyGroup<T>, w: &Word, t: T) -> Result<Cx<T>> {
    let tr = word_matrix(g, w).trace();
    if loxodromy_margin(tr) <= T::tol(LOXODROMY_TOL) {
        return Err(Error::PathExitsLoxodromy {
            t: t.f(),
            word: w.to_string(),
        });
    }
    Ok(tr)
}

/// The branch value `+-v + 2 pi i k` nearest `prev`.
fn nearest_branch<T: Scalar>(v: Cx<T>, prev: Cx<T>) -> Cx<T> {
    let two_pi = T::two_pi();
    let mut best = v;
    let mut dist = T::infinity();
    for s in [v, -v] {
        let k = ((prev.im - s.im) / two_pi).round();
        let c = s + i_times(two_pi * k);
        let d = (c - prev).norm();
        if d < dist {
            dist = d;
            best = c;
        }
    }
    best
}

struct Tracker<'a, T: Scalar> {
    path: &'a DeformationPath<T>,
    word: &'a Word,
    out: Vec<(T, Cx<T>)>,
}

impl<T: Scalar> Tracker<'_, T> {
    fn value_at(&self, g: Option<&MarkedSchottkyGroup<T>>, t: T) -> Result<Cx<T>> {
        let tr = match g {
            Some(g) => word_trace(g, self.word, t)?,
            None => word_trace(&self.path.group_at(t)?, self.word, t)?,
        };
        Ok(acosh_positive(-tr * T::c(0.5)))
    }

    /// Moves from `(t0, prev)` to `t1`, bisecting while jumps exceed `pi/2`.
    fn step(&mut self, t0: T, prev: Cx<T>, t1: T, g1: Option<&MarkedSchottkyGroup<T>>, depth: u32) -> Result<Cx<T>> {
        let next = nearest_branch(self.value_at(g1, t1)?, prev);
        if (next - prev).norm() <= T::pi() * T::c(0.5) {
            self.out.push((t1, next));
            return Ok(next);
        }
        if depth >= MAX_REFINE_DEPTH {
            return Err(Error::BranchTracking { t: t1.f() });
        }
        let mid = (t0 + t1) * T::c(0.5);
        let vm = self.step(t0, prev, mid, None, depth + 1)?;
        self.step(mid, vm, t1, g1, depth + 1)
    }
}

fn sample_groups<T: Scalar>(path: &DeformationPath<T>, steps: usize) -> Result<Vec<(T, MarkedSchottkyGroup<T>)>> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|k| {
            let t = T::c(k as f64 / steps as f64);
            Ok((t, path.group_at(t)?))
        })
        .collect()
}

fn continue_on<T: Scalar>(
    path: &DeformationPath<T>,
    groups: &[(T, MarkedSchottkyGroup<T>)],
    w: &Word,
    start: Option<Cx<T>>,
) -> Result<Continued<T>> {
    let mut tr = Tracker {
        path,
        word: w,
        out: Vec::with_capacity(groups.len()),
    };
    let (t0, g0) = &groups[0];
    let v0 = tr.value_at(Some(g0), *t0)?;
    let mut prev = match start {
        Some(s) => nearest_branch(v0, s),
        None => v0,
    };
    tr.out.push((*t0, prev));
    let mut t_prev = *t0;
    for (t, g) in &groups[1..] {
        prev = tr.step(t_prev, prev, *t, Some(g), 0)?;
        t_prev = *t;
    }
    let min_re = tr.out.iter().map(|(_, v)| v.re).fold(T::infinity(), T::min);
    let canonical = acosh_positive(-word_trace(&groups[groups.len() - 1].1, w, t_prev)? * T::c(0.5));
    let winding = ((prev.im - canonical.im) / T::two_pi()).round().to_i64().unwrap_or(0);
    Ok(Continued {
        half: HalfLength {
            value: canonical,
            branch_offset: winding,
        },
        min_re,
        trace: tr.out,
    })
}

/// Continues the half length of `w` from the canonical value at `t = 0`.
pub fn continue_half_length<T: Scalar>(path: &DeformationPath<T>, w: &Word, steps: usize) -> Result<Continued<T>> {
    continue_from(path, w, steps, None)
}

/// As [`continue_half_length`], starting from the branch nearest `start`.
pub fn continue_from<T: Scalar>(
    path: &DeformationPath<T>,
    w: &Word,
    steps: usize,
    start: Option<Cx<T>>,
) -> Result<Continued<T>> {
    let groups = sample_groups(path, steps)?;
    continue_on(path, &groups, w, start)
}

/// Continues every word, storing the results in a [`BranchState`].
pub fn continue_words<T: Scalar>(
    path: &DeformationPath<T>,
    words: &[Word],
    steps: usize,
    threads: usize,
) -> Result<(BranchState<T>, Vec<Continued<T>>)> {
    let groups = sample_groups(path, steps)?;
    let results = par_map(words, threads, |w| continue_on(path, &groups, w, None));
    let mut state = BranchState::new();
    let mut out = Vec::with_capacity(words.len());
    for (w, r) in words.iter().zip(results) {
        let c = r?;
        state.insert(w.clone(), c.half);
        out.push(c);
    }
    Ok((state, out))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport<T: Scalar> {
    pub min_re: T,
    pub argmin_word: Word,
    pub words: usize,
    pub samples: usize,
    pub state: BranchState<T>,
}

/// Checks `re > 0` for every continued half length at every sample.
pub fn verify_positivity<T: Scalar>(
    path: &DeformationPath<T>,
    words: &[Word],
    steps: usize,
    threads: usize,
) -> Result<PositivityReport<T>> {
    if words.is_empty() {
        return Err(Error::InvalidInput("no words to track".into()));
    }
    let (state, runs) = continue_words(path, words, steps, threads)?;
    let mut min_re = T::infinity();
    let mut argmin = 0;
    for (i, c) in runs.iter().enumerate() {
        if c.min_re < min_re {
            min_re = c.min_re;
            argmin = i;
        }
    }
    if !(min_re > T::zero()) {
        let (t, _) = runs[argmin]
            .trace
            .iter()
            .find(|(_, v)| !(v.re > T::zero()))
            .copied()
            .unwrap_or((T::zero(), Cx::zero()));
        return Err(Error::PathExitsLoxodromy {
            t: t.f(),
            word: words[argmin].to_string(),
        });
    }
    Ok(PositivityReport {
        min_re,
        argmin_word: words[argmin].clone(),
        words: words.len(),
        samples: steps.max(1) + 1,
        state,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStrategy {
    Direct,
    Maskit,
}

impl PathStrategy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(PathStrategy::Direct),
            "maskit" => Some(PathStrategy::Maskit),
            _ => None,
        }
    }
}

/// Length every generator is inflated to on the middle leg of a maskit path.
pub const MASKIT_LENGTH: f64 = 8.0;

/// Distance from `z` to the segment `[a, b]`.
fn segment_distance<T: Scalar>(z: Cx<T>, a: Cx<T>, b: Cx<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (z - a).norm();
    }
    let s = ((z - a) * d.conj()).re / len2;
    let s = s.max(T::zero()).min(T::one());
    (a + d * s - z).norm()
}

/// Inserts detours so straight moves of the fixed points keep clear of
/// the normalization points and of each other.
fn detour_fixed_points<T: Scalar>(from: &[ExtendedPoint<T>], to: &[ExtendedPoint<T>]) -> Vec<Vec<ExtendedPoint<T>>> {
    let clearance = T::c(0.05);
    let finite = |v: &[ExtendedPoint<T>]| v.iter().map(|z| z.as_finite()).collect::<Option<Vec<Cx<T>>>>();
    let (Some(a), Some(b)) = (finite(from), finite(to)) else {
        return Vec::new();
    };
    let mut mid = Vec::with_capacity(a.len());
    let mut needed = false;
    for (i, (&u, &v)) in a.iter().zip(&b).enumerate() {
        let mut obstacles = vec![Cx::zero(), Cx::from(T::one())];
        obstacles.extend(a.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, z)| *z));
        obstacles.extend(b.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, z)| *z));
        let blocked = obstacles.iter().any(|&o| segment_distance(o, u, v) < clearance);
        let m = (u + v) * T::c(0.5);
        if blocked {
            needed = true;
            // leave the line through u and v perpendicularly
            let d = v - u;
            let n = if d.norm() > T::zero() { i_times(T::one()) * d / d.norm() } else { i_times(T::one()) };
            let lift = T::c(0.5) * (T::one() + d.norm());
            mid.push(ExtendedPoint::Finite(m + n * lift * T::c(1.0 + i as f64 * 0.25)));
        } else {
            mid.push(ExtendedPoint::Finite(m));
        }
    }
    if needed {
        vec![mid]
    } else {
        Vec::new()
    }
}

/// Builds a path between two groups and checks generators and words of
/// length 2 at `samples` evenly spaced points.
pub fn path_between<T: Scalar>(
    g0: &MarkedSchottkyGroup<T>,
    g1: &MarkedSchottkyGroup<T>,
    strategy: PathStrategy,
    samples: usize,
) -> Result<DeformationPath<T>> {
    if g0.rank() != g1.rank() {
        return Err(Error::InvalidInput(format!("ranks differ: {} and {}", g0.rank(), g1.rank())));
    }
    let p0 = to_parameters(g0)?;
    let p1 = to_parameters(g1)?;
    if params_close(&p0, &p1, T::tol(1e-12)) {
        return DeformationPath::constant(p0);
    }
    let waypoints = match strategy {
        PathStrategy::Direct => vec![p0, p1],
        PathStrategy::Maskit => {
            let inflated: Vec<ComplexLength<T>> = p0
                .lengths
                .iter()
                .zip(&p1.lengths)
                .map(|(a, b)| {
                    let l = T::c(MASKIT_LENGTH).max(a.value().re).max(b.value().re);
                    ComplexLength::new(Cx::from(l))
                })
                .collect::<Result<_>>()?;
            let at = |fp: &[ExtendedPoint<T>]| SchottkyParameters {
                fixed_points: fp.to_vec(),
                lengths: inflated.clone(),
            };
            let mut w = vec![p0.clone(), at(&p0.fixed_points)];
            for fp in detour_fixed_points(&p0.fixed_points, &p1.fixed_points) {
                w.push(at(&fp));
            }
            w.push(at(&p1.fixed_points));
            w.push(p1.clone());
            w.dedup_by(|a, b| params_close(a, b, T::zero()));
            w
        }
    };
    let path = DeformationPath::new(waypoints)?;
    validate_path(&path, samples)?;
    Ok(path)
}

/// Words checked at every sample: generators and all cyclically reduced
/// words of length 2.
fn sweep_words(rank: usize) -> Vec<Word> {
    Word::cyclically_reduced_up_to(rank, 2)
}

pub fn validate_path<T: Scalar>(path: &DeformationPath<T>, samples: usize) -> Result<()> {
    let samples = samples.max(2);
    let words = sweep_words(path.rank());
    for k in 0..samples {
        let t = T::c(k as f64 / (samples - 1) as f64);
        let fail = Error::PathValidationFailed { sample: k, samples };
        let Ok(g) = path.group_at(t) else {
            return Err(fail);
        };
        if words.iter().any(|w| word_trace(&g, w, t).is_err()) {
            return Err(fail);
        }
    }
    Ok(())
}

/// Whether each waypoint admits a classical certificate.
pub fn certify_waypoints<T: Scalar>(path: &DeformationPath<T>) -> Vec<bool> {
    path.waypoints
        .iter()
        .map(|p| from_parameters(p).ok().and_then(|g| attempt_classical_certificate(&g)).is_some())
        .collect()
}
