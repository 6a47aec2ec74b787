//! Gap endpoints on the axis of the boundary.

use super::engines::boundary_half_length;
use super::gap::gap_g;
use crate::curves::{christoffel_word, trace_of_slope, Slope, TraceTriple};
use crate::error::{Error, Result};
use crate::moebius::{acosh_positive, fixed_points, normalizing_map, ExtendedPoint};
use crate::scalar::{Cx, Scalar};
use crate::schottky::{commutator_word, word_matrix, MarkedSchottkyGroup, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct GapEndpoints<T: Scalar> {
    pub slope: Slope,
    pub g1: Word,
    pub g2: Word,
    /// Attracting fixed point of `g1`.
    pub start: ExtendedPoint<T>,
    /// Repelling fixed point of `g2`.
    pub end: ExtendedPoint<T>,
    pub gap: Cx<T>,
}

impl<T: Scalar> GapEndpoints<T> {
    /// Whether the endpoints lie on different components of the real axis
    /// minus `{0, inf}`.
    pub fn opposite_sides(&self) -> Option<bool> {
        let s = self.start.as_finite()?;
        let e = self.end.as_finite()?;
        Some((s.re > T::zero()) != (e.re > T::zero()))
    }
}

/// Splits `d0 = g1 g2` with both factors conjugate to the Christoffel word
/// of `s` (or its inverse): `g2` is a rotation of that word and
/// `g1 = d0 g2^-1`.
pub fn gap_factorization(d0: &Word, s: Slope) -> Result<(Word, Word)> {
    let w = christoffel_word(s);
    let wi = w.inverse();
    for r in w.rotations().into_iter().chain(wi.rotations()) {
        let g1 = d0.concat(&r.inverse());
        if g1.is_conjugate_to(&w) || g1.is_conjugate_to(&wi) {
            return Ok((g1, r));
        }
    }
    Err(Error::DegenerateFactorization)
}

/// Endpoints of the gap of slope `s` after conjugating so the commutator
/// has repelling fixed point 0 and attracting fixed point infinity.
pub fn gap_endpoints<T: Scalar>(g: &MarkedSchottkyGroup<T>, s: Slope) -> Result<GapEndpoints<T>> {
    let t = TraceTriple::of_group(g)?;
    let nu = boundary_half_length(&t)?;
    let d0 = commutator_word();
    let fp = fixed_points(&word_matrix(g, &d0))?;
    let n = normalizing_map(fp.repelling, fp.attracting, None)?;
    let h = g.without_circles().conjugate_by(&n)?;
    let (g1, g2) = gap_factorization(&d0, s)?;
    let start = fixed_points(&word_matrix(&h, &g1))?.attracting;
    let end = fixed_points(&word_matrix(&h, &g2))?.repelling;
    let half = acosh_positive(-trace_of_slope(&t, s) * T::c(0.5));
    Ok(GapEndpoints {
        slope: s,
        g1,
        g2,
        start,
        end,
        gap: gap_g(nu, half, half)?,
    })
}
