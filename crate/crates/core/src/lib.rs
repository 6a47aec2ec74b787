//! Marked classical Schottky groups, their circle certificates, and
//! numerical verification of McShane-type length identities.
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below fix
//! the common precisions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod continuation;
pub mod curves;
pub mod error;
pub mod identities;
pub mod io;
pub mod moebius;
pub mod scalar;
pub mod schottky;

pub use continuation::{BranchState, DeformationPath, PathStrategy};
pub use curves::{Slope, TraceTriple, WeierstrassClass};
pub use error::{Error, Result};
pub use identities::{IdentityReport, Modulus, PantsDecomposition, SumOptions};
pub use moebius::{ComplexLength, ExtendedPoint, HalfLength, Mat2};
pub use scalar::{Cx, Scalar};
pub use schottky::{CircleSystem, MarkedSchottkyGroup, SchottkyParameters, Word};

/// IEEE binary128, available with the `quad` feature.
#[cfg(feature = "quad")]
pub type Quad = f128::f128;

pub type Complex = Cx<f64>;
pub type Matrix = Mat2<f64>;
pub type Group = MarkedSchottkyGroup<f64>;
pub type Parameters = SchottkyParameters<f64>;
pub type Traces = TraceTriple<f64>;
pub type Path = DeformationPath<f64>;

pub type Matrix32 = Mat2<f32>;
pub type Group32 = MarkedSchottkyGroup<f32>;
pub type Traces32 = TraceTriple<f32>;

#[cfg(feature = "quad")]
pub type MatrixQuad = Mat2<Quad>;
#[cfg(feature = "quad")]
pub type GroupQuad = MarkedSchottkyGroup<Quad>;
#[cfg(feature = "quad")]
pub type TracesQuad = TraceTriple<Quad>;
