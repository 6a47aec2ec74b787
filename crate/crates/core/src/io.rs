//! JSON documents for groups, paths and decompositions, and CSV exports.
//!
//! Complex numbers are `[re, im]`, the point at infinity is `"inf"`.
//! A group document carries exactly one of `generators`, `parameters`,
//! `torus_traces` or `pants_lengths`, plus optional `circles`.

use std::io::Write;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::continuation::{Continued, DeformationPath};
use crate::curves::{slope_traces, weierstrass_class, TraceTriple};
use crate::error::{Error, Result};
use crate::identities::{GapEndpoints, PantsDecomposition, TermRecord};
use crate::moebius::{acosh_positive, Circle, ComplexLength, ExtendedPoint, Mat2};
use crate::scalar::{from_pair, to_pair, Scalar};
use crate::schottky::{
    from_parameters, pants_fuchsian_marking, torus_fuchsian_marking, CircleSystem, MarkedSchottkyGroup,
    SchottkyParameters, Word,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointDoc {
    Finite([f64; 2]),
    Named(String),
}

impl PointDoc {
    fn from_point<T: Scalar>(z: &ExtendedPoint<T>) -> Self {
        match z {
            ExtendedPoint::Infinity => PointDoc::Named("inf".into()),
            ExtendedPoint::Finite(w) => PointDoc::Finite(to_pair(*w)),
        }
    }

    fn to_point<T: Scalar>(&self) -> Result<ExtendedPoint<T>> {
        match self {
            PointDoc::Finite(p) => Ok(ExtendedPoint::Finite(from_pair(*p))),
            PointDoc::Named(s) if s == "inf" || s == "infinity" => Ok(ExtendedPoint::Infinity),
            PointDoc::Named(s) => Err(Error::InvalidInput(format!("unknown point {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametersDoc {
    pub fixed_points: Vec<PointDoc>,
    pub lengths: Vec<[f64; 2]>,
}

impl ParametersDoc {
    pub fn from_parameters<T: Scalar>(p: &SchottkyParameters<T>) -> Self {
        ParametersDoc {
            fixed_points: p.fixed_points.iter().map(PointDoc::from_point).collect(),
            lengths: p.lengths.iter().map(|l| to_pair(l.value())).collect(),
        }
    }

    pub fn to_parameters<T: Scalar>(&self) -> Result<SchottkyParameters<T>> {
        let p = SchottkyParameters {
            fixed_points: self.fixed_points.iter().map(PointDoc::to_point).collect::<Result<_>>()?,
            lengths: self
                .lengths
                .iter()
                .map(|l| ComplexLength::new(from_pair(*l)))
                .collect::<Result<_>>()?,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleDoc {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<[[f64; 2]; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<ParametersDoc>,
    /// Fuchsian one-holed torus with traces `(tr a, tr b, tr ab)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_traces: Option<[f64; 3]>,
    /// Fuchsian pair of pants with the given boundary lengths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pants_lengths: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circles: Option<Vec<[CircleDoc; 2]>>,
}

fn matrix<T: Scalar>(m: &[[f64; 2]; 4]) -> Result<Mat2<T>> {
    let [a, b, c, d] = m.map(from_pair::<T>);
    let det = a * d - b * c;
    if (det - num_complex::Complex::<T>::one()).norm() <= T::tol(1e-12) {
        // already unimodular: keep the entries exactly
        Ok(Mat2::raw(a, b, c, d))
    } else {
        Mat2::new(a, b, c, d)
    }
}

impl GroupDoc {
    pub fn from_group<T: Scalar>(g: &MarkedSchottkyGroup<T>) -> Self {
        GroupDoc {
            rank: Some(g.rank()),
            generators: Some(
                g.generators()
                    .iter()
                    .map(|m| [to_pair(m.a), to_pair(m.b), to_pair(m.c), to_pair(m.d)])
                    .collect(),
            ),
            circles: g.circles().map(|cs| {
                cs.pairs
                    .iter()
                    .map(|(c, d)| {
                        [c, d].map(|k| CircleDoc {
                            center: to_pair(k.center),
                            radius: k.radius.f(),
                        })
                    })
                    .collect()
            }),
            ..Default::default()
        }
    }

    pub fn to_group<T: Scalar>(&self) -> Result<MarkedSchottkyGroup<T>> {
        let sources = [
            self.generators.is_some(),
            self.parameters.is_some(),
            self.torus_traces.is_some(),
            self.pants_lengths.is_some(),
        ];
        if sources.iter().filter(|s| **s).count() != 1 {
            return Err(Error::InvalidInput(
                "group needs exactly one of generators, parameters, torus_traces, pants_lengths".into(),
            ));
        }
        let g = if let Some(gens) = &self.generators {
            let gens = gens.iter().map(matrix).collect::<Result<Vec<_>>>()?;
            MarkedSchottkyGroup::new(gens)?
        } else if let Some(p) = &self.parameters {
            from_parameters(&p.to_parameters()?)?
        } else if let Some([x, y, z]) = self.torus_traces {
            torus_fuchsian_marking(T::c(x), T::c(y), T::c(z))?.without_circles()
        } else if let Some([a, b, c]) = self.pants_lengths {
            pants_fuchsian_marking(T::c(a), T::c(b), T::c(c))?.without_circles()
        } else {
            unreachable!()
        };
        if let Some(rank) = self.rank {
            if rank != g.rank() {
                return Err(Error::InvalidInput(format!("rank {rank} declared, {} generators given", g.rank())));
            }
        }
        match &self.circles {
            None => Ok(g),
            Some(pairs) => {
                let pairs = pairs
                    .iter()
                    .map(|[c, d]| {
                        let circle = |k: &CircleDoc| Circle::new(from_pair(k.center), T::c(k.radius));
                        Ok((circle(c)?, circle(d)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                g.with_circles(CircleSystem::new(pairs))
            }
        }
    }
}

pub fn parse_group<T: Scalar>(json: &str) -> Result<MarkedSchottkyGroup<T>> {
    let doc: GroupDoc = serde_json::from_str(json)?;
    doc.to_group()
}

pub fn group_to_json<T: Scalar>(g: &MarkedSchottkyGroup<T>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&GroupDoc::from_group(g))?)
}

pub fn parse_path<T: Scalar>(json: &str) -> Result<DeformationPath<T>> {
    let docs: Vec<ParametersDoc> = serde_json::from_str(json)?;
    let waypoints = docs.iter().map(|d| d.to_parameters()).collect::<Result<Vec<_>>>()?;
    DeformationPath::new(waypoints)
}

pub fn path_to_json<T: Scalar>(path: &DeformationPath<T>) -> Result<String> {
    let docs: Vec<ParametersDoc> = path.waypoints().iter().map(ParametersDoc::from_parameters).collect();
    Ok(serde_json::to_string_pretty(&docs)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    pub boundary: Vec<String>,
    #[serde(default)]
    pub pairs: Vec<[String; 2]>,
    #[serde(default)]
    pub b: Vec<Vec<String>>,
    #[serde(default)]
    pub finite: bool,
}

pub fn parse_decomposition(json: &str) -> Result<PantsDecomposition> {
    let doc: DecompositionDoc = serde_json::from_str(json)?;
    let words = |v: &[String]| v.iter().map(|s| Word::parse(s)).collect::<Result<Vec<_>>>();
    let pd = PantsDecomposition {
        boundary: words(&doc.boundary)?,
        pairs: doc
            .pairs
            .iter()
            .map(|[a, b]| Ok((Word::parse(a)?, Word::parse(b)?)))
            .collect::<Result<_>>()?,
        bj: doc.b.iter().map(|v| words(v)).collect::<Result<_>>()?,
        finite: doc.finite,
    };
    pd.validate()?;
    Ok(pd)
}

/// Shortest representation that parses back to the same `f64`, at most
/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

/// `p, q, class, trace_re, trace_im, length_re, length_im` for every slope.
pub fn write_traces_csv<T: Scalar, W: Write>(t: &TraceTriple<T>, max_sum: i64, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["p", "q", "class", "trace_re", "trace_im", "length_re", "length_im"])?;
    for (s, tr) in slope_traces(t, max_sum) {
        let len = acosh_positive(tr * T::c(0.5)) * T::c(2.0);
        w.write_record([
            s.p().to_string(),
            s.q().to_string(),
            weierstrass_class(s).name().to_string(),
            fmt_f64(tr.re.f()),
            fmt_f64(tr.im.f()),
            fmt_f64(len.re.f()),
            fmt_f64(len.im.f()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `p, q, class, term_re, term_im` (slopes) or `label, term_re, term_im`.
pub fn write_terms_csv<W: Write>(terms: &[TermRecord], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["label", "p", "q", "class", "term_re", "term_im"])?;
    for t in terms {
        w.write_record([
            t.label.clone(),
            t.p.map(|v| v.to_string()).unwrap_or_default(),
            t.q.map(|v| v.to_string()).unwrap_or_default(),
            t.class.clone().unwrap_or_default(),
            fmt_f64(t.value[0]),
            fmt_f64(t.value[1]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn point_cells<T: Scalar>(z: &ExtendedPoint<T>) -> [String; 2] {
    match z.as_finite() {
        Some(w) => [fmt_f64(w.re.f()), fmt_f64(w.im.f())],
        None => ["inf".into(), "inf".into()],
    }
}

/// One row per gap: endpoints, the gap value and whether the endpoints
/// sit on opposite sides of the boundary axis.
pub fn write_gaps_csv<T: Scalar, W: Write>(gaps: &[GapEndpoints<T>], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "p", "q", "class", "g1", "g2", "start_re", "start_im", "end_re", "end_im", "gap_re", "gap_im", "opposite",
    ])?;
    for g in gaps {
        let [sr, si] = point_cells(&g.start);
        let [er, ei] = point_cells(&g.end);
        w.write_record([
            g.slope.p().to_string(),
            g.slope.q().to_string(),
            weierstrass_class(g.slope).name().to_string(),
            g.g1.to_string(),
            g.g2.to_string(),
            sr,
            si,
            er,
            ei,
            fmt_f64(g.gap.re.f()),
            fmt_f64(g.gap.im.f()),
            g.opposite_sides().map(|b| b.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `word, t, re, im` for every sample of every continued word.
pub fn write_continuation_csv<T: Scalar, W: Write>(runs: &[(Word, Continued<T>)], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["word", "t", "re", "im"])?;
    for (word, c) in runs {
        for (t, v) in &c.trace {
            w.write_record([word.to_string(), fmt_f64(t.f()), fmt_f64(v.re.f()), fmt_f64(v.im.f())])?;
        }
    }
    w.flush()?;
    Ok(())
}
