//! Summation engines for the length identities.

use std::collections::{BTreeMap, BTreeSet};

use super::gap::{frak_h, gap_g, gap_s, weierstrass_term};
use super::par::{par_map, tree_sum};
use super::report::{mod_defect, IdentityReport, Modulus, TailConstants, TermRecord};
use super::tail::{fit_tail, tail_estimate};
use crate::curves::{commutator_trace, slope_traces, weierstrass_class, Slope, TraceTriple, WeierstrassClass};
use crate::error::{Error, Result};
use crate::moebius::{acosh_positive, half_length, loxodromy_margin, LOXODROMY_TOL};
use crate::scalar::{cx, i_times, to_pair, Cx, Scalar};
use crate::schottky::{commutator_word, kappa, word_matrix, MarkedSchottkyGroup, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct SumOptions {
    pub max_sum: i64,
    pub tol: f64,
    pub threads: usize,
    pub per_term: bool,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions {
            max_sum: 40,
            tol: 1e-8,
            threads: 1,
            per_term: false,
        }
    }
}

impl SumOptions {
    pub fn new(max_sum: i64, tol: f64) -> Self {
        SumOptions {
            max_sum,
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_sum < 1 {
            return Err(Error::InvalidInput(format!("max_sum must be positive, got {}", self.max_sum)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// One evaluated summand.
#[derive(Clone, Debug)]
pub(crate) struct Summand<T: Scalar> {
    pub label: String,
    pub slope: Option<Slope>,
    /// Farey level (`|p| + q`) or total word length; drives the convergence test.
    pub level: u64,
    /// Exponent index of the tail model.
    pub n: u64,
    /// Smallest `re(length) / word length` among the words involved.
    pub rate: f64,
    pub value: Cx<T>,
}

/// Lists of summands in a fixed order, plus how to bound what is missing.
pub(crate) struct Series<T: Scalar> {
    pub identity: &'static str,
    pub terms: Vec<Summand<T>>,
    pub rhs: Cx<T>,
    pub modulus: Modulus,
    pub finite: bool,
    pub kappa: Option<f64>,
}

fn certified_kappa<T: Scalar>(g: &MarkedSchottkyGroup<T>) -> Option<f64> {
    g.circles().and_then(|cs| kappa(cs).ok()).map(|k| k.f()).filter(|k| *k > 0.0)
}

fn require_loxodromic<T: Scalar>(trace: Cx<T>) -> Result<()> {
    if loxodromy_margin(trace) > T::tol(LOXODROMY_TOL) {
        Ok(())
    } else {
        let t2 = trace * trace;
        Err(Error::NotLoxodromic {
            re: t2.re.f(),
            im: t2.im.f(),
        })
    }
}

fn collect<T: Scalar>(results: Vec<Result<Summand<T>>>) -> Result<Vec<Summand<T>>> {
    results.into_iter().collect()
}

pub(crate) fn assemble<T: Scalar>(series: Series<T>, opts: &SumOptions) -> Result<IdentityReport> {
    let values: Vec<Cx<T>> = series.terms.iter().map(|t| t.value).collect();
    let lhs = tree_sum(&values, opts.threads);
    let (k, residual) = mod_defect(lhs, series.rhs, series.modulus);

    let levels: BTreeSet<u64> = series.terms.iter().map(|t| t.level).collect();
    let last: BTreeSet<u64> = levels.iter().rev().take(3).copied().collect();
    let last_levels_abs: f64 = series
        .terms
        .iter()
        .filter(|t| last.contains(&t.level))
        .map(|t| t.value.norm().f())
        .sum();

    let mut kappa_out = None;
    let mut kappa_source = None;
    let mut tail_fit: Option<TailConstants> = None;
    let mut truncation_bound = 0.0;
    if !series.finite && !series.terms.is_empty() {
        let limit = opts.tol / 10.0;
        if !(last_levels_abs < limit) {
            return Err(Error::NonConvergence {
                tail: last_levels_abs,
                limit,
            });
        }
        let (kap, source) = match series.kappa {
            Some(k) => (k, "certificate"),
            None => {
                let k = series.terms.iter().map(|t| t.rate).fold(f64::INFINITY, f64::min);
                (k, "empirical")
            }
        };
        let samples: Vec<(u64, f64)> = series.terms.iter().map(|t| (t.n, t.value.norm().f())).collect();
        let fit = fit_tail(&samples, kap)?;
        let start = series.terms.iter().map(|t| t.n).max().unwrap_or(0);
        truncation_bound = tail_estimate(kap, start, &fit)?;
        kappa_out = Some(kap);
        kappa_source = Some(source.to_string());
        tail_fit = Some(fit);
    }

    let per_term = opts.per_term.then(|| {
        series
            .terms
            .iter()
            .map(|t| TermRecord {
                label: t.label.clone(),
                p: t.slope.map(|s| s.p()),
                q: t.slope.map(|s| s.q()),
                class: t.slope.map(|s| weierstrass_class(s).name().to_string()),
                value: to_pair(t.value),
            })
            .collect()
    });

    let residual = residual.f();
    Ok(IdentityReport {
        schema: 1,
        identity: series.identity.to_string(),
        lhs: to_pair(lhs),
        rhs: to_pair(series.rhs),
        modulus: series.modulus,
        defect_k: k,
        residual,
        tol: opts.tol,
        passed: residual <= opts.tol,
        terms_used: series.terms.len(),
        levels: levels.len(),
        last_levels_abs,
        truncation_bound,
        kappa: kappa_out,
        kappa_source,
        tail_fit,
        precision: T::precision_name().to_string(),
        threads: opts.threads.max(1),
        choices: BTreeMap::new(),
        per_term,
    })
}

/// Half length `nu` of the commutator `[a, b]` of a trace triple.
pub fn boundary_half_length<T: Scalar>(t: &TraceTriple<T>) -> Result<Cx<T>> {
    let k = commutator_trace(t);
    require_loxodromic(k)?;
    Ok(acosh_positive(-k * T::c(0.5)))
}

fn slope_summands<T: Scalar, F>(t: &TraceTriple<T>, opts: &SumOptions, keep: impl Fn(Slope) -> bool, f: F) -> Result<Vec<Summand<T>>>
where
    F: Fn(Slope, Cx<T>, Cx<T>) -> Result<(Cx<T>, u64)> + Sync,
{
    let slopes: Vec<(Slope, Cx<T>)> = slope_traces(t, opts.max_sum).into_iter().filter(|(s, _)| keep(*s)).collect();
    collect(par_map(&slopes, opts.threads, |&(s, tr)| {
        let half = acosh_positive(-tr * T::c(0.5));
        let (value, n) = f(s, tr, half)?;
        let size = s.size() as u64;
        Ok(Summand {
            label: s.to_string(),
            slope: Some(s),
            level: size,
            n,
            rate: 2.0 * half.re.f() / size as f64,
            value,
        })
    }))
}

/// The one-holed torus identity: `sum_s G(nu, l_s/2, l_s/2) = nu` mod `2 pi i`
/// over every slope with `|p| + q <= max_sum`.
pub fn torus_mcshane_sum<T: Scalar>(g: &MarkedSchottkyGroup<T>, opts: &SumOptions) -> Result<IdentityReport> {
    opts.validate()?;
    let t = TraceTriple::of_group(g)?;
    let nu = boundary_half_length(&t)?;
    let terms = slope_summands(&t, opts, |_| true, |s, _, half| Ok((gap_g(nu, half, half)?, 2 * s.size() as u64)))?;
    assemble(
        Series {
            identity: "torus",
            terms,
            rhs: nu,
            modulus: Modulus::TwoPiI,
            finite: false,
            kappa: certified_kappa(g),
        },
        opts,
    )
}

/// The Weierstrass identity for one parity class: the summands
/// `atan(cosh(l0/4) / sinh(l_s/2))` add up to `pi/2` mod `pi`.
///
/// `quarter = 0` takes `l0/4` as half the canonical half length of the
/// commutator, `quarter = 1` adds `pi i` to it.
pub fn weierstrass_sum<T: Scalar>(
    g: &MarkedSchottkyGroup<T>,
    cls: WeierstrassClass,
    quarter: u8,
    opts: &SumOptions,
) -> Result<IdentityReport> {
    opts.validate()?;
    if quarter > 1 {
        return Err(Error::InvalidInput(format!("quarter must be 0 or 1, got {quarter}")));
    }
    let t = TraceTriple::of_group(g)?;
    let nu = boundary_half_length(&t)?;
    let mut q4 = nu * T::c(0.5);
    if quarter == 1 {
        q4 = q4 + i_times(T::pi());
    }
    let terms = slope_summands(
        &t,
        opts,
        |s| s.class() == cls,
        |s, _, half| Ok((weierstrass_term(q4, half)?, s.size() as u64)),
    )?;
    let report = assemble(
        Series {
            identity: "weierstrass",
            terms,
            rhs: cx(T::pi() * T::c(0.5), T::zero()),
            modulus: Modulus::Pi,
            finite: false,
            kappa: certified_kappa(g),
        },
        opts,
    )?;
    Ok(report.choose("class", cls.name()).choose("quarter", quarter))
}

/// `sum_s frak_h(tr s) = nu` mod `2 pi i`, from traces alone.
pub fn markoff_sum<T: Scalar>(t: &TraceTriple<T>, opts: &SumOptions) -> Result<IdentityReport> {
    opts.validate()?;
    let nu = boundary_half_length(t)?;
    let terms = slope_summands(t, opts, |_| true, |s, tr, _| Ok((frak_h(tr, nu)?, 2 * s.size() as u64)))?;
    assemble(
        Series {
            identity: "markoff",
            terms,
            rhs: nu,
            modulus: Modulus::TwoPiI,
            finite: false,
            kappa: None,
        },
        opts,
    )
}

/// Word lists describing the sets summed over: `P` (pairs bounding a pair
/// of pants with `d0`) and one list `B_j` per further boundary word `d_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PantsDecomposition {
    pub boundary: Vec<Word>,
    pub pairs: Vec<(Word, Word)>,
    pub bj: Vec<Vec<Word>>,
    /// The lists are complete, so no tail is missing.
    pub finite: bool,
}

impl PantsDecomposition {
    pub fn validate(&self) -> Result<()> {
        if self.boundary.is_empty() {
            return Err(Error::InvalidInput("decomposition needs a boundary word d0".into()));
        }
        if self.bj.len() + 1 != self.boundary.len() {
            return Err(Error::InvalidInput(format!(
                "{} boundary words but {} B_j lists",
                self.boundary.len(),
                self.bj.len()
            )));
        }
        Ok(())
    }

    /// The pair of pants seen from its own boundary `a`, with `b` and `ab`
    /// the other two cuffs.
    pub fn pants() -> Self {
        let w = |s: &str| Word::parse(s).expect("literal word");
        PantsDecomposition {
            boundary: vec![w("a"), w("b"), w("ab")],
            pairs: vec![(w("b"), w("ab"))],
            bj: vec![vec![w("ab")], vec![w("b")]],
            finite: true,
        }
    }

    /// The one-holed torus: `d0 = [a, b]`-type commutator and pairs `{w, w}`
    /// over the Christoffel words with `|p| + q <= max_sum`.
    pub fn torus(max_sum: i64) -> Self {
        PantsDecomposition {
            boundary: vec![commutator_word()],
            pairs: crate::curves::signed_slopes_up_to(max_sum)
                .into_iter()
                .map(|s| {
                    let w = crate::curves::christoffel_word(s);
                    (w.clone(), w)
                })
                .collect(),
            bj: Vec::new(),
            finite: false,
        }
    }
}

/// The general identity mod `pi i` over an explicit decomposition.
pub fn general_mcshane_sum<T: Scalar>(
    g: &MarkedSchottkyGroup<T>,
    pd: &PantsDecomposition,
    opts: &SumOptions,
) -> Result<IdentityReport> {
    opts.validate()?;
    pd.validate()?;
    let half = |w: &Word| -> Result<Cx<T>> { Ok(half_length(&word_matrix(g, w))?.value) };
    let rate = |w: &Word, h: Cx<T>| 2.0 * h.re.f() / w.len().max(1) as f64;
    let h0 = half(&pd.boundary[0])?;
    let mut terms = collect(par_map(&pd.pairs, opts.threads, |(a, b)| {
        let (ha, hb) = (half(a)?, half(b)?);
        let n = (a.len() + b.len()) as u64;
        Ok(Summand {
            label: format!("{a},{b}"),
            slope: None,
            level: n,
            n,
            rate: rate(a, ha).min(rate(b, hb)),
            value: gap_g(h0, ha, hb)?,
        })
    }))?;
    for (j, words) in pd.bj.iter().enumerate() {
        let hj = half(&pd.boundary[j + 1])?;
        terms.extend(collect(par_map(words, opts.threads, |w| {
            let hw = half(w)?;
            let n = w.len() as u64;
            Ok(Summand {
                label: format!("B{}:{w}", j + 1),
                slope: None,
                level: n,
                n,
                rate: rate(w, hw),
                value: gap_s(h0, hj, hw)?,
            })
        }))?);
    }
    assemble(
        Series {
            identity: "general",
            terms,
            rhs: h0,
            modulus: Modulus::PiI,
            finite: pd.finite,
            kappa: certified_kappa(g),
        },
        opts,
    )
}

fn admissible_length<T: Scalar>(l: Cx<T>) -> bool {
    let zero = T::zero();
    l.re > zero || (l.re == zero && l.im > zero && l.im <= T::pi())
}

/// `G(l0/2, l1/2, l2/2) + S(l0/2, l1/2, l2/2) + S(l0/2, l2/2, l1/2) = l0/2`
/// for a pair of pants with boundary (or cone) lengths `l0, l1, l2`.
pub fn pants_trivial_identity<T: Scalar>(l0: Cx<T>, l1: Cx<T>, l2: Cx<T>, tol: f64) -> Result<IdentityReport> {
    for l in [l0, l1, l2] {
        if !admissible_length(l) {
            return Err(Error::InvalidInput(format!(
                "length {} + {}i must have positive real part or be i theta with 0 < theta <= pi",
                l.re.f(),
                l.im.f()
            )));
        }
    }
    let h = T::c(0.5);
    let (x, y, z) = (l0 * h, l1 * h, l2 * h);
    let values = [gap_g(x, y, z)?, gap_s(x, y, z)?, gap_s(x, z, y)?];
    let labels = ["G", "S12", "S21"];
    let terms = values
        .iter()
        .zip(labels)
        .map(|(v, label)| Summand {
            label: label.to_string(),
            slope: None,
            level: 1,
            n: 1,
            rate: 0.0,
            value: *v,
        })
        .collect();
    assemble(
        Series {
            identity: "pants_trivial",
            terms,
            rhs: x,
            modulus: Modulus::None,
            finite: true,
            kappa: None,
        },
        &SumOptions {
            tol,
            threads: 1,
            ..Default::default()
        },
    )
}
