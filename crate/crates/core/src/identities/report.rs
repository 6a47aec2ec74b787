//! Identity reports and modular defects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::{cx, i_times, Cx, Scalar};

/// The period an identity is asserted modulo.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulus {
    PiI,
    TwoPiI,
    Pi,
    None,
}

impl Modulus {
    pub fn value<T: Scalar>(self) -> Cx<T> {
        match self {
            Modulus::PiI => i_times(T::pi()),
            Modulus::TwoPiI => i_times(T::two_pi()),
            Modulus::Pi => cx(T::pi(), T::zero()),
            Modulus::None => cx(T::zero(), T::zero()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulus::PiI => "pi_i",
            Modulus::TwoPiI => "two_pi_i",
            Modulus::Pi => "pi",
            Modulus::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "pi_i" | "pii" => Some(Modulus::PiI),
            "two_pi_i" | "2pii" | "2pi_i" => Some(Modulus::TwoPiI),
            "pi" => Some(Modulus::Pi),
            "none" => Some(Modulus::None),
            _ => None,
        }
    }
}

/// The integer `k` minimizing `|lhs - rhs - k m|` and the distance attained.
pub fn mod_defect<T: Scalar>(lhs: Cx<T>, rhs: Cx<T>, modulus: Modulus) -> (i64, T) {
    let diff = lhs - rhs;
    if modulus == Modulus::None {
        return (0, diff.norm());
    }
    let m = modulus.value::<T>();
    let t = (diff * m.conj()).re / m.norm_sqr();
    let k = t.round();
    let k_int = k.to_i64().unwrap_or(0);
    (k_int, (diff - m * k).norm())
}

/// One summand as recorded in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    pub value: [f64; 2],
}

/// Constants of the fitted tail model `|term| <= C e^{-kappa n/2}`,
/// `count(n) <= c n^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    /// `ln C`, kept logarithmic so deep prefixes cannot overflow.
    pub ln_big_c: f64,
    pub small_c: f64,
}

impl TailConstants {
    pub fn new(big_c: f64, small_c: f64) -> Self {
        TailConstants {
            ln_big_c: big_c.ln(),
            small_c,
        }
    }

    pub fn big_c(&self) -> f64 {
        self.ln_big_c.exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub schema: u32,
    pub identity: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub modulus: Modulus,
    pub defect_k: i64,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    pub terms_used: usize,
    pub levels: usize,
    /// `sum |term|` over the last three levels of the prefix.
    pub last_levels_abs: f64,
    pub truncation_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_fit: Option<TailConstants>,
    pub precision: String,
    pub threads: usize,
    pub choices: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_term: Option<Vec<TermRecord>>,
}

impl IdentityReport {
    pub fn passes(&self) -> bool {
        self.passed
    }

    pub fn choose(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.choices.insert(key.to_string(), value.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn defect_examples() {
        let rhs = c64::<f64>(1.0, 0.5);
        let (k, r) = mod_defect(rhs + c64(0.0, 2.0 * PI), rhs, Modulus::PiI);
        assert_eq!(k, 2);
        assert!(r < 1e-15);
        assert_eq!(mod_defect(rhs, rhs, Modulus::TwoPiI), (0, 0.0));
        let (k, r) = mod_defect(rhs + c64(0.0, PI), rhs, Modulus::TwoPiI);
        assert!(k == 0 || k == 1);
        assert!((r - PI).abs() < 1e-12);
        let (k, r) = mod_defect(c64::<f64>(2.0, 0.0), c64(0.0, 0.0), Modulus::None);
        assert_eq!((k, r), (0, 2.0));
        let (k, r) = mod_defect(c64::<f64>(PI / 2.0 - 3.0 * PI, 1e-3), c64(PI / 2.0, 0.0), Modulus::Pi);
        assert_eq!(k, -3);
        assert!((r - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn modulus_names_round_trip() {
        for m in [Modulus::PiI, Modulus::TwoPiI, Modulus::Pi, Modulus::None] {
            assert_eq!(Modulus::parse(m.name()), Some(m));
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.name()));
        }
    }

    proptest! {
        #[test]
        fn residual_is_periodic(
            re in -5.0..5.0f64, im in -5.0..5.0f64, shift in -20i64..20,
            which in 0usize..3,
        ) {
            let m = [Modulus::PiI, Modulus::TwoPiI, Modulus::Pi][which];
            let lhs = c64::<f64>(re, im);
            let rhs = c64::<f64>(0.3, -0.2);
            let (k0, r0) = mod_defect(lhs, rhs, m);
            let (k1, r1) = mod_defect(lhs + m.value::<f64>() * shift as f64, rhs, m);
            prop_assert!((r0 - r1).abs() < 1e-12);
            prop_assert!((k1 - k0 - shift).abs() <= 1);
            // no other k does better
            for dk in [-1.0, 1.0] {
                let alt = (lhs - rhs - m.value::<f64>() * (k0 as f64 + dk)).norm();
                prop_assert!(alt >= r0 - 1e-12);
            }
        }
    }
}
