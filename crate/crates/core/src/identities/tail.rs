//! Exponential tail bounds for the Farey-ordered series.

use std::collections::BTreeMap;

use super::report::TailConstants;
use crate::error::{Error, Result};

/// Fewest distinct levels a prefix must have before a tail is fitted.
pub const MIN_LEVELS: usize = 10;

/// `sum_{n > start} c n^2 C e^{-kappa n / 2}` in closed form.
pub fn tail_estimate(kappa: f64, start: u64, consts: &TailConstants) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
    }
    if !(consts.small_c >= 0.0) {
        return Err(Error::InvalidInput("negative count constant".into()));
    }
    if consts.small_c == 0.0 {
        return Ok(0.0);
    }
    let r = (-kappa / 2.0).exp();
    let one_minus_r = -(-kappa / 2.0).exp_m1();
    let m = start as f64 + 1.0;
    // sum_{n >= M} n^2 r^n = r^M (M^2 - (2M^2 - 2M - 1) r + (M-1)^2 r^2) / (1-r)^3
    let poly = m * m - (2.0 * m * m - 2.0 * m - 1.0) * r + (m - 1.0) * (m - 1.0) * r * r;
    let ln = consts.small_c.ln() + consts.ln_big_c - m * kappa / 2.0 + poly.ln() - 3.0 * one_minus_r.ln();
    Ok(ln.exp())
}

/// Fits `C` (twice the largest `|term| e^{kappa n/2}`) and `c`
/// (largest `count(n)/n^2`) from `(n, |term|)` samples.
pub fn fit_tail(samples: &[(u64, f64)], kappa: f64) -> Result<TailConstants> {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    let mut ln_c = f64::NEG_INFINITY;
    for &(n, abs) in samples {
        *counts.entry(n).or_default() += 1;
        if abs > 0.0 {
            ln_c = ln_c.max(abs.ln() + kappa * n as f64 / 2.0);
        }
    }
    if counts.len() < MIN_LEVELS {
        return Err(Error::InsufficientPrefix { levels: counts.len() });
    }
    let small_c = counts
        .iter()
        .filter(|(n, _)| **n > 0)
        .map(|(n, k)| *k as f64 / (*n as f64 * *n as f64))
        .fold(0.0, f64::max);
    Ok(TailConstants {
        ln_big_c: (ln_c + std::f64::consts::LN_2).max(-1e300),
        small_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(kappa: f64, start: u64) -> f64 {
        (start + 1..start + 4000).map(|n| (n * n) as f64 * (-kappa * n as f64 / 2.0).exp()).sum()
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        let unit = TailConstants::new(1.0, 1.0);
        let b = tail_estimate(1.0, 40, &unit).unwrap();
        assert!((b - 5.762_578_026_133_76e-6).abs() < 1e-18);
        for (kappa, start) in [(0.3, 10), (1.0, 40), (2.5, 80), (0.65, 80)] {
            let b = tail_estimate(kappa, start, &unit).unwrap();
            let d = brute(kappa, start);
            assert!((b - d).abs() <= 1e-12 * d, "{kappa} {start}: {b} vs {d}");
        }
    }

    #[test]
    fn doubling_start_shrinks_bound() {
        let consts = TailConstants::new(3.0, 0.5);
        for kappa in [0.2, 0.65, 1.0, 3.0] {
            for start in [10u64, 20, 40] {
                let a = tail_estimate(kappa, start, &consts).unwrap();
                let b = tail_estimate(kappa, 2 * start, &consts).unwrap();
                assert!(b <= 4.0 * (-kappa * start as f64 / 2.0).exp() * a);
                assert!(b < a);
            }
        }
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let unit = TailConstants::new(1.0, 1.0);
        assert!(matches!(tail_estimate(0.0, 40, &unit), Err(Error::InvalidInput(_))));
        assert!(matches!(tail_estimate(-1.0, 40, &unit), Err(Error::InvalidInput(_))));
        let few: Vec<(u64, f64)> = (1..=9).map(|n| (n, 1.0)).collect();
        assert_eq!(fit_tail(&few, 1.0), Err(Error::InsufficientPrefix { levels: 9 }));
    }

    #[test]
    fn fit_recovers_constants() {
        // two terms per level, |term| = 3 e^{-n/2}
        let samples: Vec<(u64, f64)> = (1..=20u64)
            .flat_map(|n| [(n, 3.0 * (-(n as f64) / 2.0).exp()); 2])
            .collect();
        let fit = fit_tail(&samples, 1.0).unwrap();
        assert!((fit.big_c() - 6.0).abs() < 1e-12);
        assert!((fit.small_c - 2.0).abs() < 1e-15);
    }
}
