//! Search for a classical circle system.
//!
//! Work happens in double precision in a frame `T = C o N`, where `N`
//! normalizes the group and `C(z) = 1/(z - q)` pushes a chosen point `q`
//! to infinity. In that frame each generator `g` gets a circle `K`
//! containing its pole `-d/c` and the exact image `K' = g(K)`; the pole
//! condition makes `g` send the outside of `K` into `K'`. The free data
//! (`q`, and per generator a radius and the offset of the centre from the
//! pole) is tuned to maximize the smallest pairwise inversive distance.
//! Any candidate is mapped back and re-checked in the caller's precision.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;

use super::{normalizer, verify_circle_pairing, CircleSystem, MarkedSchottkyGroup};
use crate::moebius::{fixed_points, inversive_distance, map_circle, Circle, Mat2};
use crate::scalar::{convert, cx, Scalar};

const ACCEPT_MARGIN: f64 = 1e-6;
const MAX_ITERS: u64 = 4000;

struct Frame {
    gens: Vec<Mat2<f64>>,
    real: bool,
}

impl Frame {
    fn q(&self, x: &[f64]) -> Complex64 {
        if self.real {
            Complex64::new(x[0], 0.0)
        } else {
            Complex64::new(x[0], x[1])
        }
    }

    fn conj(q: Complex64) -> Mat2<f64> {
        let i = Complex64::i();
        Mat2::raw(Complex64::new(0.0, 0.0), i, i, -i * q)
    }

    /// Circles `(K_i, K'_i)` in the frame where `q` sits at infinity.
    fn circles(&self, x: &[f64]) -> Option<Vec<(Circle<f64>, Circle<f64>)>> {
        let q = self.q(x);
        let c = Frame::conj(q);
        let per = if self.real { 2 } else { 3 };
        let base = if self.real { 1 } else { 2 };
        let mut out = Vec::with_capacity(self.gens.len());
        for (i, g) in self.gens.iter().enumerate() {
            let h = g.conjugate_by(&c);
            if h.c.norm() < 1e-300 {
                return None;
            }
            let pole = -h.d / h.c;
            let p = &x[base + per * i..base + per * (i + 1)];
            let rho = p[0].exp();
            let offset = if self.real {
                Complex64::new(rho * p[1].tanh(), 0.0)
            } else {
                let v = Complex64::new(p[1], p[2]);
                v * (rho / (1.0 + v.norm()))
            };
            let k = Circle::new(pole + offset, rho).ok()?;
            let kp = map_circle(&h, &k).ok()?;
            out.push((k, kp));
        }
        Some(out)
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let Some(pairs) = self.circles(x) else {
            return f64::NEG_INFINITY;
        };
        let all: Vec<Circle<f64>> = pairs.iter().flat_map(|(a, b)| [*a, *b]).collect();
        let mut best = f64::INFINITY;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                best = best.min(inversive_distance(&all[i], &all[j]));
            }
        }
        if best.is_finite() {
            best
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Isometric circles for a given `q`.
    fn seed(&self, q: Complex64) -> Option<Vec<f64>> {
        let c = Frame::conj(q);
        let mut x = if self.real { vec![q.re] } else { vec![q.re, q.im] };
        for g in &self.gens {
            let h = g.conjugate_by(&c);
            let n = h.c.norm();
            if !(n > 1e-12) || !n.is_finite() {
                return None;
            }
            x.push(-n.ln());
            x.push(0.0);
            if !self.real {
                x.push(0.0);
            }
        }
        Some(x)
    }
}

impl CostFunction for &Frame {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> Result<f64, argmin::core::Error> {
        let v = self.objective(x);
        Ok(if v.is_finite() { -v } else { 1e300 })
    }
}

fn optimize(frame: &Frame, x0: Vec<f64>) -> Option<(f64, Vec<f64>)> {
    let mut simplex = vec![x0.clone()];
    for k in 0..x0.len() {
        let mut v = x0.clone();
        v[k] += 0.1 * (1.0 + x0[k].abs()).min(10.0);
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-13).ok()?;
    let res = Executor::new(frame, solver)
        .configure(|s| s.max_iters(MAX_ITERS))
        .run()
        .ok()?;
    let x = res.state.best_param?;
    let v = frame.objective(&x);
    v.is_finite().then_some((v, x))
}

/// Candidate positions for the point sent to infinity: gaps between the
/// normalized fixed points and a coarse grid.
fn seeds(frame: &Frame) -> Vec<Complex64> {
    let mut pts: Vec<f64> = vec![0.0, 1.0];
    for g in &frame.gens {
        if let Ok(f) = fixed_points(g) {
            for z in [f.attracting, f.repelling] {
                if let Some(z) = z.as_finite() {
                    pts.push(z.re);
                }
            }
        }
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut qs: Vec<f64> = pts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let lo = pts[0];
    let hi = pts[pts.len() - 1];
    qs.push(lo - 1.0);
    qs.push(hi + 1.0);
    qs.extend((0..=16).map(|k| -4.0 + 0.5 * k as f64));
    qs.extend([-0.37, 0.41, 1.7, -1.7]);
    let near_fixed = |q: f64| pts.iter().any(|p| (p - q).abs() < 1e-6);
    let mut out = Vec::new();
    for q in qs.into_iter().filter(|&q| !near_fixed(q)) {
        out.push(Complex64::new(q, 0.0));
        if !frame.real {
            out.push(Complex64::new(q, 0.5));
            out.push(Complex64::new(q, -0.5));
        }
    }
    out
}

/// Tries to find circles certifying `g` as a classical Schottky group.
///
/// `None` means no witness was found, not that none exists. For groups
/// conjugate into PSL(2,R) the search stays among circles orthogonal to
/// the image of the real line.
pub fn attempt_classical_certificate<T: Scalar>(g: &MarkedSchottkyGroup<T>) -> Option<CircleSystem<T>> {
    let n = normalizer(g).ok()?;
    let gens: Vec<Mat2<f64>> = g
        .generators()
        .iter()
        .map(|m| {
            let m = m.conjugate_by(&n);
            Mat2::raw(convert(m.a), convert(m.b), convert(m.c), convert(m.d))
        })
        .collect();
    let real = gens.iter().all(|m| m.is_real(1e-12));
    let frame = Frame { gens, real };

    let mut results: Vec<(f64, Vec<f64>)> = seeds(&frame)
        .into_iter()
        .filter_map(|q| frame.seed(q))
        .filter_map(|x0| optimize(&frame, x0))
        .filter(|(v, _)| *v > 1.0 + ACCEPT_MARGIN)
        .collect();
    results.sort_by(|a, b| b.0.total_cmp(&a.0));

    let back = n.inverse();
    for (_, x) in results {
        let Some(pairs) = frame.circles(&x) else {
            continue;
        };
        let q = frame.q(&x);
        let c: Mat2<T> = {
            let i = cx(T::zero(), T::one());
            let qt = convert::<f64, T>(q);
            Mat2::raw(cx(T::zero(), T::zero()), i, i, -i * qt)
        };
        let to_original = back * c.inverse();
        let mut out = Vec::with_capacity(pairs.len());
        let mut ok = true;
        for (i, (k, _)) in pairs.iter().enumerate() {
            let kt = Circle {
                center: convert::<f64, T>(k.center),
                radius: T::c(k.radius),
            };
            let Ok(src) = map_circle(&to_original, &kt) else {
                ok = false;
                break;
            };
            let Ok(dst) = map_circle(&g.generators()[i], &src) else {
                ok = false;
                break;
            };
            out.push((src, dst));
        }
        if !ok {
            continue;
        }
        let cs = CircleSystem::new(out);
        if verify_circle_pairing(g, &cs, T::tol(1e-9)).is_pass() {
            return Some(cs);
        }
    }
    None
}
