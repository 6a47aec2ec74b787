//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use mcshane::continuation::{continue_from, continue_half_length, path_between, verify_positivity};
use mcshane::curves::{signed_slopes_up_to, slope_matrix, slopes_up_to, trace_of_slope};
use mcshane::identities::{
    boundary_half_length, frak_h, gap_g, gap_g_log, gap_s, gap_s_log, markoff_sum, mod_defect,
    pants_trivial_identity, torus_mcshane_sum, weierstrass_sum,
};
use mcshane::moebius::{acosh_positive, complex_length, wrap_strip};
use mcshane::scalar::{c64, convert, cr};
use mcshane::schottky::{
    change_lift, from_parameters, group_from_traces, kappa, pants_fuchsian_marking, torus_fuchsian_marking,
    word_matrix,
};
use mcshane::{
    Complex, ComplexLength, ExtendedPoint, Group, IdentityReport, Modulus, PathStrategy, Quad, SchottkyParameters,
    SumOptions, TraceTriple, WeierstrassClass, Word,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const ACOSH_2: f64 = 1.316_957_896_924_816_7;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn opts(max_sum: i64, tol: f64) -> SumOptions {
    SumOptions::new(max_sum, tol)
}

fn lhs(r: &IdentityReport) -> Complex {
    Complex::new(r.lhs[0], r.lhs[1])
}

fn torus_334() -> Group {
    torus_fuchsian_marking(3.0, 3.0, 4.0).unwrap()
}

fn pants_222() -> Group {
    pants_fuchsian_marking(2.0, 2.0, 2.0).unwrap()
}

fn complex_point() -> Group {
    from_parameters(&SchottkyParameters {
        fixed_points: vec![ExtendedPoint::Finite(c64(-1.0, 0.0))],
        lengths: vec![
            ComplexLength::new(c64(6.0, 0.5)).unwrap(),
            ComplexLength::new(c64(6.0, -0.4)).unwrap(),
        ],
    })
    .unwrap()
    .certified()
}

fn lifts(g: &Group) -> Vec<Group> {
    [[false, false], [true, false], [false, true], [true, true]]
        .iter()
        .map(|s| change_lift(g, s).unwrap())
        .collect()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut cases = Vec::new();
    for _ in 0..100 {
        cases.push([0; 3].map(|_| c64::<f64>(rng.gen_range(0.1..8.0), 0.0)));
    }
    for _ in 0..20 {
        let theta = PI * (1.0 - rng.gen::<f64>());
        let mut l = [cr(rng.gen_range(0.1..8.0)), cr(rng.gen_range(0.1..8.0)), c64(0.0, theta)];
        l.rotate_left(rng.gen_range(0..3));
        cases.push(l);
    }
    for [a, b, c] in cases {
        let r = pants_trivial_identity(a, b, c, 1e-10).map_err(|e| e.to_string())?;
        worst = worst.max(r.residual);
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-10 && secs < 1.0, format!("120 triples, max residual {worst:.2e}, {secs:.3} s"))
}

fn ac2() -> Outcome {
    let g = torus_334();
    let start = Instant::now();
    let r = torus_mcshane_sum(&g, &opts(40, 1e-8)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let err = (lhs(&r) - cr(ACOSH_2)).norm();
    check(
        err < 1e-8 && r.defect_k == 0 && secs < 5.0,
        format!("|lhs - arccosh 2| = {err:.2e}, k = {}, {secs:.3} s", r.defect_k),
    )
}

fn ac3() -> Outcome {
    let r = torus_mcshane_sum(&pants_222(), &SumOptions { per_term: true, ..opts(40, 1e-8) })
        .map_err(|e| e.to_string())?;
    let rhs_ok = (r.rhs[0] - 4.0244).abs() < 1e-4 && (r.rhs[1] - PI).abs() < 1e-12;
    let mut boundary: Vec<String> = Vec::new();
    let mut bad = 0;
    for t in r.per_term.as_deref().unwrap_or_default() {
        if (t.value[1] - PI).abs() < 1e-9 {
            boundary.push(t.label.clone());
        } else if !(t.value[1].abs() < 1e-9 && t.value[0] < 0.0) {
            bad += 1;
        }
    }
    boundary.sort();
    let expected = ["0/1", "1/0", "1/1"];
    check(
        r.residual < 1e-8 && rhs_ok && boundary == expected && bad == 0,
        format!("residual {:.2e}, boundary terms {boundary:?}, {bad} other terms not real negative", r.residual),
    )
}

fn ac4() -> Outcome {
    let c = 2.0 * 1f64.cosh();
    let t = TraceTriple::<f64>::real(c, c, -c);
    let r = markoff_sum(&t, &opts(40, 1e-8)).map_err(|e| e.to_string())?;
    let nu = boundary_half_length(&t).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for s in signed_slopes_up_to(20) {
        let tr = trace_of_slope(&t, s);
        let half = acosh_positive(-tr * 0.5);
        let a = frak_h(tr, nu).map_err(|e| e.to_string())?;
        let b = gap_g(nu, half, half).map_err(|e| e.to_string())?;
        worst = worst.max(wrap_strip(a - b).norm());
    }
    check(
        r.residual < 1e-8 && worst < 1e-9,
        format!("residual {:.2e}, worst term-wise difference {worst:.2e}", r.residual),
    )
}

fn ac5() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, g) in [("(3,3,4)", torus_334()), ("complex", complex_point())] {
        for cls in WeierstrassClass::ALL {
            let r = weierstrass_sum(&g, cls, 0, &opts(40, 1e-6)).map_err(|e| e.to_string())?;
            ok &= r.residual < 1e-6;
            parts.push(format!("{name} {cls} {:.1e}", r.residual));
        }
    }
    check(ok, parts.join(", "))
}

fn ac6() -> Outcome {
    let g = complex_point();
    if g.circles().is_none() {
        return Err("no certificate found".into());
    }
    let r = torus_mcshane_sum(&g, &opts(40, 1e-6)).map_err(|e| e.to_string())?;
    check(
        r.residual < 1e-6 && r.truncation_bound < 1e-6,
        format!("residual {:.2e}, truncation bound {:.2e}", r.residual, r.truncation_bound),
    )
}

fn ac7() -> Outcome {
    let g = torus_334();
    let cs = g.circles().ok_or("fixture not certified")?;
    let k = kappa(cs).map_err(|e| e.to_string())?;
    let words = Word::cyclically_reduced_up_to(2, 8);
    let mut violations = 0;
    let mut slack = f64::INFINITY;
    for w in &words {
        let l = complex_length(&word_matrix(&g, w)).map_err(|e| e.to_string())?;
        let margin = l.value().re - k * w.len() as f64;
        slack = slack.min(margin);
        if margin < 0.0 {
            violations += 1;
        }
    }
    check(
        violations == 0,
        format!("kappa {k:.6}, {} words, {violations} violations, min slack {slack:.3e}", words.len()),
    )
}

fn ac8() -> Outcome {
    let path = path_between(&torus_334(), &pants_222(), PathStrategy::Maskit, 200).map_err(|e| e.to_string())?;
    let words = Word::cyclically_reduced_up_to(2, 6);
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let pos = verify_positivity(&path, &words, 200, threads).map_err(|e| e.to_string())?;
    let back = path.reversed();
    let mut worst = 0.0f64;
    for w in &words {
        let there = pos.state.get(w).ok_or("missing branch")?;
        let again = continue_from(&back, w, 200, Some(there.unreduced())).map_err(|e| e.to_string())?;
        let start = continue_half_length(&path, w, 1).map_err(|e| e.to_string())?.trace[0].1;
        worst = worst.max((again.value() - start).norm());
    }
    check(
        pos.min_re > 0.0 && worst < 1e-9,
        format!("{} words, min re {:.4}, round trip error {worst:.2e}", words.len(), pos.min_re),
    )
}

fn ac9() -> Outcome {
    let spread = |reports: &[IdentityReport], m: Modulus| {
        reports.iter().map(|r| mod_defect(lhs(r), lhs(&reports[0]), m).1).fold(0.0, f64::max)
    };
    let sum = |g: &Group| -> Result<Vec<IdentityReport>, String> {
        lifts(g).iter().map(|h| torus_mcshane_sum(h, &opts(40, 1e-6)).map_err(|e| e.to_string())).collect()
    };
    let mut worst = spread(&sum(&torus_334())?, Modulus::TwoPiI);
    worst = worst.max(spread(&sum(&pants_222())?, Modulus::TwoPiI));
    for g in [torus_334(), complex_point()] {
        for cls in WeierstrassClass::ALL {
            let reports = lifts(&g)
                .iter()
                .map(|h| weierstrass_sum(h, cls, 0, &opts(40, 1e-6)).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            worst = worst.max(spread(&reports, Modulus::Pi));
        }
    }
    check(worst < 1e-9, format!("largest lift spread {worst:.2e}"))
}

fn ac10() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut z = || c64::<f64>(rng.gen_range(2.5..5.0), rng.gen_range(-1.0..1.0));
        let (x, y, w) = (z(), z(), z());
        let t = TraceTriple::new(x, y, w);
        let g = group_from_traces::<Quad>(convert(x), convert(y), convert(w)).map_err(|e| e.to_string())?;
        for s in slopes_up_to(12).into_iter().chain(signed_slopes_up_to(12)) {
            let fast = trace_of_slope(&t, s);
            let exact: Complex = convert(slope_matrix(&g, s).trace());
            worst = worst.max((fast - exact).norm() / exact.norm().max(1.0));
        }
    }
    let mut log_worst = 0.0f64;
    let mut evaluated = 0;
    let reduce = |d: Complex| (d - Complex::new(0.0, PI * (d.im / PI).round())).norm();
    for _ in 0..10_000 {
        let mut z = || c64::<f64>(rng.gen_range(0.05..4.0), rng.gen_range(-3.0..3.0));
        let (x, y, w) = (z(), z(), z());
        if let (Ok(a), Ok(b)) = (gap_g(x, y, w), gap_g_log(x, y, w)) {
            log_worst = log_worst.max(reduce(a - b) / a.norm().max(1.0));
            evaluated += 1;
        }
        if let (Ok(a), Ok(b)) = (gap_s(x, y, w), gap_s_log(x, y, w)) {
            log_worst = log_worst.max(reduce(a - b) / a.norm().max(1.0));
            evaluated += 1;
        }
    }
    check(
        worst < 1e-9 && log_worst < 1e-9,
        format!("trace oracle {worst:.2e}, log forms {log_worst:.2e} over {evaluated} evaluations"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{name} PASS [{secs:.2} s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{name} FAIL [{secs:.2} s] {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
