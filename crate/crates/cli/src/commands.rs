use std::fs;
use std::io::Read;
use std::path::Path;

use mcshane::continuation::{path_between, verify_positivity};
use mcshane::curves::{signed_slopes_up_to, WeierstrassClass};
use mcshane::identities::{
    gap_endpoints, general_mcshane_sum, markoff_sum, pants_trivial_identity, torus_mcshane_sum,
    weierstrass_sum, IdentityReport, SumOptions,
};
use mcshane::io::{parse_decomposition, parse_group, parse_path, write_gaps_csv, write_traces_csv, GroupDoc};
use mcshane::scalar::{c64, cx, to_pair};
use mcshane::schottky::{attempt_classical_certificate, change_lift, kappa};
use mcshane::{Cx, MarkedSchottkyGroup, PathStrategy, Scalar, TraceTriple, Word};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::output::{CliError, Outcome};
use crate::{ClassArg, Command, EngineArgs, GroupArgs, OutputArgs, StrategyArg};

type CliResult<T> = Result<T, CliError>;

fn read_source(src: &str) -> CliResult<String> {
    let mut text = String::new();
    if src == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::config(format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(src).map_err(|e| CliError::config(format!("{src}: {e}")))?;
    }
    Ok(text)
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Parse failures in user input are configuration errors.
fn config(e: mcshane::Error) -> CliError {
    CliError::config(e.to_string())
}

fn parse_signs(s: &str) -> CliResult<Vec<bool>> {
    s.split(',')
        .map(|t| match t.trim() {
            "+" | "1" | "+1" => Ok(false),
            "-" | "-1" => Ok(true),
            other => Err(CliError::config(format!("bad lift sign {other:?}"))),
        })
        .collect()
}

fn parse_reals<const N: usize>(s: &str, what: &str) -> CliResult<[f64; N]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::config(format!("{what}: {e}")))?;
    v.try_into()
        .map_err(|_| CliError::config(format!("{what}: expected {N} comma separated numbers")))
}

/// `re` or `re:im`.
fn parse_complex(s: &str) -> CliResult<[f64; 2]> {
    let bad = |e: std::num::ParseFloatError| CliError::config(format!("bad number {s:?}: {e}"));
    match s.trim().split_once(':') {
        Some((re, im)) => Ok([re.trim().parse().map_err(bad)?, im.trim().parse().map_err(bad)?]),
        None => Ok([s.trim().parse().map_err(bad)?, 0.0]),
    }
}

fn check_engine(e: &EngineArgs) -> CliResult<()> {
    if e.max_sum < 2 {
        return Err(CliError::config(format!("--max-sum must be at least 2, got {}", e.max_sum)));
    }
    if !(e.tol > 0.0) || !e.tol.is_finite() {
        return Err(CliError::config(format!("--tol must be positive, got {}", e.tol)));
    }
    if e.threads == 0 {
        return Err(CliError::config("--threads must be at least 1"));
    }
    Ok(())
}

fn options(e: &EngineArgs, out: &OutputArgs) -> SumOptions {
    SumOptions {
        max_sum: e.max_sum,
        tol: e.tol,
        threads: e.threads,
        per_term: out.per_term,
    }
}

struct Loaded<T: Scalar> {
    group: MarkedSchottkyGroup<T>,
    lift: Vec<bool>,
    certificate: &'static str,
}

/// Reads the group, applies the lift and makes sure a circle certificate
/// is attached (searching for one if the input has none).
fn load_group<T: Scalar>(args: &GroupArgs) -> CliResult<Loaded<T>> {
    let text = match (&args.group, &args.group_json) {
        (Some(src), None) => read_source(src)?,
        (None, Some(json)) => json.clone(),
        _ => return Err(CliError::config("give exactly one of --group or --group-json")),
    };
    let g: MarkedSchottkyGroup<T> = parse_group(&text).map_err(config)?;
    let lift = match &args.lift {
        Some(s) => parse_signs(s)?,
        None => vec![false; g.rank()],
    };
    let g = change_lift(&g, &lift).map_err(config)?;
    let (group, certificate) = if g.circles().is_some() {
        (g, "given")
    } else if let Some(cs) = attempt_classical_certificate(&g) {
        (g.with_circles(cs)?, "found")
    } else if args.force {
        (g, "none")
    } else {
        return Err(mcshane::Error::NotCertified.into());
    };
    Ok(Loaded {
        group,
        lift,
        certificate,
    })
}

fn lift_value(lift: &[bool]) -> Value {
    Value::from(lift.iter().map(|&s| if s { "-" } else { "+" }).collect::<Vec<_>>())
}

fn annotate<T: Scalar>(r: IdentityReport, loaded: &Loaded<T>) -> IdentityReport {
    r.choose("lift", lift_value(&loaded.lift))
        .choose("certificate", loaded.certificate)
        .choose("precision", T::precision_name())
}

fn report_outcome(r: IdentityReport) -> CliResult<Outcome> {
    let passed = r.passes();
    Ok(Outcome {
        report: Some(serde_json::to_value(&r).map_err(mcshane::Error::from)?),
        csv: None,
        passed,
    })
}

fn with_terms_csv(mut o: Outcome, r: &IdentityReport, out: &OutputArgs) -> CliResult<Outcome> {
    if out.csv.is_some() {
        let mut buf = Vec::new();
        let terms = r.per_term.clone().unwrap_or_default();
        mcshane::io::write_terms_csv(&terms, &mut buf)?;
        o.csv = Some(String::from_utf8_lossy(&buf).into_owned());
    }
    Ok(o)
}

fn classes(c: ClassArg) -> Vec<WeierstrassClass> {
    match c {
        ClassArg::Oddodd => vec![WeierstrassClass::OddOdd],
        ClassArg::Oddeven => vec![WeierstrassClass::OddEven],
        ClassArg::Evenodd => vec![WeierstrassClass::EvenOdd],
        ClassArg::All => vec![WeierstrassClass::OddOdd, WeierstrassClass::OddEven, WeierstrassClass::EvenOdd],
    }
}

pub fn run<T: Scalar>(cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::VerifyTorus { group, engine, output } => {
            check_engine(engine)?;
            let loaded = load_group::<T>(group)?;
            let r = torus_mcshane_sum(&loaded.group, &options(engine, output))?;
            let r = annotate(r, &loaded);
            let o = report_outcome(r.clone())?;
            with_terms_csv(o, &r, output)
        }
        Command::VerifyWeierstrass {
            group,
            engine,
            output,
            class,
            quarter,
        } => {
            check_engine(engine)?;
            if *quarter > 1 {
                return Err(CliError::config(format!("--quarter must be 0 or 1, got {quarter}")));
            }
            let loaded = load_group::<T>(group)?;
            let opts = options(engine, output);
            let mut reports = Vec::new();
            for cls in classes(*class) {
                let r = weierstrass_sum(&loaded.group, cls, *quarter, &opts)?;
                reports.push(annotate(r, &loaded));
            }
            if let [r] = reports.as_slice() {
                let o = report_outcome(r.clone())?;
                return with_terms_csv(o, r, output);
            }
            let passed = reports.iter().all(|r| r.passes());
            let mut terms = Vec::new();
            for r in &reports {
                terms.extend(r.per_term.clone().unwrap_or_default());
            }
            let report = json!({
                "schema": 1,
                "identity": "weierstrass_all",
                "passed": passed,
                "reports": reports,
            });
            let mut o = Outcome {
                report: Some(report),
                csv: None,
                passed,
            };
            if output.csv.is_some() {
                let mut buf = Vec::new();
                mcshane::io::write_terms_csv(&terms, &mut buf)?;
                o.csv = Some(String::from_utf8_lossy(&buf).into_owned());
            }
            Ok(o)
        }
        Command::VerifyPantsTrivial {
            lengths,
            count,
            cone,
            seed,
            tol,
            output: _,
        } => {
            if !(*tol > 0.0) {
                return Err(CliError::config(format!("--tol must be positive, got {tol}")));
            }
            let run = |l: [[f64; 2]; 3]| -> CliResult<IdentityReport> {
                let [a, b, c] = l.map(|p| c64::<T>(p[0], p[1]));
                Ok(pants_trivial_identity(a, b, c, *tol)?.choose("precision", T::precision_name()))
            };
            if let Some(s) = lengths {
                let parts: Vec<[f64; 2]> = s.split(',').map(parse_complex).collect::<CliResult<_>>()?;
                let l: [[f64; 2]; 3] = parts
                    .try_into()
                    .map_err(|_| CliError::config("--lengths: expected three entries"))?;
                return report_outcome(run(l)?);
            }
            let mut rng = StdRng::seed_from_u64(*seed);
            let mut reports = Vec::with_capacity(count + cone);
            for _ in 0..*count {
                let l = [0; 3].map(|_| [rng.gen_range(0.1..8.0), 0.0]);
                reports.push(run(l)?);
            }
            for _ in 0..*cone {
                let theta = std::f64::consts::PI * (1.0 - rng.gen::<f64>());
                let mut l = [[rng.gen_range(0.1..8.0), 0.0], [rng.gen_range(0.1..8.0), 0.0], [0.0, theta]];
                l.rotate_left(rng.gen_range(0..3));
                reports.push(run(l)?);
            }
            let passed = reports.iter().all(|r| r.passes());
            let max_residual = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
            let report = json!({
                "schema": 1,
                "identity": "pants_trivial_sweep",
                "cases": reports.len(),
                "seed": seed,
                "max_residual": max_residual,
                "tol": tol,
                "passed": passed,
                "precision": T::precision_name(),
                "reports": reports,
            });
            Ok(Outcome {
                report: Some(report),
                csv: None,
                passed,
            })
        }
        Command::VerifyMarkoff {
            group,
            traces,
            engine,
            output,
        } => {
            check_engine(engine)?;
            let opts = options(engine, output);
            let r = match traces {
                Some(s) => {
                    let [x, y, z] = parse_reals::<3>(s, "--traces")?;
                    let t = TraceTriple::<T>::new(cx(T::c(x), T::zero()), cx(T::c(y), T::zero()), cx(T::c(z), T::zero()));
                    markoff_sum(&t, &opts)?
                        .choose("source", "traces")
                        .choose("precision", T::precision_name())
                }
                None => {
                    let loaded = load_group::<T>(group)?;
                    let t = TraceTriple::of_group(&loaded.group)?;
                    annotate(markoff_sum(&t, &opts)?, &loaded)
                }
            };
            let o = report_outcome(r.clone())?;
            with_terms_csv(o, &r, output)
        }
        Command::VerifyGeneral {
            group,
            decomposition,
            engine,
            output,
        } => {
            check_engine(engine)?;
            let pd = parse_decomposition(&read_file(decomposition)?).map_err(config)?;
            let loaded = load_group::<T>(group)?;
            let r = general_mcshane_sum(&loaded.group, &pd, &options(engine, output))?;
            let r = annotate(r, &loaded);
            let o = report_outcome(r.clone())?;
            with_terms_csv(o, &r, output)
        }
        Command::Certify { group, output: _ } => {
            let mut args = group.clone();
            args.force = true;
            let loaded = load_group::<T>(&args)?;
            let g = &loaded.group;
            let (certified, k) = match g.circles() {
                Some(cs) => (true, Some(kappa(cs)?.f())),
                None => (false, None),
            };
            let report = json!({
                "schema": 1,
                "certified": certified,
                "certificate": loaded.certificate,
                "kappa": k,
                "lift": lift_value(&loaded.lift),
                "precision": T::precision_name(),
                "group": GroupDoc::from_group(g),
            });
            Ok(Outcome {
                report: Some(report),
                csv: None,
                passed: certified,
            })
        }
        Command::Deform {
            group,
            target,
            path,
            strategy,
            samples,
            word_len,
            engine,
            output,
        } => {
            check_engine(engine)?;
            if *samples < 2 {
                return Err(CliError::config("--samples must be at least 2"));
            }
            if *word_len == 0 {
                return Err(CliError::config("--word-len must be at least 1"));
            }
            let start = load_group::<T>(group)?;
            let (path, strategy_name) = match (target, path) {
                (Some(file), None) => {
                    let g1: MarkedSchottkyGroup<T> = parse_group(&read_file(file)?).map_err(config)?;
                    let g1 = change_lift(&g1, &start.lift).map_err(config)?;
                    let s = match strategy {
                        StrategyArg::Direct => PathStrategy::Direct,
                        StrategyArg::Maskit => PathStrategy::Maskit,
                    };
                    let name = match strategy {
                        StrategyArg::Direct => "direct",
                        StrategyArg::Maskit => "maskit",
                    };
                    (path_between(&start.group, &g1, s, *samples)?, name)
                }
                (None, Some(file)) => (parse_path::<T>(&read_file(file)?).map_err(config)?, "file"),
                _ => return Err(CliError::config("give exactly one of --target or --path")),
            };
            let words = Word::cyclically_reduced_up_to(path.rank(), *word_len);
            let pos = verify_positivity(&path, &words, *samples, engine.threads)?;
            let end = path.group_at(T::one())?;
            let end = change_lift(&end, &start.lift).map_err(config)?;
            let end = match attempt_classical_certificate(&end) {
                Some(cs) => end.with_circles(cs)?,
                None => end,
            };
            let opts = options(engine, output);
            let endpoint = if end.rank() == 2 {
                Some(annotate(torus_mcshane_sum(&end, &opts)?, &start))
            } else {
                None
            };
            let passed = endpoint.as_ref().is_none_or(|r| r.passes());
            let branches: serde_json::Map<String, Value> = pos
                .state
                .iter()
                .filter(|(w, _)| w.len() <= 2)
                .map(|(w, h)| (w.to_string(), json!({ "value": to_pair(h.value), "branch_offset": h.branch_offset })))
                .collect();
            let report = json!({
                "schema": 1,
                "identity": "deformation",
                "strategy": strategy_name,
                "waypoints": path.waypoints().len(),
                "samples": pos.samples,
                "words": pos.words,
                "min_re": pos.min_re.f(),
                "argmin_word": pos.argmin_word.to_string(),
                "branches": branches,
                "endpoint": endpoint,
                "passed": passed,
                "precision": T::precision_name(),
            });
            let mut o = Outcome {
                report: Some(report),
                csv: None,
                passed,
            };
            if output.csv.is_some() {
                let short: Vec<Word> = words.into_iter().filter(|w| w.len() <= 2).collect();
                let runs = short
                    .iter()
                    .map(|w| Ok((w.clone(), mcshane::continuation::continue_half_length(&path, w, *samples)?)))
                    .collect::<mcshane::Result<Vec<_>>>()?;
                let mut buf = Vec::new();
                mcshane::io::write_continuation_csv(&runs, &mut buf)?;
                o.csv = Some(String::from_utf8_lossy(&buf).into_owned());
            }
            Ok(o)
        }
        Command::EmitGaps { group, max_sum, output: _ } => {
            if *max_sum < 1 {
                return Err(CliError::config("--max-sum must be at least 1"));
            }
            let mut args = group.clone();
            args.force = true;
            let loaded = load_group::<T>(&args)?;
            let gaps = signed_slopes_up_to(*max_sum)
                .into_iter()
                .map(|s| gap_endpoints(&loaded.group, s))
                .collect::<mcshane::Result<Vec<_>>>()?;
            let mut buf = Vec::new();
            write_gaps_csv(&gaps, &mut buf)?;
            Ok(Outcome {
                report: None,
                csv: Some(String::from_utf8_lossy(&buf).into_owned()),
                passed: true,
            })
        }
        Command::EmitTraces {
            group,
            traces,
            max_sum,
            output: _,
        } => {
            if *max_sum < 1 {
                return Err(CliError::config("--max-sum must be at least 1"));
            }
            let t: TraceTriple<T> = match traces {
                Some(s) => {
                    let [x, y, z] = parse_reals::<3>(s, "--traces")?;
                    let re = |v: f64| -> Cx<T> { cx(T::c(v), T::zero()) };
                    TraceTriple::new(re(x), re(y), re(z))
                }
                None => {
                    let mut args = group.clone();
                    args.force = true;
                    TraceTriple::of_group(&load_group::<T>(&args)?.group)?
                }
            };
            let mut buf = Vec::new();
            write_traces_csv(&t, *max_sum, &mut buf)?;
            Ok(Outcome {
                report: None,
                csv: Some(String::from_utf8_lossy(&buf).into_owned()),
                passed: true,
            })
        }
    }
}
