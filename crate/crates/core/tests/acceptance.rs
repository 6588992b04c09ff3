//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed here and never tuned per run.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use jmfrac::cfrdtm::{cfrdtm_solve, DEFAULT_ORDER};
use jmfrac::fracseries::{CoefFn, Exponent, FracSeries, Orders, TimeAxis};
use jmfrac::jm_model::{resolve_direction, ModelSpec, ReferenceSolution, WaveDirection};
use jmfrac::qhatm::{hbar_sweep, qhatm_solve, HomotopyConfig, DEFAULT_MAX_M};
use jmfrac::special::gamma;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};

use common::{brute_product_at, fd_derivative, matches_3_sig, wave_taylor_coefficients, GoldenTable};

const LAMBDA: f64 = 0.5;
const TABLE_RUNTIME: Duration = Duration::from_secs(10);
const RESIDUAL_RUNTIME: Duration = Duration::from_secs(1);
const RESIDUAL_TOL: f64 = 1e-9;
const WRONG_DIRECTION_GAP: f64 = 1e6;
const TAYLOR_REL_TOL: f64 = 1e-9;
const CROSS_ENGINE_TOL: f64 = 1e-12;
const JD_TOL: f64 = 1e-12;
const MUL_TOL: f64 = 1e-13;
const JET_FD_TOL: f64 = 1e-6;
const GAMMA_TOL: f64 = 1e-12;
const PROPERTY_CASES: u32 = 1000;
const RATIO_BAND: f64 = 0.25;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn reference() -> ReferenceSolution {
    ReferenceSolution::resolve(LAMBDA).expect("reference solution").0
}

fn abs_errors(v: &FracSeries, w: &FracSeries, reference: &ReferenceSolution, x: f64, t: f64) -> (f64, f64) {
    let vv = v.profile(x).unwrap().at(t).unwrap();
    let ww = w.profile(x).unwrap().at(t).unwrap();
    let (ve, we) = reference.value(x, t).unwrap();
    ((vv - ve).abs(), (ww - we).abs())
}

fn compare_classical(v: &FracSeries, w: &FracSeries, v_col: &str, w_col: &str) -> Outcome {
    let table = GoldenTable::load("classical_comparison.csv");
    let (iv, iw) = (table.column(v_col), table.column(w_col));
    let reference = reference();
    let mut misses = Vec::new();
    for (x, t, row) in &table.rows {
        let (ev, ew) = abs_errors(v, w, &reference, *x, *t);
        if !matches_3_sig(ev, row[iv]) {
            misses.push(format!("v({x},{t})={ev:.5e} want {:.5e}", row[iv]));
        }
        if !matches_3_sig(ew, row[iw]) {
            misses.push(format!("w({x},{t})={ew:.5e} want {:.5e}", row[iw]));
        }
    }
    let total = 2 * table.rows.len();
    if misses.is_empty() {
        Ok(format!("{total}/{total} values match to 3 significant figures"))
    } else {
        Err(format!("{}/{total} mismatches, first: {}", misses.len(), misses[0]))
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    match out {
        Ok(msg) if elapsed <= limit => Ok(format!("{msg}; {:.3} s", elapsed.as_secs_f64())),
        Ok(msg) => Err(format!("{msg}; runtime {:.3} s exceeds {:?}", elapsed.as_secs_f64(), limit)),
        Err(msg) => Err(msg),
    }
}

fn qhatm_at(alpha: f64, max_m: u32) -> (FracSeries, FracSeries) {
    let model = ModelSpec::new(LAMBDA, alpha, alpha).unwrap();
    let config = HomotopyConfig::new(1, -1.0, alpha, max_m).unwrap();
    qhatm_solve(&model, &config).unwrap()
}

fn cfrdtm_at(alpha: f64, order: u32) -> (FracSeries, FracSeries) {
    let model = ModelSpec::new(LAMBDA, alpha, alpha).unwrap();
    cfrdtm_solve(&model, order).unwrap()
}

fn criterion_1() -> Outcome {
    timed(TABLE_RUNTIME, || {
        let (v, w) = qhatm_at(1.0, DEFAULT_MAX_M);
        compare_classical(&v, &w, "v_qhatm", "w_qhatm")
    })
}

fn criterion_2() -> Outcome {
    timed(TABLE_RUNTIME, || {
        let (v, w) = cfrdtm_at(1.0, DEFAULT_ORDER);
        compare_classical(&v, &w, "v_cfrdtm", "w_cfrdtm")
    })
}

fn criterion_3() -> Outcome {
    const ALPHAS: [f64; 4] = [0.6, 0.75, 0.9, 1.0];
    let reference = reference();
    let tables = [
        ("cfrdtm_v_by_alpha.csv", "cfrdtm", 0usize),
        ("cfrdtm_w_by_alpha.csv", "cfrdtm", 1),
        ("qhatm_v_by_alpha.csv", "qhatm", 0),
        ("qhatm_w_by_alpha.csv", "qhatm", 1),
    ];
    let solutions: Vec<_> = ALPHAS.iter().map(|&a| (cfrdtm_at(a, DEFAULT_ORDER), qhatm_at(a, DEFAULT_MAX_M))).collect();
    let mut broken = Vec::new();
    let mut report = Vec::new();
    for (file, method, field) in tables {
        let table = GoldenTable::load(file);
        let mut matched = 0;
        let mut total = 0;
        for (x, t, row) in &table.rows {
            let errs: Vec<f64> = solutions
                .iter()
                .map(|(c, q)| {
                    let (v, w) = if method == "cfrdtm" { c } else { q };
                    let e = abs_errors(v, w, &reference, *x, *t);
                    if field == 0 {
                        e.0
                    } else {
                        e.1
                    }
                })
                .collect();
            if errs.windows(2).any(|p| p[1] >= p[0]) {
                broken.push(format!("{file} ({x},{t}): {errs:?}"));
            }
            for (i, &a) in ALPHAS.iter().enumerate() {
                let want = row[table.column(&format!("a{a}"))];
                total += 1;
                if matches_3_sig(errs[i], want) {
                    matched += 1;
                }
            }
        }
        report.push(format!("{file} {matched}/{total}"));
    }
    let summary = format!("numeric match rate: {}", report.join(", "));
    if broken.is_empty() {
        Ok(format!("errors decrease as alpha -> 1 at every tabulated point; {summary}"))
    } else {
        Err(format!("{} non-monotone points, first {}; {summary}", broken.len(), broken[0]))
    }
}

fn criterion_4() -> Outcome {
    timed(RESIDUAL_RUNTIME, || {
        let model = ModelSpec::classical(LAMBDA).unwrap();
        let res = resolve_direction(&model).unwrap();
        let Some(dir) = res.direction else {
            return Err(format!(
                "no direction passes: plus {:.2e}, minus {:.2e}",
                res.residual_plus, res.residual_minus
            ));
        };
        let (good, bad) = match dir {
            WaveDirection::Plus => (res.residual_plus, res.residual_minus),
            WaveDirection::Minus => (res.residual_minus, res.residual_plus),
        };
        let msg = format!("direction {dir}: residual {good:.2e}, wrong direction {bad:.2e}");
        if good <= RESIDUAL_TOL && bad > RESIDUAL_TOL && bad >= WRONG_DIRECTION_GAP * good {
            Ok(msg)
        } else {
            Err(msg)
        }
    })
}

fn criterion_5() -> Outcome {
    let (v, w) = cfrdtm_at(1.0, DEFAULT_ORDER);
    let mut worst: f64 = 0.0;
    for x in [0.2, 0.4, 0.6, 0.8, 1.0] {
        let oracle = wave_taylor_coefficients(LAMBDA, x);
        for (k, (ov, ow)) in oracle.iter().enumerate() {
            let combined = |s: &FracSeries| -> f64 {
                s.terms().filter(|(e, _)| e.lattice_order() as usize == k).map(|(_, c)| c.value(x).unwrap()).sum()
            };
            for (got, want) in [(combined(&v), *ov), (combined(&w), *ow)] {
                worst = worst.max((got - want).abs() / want.abs());
            }
        }
    }
    let msg = format!("max relative deviation {worst:.2e}");
    if worst <= TAYLOR_REL_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x6a6d);
    let mut worst: f64 = 0.0;
    for alpha in [0.65, 0.8, 1.0] {
        let (qv, qw) = qhatm_at(alpha, 1);
        let (cv, cw) = cfrdtm_at(alpha, 1);
        for _ in 0..10 {
            let x = rng.gen_range(-2.0..2.0);
            let t = rng.gen_range(0.0..=0.5);
            for (a, b) in [(&qv, &cv), (&qw, &cw)] {
                let d = a.evaluate(x, t, 1).unwrap() - b.evaluate(x, t, 1).unwrap();
                worst = worst.max(d.abs());
            }
        }
    }
    let msg = format!("max |difference| {worst:.2e} over 30 points");
    if worst <= CROSS_ENGINE_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: PROPERTY_CASES, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn criterion_7() -> Outcome {
    let jd = run_property(
        "J∘D",
        (0.05f64..=1.0, 0.05f64..=1.0, 1u32..6, 0u32..6, -3.0f64..3.0),
        |(alpha, beta, h, j, c)| {
            let orders = Orders::new(alpha, beta).unwrap();
            let s = FracSeries::monomial(orders, Exponent::new(h, j), CoefFn::constant(c));
            let back = s.caputo_d(TimeAxis::Alpha).unwrap().rl_integral().unwrap();
            let got = back.coefficient(Exponent::new(h, j)).and_then(|k| k.as_constant()).unwrap_or(0.0);
            prop_assert!(back.len() == 1 && (got - c).abs() <= JD_TOL * c.abs().max(1.0));
            Ok(())
        },
    );
    let term = (0u32..4, 0u32..4, -2.0f64..2.0);
    let mul = run_property(
        "series product",
        (
            0.1f64..=1.0,
            0.1f64..=1.0,
            prop::collection::vec(term.clone(), 1..6),
            prop::collection::vec(term, 1..6),
            0.0f64..1.0,
        ),
        |(alpha, beta, a, b, t)| {
            let orders = Orders::new(alpha, beta).unwrap();
            let build = |terms: &[(u32, u32, f64)]| {
                let mut s = FracSeries::zero(orders);
                for &(h, j, c) in terms {
                    s.insert(Exponent::new(h, j), CoefFn::constant(c));
                }
                s
            };
            let got = build(&a).mul(&build(&b), None).unwrap().profile(0.0).unwrap().at(t).unwrap();
            let want = brute_product_at(&a, &b, alpha, beta, t);
            let scale: f64 = a.iter().map(|p| p.2.abs()).sum::<f64>() * b.iter().map(|p| p.2.abs()).sum::<f64>();
            prop_assert!((got - want).abs() <= MUL_TOL * scale.max(1.0), "{got} vs {want}");
            Ok(())
        },
    );
    let jets = run_property(
        "jet vs finite differences",
        (0.2f64..1.5, -1.0f64..1.0, 0.2f64..1.5, -2.0f64..2.0),
        |(a, b, c, x)| {
            let f = |x: f64| (a * x + b).cosh().recip() * (c * x).tanh() + (0.3 * x).exp();
            let arg = CoefFn::x();
            let expr = arg
                .scale(a)
                .add(&CoefFn::constant(b))
                .sech()
                .mul(&arg.scale(c).tanh())
                .add(&arg.scale(0.3).elementary(jmfrac::jets::Elementary::Exp));
            let jet = expr.jet(x, 3).unwrap();
            for k in 0..=3 {
                let want = fd_derivative(&f, x, k, 5e-3);
                let got = jet.derivative_value(k);
                prop_assert!((got - want).abs() <= JET_FD_TOL * want.abs().max(1.0), "k={k}: {got} vs {want}");
            }
            Ok(())
        },
    );
    let gamma_rec = run_property("gamma recurrence", 0.05f64..40.0, |x| {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= GAMMA_TOL * lhs.abs(), "x={x}: {lhs} vs {rhs}");
        Ok(())
    });
    let failures: Vec<String> = [jd, mul, jets, gamma_rec].into_iter().filter_map(Result::err).collect();
    if failures.is_empty() {
        Ok(format!("4 suites x {PROPERTY_CASES} cases"))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_8() -> Outcome {
    let reference = reference();
    let (v, w) = qhatm_at(1.0, DEFAULT_MAX_M);
    let target = 2f64.powi(DEFAULT_MAX_M as i32 + 1);
    let mut ratios = Vec::new();
    for t in [0.4, 0.2, 0.1] {
        let e = abs_errors(&v, &w, &reference, 0.5, t).0;
        let e_half = abs_errors(&v, &w, &reference, 0.5, t / 2.0).0;
        ratios.push(e / e_half);
    }
    let msg = format!("ratios {ratios:.3?} vs target {target}");
    if ratios.iter().all(|r| (r / target - 1.0).abs() <= RATIO_BAND) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_9() -> Outcome {
    let model = ModelSpec::classical(LAMBDA).unwrap();
    let config = HomotopyConfig::new(1, -1.0, 1.0, DEFAULT_MAX_M).unwrap();
    let grid: Vec<f64> = (0..=32).map(|i| -1.8 + 0.05 * f64::from(i)).collect();
    let sweep = hbar_sweep(&model, &config, 1.0, 0.01, &grid).unwrap();
    let (best, slope) = (1..sweep.len() - 1)
        .map(|i| {
            let s = (sweep[i + 1].v - sweep[i - 1].v) / (sweep[i + 1].hbar - sweep[i - 1].hbar);
            (sweep[i].hbar, s.abs())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let msg = format!("minimum |slope| {slope:.2e} at hbar = {best:.2}");
    if (best + 1.0).abs() < 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("q-HATM classical table", criterion_1),
        ("CFRDTM classical table", criterion_2),
        ("fractional trend", criterion_3),
        ("exact-solution residual", criterion_4),
        ("classical Taylor oracle", criterion_5),
        ("cross-engine first order", criterion_6),
        ("property suites", criterion_7),
        ("order of accuracy", criterion_8),
        ("hbar-curve plateau", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("PASS criterion {} ({name}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {msg}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
