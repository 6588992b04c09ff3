//! CSV producers. Every numeric field is written in scientific notation
//! with six significant digits; rows come out in input order regardless of
//! how the parallel evaluation finishes.

use rayon::prelude::*;

use jmfrac::cfrdtm::cfrdtm_solve;
use jmfrac::fracseries::{profile_many, FracSeries, SeriesError, SeriesProfile};
use jmfrac::jets::JetError;
use jmfrac::jm_model::{ModelSpec, ReferenceSolution};
use jmfrac::qhatm::{hbar_sweep, qhatm_solve};

use crate::config::{DirectionChoice, Method, RunConfig};
use crate::CliError;

/// Six significant digits, scientific.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.5e}")
}

fn csv(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reference solution for the configured direction choice.
pub fn reference(config: &RunConfig) -> Result<ReferenceSolution, CliError> {
    match config.direction {
        DirectionChoice::Auto => Ok(ReferenceSolution::resolve(config.lambda).map_err(CliError::compute)?.0),
        DirectionChoice::Fixed(direction) => Ok(ReferenceSolution::TravelingWave {
            model: ModelSpec::classical(config.lambda).map_err(CliError::compute)?,
            direction,
        }),
    }
}

/// Column-name tag of the reference errors are measured against.
pub fn reference_tag(reference: &ReferenceSolution) -> &'static str {
    match reference {
        ReferenceSolution::TravelingWave { .. } => "classical_exact",
        ReferenceSolution::ClassicalSeries { .. } => "classical_series",
    }
}

/// Row status for a failed point evaluation.
fn status_of(e: &SeriesError) -> &'static str {
    match e {
        SeriesError::Jet(JetError::Pole { .. }) => "pole",
        _ => "error",
    }
}

struct Solution {
    name: &'static str,
    v: FracSeries,
    w: FracSeries,
}

fn solutions(config: &RunConfig, methods: Method) -> Result<Vec<Solution>, CliError> {
    let alpha = config.alpha[0];
    let model = config.model(alpha);
    let mut out = Vec::new();
    if methods.includes_cfrdtm() {
        let (v, w) = cfrdtm_solve(&model, config.cfrdtm_order()).map_err(CliError::compute)?;
        out.push(Solution { name: "cfrdtm", v, w });
    }
    if methods.includes_qhatm() {
        let homotopy = config.homotopy(alpha, config.n[0], config.hbar[0]);
        let (v, w) = qhatm_solve(&model, &homotopy).map_err(CliError::compute)?;
        out.push(Solution { name: "qhatm", v, w });
    }
    Ok(out)
}

/// Profiles of every solution field at `x`: `[v₁, w₁, v₂, w₂, …]`.
fn profiles_at(solutions: &[Solution], x: f64) -> Result<Vec<SeriesProfile>, SeriesError> {
    let series: Vec<&FracSeries> = solutions.iter().flat_map(|s| [&s.v, &s.w]).collect();
    profile_many(&series, x)
}

/// For each `x`, one row per `t`, evaluated in parallel over `x`.
fn grid_rows(
    config: &RunConfig,
    solutions: &[Solution],
    reference: &ReferenceSolution,
    width: usize,
    row: impl Fn(f64, f64, &[f64], (f64, f64)) -> Vec<String> + Sync,
) -> Vec<Vec<String>> {
    config
        .x
        .par_iter()
        .map(|&x| {
            let profiles = profiles_at(solutions, x);
            config
                .t
                .iter()
                .map(|&t| {
                    let values: Result<Vec<f64>, SeriesError> = match &profiles {
                        Ok(p) => p.iter().map(|p| p.at(t)).collect(),
                        Err(e) => Err(e.clone()),
                    };
                    let exact = reference.value(x, t);
                    match (values, exact) {
                        (Ok(values), Ok(exact)) => {
                            let mut r = row(x, t, &values, exact);
                            r.push("ok".into());
                            r
                        }
                        (Err(e), _) => failed_row(x, t, width, status_of(&e)),
                        (_, Err(_)) => failed_row(x, t, width, "error"),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn failed_row(x: f64, t: f64, width: usize, status: &str) -> Vec<String> {
    let mut r = vec![fmt_num(x), fmt_num(t)];
    r.extend(std::iter::repeat_n("nan".to_string(), width));
    r.push(status.into());
    r
}

/// Absolute errors of each requested method against the reference.
pub fn cmd_table(config: &RunConfig) -> Result<String, CliError> {
    let sols = solutions(config, config.method)?;
    let reference = reference(config)?;
    let tag = reference_tag(&reference);
    let mut header = vec!["x".to_string(), "t".to_string()];
    for field in ["v", "w"] {
        for s in &sols {
            header.push(format!("abs_err_{field}_{}_vs_{tag}", s.name));
        }
    }
    header.push("status".into());
    let k = sols.len();
    let rows = grid_rows(config, &sols, &reference, 2 * k, |x, t, values, (ve, we)| {
        let mut r = vec![fmt_num(x), fmt_num(t)];
        r.extend((0..k).map(|i| fmt_num((values[2 * i] - ve).abs())));
        r.extend((0..k).map(|i| fmt_num((values[2 * i + 1] - we).abs())));
        r
    });
    Ok(csv(&header, rows))
}

/// Solution values, reference values and errors over an `x × t` grid.
pub fn cmd_surface(config: &RunConfig) -> Result<String, CliError> {
    let sols = solutions(config, config.method)?;
    let reference = reference(config)?;
    let tag = reference_tag(&reference);
    let name = sols[0].name;
    let header: Vec<String> = [
        "x".to_string(),
        "t".to_string(),
        format!("v_{name}"),
        format!("w_{name}"),
        format!("v_{tag}"),
        format!("w_{tag}"),
        format!("abs_err_v_vs_{tag}"),
        format!("abs_err_w_vs_{tag}"),
        "status".to_string(),
    ]
    .into();
    let rows = grid_rows(config, &sols, &reference, 6, |x, t, values, (ve, we)| {
        let (v, w) = (values[0], values[1]);
        [x, t, v, w, ve, we, (v - ve).abs(), (w - we).abs()].into_iter().map(fmt_num).collect()
    });
    Ok(csv(&header, rows))
}

/// q-HATM values over the ħ grid for every configured `(α, n)` pair.
pub fn cmd_hbar_curve(config: &RunConfig) -> Result<String, CliError> {
    let (x, t) = (config.x[0], config.t[0]);
    let pairs: Vec<(f64, u32)> = config.alpha.iter().flat_map(|&a| config.n.iter().map(move |&n| (a, n))).collect();
    let curves = pairs
        .par_iter()
        .map(|&(alpha, n)| {
            let homotopy = config.homotopy(alpha, n, config.hbar[0]);
            hbar_sweep(&config.model(alpha), &homotopy, x, t, &config.hbar).map_err(CliError::compute)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut header: Vec<String> = ["hbar", "alpha", "n", "v_value", "w_value"].map(String::from).into();
    if config.plateau {
        header.push("plateau".into());
    }
    let mut rows = Vec::new();
    for ((alpha, n), curve) in pairs.iter().zip(&curves) {
        let flattest = flattest_point(&curve.iter().map(|p| (p.hbar, p.v)).collect::<Vec<_>>());
        for (i, p) in curve.iter().enumerate() {
            let mut r = vec![fmt_num(p.hbar), fmt_num(*alpha), n.to_string(), fmt_num(p.v), fmt_num(p.w)];
            if config.plateau {
                r.push(if Some(i) == flattest { "1" } else { "0" }.into());
            }
            rows.push(r);
        }
    }
    Ok(csv(&header, rows))
}

/// Index of the interior point with the smallest central-difference slope.
pub fn flattest_point(curve: &[(f64, f64)]) -> Option<usize> {
    (1..curve.len().saturating_sub(1))
        .map(|i| {
            let slope = (curve[i + 1].1 - curve[i - 1].1) / (curve[i + 1].0 - curve[i - 1].0);
            (i, slope.abs())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}
