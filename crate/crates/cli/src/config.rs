//! Run configuration: `key=value` files, command-line overrides, per-command
//! defaults and a dump that parses back to the same configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use jmfrac::jm_model::{ModelSpec, WaveDirection};
use jmfrac::qhatm::HomotopyConfig;

use crate::CliError;

/// Every recognized key, in dump order.
pub const KEYS: [&str; 12] =
    ["method", "lambda", "alpha", "beta", "hbar", "n", "order", "x", "t", "direction", "plateau", "out"];

/// Keys whose value is a list (comma-separated values or `a:b:step` ranges).
const LIST_KEYS: [&str; 5] = ["alpha", "hbar", "n", "x", "t"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Table,
    HbarCurve,
    Surface,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Cfrdtm,
    Qhatm,
    Both,
}

impl Method {
    pub fn includes_cfrdtm(self) -> bool {
        matches!(self, Method::Cfrdtm | Method::Both)
    }

    pub fn includes_qhatm(self) -> bool {
        matches!(self, Method::Qhatm | Method::Both)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cfrdtm => "cfrdtm",
            Method::Qhatm => "qhatm",
            Method::Both => "both",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cfrdtm" => Ok(Method::Cfrdtm),
            "qhatm" => Ok(Method::Qhatm),
            "both" => Ok(Method::Both),
            _ => Err(format!("unknown method '{s}' (expected cfrdtm, qhatm or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionChoice {
    /// Resolve with the residual oracle.
    Auto,
    Fixed(WaveDirection),
}

impl fmt::Display for DirectionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionChoice::Auto => f.write_str("auto"),
            DirectionChoice::Fixed(d) => d.fmt(f),
        }
    }
}

impl FromStr for DirectionChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(DirectionChoice::Auto);
        }
        s.parse()
            .map(DirectionChoice::Fixed)
            .map_err(|_| format!("unknown direction '{s}' (expected auto, plus or minus)"))
    }
}

/// Raw `key -> values` before defaults and validation. List keys may hold
/// several entries, each a scalar, comma list or range.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, Vec<String>>,
}

impl RawConfig {
    /// Parse the `key=value` file format. Blank lines and `#` comments are
    /// skipped; a key may appear once.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value, got '{line}'", i + 1)))?;
            let key = key.trim();
            check_key(key)?;
            if raw.entries.contains_key(key) {
                return Err(CliError::Config(format!("line {}: duplicate key '{key}'", i + 1)));
            }
            raw.entries.insert(key.to_string(), vec![value.trim().to_string()]);
        }
        Ok(raw)
    }

    /// Set `key` to `values`, replacing anything already there.
    pub fn set(&mut self, key: &str, values: Vec<String>) -> Result<(), CliError> {
        check_key(key)?;
        if values.len() > 1 && !LIST_KEYS.contains(&key) {
            return Err(CliError::Config(format!("'{key}' takes a single value")));
        }
        self.entries.insert(key.to_string(), values);
        Ok(())
    }

    /// Entries of `overrides` replace entries of `self` key by key.
    pub fn overridden_by(mut self, overrides: RawConfig) -> Self {
        self.entries.extend(overrides.entries);
        self
    }

    fn scalar(&self, key: &str) -> Option<&str> {
        self.entries.get(key).and_then(|v| v.first()).map(String::as_str)
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(items) = self.entries.get(key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for item in items {
            for part in item.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                out.extend(parse_values(key, part)?);
            }
        }
        if out.is_empty() {
            return Err(CliError::Config(format!("'{key}' has no values")));
        }
        Ok(Some(out))
    }
}

fn check_key(key: &str) -> Result<(), CliError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(CliError::Config(format!("unknown key '{key}'")))
    }
}

fn parse_number(key: &str, s: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::Config(format!("'{key}': '{s}' is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("'{key}': '{s}' is not finite")))
    }
}

/// Round to 12 significant digits so range points such as `0.1 + 2·0.1`
/// land on their decimal values.
fn snap(v: f64) -> f64 {
    format!("{v:.11e}").parse().expect("formatted float parses")
}

/// A single value or an inclusive `a:b:step` range.
fn parse_values(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_number(key, single)?]),
        [a, b, step] => {
            let (a, b, step) = (parse_number(key, a)?, parse_number(key, b)?, parse_number(key, step)?);
            let span = (b - a) / step;
            if step == 0.0 || span < -1e-9 {
                return Err(CliError::Config(format!("'{key}': range '{s}' does not reach its end")));
            }
            let count = (span + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(CliError::Config(format!("'{key}': range '{s}' has too many points")));
            }
            Ok((0..count).map(|i| snap(a + i as f64 * step)).collect())
        }
        _ => Err(CliError::Config(format!("'{key}': expected a number or a:b:step, got '{s}'"))),
    }
}

/// Effective configuration for one command, with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub method: Method,
    pub lambda: f64,
    pub alpha: Vec<f64>,
    /// `None` means "same as α".
    pub beta: Option<f64>,
    pub hbar: Vec<f64>,
    pub n: Vec<u32>,
    /// Truncation order; `None` selects each engine's default.
    pub order: Option<u32>,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub direction: DirectionChoice,
    /// Mark the flattest point of each ħ-curve.
    pub plateau: bool,
    pub out: Option<PathBuf>,
}

fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    parse_values("default", &format!("{a}:{b}:{step}")).expect("default grid")
}

fn single<T: Copy>(key: &str, values: &[T], command: Command) -> Result<T, CliError> {
    match values {
        [v] => Ok(*v),
        _ => Err(CliError::Config(format!("{command:?} needs exactly one value of '{key}', got {}", values.len()))),
    }
}

impl RunConfig {
    /// Apply per-command defaults to `raw` and validate the result.
    pub fn resolve(command: Command, raw: &RawConfig) -> Result<Self, CliError> {
        let method = match raw.scalar("method") {
            Some(s) => s.parse().map_err(CliError::Config)?,
            None => match command {
                Command::Table | Command::Validate => Method::Both,
                Command::Surface => Method::Cfrdtm,
                Command::HbarCurve => Method::Qhatm,
            },
        };
        let lambda = raw.scalar("lambda").map(|s| parse_number("lambda", s)).transpose()?.unwrap_or(0.5);
        let beta = raw.scalar("beta").map(|s| parse_number("beta", s)).transpose()?;
        let order = raw
            .scalar("order")
            .map(|s| s.parse::<u32>().map_err(|_| CliError::Config(format!("'order': '{s}' is not a whole number"))))
            .transpose()?;
        let direction = match raw.scalar("direction") {
            Some(s) => s.parse().map_err(CliError::Config)?,
            None => DirectionChoice::Auto,
        };
        let plateau = match raw.scalar("plateau") {
            None | Some("false") => false,
            Some("true") => true,
            Some(s) => return Err(CliError::Config(format!("'plateau': expected true or false, got '{s}'"))),
        };
        let n = match raw.list("n")? {
            Some(values) => values
                .into_iter()
                .map(|v| {
                    if v.fract() == 0.0 && v >= 1.0 && v <= f64::from(u32::MAX) {
                        Ok(v as u32)
                    } else {
                        Err(CliError::Config(format!("'n': {v} is not a positive whole number")))
                    }
                })
                .collect::<Result<_, _>>()?,
            None => vec![1],
        };
        let (default_x, default_t, default_hbar) = match command {
            Command::HbarCurve => (vec![1.0], vec![0.01], grid(-1.8, -0.2, 0.05)),
            Command::Surface => (grid(0.5, 2.0, 0.15), grid(0.0, 1.0, 0.1), vec![-1.0]),
            Command::Table | Command::Validate => (grid(0.2, 1.0, 0.2), grid(0.1, 0.9, 0.1), vec![-1.0]),
        };
        let config = RunConfig {
            command,
            method,
            lambda,
            alpha: raw.list("alpha")?.unwrap_or_else(|| vec![1.0]),
            beta,
            hbar: raw.list("hbar")?.unwrap_or(default_hbar),
            n,
            order,
            x: raw.list("x")?.unwrap_or(default_x),
            t: raw.list("t")?.unwrap_or(default_t),
            direction,
            plateau,
            out: raw.scalar("out").map(PathBuf::from),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |e: &dyn fmt::Display| CliError::Config(e.to_string());
        for &alpha in &self.alpha {
            ModelSpec::new(self.lambda, alpha, self.beta.unwrap_or(alpha)).map_err(|e| bad(&e))?;
            for &n in &self.n {
                for &hbar in &self.hbar {
                    HomotopyConfig::new(n, hbar, alpha, self.qhatm_order()).map_err(|e| bad(&e))?;
                }
            }
        }
        if let Some(t) = self.t.iter().find(|t| **t < 0.0) {
            return Err(CliError::Config(format!("'t': negative time {t}")));
        }
        match self.command {
            Command::Table | Command::Surface => {
                single("alpha", &self.alpha, self.command)?;
                single("hbar", &self.hbar, self.command)?;
                single("n", &self.n, self.command)?;
                if self.command == Command::Surface && self.method == Method::Both {
                    return Err(CliError::Config("surface needs method cfrdtm or qhatm".into()));
                }
            }
            Command::HbarCurve => {
                single("x", &self.x, self.command)?;
                single("t", &self.t, self.command)?;
                if self.method != Method::Qhatm {
                    return Err(CliError::Config("hbar-curve needs method qhatm".into()));
                }
            }
            Command::Validate => {}
        }
        Ok(())
    }

    pub fn cfrdtm_order(&self) -> u32 {
        self.order.unwrap_or(jmfrac::cfrdtm::DEFAULT_ORDER)
    }

    pub fn qhatm_order(&self) -> u32 {
        self.order.unwrap_or(jmfrac::qhatm::DEFAULT_MAX_M)
    }

    /// Model for order `alpha`, with `β` defaulting to `α`.
    pub fn model(&self, alpha: f64) -> ModelSpec {
        ModelSpec::new(self.lambda, alpha, self.beta.unwrap_or(alpha)).expect("validated")
    }

    pub fn homotopy(&self, alpha: f64, n: u32, hbar: f64) -> HomotopyConfig {
        HomotopyConfig::new(n, hbar, alpha, self.qhatm_order()).expect("validated")
    }

    /// The configuration in file format. Parsing it back with the same
    /// command yields an identical configuration.
    pub fn dump(&self) -> String {
        fn join<T: ToString>(values: &[T]) -> String {
            values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        let mut lines = vec![
            format!("method={}", self.method),
            format!("lambda={}", self.lambda),
            format!("alpha={}", join(&self.alpha)),
        ];
        if let Some(beta) = self.beta {
            lines.push(format!("beta={beta}"));
        }
        lines.push(format!("hbar={}", join(&self.hbar)));
        lines.push(format!("n={}", join(&self.n)));
        if let Some(order) = self.order {
            lines.push(format!("order={order}"));
        }
        lines.push(format!("x={}", join(&self.x)));
        lines.push(format!("t={}", join(&self.t)));
        lines.push(format!("direction={}", self.direction));
        lines.push(format!("plateau={}", self.plateau));
        if let Some(out) = &self.out {
            lines.push(format!("out={}", out.display()));
        }
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }
}
