//! The coupled Jaulent–Miodek system
//!
//! ```text
//! D_t^α v + v_xxx + 3/2 w w_xxx + 9/2 w_x w_xx − 6 v v_x − 6 v w w_x − 3/2 v_x w² = 0
//! D_t^β w + w_xxx − 6 v_x w − 6 v w_x − 15/2 w_x w² = 0
//! ```
//!
//! with `v(x,0) = λ²/8 (1 − 4 sech²(λx/2))`, `w(x,0) = λ sech(λx/2)`.
//!
//! The spatial sides are written once against [`FieldAlgebra`] and reused
//! for plain coefficient functions, for fractional series, and for the
//! q-polynomials of the homotopy engine.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cfrdtm;
use crate::fracseries::{CoefFn, FracSeries, Orders, SeriesError, TimeAxis};
use crate::jets::JetError;

/// Largest exact-solution residual accepted when resolving the wave direction.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("wave parameter λ must be finite and nonzero, got {0}")]
    InvalidLambda(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("unknown wave direction '{0}' (expected plus or minus)")]
    UnknownDirection(String),
    #[error("series engine: {0}")]
    Engine(Box<cfrdtm::CfrdtmError>),
}

impl From<JetError> for ModelError {
    fn from(e: JetError) -> Self {
        ModelError::Series(SeriesError::Jet(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    lambda: f64,
    orders: Orders,
}

impl ModelSpec {
    pub fn new(lambda: f64, alpha: f64, beta: f64) -> Result<Self, ModelError> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(ModelError::InvalidLambda(lambda));
        }
        Ok(Self { lambda, orders: Orders::new(alpha, beta)? })
    }

    /// Classical (integer-order) system.
    pub fn classical(lambda: f64) -> Result<Self, ModelError> {
        Self::new(lambda, 1.0, 1.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.orders.alpha()
    }

    pub fn beta(&self) -> f64 {
        self.orders.beta()
    }

    pub fn orders(&self) -> Orders {
        self.orders
    }
}

/// Sign of the `λ²t/2` shift in the traveling-wave argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveDirection {
    Plus,
    Minus,
}

impl WaveDirection {
    pub fn sign(self) -> f64 {
        match self {
            WaveDirection::Plus => 1.0,
            WaveDirection::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            WaveDirection::Plus => WaveDirection::Minus,
            WaveDirection::Minus => WaveDirection::Plus,
        }
    }
}

impl fmt::Display for WaveDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveDirection::Plus => "plus",
            WaveDirection::Minus => "minus",
        })
    }
}

impl FromStr for WaveDirection {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" | "+" => Ok(WaveDirection::Plus),
            "minus" | "-" => Ok(WaveDirection::Minus),
            other => Err(ModelError::UnknownDirection(other.to_string())),
        }
    }
}

/// Ring-like operations needed to write the spatial operators once.
pub trait FieldAlgebra: Clone {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// `∂^k/∂x^k`.
    fn dx(&self, k: usize) -> Self;
}

impl FieldAlgebra for CoefFn {
    fn add(&self, other: &Self) -> Self {
        CoefFn::add(self, other)
    }
    fn scale(&self, c: f64) -> Self {
        CoefFn::scale(self, c)
    }
    fn mul(&self, other: &Self) -> Self {
        CoefFn::mul(self, other)
    }
    fn dx(&self, k: usize) -> Self {
        CoefFn::dx(self, k)
    }
}

/// A series whose products are truncated at a lattice cap. Callers ensure
/// all operands share the same orders.
#[derive(Debug, Clone)]
pub(crate) struct CappedSeries {
    pub(crate) series: FracSeries,
    pub(crate) cap: Option<u32>,
}

impl FieldAlgebra for CappedSeries {
    fn add(&self, other: &Self) -> Self {
        Self { series: self.series.add_unchecked(&other.series), cap: self.cap }
    }
    fn scale(&self, c: f64) -> Self {
        Self { series: self.series.scale(c), cap: self.cap }
    }
    fn mul(&self, other: &Self) -> Self {
        Self { series: self.series.mul_unchecked(&other.series, self.cap), cap: self.cap }
    }
    fn dx(&self, k: usize) -> Self {
        Self { series: self.series.spatial_d(k), cap: self.cap }
    }
}

/// One term of the spatial side of either equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JmTerm {
    /// `∂³v`
    D3V,
    /// `w ∂³w`
    WD3W,
    /// `∂w ∂²w`
    DWD2W,
    /// `v ∂v`
    VDV,
    /// `v w ∂w`
    VWDW,
    /// `∂v w²`
    DVWW,
    /// `∂³w`
    D3W,
    /// `∂v w`
    DVW,
    /// `v ∂w`
    VDW,
    /// `∂w w²`
    DWWW,
}

/// Spatial side of the `v` equation as `(coefficient, term)` pairs.
pub const V_SIDE: [(f64, JmTerm); 6] = [
    (1.0, JmTerm::D3V),
    (1.5, JmTerm::WD3W),
    (4.5, JmTerm::DWD2W),
    (-6.0, JmTerm::VDV),
    (-6.0, JmTerm::VWDW),
    (-1.5, JmTerm::DVWW),
];

/// Spatial side of the `w` equation.
pub const W_SIDE: [(f64, JmTerm); 4] =
    [(1.0, JmTerm::D3W), (-6.0, JmTerm::DVW), (-6.0, JmTerm::VDW), (-7.5, JmTerm::DWWW)];

impl JmTerm {
    /// Evaluate the raw term (without its coefficient). Trilinear terms are
    /// two nested products.
    pub fn apply<A: FieldAlgebra>(self, v: &A, w: &A) -> A {
        match self {
            JmTerm::D3V => v.dx(3),
            JmTerm::WD3W => w.mul(&w.dx(3)),
            JmTerm::DWD2W => w.dx(1).mul(&w.dx(2)),
            JmTerm::VDV => v.mul(&v.dx(1)),
            JmTerm::VWDW => v.mul(w).mul(&w.dx(1)),
            JmTerm::DVWW => v.dx(1).mul(&w.mul(w)),
            JmTerm::D3W => w.dx(3),
            JmTerm::DVW => v.dx(1).mul(w),
            JmTerm::VDW => v.mul(&w.dx(1)),
            JmTerm::DWWW => w.dx(1).mul(&w.mul(w)),
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(self, JmTerm::D3V | JmTerm::D3W)
    }
}

fn combine<A: FieldAlgebra>(side: &[(f64, JmTerm)], v: &A, w: &A) -> A {
    let mut terms = side.iter().map(|(c, term)| term.apply(v, w).scale(*c));
    let first = terms.next().expect("non-empty side");
    terms.fold(first, |acc, t| acc.add(&t))
}

/// Spatial sides `(S_v, S_w)`, so that the system reads
/// `D^α v + S_v = 0`, `D^β w + S_w = 0`.
pub fn spatial_sides<A: FieldAlgebra>(v: &A, w: &A) -> (A, A) {
    (combine(&V_SIDE, v, w), combine(&W_SIDE, v, w))
}

fn sech_half(lambda: f64, shift: f64) -> CoefFn {
    // sech((λ/2)(x + shift))
    CoefFn::linear_combination(vec![(lambda / 2.0, CoefFn::x()), (lambda / 2.0 * shift, CoefFn::one())]).sech()
}

fn v_profile(lambda: f64, shift: f64) -> CoefFn {
    let s = sech_half(lambda, shift);
    CoefFn::linear_combination(vec![(lambda * lambda / 8.0, CoefFn::one()), (-lambda * lambda / 2.0, s.mul(&s))])
}

fn w_profile(lambda: f64, shift: f64) -> CoefFn {
    sech_half(lambda, shift).scale(lambda)
}

/// `v(x, 0) = λ²/8 (1 − 4 sech²(λx/2))`.
pub fn initial_v(model: &ModelSpec) -> CoefFn {
    v_profile(model.lambda, 0.0)
}

/// `w(x, 0) = λ sech(λx/2)`.
pub fn initial_w(model: &ModelSpec) -> CoefFn {
    w_profile(model.lambda, 0.0)
}

fn wave_shift(lambda: f64, dir: WaveDirection, t: f64) -> f64 {
    dir.sign() * lambda * lambda * t / 2.0
}

/// Traveling-wave fields at time `t` as functions of `x`.
pub fn wave_profiles(model: &ModelSpec, dir: WaveDirection, t: f64) -> (CoefFn, CoefFn) {
    let shift = wave_shift(model.lambda, dir, t);
    (v_profile(model.lambda, shift), w_profile(model.lambda, shift))
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Classical traveling-wave `v` with argument `(λ/2)(x ± λ²t/2)`.
pub fn exact_v(model: &ModelSpec, dir: WaveDirection, x: f64, t: f64) -> f64 {
    let l = model.lambda;
    let s = sech(l / 2.0 * (x + wave_shift(l, dir, t)));
    l * l / 8.0 * (1.0 - 4.0 * s * s)
}

pub fn exact_w(model: &ModelSpec, dir: WaveDirection, x: f64, t: f64) -> f64 {
    let l = model.lambda;
    l * sech(l / 2.0 * (x + wave_shift(l, dir, t)))
}

/// Series of `D_t^α v` and `D_t^β w` implied by the PDE: `(−S_v, −S_w)`
/// with all products truncated at lattice order `cap`.
pub fn rhs_series(v: &FracSeries, w: &FracSeries, cap: Option<u32>) -> Result<(FracSeries, FracSeries), ModelError> {
    if v.orders() != w.orders() {
        return Err(SeriesError::OrdersMismatch { left: v.orders(), right: w.orders() }.into());
    }
    let (sv, sw) = spatial_sides(&CappedSeries { series: v.clone(), cap }, &CappedSeries { series: w.clone(), cap });
    Ok((sv.series.scale(-1.0), sw.series.scale(-1.0)))
}

/// Left-hand sides of both equations for series inputs, as series in `t`.
/// Products are not truncated.
pub fn residual_series(v: &FracSeries, w: &FracSeries) -> Result<(FracSeries, FracSeries), ModelError> {
    let (rv, rw) = rhs_series(v, w, None)?;
    let r1 = v.caputo_d(TimeAxis::Alpha)?.sub(&rv)?;
    let r2 = w.caputo_d(TimeAxis::Beta)?.sub(&rw)?;
    Ok((r1, r2))
}

/// Field pair whose PDE residual is requested.
#[derive(Debug, Clone, Copy)]
pub enum ResidualInput<'a> {
    /// Closed-form traveling wave; `∂_t` by the chain rule.
    TravelingWave(WaveDirection),
    /// Truncated series; time derivatives are term-wise Caputo derivatives.
    Series { v: &'a FracSeries, w: &'a FracSeries },
    /// Constant background `v ≡ c_v`, `w ≡ c_w`.
    Constant { v: f64, w: f64 },
}

/// `(r₁, r₂)`, the left-hand sides of both equations at `(x, t)`.
pub fn residual(model: &ModelSpec, input: ResidualInput<'_>, x: f64, t: f64) -> Result<(f64, f64), ModelError> {
    match input {
        ResidualInput::TravelingWave(dir) => {
            let (v, w) = wave_profiles(model, dir, t);
            // ∂_t F(ξ) = (±λ²/2) ∂_x F(ξ) for ξ = (λ/2)(x ± λ²t/2)
            let speed = wave_shift(model.lambda, dir, 1.0);
            let (sv, sw) = spatial_sides(&v, &w);
            let r1 = v.dx(1).scale(speed).add(&sv);
            let r2 = w.dx(1).scale(speed).add(&sw);
            let jets = crate::fracseries::JetEvaluator::new(x).evaluate(&[(&r1, 0), (&r2, 0)])?;
            Ok((jets[0].value(), jets[1].value()))
        }
        ResidualInput::Series { v, w } => {
            let (r1, r2) = residual_series(v, w)?;
            let profiles = crate::fracseries::profile_many(&[&r1, &r2], x)?;
            Ok((profiles[0].at(t)?, profiles[1].at(t)?))
        }
        ResidualInput::Constant { v, w } => {
            let (cv, cw) = (CoefFn::constant(v), CoefFn::constant(w));
            let (sv, sw) = spatial_sides(&cv, &cw);
            Ok((sv.value(x)?, sw.value(x)?))
        }
    }
}

/// Sample grid for the exact-solution residual: `x ∈ [0.5, 2]`, `t ∈ [0, 0.5]`.
pub fn residual_grid() -> Vec<(f64, f64)> {
    let xs = (0..5).map(|i| 0.5 + 1.5 * f64::from(i) / 4.0);
    xs.flat_map(|x| (0..5).map(move |j| (x, 0.5 * f64::from(j) / 4.0))).collect()
}

/// Maximum `max(|r₁|, |r₂|)` of the traveling wave over [`residual_grid`].
pub fn max_wave_residual(model: &ModelSpec, dir: WaveDirection) -> Result<f64, ModelError> {
    let mut worst: f64 = 0.0;
    for (x, t) in residual_grid() {
        let (r1, r2) = residual(model, ResidualInput::TravelingWave(dir), x, t)?;
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    Ok(worst)
}

/// Outcome of testing both wave directions against the PDE residual.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionResolution {
    pub residual_plus: f64,
    pub residual_minus: f64,
    /// The direction whose residual is below [`RESIDUAL_TOLERANCE`], if any.
    pub direction: Option<WaveDirection>,
}

pub fn resolve_direction(model: &ModelSpec) -> Result<DirectionResolution, ModelError> {
    let residual_plus = max_wave_residual(model, WaveDirection::Plus)?;
    let residual_minus = max_wave_residual(model, WaveDirection::Minus)?;
    let direction = [(WaveDirection::Plus, residual_plus), (WaveDirection::Minus, residual_minus)]
        .into_iter()
        .filter(|(_, r)| *r <= RESIDUAL_TOLERANCE)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(d, _)| d);
    Ok(DirectionResolution { residual_plus, residual_minus, direction })
}

/// Reference solution errors are measured against.
#[derive(Debug, Clone)]
pub enum ReferenceSolution {
    TravelingWave {
        model: ModelSpec,
        direction: WaveDirection,
    },
    /// Classical Taylor-in-`t` series built from the initial data, used
    /// when no traveling-wave direction satisfies the PDE.
    ClassicalSeries {
        order: u32,
        v: FracSeries,
        w: FracSeries,
    },
}

/// Order of the fallback classical series.
pub const FALLBACK_SERIES_ORDER: u32 = 6;

impl ReferenceSolution {
    /// Pick the traveling wave if one direction passes the residual oracle,
    /// otherwise fall back to the classical series.
    pub fn resolve(lambda: f64) -> Result<(Self, DirectionResolution), ModelError> {
        let model = ModelSpec::classical(lambda)?;
        let resolution = resolve_direction(&model)?;
        let reference = match resolution.direction {
            Some(direction) => ReferenceSolution::TravelingWave { model, direction },
            None => Self::classical_series(lambda, FALLBACK_SERIES_ORDER)?,
        };
        Ok((reference, resolution))
    }

    pub fn classical_series(lambda: f64, order: u32) -> Result<Self, ModelError> {
        let model = ModelSpec::classical(lambda)?;
        let (v, w) = cfrdtm::cfrdtm_solve(&model, order)?;
        Ok(ReferenceSolution::ClassicalSeries { order, v, w })
    }

    pub fn describe(&self) -> String {
        match self {
            ReferenceSolution::TravelingWave { direction, .. } => {
                format!("classical traveling wave, direction {direction}")
            }
            ReferenceSolution::ClassicalSeries { order, .. } => {
                format!("classical Taylor series of order {order}")
            }
        }
    }

    /// `(v, w)` at `(x, t)`.
    pub fn value(&self, x: f64, t: f64) -> Result<(f64, f64), ModelError> {
        match self {
            ReferenceSolution::TravelingWave { model, direction } => {
                Ok((exact_v(model, *direction, x, t), exact_w(model, *direction, x, t)))
            }
            ReferenceSolution::ClassicalSeries { order, v, w } => {
                Ok((v.evaluate(x, t, *order)?, w.evaluate(x, t, *order)?))
            }
        }
    }
}

impl From<cfrdtm::CfrdtmError> for ModelError {
    fn from(e: cfrdtm::CfrdtmError) -> Self {
        ModelError::Engine(Box::new(e))
    }
}
