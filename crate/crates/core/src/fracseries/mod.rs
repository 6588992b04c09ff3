//! Finite fractional power series in `t` with `x`-dependent coefficients.
//!
//! A series is a finite map from lattice points `(h, j)` to coefficient
//! functions, representing `Σ c_{h,j}(x) · t^(hα + jβ)`. Lattice keys are
//! exact integer pairs; the numeric exponent is only formed at evaluation
//! time, so `α = β` never merges distinct keys.
//!
//! # Fractional operators without a transform domain
//!
//! The time operators act term-wise on powers of `t`:
//!
//! * Caputo derivative: `D^α t^μ = Γ(μ+1)/Γ(μ+1-α) · t^(μ-α)` for `μ > 0`,
//!   and `D^α 1 = 0`.
//! * Riemann–Liouville integral: `J^α t^μ = Γ(μ+1)/Γ(μ+1+α) · t^(μ+α)`.
//!
//! The Laplace-domain step "transform, multiply by `s^(-α)`, invert" used
//! by homotopy-transform schemes is exactly `J^α` on power functions, since
//! `L[t^μ] = Γ(μ+1)/s^(μ+1)`. The q-HATM engine therefore never builds an
//! `s`-domain object: every `L⁻¹[s^(-α) L[·]]` is a call to
//! [`FracSeries::rl_integral`].

mod coef;

use std::collections::BTreeMap;

use thiserror::Error;

pub use coef::{CoefFn, JetEvaluator};

use crate::jets::JetError;
use crate::special::{gamma_ratio, GammaError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("fractional order {0} is outside (0, 1]")]
    InvalidOrder(f64),
    #[error("series orders differ: {left:?} vs {right:?}")]
    OrdersMismatch { left: Orders, right: Orders },
    #[error("term {key:?} has no predecessor along the {axis:?} axis")]
    OffLattice { key: Exponent, axis: TimeAxis },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

/// Lattice point `(h, j)` standing for the power `t^(hα + jβ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent {
    pub h: u32,
    pub j: u32,
}

impl Exponent {
    pub const ZERO: Exponent = Exponent { h: 0, j: 0 };

    pub const fn new(h: u32, j: u32) -> Self {
        Self { h, j }
    }

    /// Total lattice order `h + j`.
    pub fn lattice_order(self) -> u32 {
        self.h + self.j
    }

    pub fn value(self, orders: Orders) -> f64 {
        f64::from(self.h) * orders.alpha() + f64::from(self.j) * orders.beta()
    }

    fn plus(self, other: Exponent) -> Exponent {
        Exponent::new(self.h + other.h, self.j + other.j)
    }
}

/// Which fractional order a time operator acts along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeAxis {
    Alpha,
    Beta,
}

/// The pair of fractional orders `(α, β)`, each in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orders {
    alpha: f64,
    beta: f64,
}

impl Orders {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, SeriesError> {
        for o in [alpha, beta] {
            if !(o > 0.0 && o <= 1.0) {
                return Err(SeriesError::InvalidOrder(o));
            }
        }
        Ok(Self { alpha, beta })
    }

    /// Single-order series (`β = α`).
    pub fn single(alpha: f64) -> Result<Self, SeriesError> {
        Self::new(alpha, alpha)
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn beta(self) -> f64 {
        self.beta
    }

    pub fn along(self, axis: TimeAxis) -> f64 {
        match axis {
            TimeAxis::Alpha => self.alpha,
            TimeAxis::Beta => self.beta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FracSeries {
    orders: Orders,
    terms: BTreeMap<Exponent, CoefFn>,
}

impl FracSeries {
    pub fn zero(orders: Orders) -> Self {
        Self { orders, terms: BTreeMap::new() }
    }

    /// Constant-in-`t` series `c(x)`.
    pub fn constant(orders: Orders, coef: CoefFn) -> Self {
        Self::monomial(orders, Exponent::ZERO, coef)
    }

    pub fn monomial(orders: Orders, key: Exponent, coef: CoefFn) -> Self {
        let mut s = Self::zero(orders);
        s.insert(key, coef);
        s
    }

    pub fn orders(&self) -> Orders {
        self.orders
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &CoefFn)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coefficient(&self, key: Exponent) -> Option<&CoefFn> {
        self.terms.get(&key)
    }

    /// Highest lattice order among stored terms (0 for an empty series).
    pub fn max_lattice_order(&self) -> u32 {
        self.terms.keys().map(|k| k.lattice_order()).max().unwrap_or(0)
    }

    /// Add `coef` to the term at `key`. Structurally zero coefficients are
    /// not stored.
    pub fn insert(&mut self, key: Exponent, coef: CoefFn) {
        if coef.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&key) {
            Some(existing) => existing.add(&coef),
            None => coef,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    fn check_orders(&self, other: &FracSeries) -> Result<(), SeriesError> {
        if self.orders == other.orders {
            Ok(())
        } else {
            Err(SeriesError::OrdersMismatch { left: self.orders, right: other.orders })
        }
    }

    pub fn add(&self, other: &FracSeries) -> Result<FracSeries, SeriesError> {
        self.check_orders(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &FracSeries) -> FracSeries {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FracSeries) -> Result<FracSeries, SeriesError> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> FracSeries {
        let mut out = Self::zero(self.orders);
        for (k, f) in &self.terms {
            out.insert(*k, f.scale(c));
        }
        out
    }

    /// Cauchy product on the exponent lattice, dropping output keys whose
    /// lattice order exceeds `cap`.
    pub fn mul(&self, other: &FracSeries, cap: Option<u32>) -> Result<FracSeries, SeriesError> {
        self.check_orders(other)?;
        Ok(self.mul_unchecked(other, cap))
    }

    pub(crate) fn mul_unchecked(&self, other: &FracSeries, cap: Option<u32>) -> FracSeries {
        let mut out = Self::zero(self.orders);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = ka.plus(*kb);
                if cap.is_some_and(|c| key.lattice_order() > c) {
                    continue;
                }
                out.insert(key, ca.mul(cb));
            }
        }
        out
    }

    /// Keep only terms with lattice order `≤ cap`.
    pub fn truncate(&self, cap: u32) -> FracSeries {
        Self {
            orders: self.orders,
            terms: self.terms.iter().filter(|(k, _)| k.lattice_order() <= cap).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    /// Term-wise Caputo derivative along `axis`.
    pub fn caputo_d(&self, axis: TimeAxis) -> Result<FracSeries, SeriesError> {
        self.caputo_d_with(axis, gamma_ratio)
    }

    /// [`caputo_d`](Self::caputo_d) with an explicit gamma-ratio routine.
    pub fn caputo_d_with<F>(&self, axis: TimeAxis, ratio: F) -> Result<FracSeries, SeriesError>
    where
        F: Fn(f64, f64) -> Result<f64, GammaError>,
    {
        let order = self.orders.along(axis);
        let mut out = Self::zero(self.orders);
        for (k, c) in &self.terms {
            if *k == Exponent::ZERO {
                continue;
            }
            let lowered = match axis {
                TimeAxis::Alpha if k.h > 0 => Exponent::new(k.h - 1, k.j),
                TimeAxis::Beta if k.j > 0 => Exponent::new(k.h, k.j - 1),
                _ => return Err(SeriesError::OffLattice { key: *k, axis }),
            };
            let mu = k.value(self.orders);
            let factor = ratio(mu + 1.0, mu + 1.0 - order)?;
            out.insert(lowered, c.scale(factor));
        }
        Ok(out)
    }

    /// Term-wise Riemann–Liouville integral of order `α`.
    pub fn rl_integral(&self) -> Result<FracSeries, SeriesError> {
        self.rl_integral_with(gamma_ratio)
    }

    pub fn rl_integral_with<F>(&self, ratio: F) -> Result<FracSeries, SeriesError>
    where
        F: Fn(f64, f64) -> Result<f64, GammaError>,
    {
        let alpha = self.orders.alpha;
        let mut out = Self::zero(self.orders);
        for (k, c) in &self.terms {
            let mu = k.value(self.orders);
            let factor = ratio(mu + 1.0, mu + 1.0 + alpha)?;
            out.insert(Exponent::new(k.h + 1, k.j), c.scale(factor));
        }
        Ok(out)
    }

    /// Wrap every coefficient in a deferred `∂^k/∂x^k`.
    pub fn spatial_d(&self, k: usize) -> FracSeries {
        let mut out = Self::zero(self.orders);
        for (key, c) in &self.terms {
            out.insert(*key, c.dx(k));
        }
        out
    }

    /// Evaluate `Σ c(x) t^μ` over terms with lattice order `≤ max_lattice_order`.
    pub fn evaluate(&self, x: f64, t: f64, max_lattice_order: u32) -> Result<f64, SeriesError> {
        self.truncate(max_lattice_order).profile(x)?.at(t)
    }

    /// Evaluate every coefficient at `x`, leaving `t` free.
    pub fn profile(&self, x: f64) -> Result<SeriesProfile, SeriesError> {
        let mut out = profile_many(&[self], x)?;
        Ok(out.remove(0))
    }
}

/// Coefficient values of a series at a fixed `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesProfile {
    /// `(exponent value μ, coefficient value)` in key order.
    pub terms: Vec<(f64, f64)>,
}

impl SeriesProfile {
    /// `Σ c·t^μ`, with `0⁰ = 1`.
    pub fn at(&self, t: f64) -> Result<f64, SeriesError> {
        if t < 0.0 {
            return Err(SeriesError::NegativeTime(t));
        }
        Ok(self.terms.iter().map(|(mu, c)| if *mu == 0.0 { *c } else { c * t.powf(*mu) }).sum())
    }
}

/// Evaluate several series at the same `x`, sharing common subexpressions.
pub fn profile_many(series: &[&FracSeries], x: f64) -> Result<Vec<SeriesProfile>, SeriesError> {
    let roots: Vec<(&CoefFn, usize)> = series.iter().flat_map(|s| s.terms.values().map(|c| (c, 0))).collect();
    let jets = JetEvaluator::new(x).evaluate(&roots)?;
    let mut values = jets.into_iter().map(|j| j.value());
    Ok(series
        .iter()
        .map(|s| SeriesProfile {
            terms: s.terms.keys().map(|k| (k.value(s.orders), values.next().unwrap_or(0.0))).collect(),
        })
        .collect())
}
