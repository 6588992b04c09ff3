//! Coupled fractional reduced differential transform.
//!
//! The solution is carried as a table `V(h, j)`, `W(h, j)` over lattice
//! points with `h + j ≤ K`, standing for `v = Σ V(h,j) t^(hα+jβ)` and
//! likewise for `w`. Order `k + 1` is filled from order `k`:
//!
//! ```text
//! V(h+1, k−h) = Γ(hα+(k−h)β+1) / Γ((h+1)α+(k−h)β+1) · R_v(h, k−h)
//! W(h, k−h+1) = Γ(hα+(k−h)β+1) / Γ(hα+(k−h+1)β+1) · R_w(h, k−h)
//! ```
//!
//! where `R_v`, `R_w` are the lattice slices of the negated spatial sides.
//! The index convolutions of the bilinear and trilinear terms are the
//! lattice Cauchy product of [`FracSeries::mul`], nested once for the
//! trilinear terms. `V(0, j) = 0` for `j ≥ 1` and `W(i, 0) = 0` for
//! `i ≥ 1` hold by construction.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fracseries::{CoefFn, Exponent, FracSeries, SeriesError};
use crate::jm_model::{self, ModelError, ModelSpec};
use crate::special::gamma_ratio;

/// Default total lattice order.
pub const DEFAULT_ORDER: u32 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CfrdtmError {
    #[error("step at total order {needed} requires the table to be filled through it (filled through {filled})")]
    Sequencing { needed: u32, filled: u32 },
    #[error("step would produce lattice order {requested}, above the table cap {cap}")]
    CapExceeded { requested: u32, cap: u32 },
    #[error("step index h = {h} exceeds total order k = {k}")]
    BadIndex { h: u32, k: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Model(Box<ModelError>),
}

impl From<ModelError> for CfrdtmError {
    fn from(e: ModelError) -> Self {
        CfrdtmError::Model(Box::new(e))
    }
}

impl From<crate::special::GammaError> for CfrdtmError {
    fn from(e: crate::special::GammaError) -> Self {
        CfrdtmError::Series(e.into())
    }
}

#[derive(Debug, Clone)]
pub struct CoeffTable {
    model: ModelSpec,
    cap: u32,
    filled: u32,
    v: BTreeMap<Exponent, CoefFn>,
    w: BTreeMap<Exponent, CoefFn>,
}

impl CoeffTable {
    /// Table holding only the initial data `V(0,0)`, `W(0,0)`.
    pub fn new(model: &ModelSpec, cap: u32) -> Self {
        Self::with_initial(model, cap, jm_model::initial_v(model), jm_model::initial_w(model))
    }

    /// Table seeded with arbitrary initial profiles.
    pub fn with_initial(model: &ModelSpec, cap: u32, v0: CoefFn, w0: CoefFn) -> Self {
        let mut v = BTreeMap::new();
        let mut w = BTreeMap::new();
        v.insert(Exponent::ZERO, v0);
        w.insert(Exponent::ZERO, w0);
        Self { model: *model, cap, filled: 0, v, w }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Highest total order whose entries are all present.
    pub fn filled_order(&self) -> u32 {
        self.filled
    }

    pub fn v(&self, h: u32, j: u32) -> Option<&CoefFn> {
        self.v.get(&Exponent::new(h, j))
    }

    pub fn w(&self, h: u32, j: u32) -> Option<&CoefFn> {
        self.w.get(&Exponent::new(h, j))
    }

    pub fn v_entries(&self) -> impl Iterator<Item = (Exponent, &CoefFn)> {
        self.v.iter().map(|(k, c)| (*k, c))
    }

    pub fn w_entries(&self) -> impl Iterator<Item = (Exponent, &CoefFn)> {
        self.w.iter().map(|(k, c)| (*k, c))
    }

    fn series(map: &BTreeMap<Exponent, CoefFn>, model: &ModelSpec, through: u32) -> FracSeries {
        let mut s = FracSeries::zero(model.orders());
        for (k, c) in map.range(..).filter(|(k, _)| k.lattice_order() <= through) {
            s.insert(*k, c.clone());
        }
        s
    }

    /// `(v, w)` series over every filled entry.
    pub fn series_pair(&self) -> (FracSeries, FracSeries) {
        (Self::series(&self.v, &self.model, self.filled), Self::series(&self.w, &self.model, self.filled))
    }

    fn rhs_at(&self, k: u32) -> Result<(FracSeries, FracSeries), CfrdtmError> {
        if k > self.filled {
            return Err(CfrdtmError::Sequencing { needed: k, filled: self.filled });
        }
        if k + 1 > self.cap {
            return Err(CfrdtmError::CapExceeded { requested: k + 1, cap: self.cap });
        }
        let v = Self::series(&self.v, &self.model, k);
        let w = Self::series(&self.w, &self.model, k);
        Ok(jm_model::rhs_series(&v, &w, Some(k))?)
    }

    fn v_factor(&self, h: u32, k: u32) -> Result<f64, CfrdtmError> {
        let o = self.model.orders();
        let from = Exponent::new(h, k - h).value(o) + 1.0;
        Ok(gamma_ratio(from, from + o.alpha())?)
    }

    fn w_factor(&self, h: u32, k: u32) -> Result<f64, CfrdtmError> {
        let o = self.model.orders();
        let from = Exponent::new(h, k - h).value(o) + 1.0;
        Ok(gamma_ratio(from, from + o.beta())?)
    }

    /// Fill every entry of total order `filled + 1`.
    pub fn fill_next(&mut self) -> Result<(), CfrdtmError> {
        let k = self.filled;
        let (rv, rw) = self.rhs_at(k)?;
        for h in 0..=k {
            let key = Exponent::new(h, k - h);
            let zero = CoefFn::zero();
            let nv = rv.coefficient(key).unwrap_or(&zero).scale(self.v_factor(h, k)?);
            let nw = rw.coefficient(key).unwrap_or(&zero).scale(self.w_factor(h, k)?);
            self.v.insert(Exponent::new(h + 1, k - h), nv);
            self.w.insert(Exponent::new(h, k - h + 1), nw);
        }
        self.v.insert(Exponent::new(0, k + 1), CoefFn::zero());
        self.w.insert(Exponent::new(k + 1, 0), CoefFn::zero());
        self.filled = k + 1;
        Ok(())
    }
}

fn check_index(h: u32, k: u32) -> Result<(), CfrdtmError> {
    if h > k {
        Err(CfrdtmError::BadIndex { h, k })
    } else {
        Ok(())
    }
}

/// `V(h+1, k−h)` from entries of total order `≤ k`.
pub fn cfrdtm_v_step(table: &CoeffTable, h: u32, k: u32) -> Result<CoefFn, CfrdtmError> {
    check_index(h, k)?;
    let (rv, _) = table.rhs_at(k)?;
    let slice = rv.coefficient(Exponent::new(h, k - h)).cloned().unwrap_or_else(CoefFn::zero);
    Ok(slice.scale(table.v_factor(h, k)?))
}

/// `W(h, k−h+1)` from entries of total order `≤ k`.
pub fn cfrdtm_w_step(table: &CoeffTable, h: u32, k: u32) -> Result<CoefFn, CfrdtmError> {
    check_index(h, k)?;
    let (_, rw) = table.rhs_at(k)?;
    let slice = rw.coefficient(Exponent::new(h, k - h)).cloned().unwrap_or_else(CoefFn::zero);
    Ok(slice.scale(table.w_factor(h, k)?))
}

/// Coefficient table filled through total order `order`.
pub fn cfrdtm_table(model: &ModelSpec, order: u32) -> Result<CoeffTable, CfrdtmError> {
    let mut table = CoeffTable::new(model, order);
    while table.filled_order() < order {
        table.fill_next()?;
    }
    Ok(table)
}

/// Series solution `(v, w)` truncated at total lattice order `order`.
pub fn cfrdtm_solve(model: &ModelSpec, order: u32) -> Result<(FracSeries, FracSeries), CfrdtmError> {
    Ok(cfrdtm_table(model, order)?.series_pair())
}
