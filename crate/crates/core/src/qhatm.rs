//! q-homotopy analysis transform.
//!
//! With the deformation `(1 − nq) L[φ − v₀] = ħ q N[φ]` and
//! `φ = Σ v_m q^m`, the m-th order deformation equation gives
//!
//! ```text
//! v_m = (k_m + ħ) v_{m−1} − ħ (1 − k_m/n) v(x,0) + ħ J^α[S_{v,m−1}]
//! ```
//!
//! where `S_{v,m−1}` is the `q^{m−1}` coefficient of the spatial side of
//! the `v` equation evaluated on `φ`, and `k_m = 0` for `m ≤ 1`, `n`
//! otherwise. The inverse-transform terms `L⁻¹[(1/s) v(x,0)] = v(x,0)` and
//! `L⁻¹[s^(−α) L[·]] = J^α` are applied directly, so no transform-domain
//! object is ever formed. `w_m` is analogous with the spatial side of the
//! `w` equation, with the same order `α` for both equations.
//!
//! The assembled solution is `Σ_m v_m (1/n)^m`.

use thiserror::Error;

use crate::fracseries::{FracSeries, Orders, SeriesError};
use crate::jm_model::{self, CappedSeries, FieldAlgebra, JmTerm, ModelError, ModelSpec};

pub const DEFAULT_MAX_M: u32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QhatmError {
    #[error("n must be at least 1, got {0}")]
    InvalidN(u32),
    #[error("ħ must be finite and nonzero, got {0}")]
    InvalidHbar(f64),
    #[error("deformation order m must be at least 1")]
    ZeroOrder,
    #[error("step m = {m} needs iterates 0..{m}, only {available} available")]
    Sequencing { m: u32, available: usize },
    #[error("iterate {m} has lattice order {order}, above {m}")]
    LatticeOverflow { m: u32, order: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotopyConfig {
    n: u32,
    hbar: f64,
    orders: Orders,
    max_m: u32,
}

impl HomotopyConfig {
    pub fn new(n: u32, hbar: f64, alpha: f64, max_m: u32) -> Result<Self, QhatmError> {
        if n < 1 {
            return Err(QhatmError::InvalidN(n));
        }
        if hbar == 0.0 || !hbar.is_finite() {
            return Err(QhatmError::InvalidHbar(hbar));
        }
        Ok(Self { n, hbar, orders: Orders::single(alpha)?, max_m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn alpha(&self) -> f64 {
        self.orders.alpha()
    }

    pub fn max_m(&self) -> u32 {
        self.max_m
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self, QhatmError> {
        Self::new(self.n, hbar, self.alpha(), self.max_m)
    }
}

/// `k_m`: 0 for `m ≤ 1`, `n` otherwise.
pub fn k_selector(m: u32, n: u32) -> u32 {
    if m <= 1 {
        0
    } else {
        n
    }
}

/// Iterates `v_0..v_M`, `w_0..w_M`.
#[derive(Debug, Clone)]
pub struct IterateList {
    pub v: Vec<FracSeries>,
    pub w: Vec<FracSeries>,
}

impl IterateList {
    /// Zeroth iterates: the initial data as constant-in-`t` series.
    pub fn initial(model: &ModelSpec, config: &HomotopyConfig) -> Self {
        Self {
            v: vec![FracSeries::constant(config.orders, jm_model::initial_v(model))],
            w: vec![FracSeries::constant(config.orders, jm_model::initial_w(model))],
        }
    }

    pub fn len(&self) -> usize {
        self.v.len().min(self.w.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Truncated polynomial in the embedding parameter `q` with series
/// coefficients.
#[derive(Debug, Clone)]
struct QPoly {
    coeffs: Vec<FracSeries>,
    cap: Option<u32>,
}

impl QPoly {
    fn new(coeffs: &[FracSeries], cap: Option<u32>) -> Self {
        Self { coeffs: coeffs.to_vec(), cap }
    }

    fn map(&self, f: impl Fn(&FracSeries) -> FracSeries) -> Self {
        Self { coeffs: self.coeffs.iter().map(f).collect(), cap: self.cap }
    }
}

impl FieldAlgebra for QPoly {
    fn add(&self, other: &Self) -> Self {
        Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add_unchecked(b)).collect(), cap: self.cap }
    }

    fn scale(&self, c: f64) -> Self {
        self.map(|s| s.scale(c))
    }

    fn mul(&self, other: &Self) -> Self {
        let degree = self.coeffs.len();
        let coeffs = (0..degree)
            .map(|m| {
                let mut acc = FracSeries::zero(self.coeffs[0].orders());
                for i in 0..=m {
                    let a = CappedSeries { series: self.coeffs[i].clone(), cap: self.cap };
                    let b = CappedSeries { series: other.coeffs[m - i].clone(), cap: self.cap };
                    acc = acc.add_unchecked(&a.mul(&b).series);
                }
                acc
            })
            .collect();
        Self { coeffs, cap: self.cap }
    }

    fn dx(&self, k: usize) -> Self {
        self.map(|s| s.spatial_d(k))
    }
}

fn check_available(iterates: &IterateList, m: u32) -> Result<(), QhatmError> {
    if m == 0 {
        return Err(QhatmError::ZeroOrder);
    }
    if iterates.len() < m as usize {
        return Err(QhatmError::Sequencing { m, available: iterates.len() });
    }
    Ok(())
}

fn q_polys(iterates: &IterateList, m: u32) -> (QPoly, QPoly) {
    let upto = m as usize;
    let cap = Some(m - 1);
    (QPoly::new(&iterates.v[..upto], cap), QPoly::new(&iterates.w[..upto], cap))
}

/// Homotopy polynomial consumed by deformation step `m`: the `q^{m−1}`
/// coefficient of `term` evaluated on `φ₁ = Σ v_i q^i`, `φ₂ = Σ w_i q^i`.
pub fn homotopy_coefficient(term: JmTerm, iterates: &IterateList, m: u32) -> Result<FracSeries, QhatmError> {
    check_available(iterates, m)?;
    let (v, w) = q_polys(iterates, m);
    Ok(term.apply(&v, &w).coeffs.swap_remove(m as usize - 1))
}

/// `(v_m, w_m)` from iterates `0..m`. The initial data `v(x,0)` is read
/// from the zeroth iterate.
pub fn qhatm_step(
    config: &HomotopyConfig,
    iterates: &IterateList,
    m: u32,
) -> Result<(FracSeries, FracSeries), QhatmError> {
    check_available(iterates, m)?;
    let (v, w) = q_polys(iterates, m);
    let (sv, sw) = jm_model::spatial_sides(&v, &w);
    let idx = m as usize - 1;
    let hbar = config.hbar;
    let k_m = f64::from(k_selector(m, config.n));
    let carry = k_m + hbar;
    let initial_weight = -hbar * (1.0 - k_m / f64::from(config.n));

    let build = |prev: &FracSeries, side: &FracSeries, initial: FracSeries| -> Result<FracSeries, QhatmError> {
        let integral = side.rl_integral()?.scale(hbar);
        let out = prev.scale(carry).add(&initial.scale(initial_weight))?.add(&integral)?;
        let order = out.max_lattice_order();
        if order > m {
            return Err(QhatmError::LatticeOverflow { m, order });
        }
        Ok(out)
    };
    let vm = build(&iterates.v[idx], &sv.coeffs[idx], iterates.v[0].clone())?;
    let wm = build(&iterates.w[idx], &sw.coeffs[idx], iterates.w[0].clone())?;
    Ok((vm, wm))
}

/// All iterates `0..=max_m`.
pub fn qhatm_iterates(model: &ModelSpec, config: &HomotopyConfig) -> Result<IterateList, QhatmError> {
    let mut it = IterateList::initial(model, config);
    for m in 1..=config.max_m {
        let (v, w) = qhatm_step(config, &it, m)?;
        it.v.push(v);
        it.w.push(w);
    }
    Ok(it)
}

/// `(Σ v_m (1/n)^m, Σ w_m (1/n)^m)` over `m = 0..=max_m`.
pub fn qhatm_solve(model: &ModelSpec, config: &HomotopyConfig) -> Result<(FracSeries, FracSeries), QhatmError> {
    let it = qhatm_iterates(model, config)?;
    let inv_n = 1.0 / f64::from(config.n);
    let mut v = FracSeries::zero(config.orders);
    let mut w = FracSeries::zero(config.orders);
    let mut weight = 1.0;
    for (vm, wm) in it.v.iter().zip(&it.w) {
        v = v.add(&vm.scale(weight))?;
        w = w.add(&wm.scale(weight))?;
        weight *= inv_n;
    }
    Ok((v, w))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbarPoint {
    pub hbar: f64,
    pub v: f64,
    pub w: f64,
}

/// Truncated q-HATM sums at `(x, t)` for each `ħ` in `grid`.
pub fn hbar_sweep(
    model: &ModelSpec,
    config: &HomotopyConfig,
    x: f64,
    t: f64,
    grid: &[f64],
) -> Result<Vec<HbarPoint>, QhatmError> {
    grid.iter()
        .map(|&hbar| {
            let cfg = config.with_hbar(hbar)?;
            let (v, w) = qhatm_solve(model, &cfg)?;
            let p = crate::fracseries::profile_many(&[&v, &w], x)?;
            Ok(HbarPoint { hbar, v: p[0].at(t)?, w: p[1].at(t)? })
        })
        .collect()
}
