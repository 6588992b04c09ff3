//! Semi-analytic series solvers for the time-fractional coupled
//! Jaulent–Miodek system.
//!
//! Two engines share one algebra of fractional power series in `t` whose
//! coefficients are jet-evaluable functions of `x`:
//!
//! * [`cfrdtm`]: the coupled fractional reduced differential transform,
//!   a two-index coefficient table over the lattice `hα + jβ`;
//! * [`qhatm`]: the q-homotopy analysis transform, deformation iterates
//!   weighted by `(1/n)^m` and tuned by the auxiliary parameter `ħ`.
//!
//! [`jm_model`] holds the system itself: initial data, the traveling-wave
//! reference solution and the PDE residual used to validate both engines.

pub mod cfrdtm;
pub mod fracseries;
pub mod jets;
pub mod jm_model;
pub mod qhatm;
pub mod special;
