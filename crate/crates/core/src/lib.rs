//! Numerical construction of the spherically symmetric generalized monopole
//! of six-dimensional SO(5) gauge theory.
//!
//! The Bogomolny pair for the radial profiles `(K, U)` is reduced to a single
//! autonomous second order equation `V'' - 3V' = R(V)` in `s = ln(tau)`, with
//! `V = G - e^G` and `G = ln(K^2)`. The unique solution is found by shooting on
//! the initial slope of the time-reversed problem and bisecting between the
//! two open sets of undershooting and overshooting slopes.
//!
//! Layout:
//! - [`transforms`]: the `G -> V` map, its inverse `Q`, and the extended
//!   right-hand side `R`.
//! - [`integrator`]: an adaptive Dormand-Prince 5(4) integrator for
//!   two-component systems with dense output and event location.
//! - [`shooting`]: slope classification, bracketing, bisection and the
//!   forward/backward stitching of the solution.
//! - [`profile`]: reconstruction of `K(r)`, `U(r)`, Bogomolny residuals,
//!   charge/energy and asymptotic exponent fits.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod fit;
pub mod integrator;
pub mod profile;
pub mod shooting;
pub mod transforms;

pub use integrator::{IntegratorConfig, OdeState, Trajectory};
pub use profile::{AsymptoticsReport, ModelParams, Profile};
pub use shooting::{Classification, ShootingParams, ShootingResult, Verdict};
pub use transforms::{GValue, VValue};
