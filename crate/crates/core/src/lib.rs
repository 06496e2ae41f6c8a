//! Hybrid micromaser: two-level atoms crossing a cavity whose field couples
//! to a mechanical resonator through radiation pressure.
//!
//! The crate covers the truncated Fock-space algebra, the closed-form
//! single-atom propagator, the coarse-grained gain maps, the master
//! equations for cavity and mechanical modes, and the analytic results
//! used to check them.

// `!(x > 0.0)` is used on purpose to reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod dynamics;
pub mod error;
pub mod gain;
pub mod lindblad;
pub mod operator;

pub use dynamics::{PumpParameter, SystemParams};
pub use error::{Error, Result};
pub use lindblad::{MasterEquation, ModeState, SteadyState};
pub use operator::{C64, CMatrix, CVector, DensityMatrix, FockOperator, SpaceDims, Subsystem};
