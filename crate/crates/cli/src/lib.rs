//! Batch interface to the hybrid micromaser model: declarative sweeps, figure
//! reproduction and the oracle-equivalence battery.

pub mod config;
pub mod figures;
pub mod plot;
pub mod sweep;
pub mod validate;

pub use config::SweepConfig;
pub use sweep::{run_sweep, SweepResult};
