//! Batch drivers for the scaling experiments and report emission.

pub mod bounds;
pub mod config;
pub mod fit;
pub mod lower_bound;
pub mod tame;

pub use bounds::{cos_bound_check, remainder_and_t_check, CosBoundReport, RemainderReport};
pub use config::{ExperimentConfig, DEFAULT_SCHEDULE};
pub use fit::{fit_loglog, LogLogFit};
pub use lower_bound::{lower_bound_experiment, Check, ExperimentReport, LowerBoundRow};
pub use tame::{tame_direction_check, TameReport};
