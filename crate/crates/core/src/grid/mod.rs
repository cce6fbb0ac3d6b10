//! Uniform-grid sampled functions: derivatives, norms, interpolation and resonance scans.

pub mod apply;
pub mod boxes;
pub mod fd;
pub mod function;
pub mod scan;

pub use apply::apply_operator_grid;
pub use boxes::{GridBox, Interval};
pub use fd::fd_derivative;
pub use function::{GridAxis, GridFunction};
pub use scan::{resonance_scan, resonance_scan_vars, CurveScan, ScanReport};
