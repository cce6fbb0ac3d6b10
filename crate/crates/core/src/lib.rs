//! Operator algebra, closed-form calculus and scaling experiments for
//! unipotent cohomological equations in explicit unitary models.

pub mod closedform;
pub mod cohom;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod models;
pub mod weyl;

pub use error::{Error, Result};
