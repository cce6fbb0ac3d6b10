//! Catalog of explicit representation models.

pub mod action;
pub mod catalog;
pub mod fourier;
pub mod oracle;
pub mod roots;
pub mod spec;

pub use action::{action_norms, group_action, ActedFunction, ActionNorms, OneParamElement};
pub use catalog::{generators, realize, variables};
pub use fourier::{dual_axis, inverse_partial_fourier, partial_fourier};
pub use roots::{roots_classify, RootSetReport};
pub use spec::{GeneratorId, ModelKind, ModelSpec, Sign};
