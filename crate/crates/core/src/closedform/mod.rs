//! Closed-form function calculus: symbolic operator application on sums of
//! smooth factors and complex powers, with quadrature only for final norms.

pub mod eval;
pub mod factor;
pub mod jet;
pub mod norms;
pub mod quad;
pub mod termsum;

pub use eval::Evaluator;
pub use factor::{standard_plateau, SmoothFactor, ORDER_CAP};
pub use jet::{Jet, C64};
pub use norms::{directional_norm, l2_norm, l2_norms, sobolev_norm, weighted_norm, word_images};
pub use quad::{Axis, Domain, QuadSpec};
pub use termsum::{apply_operator, PowerBase, TermKey, TermSum};
