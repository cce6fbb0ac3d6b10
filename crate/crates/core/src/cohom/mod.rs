//! Solvers and closed-form constructions for the cohomological equations.

pub mod builder;
pub mod obstruction;
pub mod solve;
pub mod ubeta;

pub use builder::{build_counterexample, CounterexamplePair, PairMeta, Variant};
pub use obstruction::{th7_family, CocycleFamily, DivergenceFit, ObstructionCase, ObstructionReport};
pub use solve::{
    common_solution_component, map_norm_constant, map_residual, solve_map, solve_twisted_closed, solve_twisted_grid,
    twist_residual, Picture, TwistProblem, TwistSolution,
};
pub use ubeta::{t_and_b, u_beta_f, TBValue, UBetaEvaluator};
