//! Radial ground states for the fourth-order equation
//! `Δ²u + (λV − δ)u = |u|^{p−2}u` in `R^N` and for its limit problem on the unit
//! ball with Navier conditions.

pub mod banded;
pub mod bubble;
pub mod error;
pub mod experiments;
pub mod model;
pub mod radial;
pub mod sampling;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{
    critical_exponent, estimate_embedding_constant, evaluate_potential, h2_norm, lambda_threshold,
    DerivedConstants, EmbeddingEstimate, EnergyFunctional, PotentialSpec, ProblemSpec,
};
pub use radial::{
    apply_laplacian, assemble_bilaplacian_form, inner_l2, lp_norm, BoundaryClosure, QuadraticForm,
    RadialField, RadialGrid,
};
pub use solver::{
    brute_force_oracle, residual_norm, solve_ground_state, solve_limit_problem, GroundStateResult,
    SolveOptions,
};
pub use spectral::{
    ess_spectrum_lower_bound, mu_l0, mu_l_lambda, mu_zero, principal_eigen, EigenOptions, EigenPair,
};
