//! The centrality-maximization network formation game.
//!
//! Each of `n` nodes picks `m` out-links and is paid its Bonacich centrality
//! π = (1 − β)(I − βRᵀ)⁻¹η in the resulting graph. The crate computes
//! centralities and hitting times, exact best-response sets, runs the
//! asynchronous best-response dynamics, classifies equilibrium graphs and
//! enumerates equilibria by brute force for small `n`.
//!
//! All numeric code is generic over [`Scalar`]: exact rationals for
//! tie-sensitive work, `f64` for speed.

pub mod best_response;
pub mod centrality;
pub mod classify;
pub mod condensation;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod params;
pub mod scalar;

pub use best_response::{
    best_response_set, structural_best_response_m1, structural_br_support_m2, BestResponseSet,
    SupportM2,
};
pub use centrality::{
    bonacich_direct, bonacich_power_series, check_hitting_bounds, hitting_times, utility,
    BoundReport, CentralityVector, HittingTimeVector,
};
pub use classify::{
    analyze, check_condensation_necessary, classify, classify_m1, classify_m2, in_limit_class,
    is_nash, is_strict_nash, EquilibriumReport, GraphClass, Witness,
};
pub use condensation::{condensation, Condensation};
pub use config::Configuration;
pub use dynamics::{run, run_batch, step, RunOptions, Trajectory, Verdict};
pub use error::{Error, Result};
pub use model::{build_matrices, Game, TransitionMatrix, WeightMatrix};
pub use oracle::{
    enumerate_configurations, enumerate_nash, enumerate_nash_with_progress, theorem_checks,
    verify_theorems, EnumerationResult, VerificationReport,
};
pub use params::GameParams;
pub use scalar::{parse_rational, Backend, Rational, Scalar};
