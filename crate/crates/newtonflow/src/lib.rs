//! Newton-type root finding driven by the flow `x'(t) = A(x) f(x)`.
//!
//! The crate provides:
//!
//! * [`field`]: problem definitions and the preconditioned vector field
//!   `F(x) = A(x) f(x)` (Picard, Newton, frozen Newton);
//! * [`adaptive`]: the projection-based adaptive step-size iteration, which
//!   accepts a step `t` once the indicator `t * gamma <= tau` holds and
//!   then applies the projected update;
//! * [`classical`]: fixed-step baselines and a fourth-order reference
//!   integrator for the continuous Newton flow, the trajectory and
//!   attractor oracle;
//! * [`problems`]: three built-in 2D benchmark systems;
//! * [`basin`]: grid sampling of initial values, convergence statistics
//!   under plain and correct-attractor criteria, and PPM rendering.

pub mod adaptive;
pub mod basin;
pub mod classical;
pub mod error;
pub mod field;
pub mod linalg;
pub mod problems;

/// Euclidean tolerance for matching an iterate against a known root.
pub const ROOT_MATCH_TOL: f64 = 1e-4;

pub use adaptive::{
    adaptive_step, gamma, initial_step, project, solve_adaptive, trial_step, AcceptedStep,
    IterationTrace, SolveOutcome, SolveStatus, SolverConfig, StepRecord, TrialStep,
};
pub use basin::{
    convergence_stats, oracle_labels, render_ppm, sample_grid, BasinGrid, CellLabel, CellRecord,
    Criterion, FailureCode, Palette, SolverKind, StatsReport,
};
pub use classical::{
    attractor_oracle, integrate_reference, solve_fixed_step, OracleConfig, Trajectory,
    TrajectoryEnd,
};
pub use error::Error;
pub use field::{DomainBox, Preconditioner, ProblemDef};
pub use linalg::{solve_linear, Matrix};
pub use problems::{builtin_problem, singular_set_distance, BuiltinId, SingularDistance};
