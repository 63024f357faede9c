//! Adaptive step-size Newton-type iteration.
//!
//! The iteration `x_{n+1} = x_n + t_n F(x_n)` is steered by an error
//! indicator built from an orthogonal projection: with `F0 = F(x_0)`,
//! `x_1 = x_0 + t F0`, `F1 = F(x_1)` and `v = F0 + F1`, the quantity
//!
//! ```text
//! gamma = || v/2 - proj_v(F0) ||
//! ```
//!
//! estimates the per-step deviation from the local flow, and a trial step is
//! accepted once `t * gamma <= tau`. The accepted update is the projected
//! iterate `x_0 + t * proj_v(F0)`, which keeps full Newton steps (and with
//! them quadratic convergence) available near regular roots where `gamma`
//! shrinks.

use crate::error::{Error, Result};
use crate::field::{Preconditioner, ProblemDef};
use crate::linalg::{add, add_scaled, dot, norm, scale};
use crate::ROOT_MATCH_TOL;

/// Directions shorter than this cannot be projected onto.
pub const ZERO_DIRECTION_TOL: f64 = 1e-30;

/// Tolerances and bounds for the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Error-indicator tolerance for the acceptance test `t * gamma <= tau`.
    pub tau: f64,
    /// Stopping tolerance on `||F(x)||`.
    pub eps: f64,
    /// Lower bound for the step size; falling below it aborts the solve.
    pub t_lower: f64,
    /// Maximum number of outer iterations.
    pub n_max: usize,
    /// Step reduction multiplier applied to rejected trials, in (0, 1).
    pub reduce_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 0.01,
            eps: 1e-8,
            t_lower: 1e-9,
            n_max: 100,
            reduce_factor: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.t_lower > 0.0 && self.t_lower < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "t_lower must lie in (0, 1), got {}",
                self.t_lower
            )));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be positive".into()));
        }
        if !(self.reduce_factor > 0.0 && self.reduce_factor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "reduce_factor must lie in (0, 1), got {}",
                self.reduce_factor
            )));
        }
        Ok(())
    }
}

/// Terminal state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    /// `||F(final)|| <= eps`.
    Converged,
    /// The step control reduced `t` below `t_lower` without acceptance.
    StepUnderflow,
    /// The Jacobian was numerically singular at an iterate.
    SingularJacobian,
    /// The iteration cap was reached.
    MaxIterations,
    /// An evaluation overflowed to NaN or infinity.
    NonFinite,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Converged => "Converged",
            Self::StepUnderflow => "StepUnderflow",
            Self::SingularJacobian => "SingularJacobian",
            Self::MaxIterations => "MaxIterations",
            Self::NonFinite => "NonFinite",
        }
    }
}

/// One accepted outer step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Iterate the step started from.
    pub iterate: Vec<f64>,
    /// Accepted step size.
    pub step: f64,
    /// Error indicator of the accepted trial (0 for fixed-step solves).
    pub gamma: f64,
    /// `||F||` at the starting iterate.
    pub field_norm: f64,
    /// `||f||` at the starting iterate.
    pub residual_norm: f64,
    /// Number of halvings before acceptance.
    pub rejections: u32,
}

/// Ordered record of the accepted steps of one solve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub steps: Vec<StepRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Terminal state, final iterate and per-step trace of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub final_iterate: Vec<f64>,
    /// Index into the problem's known roots, when converged within 1e-4.
    pub matched_root: Option<usize>,
    pub trace: IterationTrace,
    /// Total number of field evaluations performed.
    pub field_evals: u64,
}

/// Initial step size `min(1, sqrt(2 tau / ||F(x_0)||))`.
///
/// A vanishing field norm means the start is already a fixed point; the
/// guard returns the full step 1 instead of dividing by zero.
pub fn initial_step(f0_norm: f64, tau: f64) -> f64 {
    if f0_norm == 0.0 {
        return 1.0;
    }
    (2.0 * tau / f0_norm).sqrt().min(1.0)
}

/// Orthogonal projection of `u` onto `v`: `((u, v) / ||v||^2) v`.
pub fn project(u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let vnorm = norm(v);
    if vnorm <= ZERO_DIRECTION_TOL {
        return Err(Error::ZeroDirection { norm: vnorm });
    }
    Ok(scale(v, dot(u, v) / (vnorm * vnorm)))
}

/// Error indicator `gamma = ||v/2 - proj_v(F0)||` with `v = F0 + F1`.
pub fn gamma(f0: &[f64], f1: &[f64]) -> Result<f64> {
    let v = add(f0, f1);
    let p = project(f0, &v)?;
    Ok(gamma_from(&v, &p))
}

fn gamma_from(v: &[f64], proj: &[f64]) -> f64 {
    v.iter()
        .zip(proj)
        .map(|(vi, pi)| {
            let d = vi / 2.0 - pi;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Result of one accepted adaptive step.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedStep {
    /// Projected update `x_0 + t proj_v(F0)`.
    pub x_new: Vec<f64>,
    /// Indicator value of the accepted trial.
    pub gamma: f64,
    /// Accepted step size.
    pub t_accepted: f64,
    /// Number of halvings before acceptance.
    pub rejections: u32,
}

/// Runs the inner acceptance loop from `x0` with initial trial step `t`.
///
/// Each trial evaluates the field at `x_1 = x_0 + t F(x_0)` and accepts once
/// `t * gamma <= tau`; otherwise the step is multiplied by the reduction
/// factor. Trial points where the field evaluation fails (singular Jacobian,
/// overflow) or where the direction `v` vanishes count as rejections and
/// halve the step as well; the failure turns fatal only when `t` drops below
/// `t_lower`, which is checked before every trial.
pub fn adaptive_step(
    problem: &ProblemDef,
    precond: &Preconditioner,
    x0: &[f64],
    t: f64,
    config: &SolverConfig,
) -> Result<AcceptedStep> {
    config.validate()?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "trial step must lie in (0, 1], got {t}"
        )));
    }
    let f0 = precond.eval_field(problem, x0)?;
    let mut evals = 0;
    adaptive_step_from(problem, precond, x0, &f0, t, config, &mut evals)
}

/// Inner loop used by [`solve_adaptive`]; takes the already evaluated field
/// at `x0` and counts trial evaluations into `evals`.
pub(crate) fn adaptive_step_from(
    problem: &ProblemDef,
    precond: &Preconditioner,
    x0: &[f64],
    f0: &[f64],
    t_init: f64,
    config: &SolverConfig,
    evals: &mut u64,
) -> Result<AcceptedStep> {
    let mut t = t_init;
    let mut rejections = 0u32;
    loop {
        if t < config.t_lower {
            return Err(Error::StepUnderflow {
                t,
                t_lower: config.t_lower,
            });
        }
        let x1 = add_scaled(x0, t, f0);
        *evals += 1;
        match precond.eval_field(problem, &x1) {
            Ok(f1) => {
                let v = add(f0, &f1);
                match project(f0, &v) {
                    Ok(p) => {
                        let g = gamma_from(&v, &p);
                        if t * g <= config.tau {
                            return Ok(AcceptedStep {
                                x_new: add_scaled(x0, t, &p),
                                gamma: g,
                                t_accepted: t,
                                rejections,
                            });
                        }
                    }
                    // Fold: F(x1) nearly cancels F(x0). Retry closer in.
                    Err(Error::ZeroDirection { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            // Unevaluable trial point; retreating respects the flow.
            Err(Error::SingularMatrix { .. }) | Err(Error::NonFinite) => {}
            Err(e) => return Err(e),
        }
        t *= config.reduce_factor;
        rejections += 1;
    }
}

/// One projected trial at a fixed step, without the acceptance loop.
///
/// Exposes the raw quantities of a single step: the Euler trial point
/// `x_1 = x_0 + t F(x_0)`, the projected iterate `x_0 + t proj_v(F0)` and
/// the indicator `gamma`. Evaluation errors propagate directly.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStep {
    pub x_trial: Vec<f64>,
    pub x_projected: Vec<f64>,
    pub gamma: f64,
}

pub fn trial_step(
    problem: &ProblemDef,
    precond: &Preconditioner,
    x0: &[f64],
    t: f64,
) -> Result<TrialStep> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "trial step must lie in (0, 1], got {t}"
        )));
    }
    let f0 = precond.eval_field(problem, x0)?;
    let x1 = add_scaled(x0, t, &f0);
    let f1 = precond.eval_field(problem, &x1)?;
    let v = add(&f0, &f1);
    let p = project(&f0, &v)?;
    Ok(TrialStep {
        x_projected: add_scaled(x0, t, &p),
        x_trial: x1,
        gamma: gamma_from(&v, &p),
    })
}

fn status_of(error: Error) -> SolveStatus {
    match error {
        Error::SingularMatrix { .. } => SolveStatus::SingularJacobian,
        Error::StepUnderflow { .. } => SolveStatus::StepUnderflow,
        _ => SolveStatus::NonFinite,
    }
}

fn outcome(
    problem: &ProblemDef,
    status: SolveStatus,
    final_iterate: Vec<f64>,
    trace: IterationTrace,
    field_evals: u64,
) -> SolveOutcome {
    let matched_root = if status == SolveStatus::Converged {
        problem.match_root(&final_iterate, ROOT_MATCH_TOL)
    } else {
        None
    };
    SolveOutcome {
        status,
        final_iterate,
        matched_root,
        trace,
        field_evals,
    }
}

/// Full adaptive solve from `x0`.
///
/// The first trial step is [`initial_step`]; after an accepted step with
/// indicator `gamma` the next trial step is predicted as
/// `min(1, tau / gamma)` (full step when `gamma = 0`). Stops with
/// `Converged` as soon as `||F(x)|| <= eps`, and otherwise after `n_max`
/// outer iterations. All failures are reported through the outcome status.
///
/// # Panics
///
/// Panics when the configuration is invalid or `x0` has the wrong length;
/// both are caller contract violations.
pub fn solve_adaptive(
    problem: &ProblemDef,
    precond: &Preconditioner,
    x0: &[f64],
    config: &SolverConfig,
) -> SolveOutcome {
    config.validate().expect("invalid solver configuration");
    assert_eq!(x0.len(), problem.dim(), "initial point has wrong dimension");

    let mut evals = 0u64;
    let mut x = x0.to_vec();
    let mut trace = IterationTrace::default();

    evals += 1;
    let (mut field, mut residual_norm) = match precond.eval_field_with_residual(problem, &x) {
        Ok(pair) => pair,
        Err(e) => return outcome(problem, status_of(e), x, trace, evals),
    };
    let mut field_norm = norm(&field);
    let mut t = initial_step(field_norm, config.tau);

    for _ in 0..config.n_max {
        if field_norm <= config.eps {
            return outcome(problem, SolveStatus::Converged, x, trace, evals);
        }
        let step = match adaptive_step_from(problem, precond, &x, &field, t, config, &mut evals) {
            Ok(step) => step,
            Err(e) => return outcome(problem, status_of(e), x, trace, evals),
        };
        trace.steps.push(StepRecord {
            iterate: std::mem::replace(&mut x, step.x_new),
            step: step.t_accepted,
            gamma: step.gamma,
            field_norm,
            residual_norm,
            rejections: step.rejections,
        });
        evals += 1;
        match precond.eval_field_with_residual(problem, &x) {
            Ok((f, rn)) => {
                field = f;
                residual_norm = rn;
                field_norm = norm(&field);
            }
            Err(e) => return outcome(problem, status_of(e), x, trace, evals),
        }
        t = if step.gamma == 0.0 {
            1.0
        } else {
            (config.tau / step.gamma).min(1.0)
        };
    }

    let status = if field_norm <= config.eps {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterations
    };
    outcome(problem, status, x, trace, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DomainBox;
    use crate::linalg::distance;

    fn identity_problem() -> ProblemDef {
        // f(x) = x, root at the origin.
        ProblemDef::new(2, DomainBox::square(-10.0, 10.0), |x| x.to_vec())
            .unwrap()
            .with_jacobian(|_| vec![1.0, 0.0, 0.0, 1.0])
            .with_known_roots(vec![vec![0.0, 0.0]])
            .unwrap()
    }

    #[test]
    fn initial_step_examples() {
        assert_eq!(initial_step(2.0, 0.01), 0.1);
        // cap active once ||F|| <= 2 tau
        assert_eq!(initial_step(0.02, 0.01), 1.0);
        assert_eq!(initial_step(0.001, 0.01), 1.0);
        // division guard
        assert_eq!(initial_step(0.0, 0.01), 1.0);
    }

    #[test]
    fn project_examples() {
        let p = project(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(distance(&p, &[0.5, 0.5]) < 1e-15);

        // projecting a vector onto itself is the identity
        let u = [0.3, -1.7, 2.2];
        let p = project(&u, &u).unwrap();
        assert!(distance(&p, &u) < 1e-15);

        // orthogonal input projects to zero
        let p = project(&[1.0, 0.0], &[0.0, 2.0]).unwrap();
        assert_eq!(p, vec![0.0, 0.0]);

        assert!(matches!(
            project(&[1.0, 0.0], &[0.0, 0.0]),
            Err(Error::ZeroDirection { .. })
        ));
    }

    #[test]
    fn gamma_examples() {
        // equal fields have zero indicator
        let g = gamma(&[0.4, -0.3], &[0.4, -0.3]).unwrap();
        assert!(g <= 1e-15);

        // symmetric case: proj of F0 onto (1,1) equals v/2
        let g = gamma(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(g <= 1e-15);

        // frozen from exact rational arithmetic: gamma = (3/10) sqrt(5)
        let g = gamma(&[1.0, 0.0], &[0.0, 2.0]).unwrap();
        let expected = 0.3 * 5.0f64.sqrt();
        assert!((g - expected).abs() < 1e-15, "gamma {g} vs {expected}");
    }

    #[test]
    fn adaptive_step_halves_on_affine_problem_far_from_root() {
        // f(x) = x from (1, 0): the Euler trial with t = 1 lands exactly on
        // the root, so gamma(t) = t/2 and acceptance needs t^2/2 <= tau,
        // i.e. three halvings down to t = 1/8.
        let p = identity_problem();
        let cfg = SolverConfig::default();
        let step = adaptive_step(&p, &Preconditioner::NewtonInverse, &[1.0, 0.0], 1.0, &cfg)
            .unwrap();
        assert_eq!(step.rejections, 3);
        assert_eq!(step.t_accepted, 0.125);
        assert!((step.gamma - 0.0625).abs() < 1e-15);
        assert!(step.t_accepted * step.gamma <= cfg.tau);
        assert!(distance(&step.x_new, &[0.875, 0.0]) < 1e-15);
    }

    #[test]
    fn adaptive_step_underflows_when_started_below_t_lower() {
        let p = identity_problem();
        let mut cfg = SolverConfig::default();
        cfg.t_lower = 1e-2;
        let mut evals = 0;
        let f0 = Preconditioner::NewtonInverse
            .eval_field(&p, &[1.0, 0.0])
            .unwrap();
        let err = adaptive_step_from(
            &p,
            &Preconditioner::NewtonInverse,
            &[1.0, 0.0],
            &f0,
            1e-3,
            &cfg,
            &mut evals,
        )
        .unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }));
        // the guard fires before any trial evaluation
        assert_eq!(evals, 0);
    }

    #[test]
    fn solve_adaptive_converges_immediately_at_root() {
        let p = identity_problem();
        let out = solve_adaptive(
            &p,
            &Preconditioner::NewtonInverse,
            &[0.0, 0.0],
            &SolverConfig::default(),
        );
        assert_eq!(out.status, SolveStatus::Converged);
        assert!(out.trace.is_empty());
        assert_eq!(out.matched_root, Some(0));
    }

    #[test]
    fn solve_adaptive_is_deterministic() {
        let p = identity_problem();
        let run = || {
            solve_adaptive(
                &p,
                &Preconditioner::NewtonInverse,
                &[1.3, -0.4],
                &SolverConfig::default(),
            )
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn accepted_steps_satisfy_contract() {
        let p = identity_problem();
        let out = solve_adaptive(
            &p,
            &Preconditioner::NewtonInverse,
            &[2.0, 1.0],
            &SolverConfig::default(),
        );
        let cfg = SolverConfig::default();
        for rec in &out.trace.steps {
            assert!(rec.step * rec.gamma <= cfg.tau);
            assert!(rec.step >= cfg.t_lower);
        }
    }
}
