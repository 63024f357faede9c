//! Fixed-step baselines and the continuous-flow reference integrator.
//!
//! `solve_fixed_step` runs `x_{n+1} = x_n + t F(x_n)` with a constant step;
//! `t = 1` with the Newton preconditioner is the classical Newton method.
//! `integrate_reference` follows the continuous Newton flow
//! `x'(t) = -J_f(x)^{-1} f(x)` with a fixed-step fourth-order Runge-Kutta
//! scheme and serves as the trajectory and attractor oracle: along exact
//! solutions the residual decays as `f(x(t)) = f(x_0) e^{-t}`.

use crate::adaptive::{IterationTrace, SolveOutcome, SolveStatus, SolverConfig, StepRecord};
use crate::error::{Error, Result};
use crate::field::{Preconditioner, ProblemDef};
use crate::linalg::{add_scaled, norm};
use crate::ROOT_MATCH_TOL;

/// `||F||` threshold at which the reference integrator stops early.
pub const REFERENCE_EPS: f64 = 1e-8;

/// Why a reference trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryEnd {
    /// Integrated up to the requested horizon.
    Horizon,
    /// The field norm dropped below the stopping threshold.
    Converged,
    /// A stage evaluation hit the singular set of the Jacobian.
    SingularSet,
    /// A stage evaluation overflowed.
    NonFinite,
}

/// Time-ordered samples of one continuous-flow trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `(time, point)` samples, starting at `(0, x0)`, strictly increasing.
    pub samples: Vec<(f64, Vec<f64>)>,
    pub end: TrajectoryEnd,
}

impl Trajectory {
    pub fn final_point(&self) -> &[f64] {
        &self.samples.last().expect("trajectory has samples").1
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().expect("trajectory has samples").0
    }
}

/// Fixed-step iteration `x_{n+1} = x_n + t F(x_n)`.
///
/// # Panics
///
/// Panics on an invalid configuration, a step outside `(0, 1]`, or an
/// initial point of the wrong length.
pub fn solve_fixed_step(
    problem: &ProblemDef,
    precond: &Preconditioner,
    x0: &[f64],
    t_fixed: f64,
    config: &SolverConfig,
) -> SolveOutcome {
    config.validate().expect("invalid solver configuration");
    assert!(
        t_fixed > 0.0 && t_fixed <= 1.0,
        "fixed step must lie in (0, 1], got {t_fixed}"
    );
    assert_eq!(x0.len(), problem.dim(), "initial point has wrong dimension");

    let mut evals = 0u64;
    let mut x = x0.to_vec();
    let mut trace = IterationTrace::default();

    let finish = |problem: &ProblemDef, status, x: Vec<f64>, trace, evals| {
        let matched_root = if status == SolveStatus::Converged {
            problem.match_root(&x, ROOT_MATCH_TOL)
        } else {
            None
        };
        SolveOutcome {
            status,
            final_iterate: x,
            matched_root,
            trace,
            field_evals: evals,
        }
    };

    evals += 1;
    let (mut field, mut residual_norm) = match precond.eval_field_with_residual(problem, &x) {
        Ok(pair) => pair,
        Err(e) => return finish(problem, status_of(e), x, trace, evals),
    };
    let mut field_norm = norm(&field);

    for _ in 0..config.n_max {
        if field_norm <= config.eps {
            return finish(problem, SolveStatus::Converged, x, trace, evals);
        }
        let next = add_scaled(&x, t_fixed, &field);
        trace.steps.push(StepRecord {
            iterate: std::mem::replace(&mut x, next),
            step: t_fixed,
            gamma: 0.0,
            field_norm,
            residual_norm,
            rejections: 0,
        });
        evals += 1;
        match precond.eval_field_with_residual(problem, &x) {
            Ok((f, rn)) => {
                field = f;
                residual_norm = rn;
                field_norm = norm(&field);
            }
            Err(e) => return finish(problem, status_of(e), x, trace, evals),
        }
    }

    let status = if field_norm <= config.eps {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterations
    };
    finish(problem, status, x, trace, evals)
}

fn status_of(error: Error) -> SolveStatus {
    match error {
        Error::SingularMatrix { .. } => SolveStatus::SingularJacobian,
        _ => SolveStatus::NonFinite,
    }
}

/// Integrates the continuous Newton flow from `x0` up to `t_end` with
/// fixed-step classical Runge-Kutta at step `dt`.
///
/// Stops early when `||F|| <=` [`REFERENCE_EPS`] or when a stage evaluation
/// fails; hitting the singular set is an expected trajectory end, not an
/// error. Requires `dt <= 1e-2` so the oracle stays trustworthy.
pub fn integrate_reference(
    problem: &ProblemDef,
    x0: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    integrate_with_eps(problem, x0, dt, t_end, REFERENCE_EPS)
}

fn integrate_with_eps(
    problem: &ProblemDef,
    x0: &[f64],
    dt: f64,
    t_end: f64,
    eps: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt <= 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "reference step must lie in (0, 1e-2], got {dt}"
        )));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive, got {t_end}"
        )));
    }
    if x0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            actual: x0.len(),
        });
    }

    let field = Preconditioner::NewtonInverse;
    let n_full = (t_end / dt + 1e-9).floor() as usize;
    let remainder = t_end - n_full as f64 * dt;

    let mut samples = Vec::with_capacity(n_full + 2);
    let mut x = x0.to_vec();
    samples.push((0.0, x.clone()));

    // Along exact trajectories f(x(t)) = f(x_0) e^{-t}, so the residual norm
    // decreases strictly. A residual that grows after a step means the
    // integrator was thrown across the singular set by an exploding field;
    // the exact trajectory ends there, and so does this one.
    let (mut fld, mut res) = match field.eval_field_with_residual(problem, &x) {
        Ok(pair) => pair,
        Err(e) => return Ok(ended(samples, e)),
    };

    let step = |x: &[f64], k1: &[f64], h: f64| -> Result<Vec<f64>> {
        let k2 = field.eval_field(problem, &add_scaled(x, h / 2.0, k1))?;
        let k3 = field.eval_field(problem, &add_scaled(x, h / 2.0, &k2))?;
        let k4 = field.eval_field(problem, &add_scaled(x, h, &k3))?;
        let next: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, xi)| xi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        if !crate::linalg::all_finite(&next) {
            return Err(Error::NonFinite);
        }
        Ok(next)
    };

    let mut advance = |x: &mut Vec<f64>,
                       fld: &mut Vec<f64>,
                       res: &mut f64,
                       h: f64|
     -> std::result::Result<(), TrajectoryEnd> {
        let next = step(x, fld, h).map_err(|e| match e {
            Error::SingularMatrix { .. } => TrajectoryEnd::SingularSet,
            _ => TrajectoryEnd::NonFinite,
        })?;
        match field.eval_field_with_residual(problem, &next) {
            Ok((f, r)) if r <= *res => {
                *x = next;
                *fld = f;
                *res = r;
                Ok(())
            }
            Ok(_) => Err(TrajectoryEnd::SingularSet),
            Err(Error::SingularMatrix { .. }) => Err(TrajectoryEnd::SingularSet),
            Err(_) => Err(TrajectoryEnd::NonFinite),
        }
    };

    for k in 0..n_full {
        if norm(&fld) <= eps {
            return Ok(Trajectory {
                samples,
                end: TrajectoryEnd::Converged,
            });
        }
        match advance(&mut x, &mut fld, &mut res, dt) {
            Ok(()) => samples.push(((k + 1) as f64 * dt, x.clone())),
            Err(end) => return Ok(Trajectory { samples, end }),
        }
    }

    if remainder > 1e-12 * t_end && norm(&fld) > eps {
        match advance(&mut x, &mut fld, &mut res, remainder) {
            Ok(()) => samples.push((t_end, x.clone())),
            Err(end) => return Ok(Trajectory { samples, end }),
        }
    }

    let end = if norm(&fld) <= eps {
        TrajectoryEnd::Converged
    } else {
        TrajectoryEnd::Horizon
    };
    Ok(Trajectory { samples, end })
}

fn ended(samples: Vec<(f64, Vec<f64>)>, error: Error) -> Trajectory {
    let end = match error {
        Error::SingularMatrix { .. } => TrajectoryEnd::SingularSet,
        _ => TrajectoryEnd::NonFinite,
    };
    Trajectory { samples, end }
}

/// Settings for the continuous-flow attractor oracle.
///
/// The default horizon of 40 shrinks the residual by `e^{-40} ~ 4e-18`
/// along exact trajectories, ample for the 1e-4 root matching.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub dt: f64,
    pub t_end: f64,
    pub match_tol: f64,
    pub eps: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            t_end: 40.0,
            match_tol: ROOT_MATCH_TOL,
            eps: REFERENCE_EPS,
        }
    }
}

/// Which root the exact continuous flow from `x0` approaches.
///
/// Follows the reference trajectory and matches its terminal point against
/// the known roots. Returns `None` ("no attractor") when the trajectory
/// dies at the singular set, overflows, or ends near no known root.
pub fn attractor_oracle(
    problem: &ProblemDef,
    x0: &[f64],
    config: &OracleConfig,
) -> Option<usize> {
    let trajectory =
        integrate_with_eps(problem, x0, config.dt, config.t_end, config.eps).ok()?;
    match trajectory.end {
        TrajectoryEnd::SingularSet | TrajectoryEnd::NonFinite => None,
        TrajectoryEnd::Horizon | TrajectoryEnd::Converged => {
            problem.match_root(trajectory.final_point(), config.match_tol)
        }
    }
}
