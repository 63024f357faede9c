//! Nonlinear systems and the preconditioned vector field `F(x) = A(x) f(x)`.
//!
//! A [`ProblemDef`] bundles a residual evaluator, an optional analytic
//! Jacobian (a central finite difference fills in otherwise), a domain box
//! that scopes grid sampling, and the list of known roots. Evaluators must be
//! total on all of R^n; the box does not clamp anything.
//!
//! A [`Preconditioner`] selects the matrix `A(x)` that turns the residual
//! into the flow field:
//!
//! * `NegIdentity`: `A(x) = -Id`, the fixed-point (Picard) field `-f(x)`,
//! * `NewtonInverse`: `A(x) = -J_f(x)^{-1}`, the Newton field,
//! * `FrozenNewton`: `A(x) = -J_f(x_0)^{-1}` with the factorization of the
//!   initial Jacobian computed once and reused.

use crate::error::{Error, Result};
use crate::linalg::{all_finite, norm, LuDecomposition, Matrix};

/// Residual norm bound a claimed root must satisfy at construction.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

pub type ResidualFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
/// Returns the Jacobian in row-major order (row i = gradient of f_i).
pub type JacobianFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Axis-aligned box, one `[lo, hi]` interval per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                actual: hi.len(),
            });
        }
        if !all_finite(&lo) || !all_finite(&hi) {
            return Err(Error::NonFinite);
        }
        if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
            return Err(Error::InvalidParameter(
                "domain box needs lo < hi on every axis".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    /// The square `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64) -> Self {
        Self::new(vec![lo, lo], vec![hi, hi]).expect("invalid square bounds")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    pub fn contains_box(&self, other: &DomainBox) -> bool {
        other.dim() == self.dim()
            && self.contains(other.lo())
            && self.contains(other.hi())
    }
}

/// A dimension-n nonlinear system `f(x) = 0`.
pub struct ProblemDef {
    dim: usize,
    f: Box<ResidualFn>,
    jac: Option<Box<JacobianFn>>,
    domain: DomainBox,
    known_roots: Vec<Vec<f64>>,
}

impl std::fmt::Debug for ProblemDef {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("ProblemDef")
            .field("dim", &self.dim)
            .field("analytic_jacobian", &self.jac.is_some())
            .field("domain", &self.domain)
            .field("known_roots", &self.known_roots)
            .finish()
    }
}

impl ProblemDef {
    pub fn new<F>(dim: usize, domain: DomainBox, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if domain.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: domain.dim(),
            });
        }
        Ok(Self {
            dim,
            f: Box::new(f),
            jac: None,
            domain,
            known_roots: Vec::new(),
        })
    }

    pub fn with_jacobian<J>(mut self, jac: J) -> Self
    where
        J: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.jac = Some(Box::new(jac));
        self
    }

    /// Attaches the known roots, validating `||f(r)|| <= 1e-10` for each.
    pub fn with_known_roots(mut self, roots: Vec<Vec<f64>>) -> Result<Self> {
        for root in &roots {
            if root.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: root.len(),
                });
            }
            let residual = self.eval_f(root)?;
            let rnorm = norm(&residual);
            if rnorm > ROOT_RESIDUAL_TOL {
                return Err(Error::InvalidParameter(format!(
                    "claimed root {root:?} has residual norm {rnorm:e}"
                )));
            }
        }
        self.known_roots = roots;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn known_roots(&self) -> &[Vec<f64>] {
        &self.known_roots
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    /// Evaluates the residual `f(x)`.
    pub fn eval_f(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let out = (self.f)(x);
        if out.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: out.len(),
            });
        }
        if !all_finite(&out) {
            return Err(Error::NonFinite);
        }
        Ok(out)
    }

    /// Evaluates the Jacobian: the analytic one when present, otherwise a
    /// central finite difference with the default step scale.
    pub fn eval_jacobian(&self, x: &[f64]) -> Result<Matrix> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        match &self.jac {
            Some(jac) => Matrix::new(self.dim, self.dim, jac(x)),
            None => self.finite_difference_jacobian(x, default_fd_scale()),
        }
    }

    /// Central-difference Jacobian. Column j uses the step
    /// `h_scale * max(1, |x_j|)` and divides by the actually realized
    /// coordinate difference, which keeps affine maps exact up to roundoff.
    pub fn finite_difference_jacobian(&self, x: &[f64], h_scale: f64) -> Result<Matrix> {
        if !(h_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "finite-difference step scale must be positive, got {h_scale}"
            )));
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let n = self.dim;
        let mut jac = Matrix::zeros(n, n);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        for j in 0..n {
            let h = h_scale * x[j].abs().max(1.0);
            xp[j] = x[j] + h;
            xm[j] = x[j] - h;
            let fp = self.eval_f(&xp)?;
            let fm = self.eval_f(&xm)?;
            let denom = xp[j] - xm[j];
            for i in 0..n {
                jac.set(i, j, (fp[i] - fm[i]) / denom);
            }
            xp[j] = x[j];
            xm[j] = x[j];
        }
        Ok(jac)
    }

    /// Index of the nearest known root within `tol` (Euclidean), if any.
    pub fn match_root(&self, x: &[f64], tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, root) in self.known_roots.iter().enumerate() {
            let d = crate::linalg::distance(x, root);
            if d <= tol && best.map_or(true, |(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        best.map(|(k, _)| k)
    }
}

/// Default finite-difference step scale, `sqrt(machine epsilon)`.
pub fn default_fd_scale() -> f64 {
    f64::EPSILON.sqrt()
}

/// Jacobian factorization frozen at a base point.
#[derive(Debug, Clone)]
pub struct FrozenJacobian {
    base_point: Vec<f64>,
    factors: LuDecomposition,
}

impl FrozenJacobian {
    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }
}

/// Choice of `A(x)` in `F(x) = A(x) f(x)`.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    /// `A(x) = -Id`: Picard iteration field `-f(x)`.
    NegIdentity,
    /// `A(x) = -J_f(x)^{-1}`: Newton field, solved by LU each evaluation.
    NewtonInverse,
    /// `A(x) = -J_f(x_0)^{-1}` with the factorization computed once.
    FrozenNewton(FrozenJacobian),
}

impl Preconditioner {
    /// Factors `J_f(x0)` once; every later evaluation reuses the factors and
    /// is therefore bit-identical across calls.
    pub fn frozen_newton(problem: &ProblemDef, x0: &[f64]) -> Result<Self> {
        let jac = problem.eval_jacobian(x0)?;
        let factors = LuDecomposition::factor(&jac)?;
        Ok(Self::FrozenNewton(FrozenJacobian {
            base_point: x0.to_vec(),
            factors,
        }))
    }

    /// Evaluates `F(x) = A(x) f(x)`.
    pub fn eval_field(&self, problem: &ProblemDef, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval_field_with_residual(problem, x)?.0)
    }

    /// Evaluates the field and also reports `||f(x)||`, which solvers record
    /// alongside `||F(x)||` in their traces.
    pub fn eval_field_with_residual(
        &self,
        problem: &ProblemDef,
        x: &[f64],
    ) -> Result<(Vec<f64>, f64)> {
        let f = problem.eval_f(x)?;
        let residual_norm = norm(&f);
        let field = match self {
            Self::NegIdentity => f.iter().map(|v| -v).collect(),
            Self::NewtonInverse => {
                let jac = problem.eval_jacobian(x)?;
                let y = LuDecomposition::factor(&jac)?.solve(&f)?;
                y.iter().map(|v| -v).collect::<Vec<f64>>()
            }
            Self::FrozenNewton(frozen) => {
                let y = frozen.factors.solve(&f)?;
                y.iter().map(|v| -v).collect::<Vec<f64>>()
            }
        };
        if !all_finite(&field) {
            return Err(Error::NonFinite);
        }
        Ok((field, residual_norm))
    }
}
