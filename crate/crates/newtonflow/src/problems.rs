//! Built-in benchmark systems.
//!
//! Three two-dimensional systems with analytic Jacobians, domain boxes and
//! known roots:
//!
//! * `Cubic`: the complex cubic `z^3 - 1` in real form, three roots,
//!   Jacobian singular only at the origin.
//! * `ExpSin`: `(exp(x^2+y^2) - 3, x + y - sin(3(x+y)))`, six roots, with
//!   the Jacobian singular on `{y = x}` and on the line family
//!   `{x + y = +-arccos(1/3)/3 + 2 pi k / 3}`.
//! * `UniqueRoot`: `(-x^2 + y + 3, -x y - x + 4)` with the single root
//!   `(2, 1)`.

use crate::field::{DomainBox, ProblemDef};

/// Positive solution of `s = sin(3 s)`; derived by bisection on the
/// defining curve of the second `ExpSin` component.
pub const EXPSIN_S1: f64 = 0.7596208866919427;

// Roots of ExpSin on the circle x^2 + y^2 = ln 3.
// For x + y = 0:   (A, -A) with A = sqrt(ln 3 / 2).
// For x + y = s1:  ((s1 + W)/2, (s1 - W)/2) with W = sqrt(2 ln 3 - s1^2),
// and the mirrored/negated counterparts.
const EXPSIN_A: f64 = 0.7411519036837555;
const EXPSIN_X: f64 = 1.0162459636144363;
const EXPSIN_Y: f64 = -0.2566250769224934;

/// Identifier of a built-in problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinId {
    Cubic,
    ExpSin,
    UniqueRoot,
}

impl BuiltinId {
    pub const ALL: [BuiltinId; 3] = [BuiltinId::Cubic, BuiltinId::ExpSin, BuiltinId::UniqueRoot];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cubic => "cubic",
            Self::ExpSin => "expsin",
            Self::UniqueRoot => "uniqueroot",
        }
    }
}

/// Constructs the problem definition for a built-in system.
pub fn builtin_problem(id: BuiltinId) -> ProblemDef {
    match id {
        BuiltinId::Cubic => cubic(),
        BuiltinId::ExpSin => expsin(),
        BuiltinId::UniqueRoot => unique_root(),
    }
}

fn cubic() -> ProblemDef {
    ProblemDef::new(2, DomainBox::square(-3.0, 3.0), |p| {
        let (x, y) = (p[0], p[1]);
        vec![x * x * x - 3.0 * x * y * y - 1.0, 3.0 * x * x * y - y * y * y]
    })
    .unwrap()
    .with_jacobian(|p| {
        // real form of 3 z^2
        let (x, y) = (p[0], p[1]);
        let a = 3.0 * (x * x - y * y);
        let b = 6.0 * x * y;
        vec![a, -b, b, a]
    })
    .with_known_roots(vec![
        vec![1.0, 0.0],
        vec![-0.5, 3.0f64.sqrt() / 2.0],
        vec![-0.5, -(3.0f64.sqrt()) / 2.0],
    ])
    .expect("cubic roots validate")
}

fn expsin() -> ProblemDef {
    ProblemDef::new(2, DomainBox::square(-1.5, 1.5), |p| {
        let (x, y) = (p[0], p[1]);
        let s = x + y;
        vec![(x * x + y * y).exp() - 3.0, s - (3.0 * s).sin()]
    })
    .unwrap()
    .with_jacobian(|p| {
        let (x, y) = (p[0], p[1]);
        let e = (x * x + y * y).exp();
        let c = 1.0 - 3.0 * (3.0 * (x + y)).cos();
        vec![2.0 * x * e, 2.0 * y * e, c, c]
    })
    .with_known_roots(vec![
        vec![EXPSIN_A, -EXPSIN_A],
        vec![-EXPSIN_A, EXPSIN_A],
        vec![EXPSIN_X, EXPSIN_Y],
        vec![EXPSIN_Y, EXPSIN_X],
        vec![-EXPSIN_X, -EXPSIN_Y],
        vec![-EXPSIN_Y, -EXPSIN_X],
    ])
    .expect("expsin roots validate")
}

fn unique_root() -> ProblemDef {
    ProblemDef::new(2, DomainBox::square(-10.0, 10.0), |p| {
        let (x, y) = (p[0], p[1]);
        vec![-x * x + y + 3.0, -x * y - x + 4.0]
    })
    .unwrap()
    .with_jacobian(|p| {
        let (x, y) = (p[0], p[1]);
        vec![-2.0 * x, 1.0, -y - 1.0, -x]
    })
    .with_known_roots(vec![vec![2.0, 1.0]])
    .expect("unique root validates")
}

/// Distance to the singular set of the Jacobian, exact where the set is
/// characterized and a determinant magnitude otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularDistance {
    /// Euclidean distance to the characterized singular set.
    Exact(f64),
    /// `|det J_f(x)|` as a proxy; the set itself is not characterized.
    DetProxy(f64),
}

impl SingularDistance {
    pub fn value(self) -> f64 {
        match self {
            Self::Exact(d) | Self::DetProxy(d) => d,
        }
    }

    pub fn is_proxy(self) -> bool {
        matches!(self, Self::DetProxy(_))
    }
}

/// Distance from `x` to the singular set of the built-in's Jacobian.
///
/// `Cubic`: the set is the origin. `ExpSin`: minimum over the line `{y = x}`
/// and the family `{x + y = +-arccos(1/3)/3 mod 2 pi / 3}`. `UniqueRoot`:
/// no characterization, so `|det J_f(x)|` is returned as a proxy.
pub fn singular_set_distance(id: BuiltinId, x: &[f64]) -> SingularDistance {
    assert_eq!(x.len(), 2, "built-in problems are two-dimensional");
    let (a, b) = (x[0], x[1]);
    match id {
        BuiltinId::Cubic => SingularDistance::Exact(a.hypot(b)),
        BuiltinId::ExpSin => {
            let diag = (b - a).abs() / 2.0f64.sqrt();
            let period = 2.0 * std::f64::consts::PI / 3.0;
            let offset = (1.0f64 / 3.0).acos() / 3.0;
            let s = a + b;
            let r = s - period * (s / period).round();
            let along_sum = (r - offset).abs().min((r + offset).abs());
            SingularDistance::Exact(diag.min(along_sum / 2.0f64.sqrt()))
        }
        BuiltinId::UniqueRoot => {
            // det J_f = 2 x^2 + y + 1
            SingularDistance::DetProxy((2.0 * a * a + b + 1.0).abs())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Preconditioner;
    use crate::linalg::norm;

    /// Bisection on a bracketing interval; the independent oracle for the
    /// hard-coded constants.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        assert!(f(lo) * f(hi) < 0.0, "no sign change");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn expsin_constants_rederived_by_bisection() {
        let s1 = bisect(|s| s - (3.0 * s).sin(), 0.5, 1.0);
        assert!((s1 - EXPSIN_S1).abs() < 1e-14, "s1 = {s1}");

        let ln3 = 3.0f64.ln();
        let a = bisect(|r| 2.0 * r * r - ln3, 0.1, 1.0);
        assert!((a - EXPSIN_A).abs() < 1e-14, "a = {a}");

        let w = (2.0 * ln3 - s1 * s1).sqrt();
        assert!(((s1 + w) / 2.0 - EXPSIN_X).abs() < 1e-14);
        assert!(((s1 - w) / 2.0 - EXPSIN_Y).abs() < 1e-14);
    }

    #[test]
    fn all_stored_roots_have_tiny_residuals() {
        for id in BuiltinId::ALL {
            let p = builtin_problem(id);
            assert!(!p.known_roots().is_empty());
            for root in p.known_roots() {
                let r = norm(&p.eval_f(root).unwrap());
                assert!(r <= 1e-10, "{:?} root {root:?} residual {r:e}", id);
            }
        }
    }

    #[test]
    fn expsin_has_six_roots_inside_its_domain() {
        let p = builtin_problem(BuiltinId::ExpSin);
        assert_eq!(p.known_roots().len(), 6);
        for root in p.known_roots() {
            assert!(p.domain().contains(root), "root {root:?} outside box");
        }
    }

    #[test]
    fn eval_f_frozen_examples() {
        let unique = builtin_problem(BuiltinId::UniqueRoot);
        assert_eq!(unique.eval_f(&[2.0, 1.0]).unwrap(), vec![0.0, 0.0]);

        let cubic = builtin_problem(BuiltinId::Cubic);
        assert_eq!(cubic.eval_f(&[1.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(cubic.eval_f(&[0.0, 0.0]).unwrap(), vec![-1.0, 0.0]);
    }

    #[test]
    fn jacobian_frozen_examples() {
        // d/dz z^3 = 3 z^2; at z = 1 the real form is 3 Id.
        let cubic = builtin_problem(BuiltinId::Cubic);
        let j = cubic.eval_jacobian(&[1.0, 0.0]).unwrap();
        assert_eq!(
            (j.get(0, 0), j.get(0, 1), j.get(1, 0), j.get(1, 1)),
            (3.0, 0.0, 0.0, 3.0)
        );

        let unique = builtin_problem(BuiltinId::UniqueRoot);
        let j = unique.eval_jacobian(&[2.0, 1.0]).unwrap();
        assert_eq!(
            (j.get(0, 0), j.get(0, 1), j.get(1, 0), j.get(1, 1)),
            (-4.0, 1.0, -2.0, -2.0)
        );

        // ExpSin is singular along the diagonal.
        let expsin = builtin_problem(BuiltinId::ExpSin);
        for v in [-1.2, -0.3, 0.4, 1.1] {
            let det = expsin.eval_jacobian(&[v, v]).unwrap().det();
            assert!(det.abs() < 1e-12, "det {det:e} at ({v}, {v})");
        }
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        // Deterministic pseudo-random sweep over each domain box.
        for id in BuiltinId::ALL {
            let p = builtin_problem(id);
            let (lo, hi) = (p.domain().lo().to_vec(), p.domain().hi().to_vec());
            let mut state = 0x9e3779b97f4a7c15u64;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            for _ in 0..200 {
                let x = [
                    lo[0] + (hi[0] - lo[0]) * next(),
                    lo[1] + (hi[1] - lo[1]) * next(),
                ];
                let ja = p.eval_jacobian(&x).unwrap();
                let jf = p
                    .finite_difference_jacobian(&x, crate::field::default_fd_scale())
                    .unwrap();
                let scale = ja.frobenius_norm().max(1.0);
                for i in 0..2 {
                    for j in 0..2 {
                        let diff = (ja.get(i, j) - jf.get(i, j)).abs() / scale;
                        assert!(diff <= 1e-5, "{id:?} at {x:?}: entry ({i},{j}) off by {diff:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn cubic_real_form_matches_complex_evaluation() {
        use num_complex::Complex64;
        let p = builtin_problem(BuiltinId::Cubic);
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
        };
        for _ in 0..100 {
            let z = Complex64::new(next(), next());
            let w = z * z * z - Complex64::new(1.0, 0.0);
            let f = p.eval_f(&[z.re, z.im]).unwrap();
            assert!((f[0] - w.re).abs() <= 1e-12);
            assert!((f[1] - w.im).abs() <= 1e-12);
        }
    }

    #[test]
    fn singular_distance_frozen_examples() {
        assert_eq!(
            singular_set_distance(BuiltinId::Cubic, &[0.0, 0.0]),
            SingularDistance::Exact(0.0)
        );
        // on the diagonal
        let d = singular_set_distance(BuiltinId::ExpSin, &[0.5, 0.5]);
        assert_eq!(d, SingularDistance::Exact(0.0));
        // slightly above (0.5, -0.5): closest family is the arccos lines
        let offset = (1.0f64 / 3.0).acos() / 3.0;
        for d_small in [1e-3, 1e-2, 0.1] {
            let got = singular_set_distance(BuiltinId::ExpSin, &[0.5, -0.5 + d_small]).value();
            let expected = (offset - d_small).abs() / 2.0f64.sqrt();
            assert!(got > 0.0);
            assert!(
                (got - expected).abs() < 1e-12,
                "distance {got} vs {expected} at d = {d_small}"
            );
        }
    }

    #[test]
    fn singular_distance_proxy_matches_actual_determinant() {
        let p = builtin_problem(BuiltinId::UniqueRoot);
        for x in [[0.0, 0.0], [2.0, 1.0], [-3.0, 4.0], [0.5, -1.5], [1.0, -3.0]] {
            let proxy = singular_set_distance(BuiltinId::UniqueRoot, &x);
            assert!(proxy.is_proxy());
            let det = p.eval_jacobian(&x).unwrap().det();
            assert!((proxy.value() - det.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn determinant_changes_sign_across_characterized_curves() {
        // ExpSin diagonal {y = x}, crossed away from the arccos family.
        let expsin = builtin_problem(BuiltinId::ExpSin);
        let transect = |p: &ProblemDef, a: [f64; 2], b: [f64; 2]| {
            let da = p.eval_jacobian(&a).unwrap().det();
            let db = p.eval_jacobian(&b).unwrap().det();
            assert!(da * db < 0.0, "no sign change between {a:?} and {b:?}");
        };
        transect(&expsin, [0.45, 0.55], [0.55, 0.45]);
        // arccos family: x + y = arccos(1/3)/3, crossed along the diagonal
        // direction at fixed x - y.
        let offset = (1.0f64 / 3.0).acos() / 3.0;
        transect(
            &expsin,
            [0.5 + (offset - 0.05) / 2.0, -0.5 + (offset - 0.05) / 2.0],
            [0.5 + (offset + 0.05) / 2.0, -0.5 + (offset + 0.05) / 2.0],
        );
        // UniqueRoot proxy parabola 2x^2 + y + 1 = 0.
        let unique = builtin_problem(BuiltinId::UniqueRoot);
        transect(&unique, [1.0, -3.1], [1.0, -2.9]);
        // Cubic: det = 9 |z|^4 never changes sign; it vanishes only at the
        // origin.
        let cubic = builtin_problem(BuiltinId::Cubic);
        for x in [[0.3, 0.4], [-1.0, 2.0], [0.01, -0.02]] {
            assert!(cubic.eval_jacobian(&x).unwrap().det() > 0.0);
        }
    }

    #[test]
    fn newton_field_vanishes_at_roots() {
        let cubic = builtin_problem(BuiltinId::Cubic);
        let f = Preconditioner::NewtonInverse
            .eval_field(&cubic, &[1.0, 0.0])
            .unwrap();
        assert_eq!(f, vec![0.0, 0.0]);

        // on the real axis at x = 2: f = 7, f' = 12
        let f = Preconditioner::NewtonInverse
            .eval_field(&cubic, &[2.0, 0.0])
            .unwrap();
        assert!((f[0] - (-7.0 / 12.0)).abs() < 1e-15);
        assert!(f[1].abs() < 1e-15);

        // Picard field is the sign flip of the residual
        let f = Preconditioner::NegIdentity
            .eval_field(&cubic, &[0.0, 0.0])
            .unwrap();
        assert_eq!(f, vec![1.0, 0.0]);
    }
}
