//! High-accuracy symmetric eigensolver.
//!
//! One-sided Jacobi produces an eigenbasis whose orthogonality degrades by a
//! few ulps per sweep. The basis is then polished with Newton-type refinement
//! steps whose residuals `I - XᵀX` and `XᵀAX` are evaluated with error-free
//! transformations (`two_sum`/`two_prod`), so the result is accurate to
//! roughly working precision even for eigenvalues many orders of magnitude
//! below `‖A‖`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const REFINEMENT_STEPS: usize = 3;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Compensated dot product returned as an unevaluated sum `hi + lo`.
fn dot2_pair(pairs: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let (mut s, mut c) = (0.0, 0.0);
    for (a, b) in pairs {
        let (p, pe) = two_prod(a, b);
        let (t, te) = two_sum(s, p);
        s = t;
        c += pe + te;
    }
    two_sum(s, c)
}

fn dot2(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (hi, lo) = dot2_pair(pairs);
    hi + lo
}

/// Right singular vectors of `a` by cyclic one-sided (Hestenes) Jacobi.
fn one_sided_jacobi(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                {
                    let cp = w.column(p);
                    let cq = w.column(q);
                    for i in 0..m {
                        let (x, y) = (cp[i], cq[i]);
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            return Ok(v);
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: MAX_SWEEPS,
    })
}

#[inline]
fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let rows = m.nrows();
    for i in 0..rows {
        let x = m[(i, p)];
        let y = m[(i, q)];
        m[(i, p)] = c * x - s * y;
        m[(i, q)] = s * x + c * y;
    }
}

struct Step {
    next: DMatrix<f64>,
    /// Eigenvalue estimates of the input basis.
    lambda: Vec<f64>,
    /// `‖offdiag(XᵀAX)‖/‖A‖ + ‖I − XᵀX‖` of the input basis.
    defect: f64,
}

/// One refinement step from basis `x`.
fn refine_step(a: &DMatrix<f64>, x: &DMatrix<f64>) -> Step {
    let n = a.nrows();
    // R = I - XᵀX
    let r = DMatrix::from_fn(n, n, |i, j| {
        let g = dot2(x.column(i).iter().copied().zip(x.column(j).iter().copied()));
        if i == j {
            1.0 - g
        } else {
            -g
        }
    });
    // Y = AX kept as hi + lo, then S = XᵀY.
    let mut y_hi = DMatrix::<f64>::zeros(n, n);
    let mut y_lo = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let (h, l) = dot2_pair((0..n).map(|k| (a[(i, k)], x[(k, j)])));
            y_hi[(i, j)] = h;
            y_lo[(i, j)] = l;
        }
    }
    let s = DMatrix::from_fn(n, n, |i, j| {
        let xi = x.column(i);
        let (yh, yl) = (y_hi.column(j), y_lo.column(j));
        dot2((0..n).flat_map(|k| [(xi[k], yh[k]), (xi[k], yl[k])]))
    });
    let lambda: Vec<f64> = (0..n).map(|i| s[(i, i)] / (1.0 - r[(i, i)])).collect();
    let mut off = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                off += s[(i, j)] * s[(i, j)];
            }
        }
    }
    let defect = off.sqrt() / a.norm() + r.norm();
    let omega = 2.0 * (off.sqrt() + a.norm() * r.norm());
    let e = DMatrix::from_fn(n, n, |i, j| {
        if i == j || (lambda[i] - lambda[j]).abs() <= omega {
            r[(i, j)] / 2.0
        } else {
            (s[(i, j)] + lambda[j] * r[(i, j)]) / (lambda[j] - lambda[i])
        }
    });
    Step {
        next: x + x * e,
        lambda,
        defect,
    }
}

/// Eigen-decomposition of a symmetric matrix: `(eigenvectors, eigenvalues)`
/// in the order produced by the Jacobi sweep (unsorted).
///
/// One-sided Jacobi yields right singular vectors, which are eigenvectors
/// only for semidefinite input; clearly indefinite matrices are shifted to be
/// positive definite first (the refinement then runs on the original).
pub(crate) fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = a.nrows();
    let norm = a.norm();
    let min_ev = a.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    let mut x = if min_ev < -1e-8 * norm {
        one_sided_jacobi(&(a + DMatrix::<f64>::identity(n, n) * (1.5 * norm)))?
    } else {
        one_sided_jacobi(a)?
    };
    // a step across a nearly degenerate gap can transiently lose accuracy,
    // so the best basis seen is kept rather than the last one
    let mut step = refine_step(a, &x);
    let mut best = (step.defect, x.clone(), step.lambda.clone());
    for _ in 0..REFINEMENT_STEPS {
        x = std::mem::take(&mut step.next);
        step = refine_step(a, &x);
        if step.defect < best.0 {
            best = (step.defect, x.clone(), step.lambda.clone());
        }
    }
    let (_, x, lambda) = best;
    Ok((x, lambda))
}
