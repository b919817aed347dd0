//! Bounded quasi-Newton minimization with finite-difference gradients.

use nalgebra::{DMatrix, DVector};

/// Outcome of one local search.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 30;

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

/// Central differences, one-sided where the stencil would leave the box.
/// Non-finite function values at a stencil point give a zero component.
fn gradient(
    f: &mut impl FnMut(&[f64]) -> f64,
    x: &[f64],
    fx: f64,
    lo: &[f64],
    hi: &[f64],
    h: f64,
    evals: &mut usize,
) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let up = (x[i] + h).min(hi[i]);
        let down = (x[i] - h).max(lo[i]);
        let f_up = if up > x[i] {
            probe[i] = up;
            *evals += 1;
            f(&probe)
        } else {
            fx
        };
        let f_down = if down < x[i] {
            probe[i] = down;
            *evals += 1;
            f(&probe)
        } else {
            fx
        };
        probe[i] = x[i];
        let span = up - down;
        g[i] = if span > 0.0 && f_up.is_finite() && f_down.is_finite() {
            (f_up - f_down) / span
        } else {
            0.0
        };
    }
    g
}

/// Components free to move: not pinned at a bound by the gradient.
fn free_mask(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> Vec<bool> {
    (0..x.len())
        .map(|i| !((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)))
        .collect()
}

/// Projected BFGS on the box `[lo, hi]` starting from `x0` (projected first).
///
/// The inverse-Hessian approximation is restricted to the free variables;
/// a non-descent direction resets it to the identity. Stops when the
/// projected gradient, the step, or the decrease becomes negligible.
pub fn minimize_box(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    h: f64,
    step_tol: f64,
    grad_tol: f64,
    max_iter: usize,
) -> BoxResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let mut evals = 1;
    let mut fx = f(&x);
    if n == 0 || !fx.is_finite() {
        return BoxResult {
            x,
            f: fx,
            iterations: 0,
            evaluations: evals,
        };
    }
    let mut g = gradient(&mut f, &x, fx, lo, hi, h, &mut evals);
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let free = free_mask(&x, &g, lo, hi);
        let pg_norm = (0..n).filter(|&i| free[i]).map(|i| g[i].abs()).fold(0.0, f64::max);
        if pg_norm <= grad_tol {
            break;
        }
        let gf = DVector::from_fn(n, |i, _| if free[i] { g[i] } else { 0.0 });
        let mut p = -(&hinv * &gf);
        for i in 0..n {
            if !free[i] {
                p[i] = 0.0;
            }
        }
        if p.dot(&gf) >= 0.0 {
            hinv = DMatrix::identity(n, n);
            p = -gf.clone();
        }
        // keep the first trial inside a box-sized neighbourhood
        let width = (0..n).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
        let pmax = p.amax();
        let mut t = if pmax > width { width / pmax } else { 1.0 };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let mut xt: Vec<f64> = (0..n).map(|i| x[i] + t * p[i]).collect();
            project(&mut xt, lo, hi);
            let decrease: f64 = (0..n).map(|i| g[i] * (xt[i] - x[i])).sum();
            evals += 1;
            let ft = f(&xt);
            if ft.is_finite() && ft <= fx + ARMIJO * decrease.min(0.0) && ft <= fx {
                accepted = Some((xt, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            break;
        };
        let s: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
        let step = s.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let gn = gradient(&mut f, &xn, fnew, lo, hi, h, &mut evals);
        let small_decrease = fx - fnew <= 1e-12 * (1.0 + fx.abs());
        let sv = DVector::from_vec(s);
        let yv = DVector::from_fn(n, |i, _| gn[i] - g[i]);
        let sy = sv.dot(&yv);
        if sy > 1e-12 * sv.norm() * yv.norm() {
            // H⁺ = (I − ρsyᵀ)H(I − ρysᵀ) + ρssᵀ
            let rho = 1.0 / sy;
            let hy = &hinv * &yv;
            let yhy = yv.dot(&hy);
            hinv += (&sv * sv.transpose()) * (rho * (1.0 + rho * yhy))
                - (&hy * sv.transpose() + &sv * hy.transpose()) * rho;
        }
        x = xn;
        fx = fnew;
        g = gn;
        if step <= step_tol || small_decrease {
            break;
        }
    }
    BoxResult {
        x,
        f: fx,
        iterations,
        evaluations: evals,
    }
}
