//! Dense symmetric matrix services.
//!
//! Everything here is a pure function over immutable inputs. Factorizations
//! are returned to the caller, which owns any caching.

mod accurate;
pub mod benchmark;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use benchmark::{decomposition_benchmark, BenchmarkReport, BenchmarkRow, Method};


const SYMMETRY_TOL: f64 = 1e-12;

/// Square symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Wraps `m` after checking squareness and symmetry (relative tolerance
    /// 1e-12 against the largest entry).
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let n = m.nrows();
        for j in 0..n {
            for i in j + 1..n {
                if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::Domain(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymMatrix(m))
    }

    /// Builds the matrix from its lower triangle; `f` is called with `i >= j`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `self + delta * I`.
    pub fn with_nugget(&self, delta: f64) -> SymMatrix {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += delta;
        }
        SymMatrix(m)
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix(&self.0 * c)
    }

    pub fn mul_vec(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|k| self.0[(i, k)] * w[k]).sum())
            .collect()
    }
}

/// Lower-triangular Cholesky factor, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor {
    n: usize,
    l: Vec<f64>,
}

impl CholFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.l[i * self.n..(i + 1) * self.n]
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.l[i * self.n + i]
    }

    /// The factor as a dense matrix.
    pub fn l(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.l)
    }

    /// Overwrites `w` with `L⁻¹w`.
    pub fn forward_in_place(&self, w: &mut [f64]) {
        for i in 0..self.n {
            let row = self.row(i);
            let s = w[i] - dot(&row[..i], &w[..i]);
            w[i] = s / row[i];
        }
    }

    /// Overwrites `w` with `L⁻ᵀw`.
    pub fn backward_in_place(&self, w: &mut [f64]) {
        for i in (0..self.n).rev() {
            let row = self.row(i);
            let xi = w[i] / row[i];
            w[i] = xi;
            for (wk, lk) in w[..i].iter_mut().zip(&row[..i]) {
                *wk -= lk * xi;
            }
        }
    }

    /// Overwrites `w` with `(LLᵀ)⁻¹w`.
    pub fn solve_in_place(&self, w: &mut [f64]) {
        self.forward_in_place(w);
        self.backward_in_place(w);
    }

    /// `‖L⁻¹‖_F² = trace((LLᵀ)⁻¹)`, an upper bound on `‖(LLᵀ)⁻¹‖₂`.
    pub fn inverse_frobenius_sq(&self) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        let mut z = vec![0.0; n];
        for j in 0..n {
            // column j of L⁻¹ has zeros above row j
            z.iter_mut().for_each(|v| *v = 0.0);
            z[j] = 1.0 / self.diag(j);
            total += z[j] * z[j];
            for i in j + 1..n {
                let row = self.row(i);
                let s = -dot(&row[j..i], &z[j..i]);
                z[i] = s / row[i];
                total += z[i] * z[i];
            }
        }
        total
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Singular value decomposition `U·diag(d)·Vᵀ` with nonincreasing `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomp {
    pub singular_values: Vec<f64>,
    pub left_vectors: DMatrix<f64>,
    pub right_vectors: DMatrix<f64>,
}

impl SpectralDecomp {
    /// `Σᵢ dᵢ uᵢ vᵢᵀ`, accumulating the rank-one terms from the smallest
    /// singular value upward.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let (m, n) = (self.left_vectors.nrows(), self.right_vectors.nrows());
        let k = self.singular_values.len();
        DMatrix::from_fn(m, n, |i, j| {
            let mut acc = 0.0;
            for r in (0..k).rev() {
                acc += self.left_vectors[(i, r)] * self.singular_values[r] * self.right_vectors[(j, r)];
            }
            acc
        })
    }

    pub fn condition_number(&self) -> f64 {
        condition_from_singular_values(&self.singular_values)
    }
}

pub fn cholesky(m: &SymMatrix) -> Result<CholFactor> {
    let n = m.n();
    let a = m.as_matrix();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s = a[(i, j)] - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
            if i == j {
                // also rejects NaN
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(CholFactor { n, l })
}

/// `R⁻¹w` by a forward then a backward triangular solve.
pub fn solve_chol(f: &CholFactor, w: &[f64]) -> Result<Vec<f64>> {
    if w.len() != f.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            found: w.len(),
        });
    }
    let mut out = w.to_vec();
    f.solve_in_place(&mut out);
    Ok(out)
}

/// `log|R| = 2 Σ log Lᵢᵢ`.
pub fn log_det(f: &CholFactor) -> f64 {
    2.0 * (0..f.n).map(|i| f.diag(i).ln()).sum::<f64>()
}

/// Accurate SVD of a symmetric matrix via its eigen-decomposition:
/// `dᵢ = |λᵢ|`, `U` the eigenvectors and `V = U·sign(λ)`.
pub fn svd(m: &SymMatrix) -> Result<SpectralDecomp> {
    let n = m.n();
    let (x, lambda) = accurate::symmetric_eigen(m.as_matrix())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lambda[b].abs().total_cmp(&lambda[a].abs()).then(a.cmp(&b)));
    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut v = DMatrix::<f64>::zeros(n, n);
    let mut d = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let col = x.column(src);
        let sign = if lambda[src] < 0.0 { -1.0 } else { 1.0 };
        u.set_column(dst, &col);
        v.set_column(dst, &(col * sign));
        d.push(lambda[src].abs());
    }
    Ok(SpectralDecomp {
        singular_values: d,
        left_vectors: u,
        right_vectors: v,
    })
}

/// Thin SVD of a general (rectangular) matrix, singular values nonincreasing.
/// Each left vector's first nonzero component is made nonnegative.
pub fn svd_general(m: &DMatrix<f64>) -> Result<SpectralDecomp> {
    const MAX_ITER: usize = 10_000;
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, MAX_ITER)
        .ok_or(Error::ConvergenceFailure {
            iterations: MAX_ITER,
        })?;
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });
    let mut left = DMatrix::<f64>::zeros(m.nrows(), k);
    let mut right = DMatrix::<f64>::zeros(m.ncols(), k);
    let mut d = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let ucol = u.column(src);
        let first = ucol.iter().copied().find(|v| *v != 0.0).unwrap_or(0.0);
        let sign = if first < 0.0 { -1.0 } else { 1.0 };
        left.set_column(dst, &(ucol * sign));
        right.set_column(dst, &(vt.row(src).transpose() * sign));
        d.push(svd.singular_values[src]);
    }
    Ok(SpectralDecomp {
        singular_values: d,
        left_vectors: left,
        right_vectors: right,
    })
}

/// Eigenvalues of a symmetric matrix in nonincreasing order, computed with
/// nalgebra's tridiagonal QR. Absolute accuracy is about `ε‖m‖`; use [`svd`]
/// when small eigenvalues must be resolved to full relative precision.
pub fn symmetric_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.as_matrix().clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub fn condition_from_singular_values(d: &[f64]) -> f64 {
    let max = d.iter().copied().fold(0.0_f64, f64::max);
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `κ = d₁/dₙ`; `+∞` when the matrix is singular.
pub fn condition_number(m: &SymMatrix) -> f64 {
    match svd(m) {
        Ok(s) => s.condition_number(),
        Err(_) => {
            let ev: Vec<f64> = symmetric_eigenvalues(m).iter().map(|v| v.abs()).collect();
            condition_from_singular_values(&ev)
        }
    }
}

/// `Σᵢ uᵢvᵢᵀ/dᵢ` over the singular values strictly above `eta`.
pub fn truncated_inverse(m: &SymMatrix, eta: f64) -> Result<SymMatrix> {
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("eta must be nonnegative, got {eta}")));
    }
    let s = svd(m)?;
    let n = m.n();
    let kept: Vec<usize> = (0..n).filter(|&i| s.singular_values[i] > eta).collect();
    if kept.is_empty() {
        return Err(Error::AllSingularValuesTruncated { eta });
    }
    Ok(SymMatrix::from_lower_fn(n, |i, j| {
        kept.iter()
            .rev()
            .map(|&r| s.left_vectors[(i, r)] * s.right_vectors[(j, r)] / s.singular_values[r])
            .sum()
    }))
}

/// Smallest nugget `δ ≥ 0` with `(λmax + δ)/(λmin + δ) ≤ κ_max`:
/// `δ = max{0, (λmax − κ_max·λmin)/(κ_max − 1)}`.
pub fn nugget_lower_bound(eigs: &[f64], kappa_max: f64) -> Result<f64> {
    if !(kappa_max > 1.0) {
        return Err(Error::InvalidKappaMax(kappa_max));
    }
    if eigs.is_empty() {
        return Ok(0.0);
    }
    let max = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(((max - kappa_max * min) / (kappa_max - 1.0)).max(0.0))
}
