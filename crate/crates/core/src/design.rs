//! Input designs on the unit hypercube.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// `n` points in `[0,1]^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Design {
    n: usize,
    d: usize,
    points: Vec<f64>,
}

impl Design {
    pub fn new(n: usize, d: usize, points: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidSize(format!("design needs n >= 1 and d >= 1, got n={n}, d={d}")));
        }
        if points.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: points.len(),
            });
        }
        for (idx, &v) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfBounds {
                    coord: idx % d,
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Design { n, d, points })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        let mut points = Vec::with_capacity(n * d);
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: r.len(),
                });
            }
            points.extend_from_slice(r);
        }
        Design::new(n, d, points)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.d)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.points
    }

    /// Rows `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Design {
        let mut points = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            points.extend_from_slice(self.row(i));
        }
        Design {
            n: indices.len(),
            d: self.d,
            points,
        }
    }

    pub fn push(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: x.len(),
            });
        }
        if let Some((k, &v)) = x.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfBounds {
                coord: k,
                value: v,
                lo: 0.0,
                hi: 1.0,
            });
        }
        self.points.extend_from_slice(x);
        self.n += 1;
        Ok(())
    }

    /// Smallest Euclidean distance between two distinct rows (`+∞` for n = 1).
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.n {
            for j in i + 1..self.n {
                best = best.min(sq_dist(self.row(i), self.row(j)));
            }
        }
        best.sqrt()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Design {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Design::from_rows(&rows)
    }
}

impl From<Design> for Vec<Vec<f64>> {
    fn from(d: Design) -> Self {
        d.to_rows()
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Jittered Latin hypercube: in every coordinate each stratum
/// `[j/n, (j+1)/n)` holds exactly one point, placed uniformly within it.
pub fn lhd(n: usize, d: usize, seed: u64) -> Result<Design> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidSize(format!("lhd needs n >= 1 and d >= 1, got n={n}, d={d}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut points = vec![0.0; n * d];
    let mut perm: Vec<usize> = (0..n).collect();
    let nf = n as f64;
    for k in 0..d {
        perm.shuffle(&mut rng);
        for (i, &stratum) in perm.iter().enumerate() {
            let u: f64 = rng.random();
            let mut v = (stratum as f64 + u) / nf;
            // rounding can push a value into the next stratum
            if (v * nf).floor() as usize != stratum {
                v = stratum as f64 / nf;
            }
            points[i * d + k] = v;
        }
    }
    Design::new(n, d, points)
}

/// Stratum index of each value in coordinate `k`.
pub fn strata(design: &Design, k: usize) -> Vec<usize> {
    let nf = design.n() as f64;
    design
        .rows()
        .map(|r| ((r[k] * nf).floor() as usize).min(design.n() - 1))
        .collect()
}

/// Random column-wise swaps of two rows' values, kept only when the minimum
/// pairwise distance does not decrease. Column value multisets, and hence the
/// Latin property, are preserved.
pub fn maximin_improve(x: &Design, passes: usize, seed: u64) -> Design {
    let mut out = x.clone();
    if out.n < 2 || passes == 0 {
        return out;
    }
    let mut rng = rng_from_seed(seed);
    let (n, d) = (out.n, out.d);
    let mut current = out.min_distance();
    for _ in 0..passes {
        let k = rng.random_range(0..d);
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        out.points.swap(i * d + k, j * d + k);
        let candidate = out.min_distance();
        if candidate >= current {
            current = candidate;
        } else {
            out.points.swap(i * d + k, j * d + k);
        }
    }
    out
}

/// Per-coordinate `(lo, hi)` box with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds(Vec<(f64, f64)>);

impl Bounds {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for (coord, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::DegenerateBounds { coord, lo, hi });
            }
        }
        Ok(Bounds(bounds))
    }

    pub fn unit(d: usize) -> Self {
        Bounds(vec![(0.0, 1.0); d])
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn scale_point(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: raw.len(),
            });
        }
        raw.iter()
            .zip(&self.0)
            .enumerate()
            .map(|(coord, (&v, &(lo, hi)))| {
                if !(lo..=hi).contains(&v) {
                    Err(Error::OutOfBounds { coord, value: v, lo, hi })
                } else {
                    Ok(((v - lo) / (hi - lo)).clamp(0.0, 1.0))
                }
            })
            .collect()
    }

    pub fn unscale_point(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(&self.0)
            .map(|(&u, &(lo, hi))| (lo + u * (hi - lo)).clamp(lo, hi))
            .collect()
    }
}

/// Affine map of raw rows into `[0,1]^d`. Values outside the bounds are
/// reported, never clipped.
pub fn scale_to_unit(raw: &[Vec<f64>], bounds: &Bounds) -> Result<Design> {
    let rows = raw
        .iter()
        .map(|r| bounds.scale_point(r))
        .collect::<Result<Vec<_>>>()?;
    Design::from_rows(&rows)
}

pub fn unscale(design: &Design, bounds: &Bounds) -> Vec<Vec<f64>> {
    design.rows().map(|r| bounds.unscale_point(r)).collect()
}
