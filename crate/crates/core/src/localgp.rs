//! Nearest-neighbour local GP prediction for large training sets.

use std::collections::HashMap;

use crate::design::{sq_dist, Design};
use crate::error::{Error, Result};
use crate::gpmodel::{fit, FitOptions, PredictionResult};
use crate::kernels::CorrelationSpec;
use crate::rng::derive_seed;

/// Above this many rows the dataset is bucketed into a uniform grid.
const BRUTE_FORCE_MAX: usize = 50_000;
/// Target mean occupancy of a grid cell.
const POINTS_PER_CELL: f64 = 8.0;

#[derive(Debug, Clone)]
struct GridIndex {
    cells_per_dim: usize,
    cells: HashMap<Vec<usize>, Vec<usize>>,
}

impl GridIndex {
    fn build(x: &Design) -> Self {
        let d = x.d() as i32;
        let cells_per_dim = ((x.n() as f64 / POINTS_PER_CELL).powf(1.0 / f64::from(d)).floor() as usize).max(1);
        let mut cells: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (i, row) in x.rows().enumerate() {
            cells.entry(Self::cell_of(row, cells_per_dim)).or_default().push(i);
        }
        GridIndex { cells_per_dim, cells }
    }

    fn cell_of(p: &[f64], m: usize) -> Vec<usize> {
        p.iter().map(|v| ((v.clamp(0.0, 1.0) * m as f64) as usize).min(m - 1)).collect()
    }

    /// Indices in cells whose Chebyshev distance from `center` is exactly `ring`.
    fn ring(&self, center: &[usize], ring: usize, out: &mut Vec<usize>) {
        let d = center.len();
        let m = self.cells_per_dim as i64;
        let r = ring as i64;
        let mut offset = vec![-r; d];
        loop {
            if offset.iter().any(|o| o.abs() == r) {
                let cell: Option<Vec<usize>> = center
                    .iter()
                    .zip(&offset)
                    .map(|(&c, &o)| {
                        let v = c as i64 + o;
                        (0..m).contains(&v).then_some(v as usize)
                    })
                    .collect();
                if let Some(idx) = cell.and_then(|c| self.cells.get(&c)) {
                    out.extend_from_slice(idx);
                }
            }
            // odometer increment over [−r, r]^d
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                offset[k] += 1;
                if offset[k] <= r {
                    break;
                }
                offset[k] = -r;
                k += 1;
            }
        }
    }
}

/// Immutable training set with an optional spatial index.
#[derive(Debug, Clone)]
pub struct BigDataset {
    x: Design,
    y: Vec<f64>,
    index: Option<GridIndex>,
}

impl BigDataset {
    pub fn new(x: Design, y: Vec<f64>) -> Result<Self> {
        if y.len() != x.n() {
            return Err(Error::DimensionMismatch {
                expected: x.n(),
                found: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("responses must be finite".into()));
        }
        let index = (x.n() > BRUTE_FORCE_MAX).then(|| GridIndex::build(&x));
        Ok(BigDataset { x, y, index })
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn d(&self) -> usize {
        self.x.d()
    }

    pub fn x(&self) -> &Design {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn has_index(&self) -> bool {
        self.index.is_some()
    }
}

fn sort_by_distance(candidates: &mut [(f64, usize)]) {
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

/// Indices of the `n` rows nearest to `x0` in Euclidean distance, nearest
/// first; equal distances are ordered by row index.
pub fn knn_neighborhood(data: &BigDataset, x0: &[f64], n: usize) -> Result<Vec<usize>> {
    if x0.len() != data.d() {
        return Err(Error::DimensionMismatch {
            expected: data.d(),
            found: x0.len(),
        });
    }
    if n > data.n() {
        return Err(Error::NTooLarge {
            n,
            available: data.n(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut found: Vec<(f64, usize)> = match &data.index {
        None => data.x.rows().enumerate().map(|(i, r)| (sq_dist(r, x0), i)).collect(),
        Some(grid) => grid_candidates(grid, data, x0, n),
    };
    sort_by_distance(&mut found);
    Ok(found.into_iter().take(n).map(|(_, i)| i).collect())
}

/// Expands rings of cells until the `n`-th candidate distance is certainly
/// no larger than the distance to any unvisited cell.
fn grid_candidates(grid: &GridIndex, data: &BigDataset, x0: &[f64], n: usize) -> Vec<(f64, usize)> {
    let m = grid.cells_per_dim;
    let width = 1.0 / m as f64;
    let center = GridIndex::cell_of(x0, m);
    let mut idx = Vec::new();
    let mut found: Vec<(f64, usize)> = Vec::new();
    for ring in 0..=m {
        idx.clear();
        grid.ring(&center, ring, &mut idx);
        found.extend(idx.iter().map(|&i| (sq_dist(data.x.row(i), x0), i)));
        if found.len() >= n {
            // every unvisited point lies at least `ring` whole cells away
            let covered = ring as f64 * width;
            let mut dists: Vec<f64> = found.iter().map(|f| f.0).collect();
            dists.select_nth_unstable_by(n - 1, f64::total_cmp);
            if dists[n - 1].sqrt() < covered {
                break;
            }
        }
    }
    found
}

/// Fits an ordinary-kriging GP on the `n` nearest neighbours of `x0` and
/// predicts there. Neighbours enter the fit in row order.
pub fn predict_local(
    data: &BigDataset,
    x0: &[f64],
    n: usize,
    template: &CorrelationSpec,
    opts: &FitOptions,
) -> Result<PredictionResult> {
    if n < 2 {
        return Err(Error::TooFewPoints { required: 2, found: n });
    }
    let mut idx = knn_neighborhood(data, x0, n)?;
    // row order, so that n = N reproduces the full fit exactly
    idx.sort_unstable();
    let xs = data.x.subset(&idx);
    let ys: Vec<f64> = idx.iter().map(|&i| data.y[i]).collect();
    let model = fit(&xs, &ys, template, opts)?;
    model.predict(x0, opts.m_iter)
}

/// [`predict_local`] over many points on `workers` threads. Point `i` uses
/// seed `derive_seed(opts.seed, i)`, so results do not depend on scheduling
/// or worker count. Errors are reported per point.
pub fn predict_local_batch(
    data: &BigDataset,
    points: &[Vec<f64>],
    n: usize,
    template: &CorrelationSpec,
    opts: &FitOptions,
    workers: usize,
) -> Result<Vec<Result<PredictionResult>>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, x0)| {
                let o = opts.clone().with_seed(derive_seed(opts.seed, i as u64));
                predict_local(data, x0, n, template, &o)
            })
            .collect()
    }))
}
