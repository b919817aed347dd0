use rand::Rng as _;

use crate::design::sq_dist;
use crate::rng::Rng;

/// Lloyd's k-means with k-means++ seeding. The first center is `points[0]`
/// (callers pass points best-first); later ones are drawn with probability
/// proportional to squared distance. Returns `min(k, points.len())` centers.
/// Ties (equal distances) go to the lowest index.
pub fn kmeans(points: &[Vec<f64>], k: usize, iters: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let k = k.min(n);
    if k == 0 {
        return Vec::new();
    }
    let mut centers: Vec<Vec<f64>> = vec![points[0].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, w) in d2.iter().enumerate() {
                acc += w;
                if acc > target && *w > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // all remaining points coincide with a center
            centers.len()
        };
        centers.push(points[next].clone());
        let c = centers.last().expect("just pushed");
        for (di, p) in d2.iter_mut().zip(points) {
            *di = di.min(sq_dist(p, c));
        }
    }

    let mut labels = vec![usize::MAX; n];
    for _ in 0..iters {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let best = nearest(p, &centers);
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let d = points[0].len();
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            sums[l].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        for c in 0..k {
            // an emptied cluster keeps its previous center
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let dj = sq_dist(p, c);
        if dj < best_d {
            best_d = dj;
            best = j;
        }
    }
    best
}
