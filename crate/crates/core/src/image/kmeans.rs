use super::ImageError;
use crate::scalar::Scalar;

const MAX_ITERATIONS: usize = 100;

/// Deterministic Lloyd's k-means on `(x, y)` points.
///
/// Centers start at evenly spaced quantiles of the points' projection onto
/// their principal axis. Iteration stops at an assignment fixpoint or after
/// 100 rounds. Centers are returned sorted by `y`, then `x`.
pub fn kmeans2d<T: Scalar>(points: &[(T, T)], k: usize) -> Result<Vec<(T, T)>, ImageError> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(ImageError::TooFewPoints { k, n });
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.as_f64(), y.as_f64())).collect();

    let mut centers = initial_centers(&pts, k);
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, &(x, y)) in pts.iter().enumerate() {
            let best = centers
                .iter()
                .enumerate()
                .map(|(j, &(cx, cy))| (j, (x - cx).powi(2) + (y - cy).powi(2)))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc })
                .0;
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (i, &(x, y)) in pts.iter().enumerate() {
            let s = &mut sums[assignment[i]];
            s.0 += x;
            s.1 += y;
            s.2 += 1;
        }
        for (c, s) in centers.iter_mut().zip(&sums) {
            // An empty cluster keeps its previous center.
            if s.2 > 0 {
                *c = (s.0 / s.2 as f64, s.1 / s.2 as f64);
            }
        }
    }

    centers.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    Ok(centers.into_iter().map(|(x, y)| (T::of(x), T::of(y))).collect())
}

fn initial_centers(pts: &[(f64, f64)], k: usize) -> Vec<(f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    // Leading eigenvector of the 2x2 covariance.
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let axis = (theta.cos(), theta.sin());

    let mut order: Vec<usize> = (0..pts.len()).collect();
    let proj = |i: usize| (pts[i].0 - mx) * axis.0 + (pts[i].1 - my) * axis.1;
    order.sort_by(|&a, &b| {
        proj(a)
            .total_cmp(&proj(b))
            .then(pts[a].1.total_cmp(&pts[b].1))
            .then(pts[a].0.total_cmp(&pts[b].0))
    });
    (0..k)
        .map(|i| {
            let q = ((i as f64 + 0.5) * pts.len() as f64 / k as f64).floor() as usize;
            pts[order[q.min(pts.len() - 1)]]
        })
        .collect()
}
