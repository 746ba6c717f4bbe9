use rayon::prelude::*;

use super::Points;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mean silhouette coefficient. Singleton clusters contribute 0.
///
/// Cluster ids must be dense in `0..k` with every cluster non-empty and k ≥ 2.
pub fn silhouette<T: Scalar>(points: Points<'_, T>, assignment: &[usize]) -> Result<f64> {
    let n = points.len();
    if assignment.len() != n {
        return Err(Error::DimMismatch {
            expected: n,
            actual: assignment.len(),
        });
    }
    let k = assignment.iter().max().map_or(0, |&m| m + 1);
    let mut sizes = vec![0usize; k];
    for &a in assignment {
        sizes[a] += 1;
    }
    if k < 2 {
        return Err(Error::domain("silhouette needs at least two clusters"));
    }
    if let Some(c) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::validation(format!("cluster {c} is empty")));
    }

    let score = |i: usize| -> f64 {
        let own = assignment[i];
        if sizes[own] == 1 {
            return 0.0;
        }
        let mut sums = vec![0.0f64; k];
        for j in 0..n {
            if j != i {
                sums[assignment[j]] += points.sq_dist(i, j).sqrt();
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom == 0.0 {
            0.0
        } else {
            (b - a) / denom
        }
    };
    // Per-sample scores are computed in parallel and summed in index order.
    let scores: Vec<f64> = (0..n).into_par_iter().map(score).collect();
    Ok(scores.iter().sum::<f64>() / n as f64)
}
