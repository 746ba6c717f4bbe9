use super::{argmax, silhouette, sq_dist, Points};
use crate::error::{Error, Result};
use crate::rng::{self, tag, Rng};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansOptions {
    pub max_iters: usize,
    /// Stop once no center moves farther than this (Euclidean).
    pub tol: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            max_iters: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub k: usize,
    pub dim: usize,
    /// Row-major `k × dim`.
    pub centers: Vec<f64>,
    pub assignment: Vec<usize>,
    /// Sum of squared distances to assigned centers.
    pub inertia: f64,
    /// Inertia after each Lloyd iteration.
    pub history: Vec<f64>,
}

impl Clustering {
    pub fn center(&self, c: usize) -> &[f64] {
        &self.centers[c * self.dim..(c + 1) * self.dim]
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == c)
            .collect()
    }
}

fn nearest_center<T: Scalar>(x: &[T], centers: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.chunks_exact(dim).enumerate() {
        let d = sq_dist(x, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means++ seeding (D² sampling) followed by Lloyd iterations.
///
/// An empty cluster during Lloyd is re-seeded at the point farthest from its
/// previous center.
pub fn kmeans_pp<T: Scalar>(
    points: Points<'_, T>,
    k: usize,
    seed: u64,
    opts: KMeansOptions,
) -> Result<Clustering> {
    let n = points.len();
    let dim = points.dim();
    if k == 0 || k > n {
        return Err(Error::validation(format!("k = {k} must lie in [1, {n}]")));
    }
    let mut rng = Rng::new(rng::mix(seed, tag::KMEANS));

    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.below(n));
    let mut d2: Vec<f64> = (0..n).map(|i| points.sq_dist(i, chosen[0])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.uniform() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave `acc` just short of `target`; fall back to the last positive entry.
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            // All remaining points coincide with a center: take the lowest unused index.
            (0..n).find(|i| !chosen.contains(i)).unwrap()
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(points.sq_dist(i, next));
        }
    }

    let mut centers: Vec<f64> = chosen
        .iter()
        .flat_map(|&i| points.row(i).iter().map(|v| v.f64()))
        .collect();
    let mut assignment = vec![0usize; n];
    let mut history = Vec::new();

    for _ in 0..opts.max_iters.max(1) {
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = nearest_center(points.row(i), &centers, dim).0;
        }
        let mut sums = vec![0.0f64; k * dim];
        let mut counts = vec![0usize; k];
        for (i, &a) in assignment.iter().enumerate() {
            counts[a] += 1;
            for (s, v) in sums[a * dim..(a + 1) * dim].iter_mut().zip(points.row(i)) {
                *s += v.f64();
            }
        }
        let mut shift = 0.0f64;
        for c in 0..k {
            let old = centers[c * dim..(c + 1) * dim].to_vec();
            let new: Vec<f64> = if counts[c] > 0 {
                sums[c * dim..(c + 1) * dim]
                    .iter()
                    .map(|s| s / counts[c] as f64)
                    .collect()
            } else {
                let far: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &old)).collect();
                let f = argmax(&far).unwrap();
                points.row(f).iter().map(|v| v.f64()).collect()
            };
            shift = shift.max(sq_dist(&old, &new).sqrt());
            centers[c * dim..(c + 1) * dim].copy_from_slice(&new);
        }
        let inertia = assignment
            .iter()
            .enumerate()
            .map(|(i, &a)| sq_dist(points.row(i), &centers[a * dim..(a + 1) * dim]))
            .sum();
        history.push(inertia);
        if shift < opts.tol {
            break;
        }
    }

    // Final assignment against the returned centers, so that `assignment`
    // is always the nearest-center map of `centers`. Reassignment can only
    // lower the inertia, which keeps `history` non-increasing.
    let mut inertia = 0.0;
    for (i, a) in assignment.iter_mut().enumerate() {
        let (c, d) = nearest_center(points.row(i), &centers, dim);
        *a = c;
        inertia += d;
    }
    *history.last_mut().unwrap() = inertia;

    Ok(Clustering {
        k,
        dim,
        inertia,
        centers,
        assignment,
        history,
    })
}

/// Run k-means++ for each k in `[k_min, k_max]` and return the k with the
/// highest silhouette score together with its clustering; ties keep the smaller k.
pub fn choose_k_by_silhouette<T: Scalar>(
    points: Points<'_, T>,
    k_min: usize,
    k_max: usize,
    seed: u64,
    opts: KMeansOptions,
) -> Result<(usize, Clustering)> {
    if k_min < 2 || k_min > k_max || k_max > points.len() {
        return Err(Error::validation(format!(
            "k range [{k_min}, {k_max}] invalid for {} points",
            points.len()
        )));
    }
    let mut best: Option<(f64, Clustering)> = None;
    for k in k_min..=k_max {
        let clustering = kmeans_pp(points, k, seed, opts)?;
        let score = silhouette(points, &clustering.assignment)?;
        if best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, clustering));
        }
    }
    let (_, clustering) = best.unwrap();
    Ok((clustering.k, clustering))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cluster_is_mean() {
        let data = vec![0.0f64, 0.0, 2.0, 0.0, 4.0, 3.0];
        let pts = Points::new(&data, 2).unwrap();
        let c = kmeans_pp(pts, 1, 0, KMeansOptions::default()).unwrap();
        assert_eq!(c.center(0), &[2.0, 1.0]);
        // Sum of squared deviations: x: 4+0+4, y: 1+1+4.
        assert!((c.inertia - 14.0).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_has_zero_inertia() {
        let data = vec![0.0f32, 1.0, 5.0, 9.0, 9.5];
        let pts = Points::new(&data, 1).unwrap();
        let c = kmeans_pp(pts, 5, 3, KMeansOptions::default()).unwrap();
        assert_eq!(c.inertia, 0.0);
        let mut a = c.assignment.clone();
        a.sort();
        a.dedup();
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn rejects_bad_k() {
        let data = vec![0.0f64, 1.0];
        let pts = Points::new(&data, 1).unwrap();
        assert!(kmeans_pp(pts, 3, 0, KMeansOptions::default()).is_err());
        assert!(kmeans_pp(pts, 0, 0, KMeansOptions::default()).is_err());
        assert!(choose_k_by_silhouette(pts, 1, 2, 0, KMeansOptions::default()).is_err());
    }

    #[test]
    fn duplicate_points_still_seed_k_centers() {
        let data = vec![1.0f64; 4];
        let pts = Points::new(&data, 1).unwrap();
        let c = kmeans_pp(pts, 2, 0, KMeansOptions::default()).unwrap();
        assert_eq!(c.inertia, 0.0);
    }
}
