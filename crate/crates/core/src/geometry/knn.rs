use super::Points;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The `k` nearest members of a candidate set, ascending by distance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NeighborList {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Brute-force k-nearest-neighbors of `query_index` among `subset`, excluding
/// the query itself. Ties on distance go to the lower index. Returns every
/// other member when fewer than `k` exist.
pub fn knn<T: Scalar>(
    points: Points<'_, T>,
    subset: &[usize],
    query_index: usize,
    k: usize,
) -> Result<NeighborList> {
    if query_index >= points.len() {
        return Err(Error::validation(format!("query index {query_index} out of range")));
    }
    let mut scored: Vec<(f64, usize)> = subset
        .iter()
        .filter(|&&i| i != query_index)
        .map(|&i| (points.sq_dist(query_index, i), i))
        .collect();
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scored.len() {
        if k == 0 {
            scored.clear();
        } else {
            scored.select_nth_unstable_by(k - 1, order);
            scored.truncate(k);
        }
    }
    scored.sort_unstable_by(order);
    Ok(NeighborList {
        indices: scored.iter().map(|&(_, i)| i).collect(),
        distances: scored.iter().map(|&(d, _)| d.sqrt()).collect(),
    })
}
