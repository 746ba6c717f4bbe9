use rayon::prelude::*;

use super::Points;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const PAR_THRESHOLD: usize = 4096;

/// Incremental greedy max-min sampler over a candidate set.
///
/// With no anchors, the first pick is `seed_index`. With anchors (points that
/// are already chosen but are not candidates, e.g. labeled samples), the
/// minimum distances start from the anchors and the first pick is the
/// candidate farthest from them. Each later pick maximizes the minimum
/// distance to anchors and earlier picks; ties go to the lowest pool index.
pub struct FarthestPointSampler<'a, T> {
    points: Points<'a, T>,
    candidates: Vec<usize>,
    /// Squared min-distance per candidate; `None` once picked.
    min_sq: Vec<Option<f64>>,
    pending_seed: Option<usize>,
    remaining: usize,
}

impl<'a, T: Scalar> FarthestPointSampler<'a, T> {
    pub fn new(
        points: Points<'a, T>,
        candidates: &[usize],
        anchors: &[usize],
        seed_index: usize,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::validation("farthest point sampling over an empty subset"));
        }
        let seed_pos = candidates
            .iter()
            .position(|&c| c == seed_index)
            .ok_or_else(|| Error::validation(format!("seed index {seed_index} not in subset")))?;
        let min_sq = if anchors.is_empty() {
            vec![Some(f64::INFINITY); candidates.len()]
        } else {
            let nearest = |&c: &usize| {
                Some(
                    anchors
                        .iter()
                        .map(|&a| points.sq_dist(c, a))
                        .fold(f64::INFINITY, f64::min),
                )
            };
            if candidates.len() * anchors.len() >= PAR_THRESHOLD {
                candidates.par_iter().map(nearest).collect()
            } else {
                candidates.iter().map(nearest).collect()
            }
        };
        Ok(Self {
            points,
            remaining: candidates.len(),
            candidates: candidates.to_vec(),
            min_sq,
            pending_seed: anchors.is_empty().then_some(seed_pos),
        })
    }

    fn farthest(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (pos, d) in self.min_sq.iter().enumerate() {
            let Some(d) = *d else { continue };
            best = match best {
                None => Some((pos, d)),
                Some((bp, bd)) => {
                    if d > bd || (d == bd && self.candidates[pos] < self.candidates[bp]) {
                        Some((pos, d))
                    } else {
                        Some((bp, bd))
                    }
                }
            };
        }
        best.map(|(p, _)| p)
    }

    fn absorb(&mut self, pos: usize) {
        let pick = self.candidates[pos];
        self.min_sq[pos] = None;
        self.remaining -= 1;
        let points = self.points;
        let update = |(c, d): (&usize, &mut Option<f64>)| {
            if let Some(cur) = d {
                let nd = points.sq_dist(*c, pick);
                if nd < *cur {
                    *cur = nd;
                }
            }
        };
        if self.remaining * points.dim() >= PAR_THRESHOLD * 8 {
            self.candidates.par_iter().zip(self.min_sq.par_iter_mut()).for_each(update);
        } else {
            self.candidates.iter().zip(self.min_sq.iter_mut()).for_each(update);
        }
    }

    /// Number of candidates not yet picked.
    pub fn remaining(&self) -> usize {
        self.remaining
    }
}

impl<T: Scalar> Iterator for FarthestPointSampler<'_, T> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let pos = match self.pending_seed.take() {
            Some(p) => p,
            None => self.farthest()?,
        };
        self.absorb(pos);
        Some(self.candidates[pos])
    }
}

/// Greedy max-min selection of `count` members of `subset`, starting at
/// `seed_index`. Picks are returned in selection order.
pub fn farthest_point_sampling<T: Scalar>(
    points: Points<'_, T>,
    subset: &[usize],
    count: usize,
    seed_index: usize,
) -> Result<Vec<usize>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > subset.len() {
        return Err(Error::validation(format!(
            "cannot pick {count} points from a subset of {}",
            subset.len()
        )));
    }
    Ok(FarthestPointSampler::new(points, subset, &[], seed_index)?
        .take(count)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Vec<f64> {
        vec![0.0, 0.0, 1.0, 0.0, 10.0, 0.0]
    }

    #[test]
    fn collinear_example() {
        let data = line();
        let pts = Points::new(&data, 2).unwrap();
        assert_eq!(farthest_point_sampling(pts, &[0, 1, 2], 2, 0).unwrap(), vec![0, 2]);
        assert_eq!(farthest_point_sampling(pts, &[0, 1, 2], 1, 1).unwrap(), vec![1]);
        assert!(farthest_point_sampling(pts, &[0, 1, 2], 0, 0).unwrap().is_empty());
    }

    #[test]
    fn exhaustion_is_permutation() {
        let data = line();
        let pts = Points::new(&data, 2).unwrap();
        let mut all = farthest_point_sampling(pts, &[2, 0, 1], 3, 1).unwrap();
        assert_eq!(all[0], 1);
        all.sort();
        assert_eq!(all, vec![0, 1, 2]);
    }

    #[test]
    fn errors() {
        let data = line();
        let pts = Points::new(&data, 2).unwrap();
        assert!(farthest_point_sampling(pts, &[], 1, 0).is_err());
        assert!(farthest_point_sampling(pts, &[0, 1], 3, 0).is_err());
        assert!(farthest_point_sampling(pts, &[0, 1], 1, 2).is_err());
    }

    #[test]
    fn anchors_push_first_pick_away() {
        let data = line();
        let pts = Points::new(&data, 2).unwrap();
        // Anchor at 10 makes (0,0) the farthest candidate.
        let picks: Vec<_> = FarthestPointSampler::new(pts, &[0, 1], &[2], 1).unwrap().collect();
        assert_eq!(picks, vec![0, 1]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        // Points 1 and 2 are equidistant from 0.
        let data = vec![0.0f64, 0.0, 1.0, 0.0, -1.0, 0.0];
        let pts = Points::new(&data, 2).unwrap();
        assert_eq!(farthest_point_sampling(pts, &[2, 1, 0], 2, 0).unwrap(), vec![0, 1]);
    }
}
