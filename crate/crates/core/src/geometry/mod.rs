//! Exact Euclidean kernels: distances, farthest-point sampling, brute-force
//! k-nearest-neighbors, k-means++ and silhouette scoring.
//!
//! Inputs may be `f32` or `f64`; every distance is accumulated in `f64`.
//! All tie-breaks resolve to the lowest index.

mod fps;
mod kmeans;
mod knn;
mod silhouette;

pub use fps::{farthest_point_sampling, FarthestPointSampler};
pub use kmeans::{choose_k_by_silhouette, kmeans_pp, Clustering, KMeansOptions};
pub use knn::{knn, NeighborList};
pub use silhouette::silhouette;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Borrowed row-major matrix of `len × dim` points.
#[derive(Clone, Copy, Debug)]
pub struct Points<'a, T> {
    data: &'a [T],
    dim: usize,
}

impl<'a, T: Scalar> Points<'a, T> {
    pub fn new(data: &'a [T], dim: usize) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::validation(format!(
                "buffer of {} values is not a whole number of rows of width {dim}",
                data.len()
            )));
        }
        Ok(Self { data, dim })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &'a [T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Copy the selected rows into a contiguous buffer.
    pub fn gather(&self, indices: &[usize]) -> Vec<T> {
        let mut out = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            out.extend_from_slice(self.row(i));
        }
        out
    }

    #[inline]
    pub(crate) fn sq_dist(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.row(i), self.row(j))
    }
}

impl crate::dataset::EmbeddingPool {
    pub fn points(&self) -> Points<'_, f32> {
        Points {
            data: self.features(),
            dim: self.dim(),
        }
    }
}

/// Squared Euclidean distance without dimension checks.
#[inline]
pub(crate) fn sq_dist<A: Scalar, B: Scalar>(a: &[A], b: &[B]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x.f64() - y.f64();
            d * d
        })
        .sum()
}

pub fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(sq_dist(a, b).sqrt())
}

/// Cosine similarity, clamped to [-1, 1]. Zero-norm inputs are a domain error.
pub fn cosine_sim<T: Scalar>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x.f64(), y.f64());
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::domain("cosine similarity of a zero vector"));
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

/// Index of the maximum, first occurrence wins.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}
