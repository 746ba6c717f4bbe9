//! Embedding pools: the data model, the AEMB file format, synthetic
//! generation, class imbalancing and stratified train/test splitting.
//!
//! AEMB layout (little-endian):
//!
//! | bytes | field                          |
//! |-------|--------------------------------|
//! | 4     | magic `AEMB`                   |
//! | 1     | version (`1`)                  |
//! | 4     | `n` (u32)                      |
//! | 4     | `dim` (u32)                    |
//! | 1     | `has_labels` (0/1)             |
//! | 4     | `num_classes` (u32)            |
//! | n·dim·4 | features, f32 row-major      |
//! | n·2   | labels, u16 (only if has_labels) |
//!
//! The header is 18 bytes in total; the format tests pin the exact layout.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::rng::{self, round_half_up, tag, Rng};

pub const AEMB_MAGIC: &[u8; 4] = b"AEMB";
pub const AEMB_VERSION: u8 = 1;
pub const AEMB_HEADER_LEN: usize = 4 + 1 + 4 + 4 + 1 + 4;

/// A set of `n` feature vectors of width `dim`, optionally labeled with one of
/// `num_classes` classes. Immutable once constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingPool {
    n: usize,
    dim: usize,
    features: Vec<f32>,
    labels: Option<Vec<u16>>,
    num_classes: usize,
}

impl EmbeddingPool {
    pub fn new(
        dim: usize,
        features: Vec<f32>,
        labels: Option<Vec<u16>>,
        num_classes: usize,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("dim must be at least 1"));
        }
        if features.len() % dim != 0 {
            return Err(Error::validation(format!(
                "feature buffer of length {} is not a multiple of dim {dim}",
                features.len()
            )));
        }
        let n = features.len() / dim;
        if n == 0 {
            return Err(Error::validation("pool must contain at least one sample"));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::validation(format!(
                    "{} labels for {n} samples",
                    labels.len()
                )));
            }
            if let Some(bad) = labels.iter().find(|&&l| l as usize >= num_classes) {
                return Err(Error::validation(format!(
                    "label {bad} out of range for {num_classes} classes"
                )));
            }
        } else if num_classes != 0 {
            return Err(Error::validation("unlabeled pool must declare 0 classes"));
        }
        if num_classes > u16::MAX as usize + 1 {
            return Err(Error::validation("too many classes for u16 labels"));
        }
        Ok(Self {
            n,
            dim,
            features,
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Row-major `n × dim` feature buffer.
    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> Option<&[u16]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> Option<usize> {
        self.labels.as_ref().map(|l| l[i] as usize)
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    pub(crate) fn require_labels(&self) -> Result<&[u16]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::validation("operation requires a labeled pool"))
    }

    /// Samples per class; empty for unlabeled pools.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        if let Some(labels) = &self.labels {
            for &l in labels {
                counts[l as usize] += 1;
            }
        }
        counts
    }

    /// Indices of each class, ascending.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut by_class = vec![Vec::new(); self.num_classes];
        if let Some(labels) = &self.labels {
            for (i, &l) in labels.iter().enumerate() {
                by_class[l as usize].push(i);
            }
        }
        by_class
    }

    /// New pool holding the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Self::new(self.dim, features, labels, self.num_classes)
    }

    /// Replace features with a new matrix of the same row count, keeping labels.
    pub fn with_features(&self, dim: usize, features: Vec<f32>) -> Result<Self> {
        if features.len() != self.n * dim {
            return Err(Error::DimMismatch {
                expected: self.n * dim,
                actual: features.len(),
            });
        }
        Self::new(dim, features, self.labels.clone(), self.num_classes)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let label_bytes = if self.labels.is_some() { 2 * self.n } else { 0 };
        let mut out = Vec::with_capacity(AEMB_HEADER_LEN + 4 * self.features.len() + label_bytes);
        out.extend_from_slice(AEMB_MAGIC);
        out.push(AEMB_VERSION);
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.push(u8::from(self.labels.is_some()));
        out.extend_from_slice(&(self.num_classes as u32).to_le_bytes());
        for v in &self.features {
            out.extend_from_slice(&v.to_le_bytes());
        }
        if let Some(labels) = &self.labels {
            for l in labels {
                out.extend_from_slice(&l.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < AEMB_HEADER_LEN {
            if bytes.len() >= 4 && &bytes[..4] != AEMB_MAGIC {
                return Err(Error::Format("bad magic".into()));
            }
            return Err(Error::Corruption(format!(
                "{} bytes is shorter than the {AEMB_HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if &bytes[..4] != AEMB_MAGIC {
            return Err(Error::Format(format!(
                "bad magic {:?}",
                String::from_utf8_lossy(&bytes[..4])
            )));
        }
        if bytes[4] != AEMB_VERSION {
            return Err(Error::Format(format!("unsupported version {}", bytes[4])));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let n = u32_at(5);
        let dim = u32_at(9);
        let has_labels = match bytes[13] {
            0 => false,
            1 => true,
            other => return Err(Error::Format(format!("has_labels flag {other}"))),
        };
        let num_classes = u32_at(14);
        if n == 0 || dim == 0 {
            return Err(Error::validation("header declares an empty pool"));
        }

        let feat_bytes = n
            .checked_mul(dim)
            .and_then(|c| c.checked_mul(4))
            .ok_or_else(|| Error::Corruption("declared size overflows".into()))?;
        let label_bytes = if has_labels { 2 * n } else { 0 };
        let expected = AEMB_HEADER_LEN + feat_bytes + label_bytes;
        if bytes.len() != expected {
            return Err(Error::Corruption(format!(
                "payload is {} bytes, header declares {}",
                bytes.len() - AEMB_HEADER_LEN,
                expected - AEMB_HEADER_LEN
            )));
        }

        let payload = &bytes[AEMB_HEADER_LEN..];
        let features = payload[..feat_bytes]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let labels = has_labels.then(|| {
            payload[feat_bytes..]
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes(c.try_into().unwrap()))
                .collect()
        });
        Self::new(dim, features, labels, num_classes)
    }
}

/// Read an AEMB file.
pub fn load_pool(path: impl AsRef<Path>) -> Result<EmbeddingPool> {
    let bytes = fs::read(path)?;
    EmbeddingPool::from_bytes(&bytes)
}

/// Write an AEMB file. Output bytes depend only on the pool contents.
pub fn save_pool(pool: &EmbeddingPool, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, pool.to_bytes())?;
    Ok(())
}

/// Path of the optional JSON provenance sidecar: `<file>.meta.json`.
pub fn sidecar_path(path: impl AsRef<Path>) -> PathBuf {
    let mut s = path.as_ref().as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Read the sidecar if present. A missing sidecar yields `Ok(None)`.
pub fn load_sidecar(path: impl AsRef<Path>) -> Result<Option<serde_json::Value>> {
    let side = sidecar_path(path);
    match fs::read(&side) {
        Ok(bytes) => serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|e| Error::Format(format!("{}: {e}", side.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn save_sidecar(path: impl AsRef<Path>, meta: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(meta).expect("JSON values serialize");
    fs::write(sidecar_path(path), text)?;
    Ok(())
}

/// Parameters for a labeled Gaussian-blob pool.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub dim: usize,
    pub per_class: usize,
    /// Within-class standard deviation per coordinate.
    pub spread: f64,
    /// Minimum distance between any two class centers.
    pub separation: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::validation("synthetic pool needs at least 2 classes"));
        }
        if self.per_class < 1 {
            return Err(Error::validation("per_class must be at least 1"));
        }
        if self.dim < 1 {
            return Err(Error::validation("dim must be at least 1"));
        }
        if !(self.spread > 0.0) || !(self.separation > 0.0) {
            return Err(Error::validation("spread and separation must be positive"));
        }
        Ok(())
    }
}

/// Class centers with pairwise distance ≥ `separation`.
///
/// A random orthonormal frame is built by Gram–Schmidt on Gaussian vectors.
/// When `classes ≤ dim`, center `c` is `separation/√2 · e_c`, giving a regular
/// simplex with all pairwise distances equal to `separation`. Otherwise centers
/// are the first `classes` points of an integer lattice of spacing
/// `separation` laid out on the frame (mixed radix `⌈classes^(1/dim)⌉`).
pub fn class_centers(classes: usize, dim: usize, separation: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = Rng::new(rng::mix(seed, tag::CENTERS));
    let axes = dim.min(classes);
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(axes);
    while frame.len() < axes {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        for e in &frame {
            let proj: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(e).for_each(|(a, b)| *a -= proj * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|a| *a /= norm);
            frame.push(v);
        }
    }

    if classes <= dim {
        let r = separation / std::f64::consts::SQRT_2;
        return frame
            .iter()
            .map(|e| e.iter().map(|a| a * r).collect())
            .collect();
    }

    let mut base = 2usize;
    while base.pow(dim as u32) < classes {
        base += 1;
    }
    (0..classes)
        .map(|c| {
            let mut center = vec![0.0; dim];
            let mut rest = c;
            for e in &frame {
                let digit = (rest % base) as f64;
                rest /= base;
                center.iter_mut().zip(e).for_each(|(x, a)| *x += digit * separation * a);
            }
            center
        })
        .collect()
}

/// Isotropic Gaussian blobs, one per class, `per_class` samples each, stored
/// class-major (all of class 0, then class 1, ...).
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<EmbeddingPool> {
    spec.validate()?;
    let centers = class_centers(spec.classes, spec.dim, spec.separation, spec.seed);
    let mut rng = Rng::new(rng::mix(spec.seed, tag::SAMPLES));
    let n = spec.classes * spec.per_class;
    let mut features = Vec::with_capacity(n * spec.dim);
    let mut labels = Vec::with_capacity(n);
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..spec.per_class {
            features.extend(center.iter().map(|&m| (m + spec.spread * rng.normal()) as f32));
            labels.push(c as u16);
        }
    }
    EmbeddingPool::new(spec.dim, features, Some(labels), spec.classes)
}

/// Randomly drop samples so that class `c` keeps `round(count_c × retention[c])`.
/// Survivors keep their relative order.
pub fn apply_imbalance(pool: &EmbeddingPool, retention: &[f64], seed: u64) -> Result<EmbeddingPool> {
    pool.require_labels()?;
    if retention.len() != pool.num_classes() {
        return Err(Error::validation(format!(
            "retention has {} entries for {} classes",
            retention.len(),
            pool.num_classes()
        )));
    }
    if let Some(r) = retention.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::validation(format!("retention {r} outside (0, 1]")));
    }
    let mut keep = vec![false; pool.len()];
    for (c, mut members) in pool.class_indices().into_iter().enumerate() {
        let target = round_half_up(members.len() as f64 * retention[c]);
        if target == 0 {
            return Err(Error::validation(format!(
                "retention {} removes every sample of class {c}",
                retention[c]
            )));
        }
        let mut rng = Rng::new(rng::mix(seed, c as u64));
        rng.choose_prefix(&mut members, target);
        for &i in &members[..target] {
            keep[i] = true;
        }
    }
    let survivors: Vec<usize> = (0..pool.len()).filter(|&i| keep[i]).collect();
    pool.select(&survivors)
}

/// Disjoint labeled / unlabeled / test index sets over one pool.
///
/// `unlabeled` is kept sorted ascending; `labeled` is in acquisition order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolPartition {
    pub labeled: Vec<usize>,
    pub unlabeled: Vec<usize>,
    pub test: Vec<usize>,
}

impl PoolPartition {
    /// Move `picks` from unlabeled to labeled, in pick order.
    pub fn label(&mut self, picks: &[usize]) -> Result<()> {
        let mut sorted = picks.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::validation("duplicate pick"));
        }
        for &p in &sorted {
            if self.unlabeled.binary_search(&p).is_err() {
                return Err(Error::validation(format!("pick {p} is not in the unlabeled set")));
            }
        }
        self.unlabeled.retain(|i| sorted.binary_search(i).is_err());
        self.labeled.extend_from_slice(picks);
        Ok(())
    }

    /// Pairwise disjointness and range checks.
    pub fn check(&self, n: usize) -> Result<()> {
        let mut owner = vec![0u8; n];
        for (set, id) in [(&self.labeled, 1u8), (&self.unlabeled, 2), (&self.test, 3)] {
            for &i in set.iter() {
                if i >= n {
                    return Err(Error::validation(format!("index {i} out of range {n}")));
                }
                if owner[i] != 0 {
                    return Err(Error::validation(format!("index {i} appears in two sets")));
                }
                owner[i] = id;
            }
        }
        Ok(())
    }
}

/// Stratified split: per class, `round(count_c × test_fraction)` samples go to
/// test, the rest to unlabeled. `labeled` starts empty.
pub fn split_pool(pool: &EmbeddingPool, test_fraction: f64, seed: u64) -> Result<PoolPartition> {
    pool.require_labels()?;
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::validation(format!("test fraction {test_fraction} outside (0, 1)")));
    }
    let mut test = Vec::new();
    let mut unlabeled = Vec::new();
    for (c, mut members) in pool.class_indices().into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::validation(format!("class {c} has fewer than 2 samples")));
        }
        let take = round_half_up(members.len() as f64 * test_fraction);
        let mut rng = Rng::new(rng::mix_all(seed, &[tag::SPLIT, c as u64]));
        rng.choose_prefix(&mut members, take);
        test.extend_from_slice(&members[..take]);
        unlabeled.extend_from_slice(&members[take..]);
    }
    test.sort_unstable();
    unlabeled.sort_unstable();
    Ok(PoolPartition {
        labeled: Vec::new(),
        unlabeled,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_pool() -> EmbeddingPool {
        EmbeddingPool::new(2, vec![0.0, 1.0, 2.0, 3.0, 4.5, -1.25], Some(vec![0, 1, 1]), 2).unwrap()
    }

    #[test]
    fn header_is_eighteen_bytes() {
        let p = EmbeddingPool::new(1, vec![0.5], None, 0).unwrap();
        let bytes = p.to_bytes();
        assert_eq!(bytes.len(), AEMB_HEADER_LEN + 4);
        assert_eq!(AEMB_HEADER_LEN, 18);
        assert_eq!(&bytes[..5], b"AEMB\x01");
    }

    #[test]
    fn roundtrip_and_deterministic_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.aemb");
        let p = small_pool();
        save_pool(&p, &path).unwrap();
        let first = fs::read(&path).unwrap();
        assert_eq!(load_pool(&path).unwrap(), p);
        save_pool(&p, &path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
    }

    #[test]
    fn bad_magic_is_format_error() {
        let mut bytes = small_pool().to_bytes();
        bytes[..4].copy_from_slice(b"XXXX");
        assert!(matches!(EmbeddingPool::from_bytes(&bytes), Err(Error::Format(_))));
        bytes[..4].copy_from_slice(b"AEMB");
        bytes[4] = 2;
        assert!(matches!(EmbeddingPool::from_bytes(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn short_payload_is_corruption() {
        // n=3, dim=2 needs 24 feature bytes; provide 20.
        let p = EmbeddingPool::new(2, vec![0.0; 6], None, 0).unwrap();
        let bytes = p.to_bytes();
        assert_eq!(bytes.len() - AEMB_HEADER_LEN, 24);
        let truncated = &bytes[..AEMB_HEADER_LEN + 20];
        assert!(matches!(EmbeddingPool::from_bytes(truncated), Err(Error::Corruption(_))));
    }

    #[test]
    fn out_of_range_label_is_validation() {
        let mut bytes = small_pool().to_bytes();
        let last = bytes.len() - 2;
        bytes[last..].copy_from_slice(&7u16.to_le_bytes());
        assert!(matches!(EmbeddingPool::from_bytes(&bytes), Err(Error::Validation(_))));
    }

    #[test]
    fn missing_sidecar_is_fine() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.aemb");
        assert!(load_sidecar(&path).unwrap().is_none());
        let meta = serde_json::json!({"encoder": "toy"});
        save_sidecar(&path, &meta).unwrap();
        assert_eq!(load_sidecar(&path).unwrap(), Some(meta));
    }

    #[test]
    fn synthetic_counts_and_determinism() {
        let spec = SyntheticSpec {
            classes: 10,
            dim: 8,
            per_class: 100,
            spread: 1.0,
            separation: 5.0,
            seed: 7,
        };
        let a = gen_synthetic(&spec).unwrap();
        assert_eq!(a.len(), 1000);
        assert!(a.class_counts().iter().all(|&c| c == 100));
        assert_eq!(a, gen_synthetic(&spec).unwrap());
    }

    #[test]
    fn centers_are_separated_even_when_classes_exceed_dim() {
        for (classes, dim) in [(3, 8), (10, 2), (5, 1), (10, 10)] {
            let centers = class_centers(classes, dim, 4.0, 11);
            for i in 0..classes {
                for j in 0..i {
                    let d: f64 = centers[i]
                        .iter()
                        .zip(&centers[j])
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    assert!(d >= 4.0 - 1e-9, "{classes}x{dim}: {d}");
                }
            }
        }
    }

    #[test]
    fn invalid_synthetic_spec() {
        let mut spec = SyntheticSpec {
            classes: 1,
            dim: 2,
            per_class: 3,
            spread: 1.0,
            separation: 1.0,
            seed: 0,
        };
        assert!(gen_synthetic(&spec).is_err());
        spec.classes = 2;
        spec.spread = 0.0;
        assert!(gen_synthetic(&spec).is_err());
    }

    #[test]
    fn imbalance_counts() {
        let spec = SyntheticSpec {
            classes: 2,
            dim: 3,
            per_class: 100,
            spread: 1.0,
            separation: 5.0,
            seed: 1,
        };
        let pool = gen_synthetic(&spec).unwrap();
        assert_eq!(apply_imbalance(&pool, &[1.0, 1.0], 3).unwrap(), pool);
        let out = apply_imbalance(&pool, &[1.0, 0.1], 3).unwrap();
        assert_eq!(out.class_counts(), vec![100, 10]);
        assert_eq!(out.dim(), 3);
        assert!(apply_imbalance(&pool, &[1.0, 0.001], 3).is_err());
        assert!(apply_imbalance(&pool, &[1.0], 3).is_err());
        assert!(apply_imbalance(&pool, &[1.0, 1.5], 3).is_err());
    }

    #[test]
    fn split_counts_paper_scale() {
        let pool = EmbeddingPool::new(
            1,
            vec![0.0; 27000],
            Some((0..27000).map(|i| (i % 10) as u16).collect()),
            10,
        )
        .unwrap();
        let part = split_pool(&pool, 0.2, 5).unwrap();
        assert_eq!(part.test.len(), 5400);
        assert_eq!(part.unlabeled.len(), 21600);
        assert!(part.labeled.is_empty());
        part.check(pool.len()).unwrap();
        assert_eq!(part, split_pool(&pool, 0.2, 5).unwrap());
    }

    #[test]
    fn split_rejects_tiny_class() {
        let pool = EmbeddingPool::new(1, vec![0.0; 5], Some(vec![0, 0, 0, 0, 1]), 2).unwrap();
        assert!(matches!(split_pool(&pool, 0.2, 1), Err(Error::Validation(_))));
    }
}
