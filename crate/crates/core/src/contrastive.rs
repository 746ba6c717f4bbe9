//! Contrastive learning on vector data: the NT-Xent loss with its analytic
//! gradient, jitter/mask view augmentation, and a small two-layer encoder
//! trained on in-batch negatives.
//!
//! Views of a batch of `N` anchors are laid out as `[a_1..a_N, b_1..b_N]`;
//! the positive partner of row `i` is `(i + N) mod 2N`. The softmax
//! denominator runs over every `k ≠ i`, positive included.

use rayon::prelude::*;

use crate::classifier::{Gradients, MlpConfig, MlpModel};
use crate::dataset::EmbeddingPool;
use crate::error::{Error, Result};
use crate::geometry::Points;
use crate::rng::{self, round_half_up, tag, Rng};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NtXentConfig {
    /// Temperature τ > 0. Similarity is always cosine.
    pub temperature: f64,
}

impl Default for NtXentConfig {
    fn default() -> Self {
        Self { temperature: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NtXentLoss {
    /// Mean of `per_pair`.
    pub loss: f64,
    /// `L(i, partner(i))` for each of the 2N rows.
    pub per_pair: Vec<f64>,
}

fn check_batch<T: Scalar>(embeddings: &Points<'_, T>, cfg: &NtXentConfig) -> Result<()> {
    if !(cfg.temperature > 0.0) {
        return Err(Error::validation("temperature must be positive"));
    }
    let rows = embeddings.len();
    if rows % 2 != 0 {
        return Err(Error::validation("NT-Xent expects an even number of views"));
    }
    if rows < 4 {
        return Err(Error::validation("NT-Xent needs N ≥ 2 anchors so negatives exist"));
    }
    for i in 0..rows {
        if embeddings.row(i).iter().all(|v| v.is_zero()) {
            return Err(Error::domain(format!("embedding {i} has zero norm")));
        }
    }
    Ok(())
}

/// Loss and `∂loss/∂z` (row-major, same shape as the input). Norms are floored
/// at a tiny epsilon; callers that need the strict zero-norm contract check first.
fn loss_and_grad_unchecked<T: Scalar>(z: Points<'_, T>, tau: f64) -> (NtXentLoss, Vec<f64>) {
    let rows = z.len();
    let half = rows / 2;
    let dim = z.dim();
    let norms: Vec<f64> = (0..rows)
        .map(|i| z.row(i).iter().map(|v| v.f64().powi(2)).sum::<f64>().sqrt().max(1e-12))
        .collect();
    let unit: Vec<Vec<f64>> = (0..rows)
        .map(|i| z.row(i).iter().map(|v| v.f64() / norms[i]).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut per_pair = vec![0.0; rows];
    // coef[i][k] = ∂loss/∂s_ik where s_ik = cos(z_i, z_k)/τ.
    let mut coef = vec![vec![0.0f64; rows]; rows];
    let scale = 1.0 / rows as f64;
    for i in 0..rows {
        let partner = (i + half) % rows;
        let s: Vec<f64> = (0..rows).map(|k| dot(&unit[i], &unit[k]) / tau).collect();
        let max = (0..rows).filter(|&k| k != i).map(|k| s[k]).fold(f64::NEG_INFINITY, f64::max);
        let denom: f64 = (0..rows).filter(|&k| k != i).map(|k| (s[k] - max).exp()).sum();
        per_pair[i] = -(s[partner] - max) + denom.ln();
        for k in (0..rows).filter(|&k| k != i) {
            let p = (s[k] - max).exp() / denom;
            coef[i][k] = scale * (p - if k == partner { 1.0 } else { 0.0 });
        }
    }
    let loss = per_pair.iter().sum::<f64>() * scale;

    let mut grad = vec![0.0f64; rows * dim];
    for i in 0..rows {
        // ∂loss/∂u_i, then project onto the tangent space of the unit sphere.
        let mut gu = vec![0.0f64; dim];
        for k in 0..rows {
            let c = (coef[i][k] + coef[k][i]) / tau;
            if c != 0.0 {
                gu.iter_mut().zip(&unit[k]).for_each(|(g, u)| *g += c * u);
            }
        }
        let radial = dot(&gu, &unit[i]);
        for (d, g) in grad[i * dim..(i + 1) * dim].iter_mut().enumerate() {
            *g = (gu[d] - radial * unit[i][d]) / norms[i];
        }
    }
    (NtXentLoss { loss, per_pair }, grad)
}

/// NT-Xent over `2N` views ordered `[a_1..a_N, b_1..b_N]`.
pub fn nt_xent_loss<T: Scalar>(embeddings: Points<'_, T>, cfg: &NtXentConfig) -> Result<NtXentLoss> {
    check_batch(&embeddings, cfg)?;
    Ok(loss_and_grad_unchecked(embeddings, cfg.temperature).0)
}

/// NT-Xent and its gradient with respect to every embedding coordinate.
pub fn nt_xent_loss_grad<T: Scalar>(
    embeddings: Points<'_, T>,
    cfg: &NtXentConfig,
) -> Result<(NtXentLoss, Vec<f64>)> {
    check_batch(&embeddings, cfg)?;
    Ok(loss_and_grad_unchecked(embeddings, cfg.temperature))
}

/// Seeded view of a vector: Gaussian jitter of scale `jitter` on every
/// coordinate, then `round(mask_frac × dim)` coordinates set to zero.
pub fn augment<T: Scalar>(anchor: &[T], seed: u64, jitter: f64, mask_frac: f64) -> Vec<T> {
    let mut rng = Rng::new(seed);
    let mut view: Vec<T> = if jitter > 0.0 {
        anchor.iter().map(|&v| v + T::of(jitter * rng.normal())).collect()
    } else {
        anchor.to_vec()
    };
    let masked = round_half_up(mask_frac * anchor.len() as f64).min(anchor.len());
    if masked > 0 {
        let mut coords: Vec<usize> = (0..anchor.len()).collect();
        rng.choose_prefix(&mut coords, masked);
        for &c in &coords[..masked] {
            view[c] = T::zero();
        }
    }
    view
}

/// Two augmented views per anchor row.
#[derive(Clone, Debug, PartialEq)]
pub struct ViewBatch {
    /// Pool indices of the anchors.
    pub anchors: Vec<usize>,
    pub dim: usize,
    /// Row-major `N × dim`.
    pub view_a: Vec<f64>,
    pub view_b: Vec<f64>,
    pub aug_seed: u64,
}

impl ViewBatch {
    /// View `v` of anchor position `j` uses seed `mix_all(aug_seed, [j, v])`.
    pub fn new(
        pool: &EmbeddingPool,
        anchors: &[usize],
        aug_seed: u64,
        jitter: f64,
        mask_frac: f64,
    ) -> Self {
        let mut view_a = Vec::with_capacity(anchors.len() * pool.dim());
        let mut view_b = Vec::with_capacity(anchors.len() * pool.dim());
        for (j, &i) in anchors.iter().enumerate() {
            let x: Vec<f64> = pool.row(i).iter().map(|&v| v as f64).collect();
            view_a.extend(augment(&x, rng::mix_all(aug_seed, &[j as u64, 0]), jitter, mask_frac));
            view_b.extend(augment(&x, rng::mix_all(aug_seed, &[j as u64, 1]), jitter, mask_frac));
        }
        Self {
            anchors: anchors.to_vec(),
            dim: pool.dim(),
            view_a,
            view_b,
            aug_seed,
        }
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// Views stacked as `[a_1..a_N, b_1..b_N]`.
    pub fn stacked(&self) -> Vec<f64> {
        let mut all = self.view_a.clone();
        all.extend_from_slice(&self.view_b);
        all
    }
}

/// Knobs for [`train_encoder`] beyond the loss configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct EncoderTraining {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub jitter: f64,
    pub mask_frac: f64,
}

impl Default for EncoderTraining {
    fn default() -> Self {
        Self {
            batch_size: 64,
            learning_rate: 0.05,
            jitter: 0.5,
            mask_frac: 0.1,
        }
    }
}

/// Two-layer ReLU encoder `x ↦ W₂·relu(W₁x + b₁) + b₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContrastiveEncoder<T> {
    pub net: MlpModel<T>,
}

impl<T: Scalar> ContrastiveEncoder<T> {
    pub fn new(input_dim: usize, width: usize, out_dim: usize, seed: u64) -> Result<Self> {
        if out_dim < 2 || width < 1 {
            return Err(Error::validation("encoder needs width ≥ 1 and output dim ≥ 2"));
        }
        let config = MlpConfig {
            input_dim,
            hidden_dims: vec![width],
            num_classes: out_dim,
            dropout_rate: 0.0,
            learning_rate: EncoderTraining::default().learning_rate,
            epochs: 0,
            batch_size: 1,
            weight_init_seed: seed,
        };
        Ok(Self {
            net: MlpModel::new_he(config)?,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.net.input_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.net.num_classes()
    }

    pub fn embed<U: Scalar>(&self, x: &[U]) -> Result<Vec<T>> {
        self.net.logits(x)
    }

    /// NT-Xent of this encoder on one view batch.
    pub fn batch_loss(&self, batch: &ViewBatch, cfg: &NtXentConfig) -> Result<f64> {
        let stacked = batch.stacked();
        let mut z = Vec::with_capacity(2 * batch.len() * self.out_dim());
        for row in stacked.chunks_exact(batch.dim) {
            z.extend(self.embed(row)?);
        }
        let pts = Points::new(&z, self.out_dim())?;
        Ok(loss_and_grad_unchecked(pts, cfg.temperature).0.loss)
    }

    fn step(&mut self, batch: &ViewBatch, cfg: &NtXentConfig, lr: f64) -> f64 {
        let stacked = batch.stacked();
        let traces: Vec<_> = stacked
            .par_chunks_exact(batch.dim)
            .map(|row| self.net.trace(row, None))
            .collect();
        let out = self.out_dim();
        let z: Vec<T> = traces.iter().flat_map(|t| t.logits.iter().copied()).collect();
        let (loss, grad) = loss_and_grad_unchecked(Points::new(&z, out).unwrap(), cfg.temperature);
        let mut total = Gradients::zeros_like(&self.net);
        for (r, tr) in traces.iter().enumerate() {
            let delta = grad[r * out..(r + 1) * out].iter().map(|&g| T::of(g)).collect();
            self.net.backward(tr, delta, &mut total);
        }
        self.net.apply(&total, T::of(lr));
        loss.loss
    }
}

/// Loss trajectory of an encoder training run.
#[derive(Clone, Debug, PartialEq)]
pub struct EncoderReport {
    /// Loss of the initial encoder on the fixed evaluation batch.
    pub initial_loss: f64,
    /// Loss of the trained encoder on the same batch.
    pub final_loss: f64,
    /// Mean training-batch loss per epoch.
    pub epoch_losses: Vec<f64>,
}

/// Train a contrastive encoder by SGD on NT-Xent over seeded view batches.
/// Labels of `raw` are ignored.
pub fn train_encoder<T: Scalar>(
    raw: &EmbeddingPool,
    width: usize,
    out_dim: usize,
    cfg: &NtXentConfig,
    epochs: usize,
    seed: u64,
    opts: &EncoderTraining,
) -> Result<(ContrastiveEncoder<T>, EncoderReport)> {
    if raw.len() < 4 {
        return Err(Error::validation("encoder training needs at least 4 samples"));
    }
    if !(cfg.temperature > 0.0) {
        return Err(Error::validation("temperature must be positive"));
    }
    if opts.batch_size < 2 {
        return Err(Error::validation("encoder batch size must be at least 2"));
    }
    let mut encoder = ContrastiveEncoder::<T>::new(raw.dim(), width, out_dim, seed)?;

    // Fixed evaluation batch: the first (up to) 256 samples of a seeded shuffle.
    let mut eval_idx: Vec<usize> = (0..raw.len()).collect();
    Rng::new(rng::mix_all(seed, &[tag::AUGMENT, u64::MAX])).shuffle(&mut eval_idx);
    eval_idx.truncate(256);
    let eval = ViewBatch::new(raw, &eval_idx, rng::mix(seed, u64::MAX), opts.jitter, opts.mask_frac);
    let initial_loss = encoder.batch_loss(&eval, cfg)?;

    let mut order: Vec<usize> = (0..raw.len()).collect();
    let mut shuffler = Rng::new(rng::mix(seed, tag::TRAIN));
    let mut epoch_losses = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        shuffler.shuffle(&mut order);
        let mut sum = 0.0;
        let mut batches = 0;
        for (b, chunk) in order.chunks(opts.batch_size).enumerate() {
            if chunk.len() < 2 {
                continue;
            }
            let aug = rng::mix_all(seed, &[tag::AUGMENT, epoch as u64, b as u64]);
            let batch = ViewBatch::new(raw, chunk, aug, opts.jitter, opts.mask_frac);
            sum += encoder.step(&batch, cfg, opts.learning_rate);
            batches += 1;
        }
        epoch_losses.push(sum / batches.max(1) as f64);
    }
    let final_loss = encoder.batch_loss(&eval, cfg)?;
    Ok((
        encoder,
        EncoderReport {
            initial_loss,
            final_loss,
            epoch_losses,
        },
    ))
}

/// Map every row through the encoder; labels carry over unchanged.
pub fn encode<T: Scalar>(encoder: &ContrastiveEncoder<T>, pool: &EmbeddingPool) -> Result<EmbeddingPool> {
    if pool.dim() != encoder.input_dim() {
        return Err(Error::DimMismatch {
            expected: encoder.input_dim(),
            actual: pool.dim(),
        });
    }
    let out = encoder.out_dim();
    let rows: Vec<Vec<f32>> = (0..pool.len())
        .into_par_iter()
        .map(|i| {
            encoder
                .embed(pool.row(i))
                .map(|z| z.into_iter().map(|v| v.f64() as f32).collect())
        })
        .collect::<Result<_>>()?;
    pool.with_features(out, rows.concat())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(data: &[f64], dim: usize) -> Points<'_, f64> {
        Points::new(data, dim).unwrap()
    }

    #[test]
    fn identical_embeddings_give_ln3() {
        let data = [0.3, -0.7].repeat(4);
        for tau in [0.1, 1.0, 7.0] {
            let out = nt_xent_loss(pts(&data, 2), &NtXentConfig { temperature: tau }).unwrap();
            for l in &out.per_pair {
                assert!((l - 3f64.ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separated_pairs_closed_form() {
        // a1 = b1 = e1, a2 = b2 = e2: positives have cos 1, negatives cos 0.
        let data = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let e = std::f64::consts::E;
        let l1 = nt_xent_loss(pts(&data, 2), &NtXentConfig { temperature: 1.0 }).unwrap();
        assert!((l1.loss - (-(e / (e + 2.0)).ln())).abs() < 1e-12);
        assert!((l1.loss - 0.5514).abs() < 1e-4);
        let l2 = nt_xent_loss(pts(&data, 2), &NtXentConfig { temperature: 0.5 }).unwrap();
        assert!((l2.loss - (-(e * e / (e * e + 2.0)).ln())).abs() < 1e-12);
        assert!((l2.loss - 0.2395).abs() < 1e-4);
    }

    #[test]
    fn validation_errors() {
        let cfg = NtXentConfig::default();
        assert!(matches!(nt_xent_loss(pts(&[1.0, 2.0], 1), &cfg), Err(Error::Validation(_))));
        let zero = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0];
        assert!(matches!(nt_xent_loss(pts(&zero, 2), &cfg), Err(Error::Domain(_))));
        let ok = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        assert!(nt_xent_loss(pts(&ok, 2), &NtXentConfig { temperature: 0.0 }).is_err());
    }

    #[test]
    fn augment_identity_and_determinism() {
        let x = [1.0f64, -2.0, 3.0, 0.5];
        assert_eq!(augment(&x, 4, 0.0, 0.0), x.to_vec());
        assert_eq!(augment(&x, 4, 0.3, 0.25), augment(&x, 4, 0.3, 0.25));
        let masked = augment(&x, 9, 0.0, 0.5);
        assert_eq!(masked.iter().filter(|v| **v == 0.0).count(), 2);
    }

    #[test]
    fn augment_jitter_energy() {
        let mut x = vec![0.0f64; 32];
        x[0] = 1.0;
        let trials = 100;
        let mean_sq: f64 = (0..trials)
            .map(|s| {
                augment(&x, s, 0.1, 0.0)
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
            })
            .sum::<f64>()
            / trials as f64;
        assert!((mean_sq - 0.32).abs() < 0.16, "{mean_sq}");
    }

    #[test]
    fn zero_epoch_encoder_shapes() {
        let raw = crate::dataset::gen_synthetic(&crate::dataset::SyntheticSpec {
            classes: 2,
            dim: 6,
            per_class: 4,
            spread: 1.0,
            separation: 3.0,
            seed: 1,
        })
        .unwrap();
        let (enc, report) =
            train_encoder::<f64>(&raw, 8, 3, &NtXentConfig::default(), 0, 5, &EncoderTraining::default())
                .unwrap();
        assert_eq!(enc, ContrastiveEncoder::new(6, 8, 3, 5).unwrap());
        assert_eq!(report.initial_loss, report.final_loss);
        let encoded = encode(&enc, &raw).unwrap();
        assert_eq!(encoded.len(), raw.len());
        assert_eq!(encoded.dim(), 3);
        assert_eq!(encoded.labels(), raw.labels());
        assert_eq!(encoded, encode(&enc, &raw).unwrap());
        let wrong = crate::dataset::EmbeddingPool::new(5, vec![0.0; 10], None, 0).unwrap();
        assert!(encode(&enc, &wrong).is_err());
        let tiny = raw.select(&[0, 1, 2]).unwrap();
        assert!(train_encoder::<f64>(&tiny, 4, 2, &NtXentConfig::default(), 1, 0, &EncoderTraining::default()).is_err());
    }
}
