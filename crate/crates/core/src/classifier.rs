//! The uncertainty model: a feed-forward softmax classifier with ReLU hidden
//! layers and inverted dropout after every hidden activation, trained by
//! mini-batch SGD on mean cross-entropy. Dropout can be kept active at
//! inference for Monte Carlo estimates.
//!
//! Hidden layers use He initialization; the output layer starts at zero, so a
//! fresh model predicts the uniform distribution.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::dataset::EmbeddingPool;
use crate::error::{Error, Result};
use crate::geometry::Points;
use crate::rng::{self, tag, Rng};
use crate::scalar::Scalar;

pub const AMLP_MAGIC: &[u8; 4] = b"AMLP";
pub const AMLP_VERSION: u8 = 1;

/// Samples per gradient chunk; chunk sums are reduced in order.
const GRAD_CHUNK: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub num_classes: usize,
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub weight_init_seed: u64,
}

impl MlpConfig {
    /// One hidden layer of 128 units, dropout 0.3, SGD at 0.05.
    pub fn new(input_dim: usize, num_classes: usize) -> Self {
        Self {
            input_dim,
            hidden_dims: vec![128],
            num_classes,
            dropout_rate: 0.3,
            learning_rate: 0.05,
            epochs: 100,
            batch_size: 32,
            weight_init_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim < 1 {
            return Err(Error::validation("input_dim must be at least 1"));
        }
        if self.num_classes < 2 {
            return Err(Error::validation("num_classes must be at least 2"));
        }
        if self.hidden_dims.iter().any(|&h| h == 0) {
            return Err(Error::validation("hidden layers must be non-empty"));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::validation("dropout_rate must lie in [0, 1)"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::validation("learning_rate must be positive"));
        }
        if self.batch_size < 1 {
            return Err(Error::validation("batch_size must be at least 1"));
        }
        Ok(())
    }

    fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut dims = vec![self.input_dim];
        dims.extend_from_slice(&self.hidden_dims);
        dims.push(self.num_classes);
        dims.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Fully connected layer; `weights` is `outputs × inputs`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<T> {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![T::zero(); inputs * outputs],
            bias: vec![T::zero(); outputs],
        }
    }

    fn forward(&self, x: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(self.weights.chunks_exact(self.inputs).zip(&self.bias).map(|(w, &b)| {
            w.iter().zip(x).fold(b, |acc, (&wi, &xi)| acc + wi * xi)
        }));
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel<T> {
    pub config: MlpConfig,
    pub layers: Vec<Dense<T>>,
}

/// Parameter gradients with the same layout as [`MlpModel::layers`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T> {
    pub layers: Vec<Dense<T>>,
}

impl<T: Scalar> Gradients<T> {
    pub(crate) fn zeros_like(model: &MlpModel<T>) -> Self {
        Self {
            layers: model
                .layers
                .iter()
                .map(|l| Dense::zeros(l.inputs, l.outputs))
                .collect(),
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights.iter_mut().zip(&b.weights).for_each(|(x, &y)| *x += y);
            a.bias.iter_mut().zip(&b.bias).for_each(|(x, &y)| *x += y);
        }
    }

    /// Flattened in the order of [`MlpModel::parameters`].
    pub fn flat(&self) -> Vec<T> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
            .collect()
    }
}

/// Softmax outputs of `t` stochastic passes and their summary.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertaintyMatrix {
    pub passes: usize,
    pub num_classes: usize,
    /// Row-major `passes × num_classes`.
    pub probs: Vec<f64>,
    pub mean: Vec<f64>,
    /// `max_c mean[c]`.
    pub certainty: f64,
    /// `1 − certainty`.
    pub uncertainty: f64,
}

impl UncertaintyMatrix {
    pub fn from_rows(num_classes: usize, probs: Vec<f64>) -> Self {
        let passes = probs.len() / num_classes;
        let first = &probs[..num_classes];
        let mean = if probs.chunks_exact(num_classes).all(|r| r == first) {
            // Identical passes average to the row itself; summing would perturb the last bit.
            first.to_vec()
        } else {
            let mut mean = vec![0.0; num_classes];
            for row in probs.chunks_exact(num_classes) {
                mean.iter_mut().zip(row).for_each(|(m, p)| *m += p);
            }
            mean.iter_mut().for_each(|m| *m /= passes as f64);
            mean
        };
        let certainty = mean.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            passes,
            num_classes,
            probs,
            mean,
            certainty,
            uncertainty: 1.0 - certainty,
        }
    }

    pub fn row(&self, pass: usize) -> &[f64] {
        &self.probs[pass * self.num_classes..(pass + 1) * self.num_classes]
    }
}

pub(crate) fn softmax<T: Scalar>(logits: &[T]) -> Vec<f64> {
    let max = logits.iter().map(|v| v.f64()).fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v.f64() - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index of the largest probability; ties go to the lowest class.
pub fn argmax_class(probs: &[f64]) -> usize {
    crate::geometry::argmax(probs).unwrap_or(0)
}

/// Per-sample forward state kept for backpropagation.
pub(crate) struct Trace<T> {
    /// Input to each layer (`acts[0]` is the sample).
    acts: Vec<Vec<T>>,
    /// Pre-activations of hidden layers.
    pre: Vec<Vec<T>>,
    /// Dropout multipliers of hidden layers (0 or 1/(1-p)); empty when off.
    masks: Vec<Vec<T>>,
    pub(crate) logits: Vec<T>,
}

impl<T: Scalar> MlpModel<T> {
    pub fn new(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = Rng::new(rng::mix(config.weight_init_seed, tag::INIT));
        let shapes = config.layer_shapes();
        let last = shapes.len() - 1;
        let layers = shapes
            .into_iter()
            .enumerate()
            .map(|(i, (inputs, outputs))| {
                let mut layer = Dense::zeros(inputs, outputs);
                if i < last {
                    let scale = (2.0 / inputs as f64).sqrt();
                    layer.weights.iter_mut().for_each(|w| *w = T::of(rng.normal() * scale));
                }
                layer
            })
            .collect();
        Ok(Self { config, layers })
    }

    /// He initialization on every layer, output included.
    pub fn new_he(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = Rng::new(rng::mix(config.weight_init_seed, tag::INIT));
        let layers = config
            .layer_shapes()
            .into_iter()
            .map(|(inputs, outputs)| {
                let mut layer = Dense::zeros(inputs, outputs);
                let scale = (2.0 / inputs as f64).sqrt();
                layer.weights.iter_mut().for_each(|w| *w = T::of(rng.normal() * scale));
                layer
            })
            .collect();
        Ok(Self { config, layers })
    }

    pub fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    pub fn num_classes(&self) -> usize {
        self.config.num_classes
    }

    pub fn parameters(&self) -> Vec<T> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
            .collect()
    }

    pub fn set_parameters(&mut self, params: &[T]) -> Result<()> {
        let total: usize = self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum();
        if params.len() != total {
            return Err(Error::DimMismatch {
                expected: total,
                actual: params.len(),
            });
        }
        let mut it = params.iter().copied();
        for l in &mut self.layers {
            l.weights.iter_mut().chain(l.bias.iter_mut()).for_each(|w| *w = it.next().unwrap());
        }
        Ok(())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.config.input_dim {
            return Err(Error::DimMismatch {
                expected: self.config.input_dim,
                actual: len,
            });
        }
        Ok(())
    }

    /// Apply a dropout mask drawn from `rng` to a hidden activation in place,
    /// returning the multipliers.
    fn dropout(&self, h: &mut [T], rng: &mut Rng) -> Vec<T> {
        let p = self.config.dropout_rate;
        let keep = T::of(1.0 / (1.0 - p));
        h.iter_mut()
            .map(|v| {
                let m = if rng.uniform() < p { T::zero() } else { keep };
                *v *= m;
                m
            })
            .collect()
    }

    /// Forward from the input of layer `start`; `rng` enables dropout.
    fn forward_from(&self, start: usize, input: Vec<T>, mut rng: Option<&mut Rng>) -> Vec<T> {
        let last = self.layers.len() - 1;
        let mut a = input;
        let mut z = Vec::new();
        for (i, layer) in self.layers.iter().enumerate().skip(start) {
            layer.forward(&a, &mut z);
            if i < last {
                z.iter_mut().for_each(|v| *v = v.max(T::zero()));
                if let Some(r) = rng.as_deref_mut() {
                    self.dropout(&mut z, r);
                }
            }
            std::mem::swap(&mut a, &mut z);
        }
        a
    }

    pub(crate) fn trace<U: Scalar>(&self, x: &[U], mut rng: Option<&mut Rng>) -> Trace<T> {
        let last = self.layers.len() - 1;
        let mut acts = vec![x.iter().map(|v| T::of(v.f64())).collect::<Vec<T>>()];
        let mut pre = Vec::with_capacity(last);
        let mut masks = Vec::new();
        let mut logits = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::with_capacity(layer.outputs);
            layer.forward(acts.last().unwrap(), &mut z);
            if i == last {
                logits = z;
            } else {
                let mut h: Vec<T> = z.iter().map(|v| v.max(T::zero())).collect();
                pre.push(z);
                if let Some(r) = rng.as_deref_mut() {
                    masks.push(self.dropout(&mut h, r));
                }
                acts.push(h);
            }
        }
        Trace {
            acts,
            pre,
            masks,
            logits,
        }
    }

    /// Cross-entropy of one sample; adds `scale ×` its gradient into `grads`.
    fn backprop(&self, trace: &Trace<T>, label: usize, scale: T, grads: &mut Gradients<T>) -> f64 {
        let probs = softmax(&trace.logits);
        let loss = -probs[label].max(f64::MIN_POSITIVE).ln();
        let delta: Vec<T> = probs
            .iter()
            .enumerate()
            .map(|(c, &p)| T::of(p - if c == label { 1.0 } else { 0.0 }) * scale)
            .collect();
        self.backward(trace, delta, grads);
        loss
    }

    /// Accumulate parameter gradients given the gradient w.r.t. the output layer.
    pub(crate) fn backward(&self, trace: &Trace<T>, mut delta: Vec<T>, grads: &mut Gradients<T>) {
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let input = &trace.acts[l];
            let g = &mut grads.layers[l];
            for (o, &d) in delta.iter().enumerate() {
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                row.iter_mut().zip(input).for_each(|(w, &a)| *w += d * a);
            }
            if l == 0 {
                break;
            }
            let mut back = vec![T::zero(); layer.inputs];
            for (o, &d) in delta.iter().enumerate() {
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                back.iter_mut().zip(row).for_each(|(b, &w)| *b += d * w);
            }
            let h = l - 1;
            for (j, b) in back.iter_mut().enumerate() {
                if let Some(m) = trace.masks.get(h) {
                    *b *= m[j];
                }
                if trace.pre[h][j] <= T::zero() {
                    *b = T::zero();
                }
            }
            delta = back;
        }
    }

    /// Plain SGD step.
    pub(crate) fn apply(&mut self, grads: &Gradients<T>, lr: T) {
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            layer.weights.iter_mut().zip(&g.weights).for_each(|(w, &d)| *w -= lr * d);
            layer.bias.iter_mut().zip(&g.bias).for_each(|(w, &d)| *w -= lr * d);
        }
    }

    /// Mean cross-entropy over a batch and its exact gradient, dropout off.
    pub fn loss_and_gradient<U: Scalar>(
        &self,
        inputs: Points<'_, U>,
        labels: &[usize],
    ) -> Result<(f64, Gradients<T>)> {
        self.check_dim(inputs.dim())?;
        if labels.len() != inputs.len() || labels.is_empty() {
            return Err(Error::validation("one label per input row required"));
        }
        if labels.iter().any(|&l| l >= self.config.num_classes) {
            return Err(Error::validation("label out of range"));
        }
        let scale = T::of(1.0 / labels.len() as f64);
        let mut grads = Gradients::zeros_like(self);
        let mut loss = 0.0;
        for (i, &y) in labels.iter().enumerate() {
            let tr = self.trace(inputs.row(i), None);
            loss += self.backprop(&tr, y, scale, &mut grads);
        }
        Ok((loss / labels.len() as f64, grads))
    }

    /// Mean cross-entropy over `indices`, dropout off.
    pub fn mean_loss(&self, pool: &EmbeddingPool, indices: &[usize]) -> Result<f64> {
        let labels = pool.require_labels()?;
        self.check_dim(pool.dim())?;
        let losses: Vec<f64> = indices
            .par_iter()
            .map(|&i| {
                let probs = softmax(&self.forward_from(0, to_scalar(pool.row(i)), None));
                -probs[labels[i] as usize].max(f64::MIN_POSITIVE).ln()
            })
            .collect();
        Ok(losses.iter().sum::<f64>() / indices.len().max(1) as f64)
    }

    /// `epochs` passes of shuffled mini-batch SGD over `train_indices`,
    /// dropout active. Per-sample mask streams are keyed by
    /// `(seed, epoch, position)` and chunk gradients are reduced in order, so
    /// the result does not depend on the thread count.
    pub fn train(&self, pool: &EmbeddingPool, train_indices: &[usize], seed: u64) -> Result<Self> {
        let labels = pool.require_labels()?;
        self.check_dim(pool.dim())?;
        if train_indices.is_empty() {
            return Err(Error::validation("training set is empty"));
        }
        for &i in train_indices {
            if i >= pool.len() {
                return Err(Error::validation(format!("training index {i} out of range")));
            }
            if labels[i] as usize >= self.config.num_classes {
                return Err(Error::validation(format!("label of sample {i} exceeds model classes")));
            }
        }
        let mut model = self.clone();
        let lr = T::of(self.config.learning_rate);
        let dropout_on = self.config.dropout_rate > 0.0;
        let mut order = train_indices.to_vec();
        let mut shuffler = Rng::new(rng::mix(seed, tag::TRAIN));
        for epoch in 0..self.config.epochs {
            shuffler.shuffle(&mut order);
            let epoch_seed = rng::mix_all(seed, &[tag::MASK, epoch as u64]);
            for (b, batch) in order.chunks(self.config.batch_size).enumerate() {
                let scale = T::of(1.0 / batch.len() as f64);
                let base = b * self.config.batch_size;
                let m = &model;
                let partials: Vec<Gradients<T>> = batch
                    .par_chunks(GRAD_CHUNK)
                    .enumerate()
                    .map(|(c, chunk)| {
                        let mut g = Gradients::zeros_like(m);
                        for (j, &i) in chunk.iter().enumerate() {
                            let pos = (base + c * GRAD_CHUNK + j) as u64;
                            let mut r = Rng::new(rng::mix(epoch_seed, pos));
                            let tr = m.trace(pool.row(i), dropout_on.then_some(&mut r));
                            m.backprop(&tr, labels[i] as usize, scale, &mut g);
                        }
                        g
                    })
                    .collect();
                let mut total = Gradients::zeros_like(&model);
                for g in &partials {
                    total.add_assign(g);
                }
                model.apply(&total, lr);
            }
        }
        Ok(model)
    }

    /// Raw output-layer values, dropout off.
    pub fn logits<U: Scalar>(&self, x: &[U]) -> Result<Vec<T>> {
        self.check_dim(x.len())?;
        Ok(self.forward_from(0, to_scalar(x), None))
    }

    /// Softmax probabilities. With `dropout_active`, masks are drawn from a
    /// stream seeded by `mask_seed`; otherwise the seed is ignored.
    pub fn predict_proba<U: Scalar>(
        &self,
        x: &[U],
        dropout_active: bool,
        mask_seed: u64,
    ) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        let mut rng = Rng::new(mask_seed);
        let logits = self.forward_from(0, to_scalar(x), dropout_active.then_some(&mut rng));
        Ok(softmax(&logits))
    }

    /// `t` dropout-active passes; pass `p` uses mask seed `mix(seed, p)`, so
    /// row `p` equals `predict_proba(x, true, mix(seed, p))`.
    pub fn mc_dropout<U: Scalar>(&self, x: &[U], t: usize, seed: u64) -> Result<UncertaintyMatrix> {
        self.check_dim(x.len())?;
        if t == 0 {
            return Err(Error::validation("mc_dropout needs at least one pass"));
        }
        // The first layer runs before any dropout, so its output is shared by all passes.
        let mut first = Vec::new();
        self.layers[0].forward(&to_scalar(x), &mut first);
        let single = self.layers.len() == 1;
        if !single {
            first.iter_mut().for_each(|v| *v = v.max(T::zero()));
        }
        let mut probs = Vec::with_capacity(t * self.config.num_classes);
        for p in 0..t {
            let logits = if single {
                first.clone()
            } else {
                let mut rng = Rng::new(rng::mix(seed, p as u64));
                let mut h = first.clone();
                self.dropout(&mut h, &mut rng);
                self.forward_from(1, h, Some(&mut rng))
            };
            probs.extend(softmax(&logits));
        }
        Ok(UncertaintyMatrix::from_rows(self.config.num_classes, probs))
    }

    /// Fraction of `test_indices` whose dropout-off argmax equals the label.
    pub fn evaluate_accuracy(&self, pool: &EmbeddingPool, test_indices: &[usize]) -> Result<f64> {
        let labels = pool.require_labels()?;
        self.check_dim(pool.dim())?;
        if test_indices.is_empty() {
            return Err(Error::validation("test set is empty"));
        }
        let hits: Vec<bool> = test_indices
            .par_iter()
            .map(|&i| {
                let probs = softmax(&self.forward_from(0, to_scalar(pool.row(i)), None));
                argmax_class(&probs) == labels[i] as usize
            })
            .collect();
        Ok(hits.iter().filter(|&&h| h).count() as f64 / test_indices.len() as f64)
    }

    /// AMLP checkpoint bytes (little-endian):
    /// magic `AMLP`, version u8, input_dim u32, hidden count u32, hidden
    /// widths u32 each, num_classes u32, dropout_rate f64, learning_rate f64,
    /// epochs u32, batch_size u32, weight_init_seed u64, then per layer the
    /// weights (`outputs × inputs`) and biases as f64.
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut out = Vec::new();
        out.extend_from_slice(AMLP_MAGIC);
        out.push(AMLP_VERSION);
        out.extend_from_slice(&(c.input_dim as u32).to_le_bytes());
        out.extend_from_slice(&(c.hidden_dims.len() as u32).to_le_bytes());
        for &h in &c.hidden_dims {
            out.extend_from_slice(&(h as u32).to_le_bytes());
        }
        out.extend_from_slice(&(c.num_classes as u32).to_le_bytes());
        out.extend_from_slice(&c.dropout_rate.to_le_bytes());
        out.extend_from_slice(&c.learning_rate.to_le_bytes());
        out.extend_from_slice(&(c.epochs as u32).to_le_bytes());
        out.extend_from_slice(&(c.batch_size as u32).to_le_bytes());
        out.extend_from_slice(&c.weight_init_seed.to_le_bytes());
        for v in self.parameters() {
            out.extend_from_slice(&v.f64().to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = bytes;
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic)?;
        if &magic != AMLP_MAGIC {
            return Err(Error::Format("bad AMLP magic".into()));
        }
        let mut version = [0u8; 1];
        read_exact(&mut r, &mut version)?;
        if version[0] != AMLP_VERSION {
            return Err(Error::Format(format!("unsupported AMLP version {}", version[0])));
        }
        let input_dim = read_u32(&mut r)? as usize;
        let n_hidden = read_u32(&mut r)? as usize;
        if n_hidden > 1024 {
            return Err(Error::Corruption(format!("{n_hidden} hidden layers")));
        }
        let hidden_dims = (0..n_hidden)
            .map(|_| read_u32(&mut r).map(|v| v as usize))
            .collect::<Result<Vec<_>>>()?;
        let config = MlpConfig {
            input_dim,
            hidden_dims,
            num_classes: read_u32(&mut r)? as usize,
            dropout_rate: read_f64(&mut r)?,
            learning_rate: read_f64(&mut r)?,
            epochs: read_u32(&mut r)? as usize,
            batch_size: read_u32(&mut r)? as usize,
            weight_init_seed: read_u64(&mut r)?,
        };
        config.validate()?;
        let total: usize = config.layer_shapes().iter().map(|(i, o)| i * o + o).sum();
        if r.len() != total * 8 {
            return Err(Error::Corruption(format!(
                "weight payload is {} bytes, expected {}",
                r.len(),
                total * 8
            )));
        }
        let params: Vec<T> = r
            .chunks_exact(8)
            .map(|c| T::of(f64::from_le_bytes(c.try_into().unwrap())))
            .collect();
        let mut model = Self {
            layers: config
                .layer_shapes()
                .into_iter()
                .map(|(i, o)| Dense::zeros(i, o))
                .collect(),
            config,
        };
        model.set_parameters(&params)?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::File::create(path)?.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

fn to_scalar<U: Scalar, T: Scalar>(x: &[U]) -> Vec<T> {
    x.iter().map(|v| T::of(v.f64())).collect()
}

fn read_exact(r: &mut &[u8], buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::Corruption("AMLP file truncated".into()))
}

fn read_u32(r: &mut &[u8]) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut &[u8]) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut &[u8]) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(f64::from_le_bytes(b))
}
