//! A small dense ReLU classifier trained from scratch.
//!
//! Attacks only need a differentiable (value, gradient) pair, so a plain
//! fully connected network with analytic backprop is enough to exercise the
//! whole engine at desk scale without an ML framework.

use crate::dataset::Dataset;
use crate::error::{CoreError, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Identity,
}

/// One dense layer computing `activation(W x + b)`; `weights` is row-major
/// with `rows` outputs and `cols` inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

/// Feed-forward classifier; logits come from the final (identity) layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpClassifier {
    pub input_dim: usize,
    pub num_classes: usize,
    pub layers: Vec<DenseLayer>,
}

impl MlpClassifier {
    /// Seeded initialization: weights uniform on (-1/sqrt(fan_in),
    /// 1/sqrt(fan_in)) drawn row by row, biases zero. `arch` lists all layer
    /// widths including input and output, e.g. `[2, 16, 2]`. Hidden layers
    /// use ReLU, the final layer is identity.
    pub fn new_seeded(arch: &[usize], seed: u64) -> Result<Self> {
        if arch.len() < 2 {
            return Err(CoreError::InvalidParameter(
                "architecture needs at least input and output widths".into(),
            ));
        }
        if arch.contains(&0) {
            return Err(CoreError::InvalidParameter(
                "layer widths must be positive".into(),
            ));
        }
        if arch[arch.len() - 1] < 2 {
            return Err(CoreError::InvalidParameter(
                "classifier needs at least 2 output classes".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(arch.len() - 1);
        for l in 0..arch.len() - 1 {
            let (cols, rows) = (arch[l], arch[l + 1]);
            let bound = 1.0 / (cols as f64).sqrt();
            let weights: Vec<f64> = (0..rows * cols)
                .map(|_| rng.random_range(-bound..=bound))
                .collect();
            let activation = if l + 1 == arch.len() - 1 {
                Activation::Identity
            } else {
                Activation::Relu
            };
            layers.push(DenseLayer {
                rows,
                cols,
                weights,
                bias: vec![0.0; rows],
                activation,
            });
        }
        let model = Self {
            input_dim: arch[0],
            num_classes: arch[arch.len() - 1],
            layers,
        };
        model.validate()?;
        Ok(model)
    }

    /// Structural consistency check; error messages name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(CoreError::InvalidParameter("layers: empty".into()));
        }
        if self.num_classes < 2 {
            return Err(CoreError::InvalidParameter(format!(
                "num_classes: {} (need >= 2)",
                self.num_classes
            )));
        }
        let mut expected_in = self.input_dim;
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.cols != expected_in {
                return Err(CoreError::InvalidParameter(format!(
                    "layers[{i}].cols: {} does not chain with previous width {expected_in}",
                    layer.cols
                )));
            }
            if layer.rows == 0 {
                return Err(CoreError::InvalidParameter(format!(
                    "layers[{i}].rows: 0 (need >= 1)"
                )));
            }
            if layer.weights.len() != layer.rows * layer.cols {
                return Err(CoreError::InvalidParameter(format!(
                    "layers[{i}].weights: length {} != rows*cols = {}",
                    layer.weights.len(),
                    layer.rows * layer.cols
                )));
            }
            if layer.bias.len() != layer.rows {
                return Err(CoreError::InvalidParameter(format!(
                    "layers[{i}].bias: length {} != rows = {}",
                    layer.bias.len(),
                    layer.rows
                )));
            }
            if layer
                .weights
                .iter()
                .chain(&layer.bias)
                .any(|v| !v.is_finite())
            {
                return Err(CoreError::InvalidParameter(format!(
                    "layers[{i}]: non-finite parameter"
                )));
            }
            expected_in = layer.rows;
        }
        if expected_in != self.num_classes {
            return Err(CoreError::InvalidParameter(format!(
                "layers: final width {expected_in} != num_classes {}",
                self.num_classes
            )));
        }
        Ok(())
    }

    /// Forward pass returning the K logits.
    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.input_dim, "logits: dimension mismatch");
        let mut h = x.to_vec();
        for layer in &self.layers {
            h = layer.apply(&h);
        }
        h
    }

    /// Predicted class: argmax of the logits, ties broken to the lowest index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let logits = self.logits(x);
        let mut best = 0;
        for (i, &v) in logits.iter().enumerate().skip(1) {
            if v > logits[best] {
                best = i;
            }
        }
        best
    }

    fn forward_cached(&self, x: &[f64]) -> ForwardCache {
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut h = x.to_vec();
        for layer in &self.layers {
            let p = layer.preactivation(&h);
            h = match layer.activation {
                Activation::Relu => p.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect(),
                Activation::Identity => p.clone(),
            };
            pre.push(p);
            post.push(h.clone());
        }
        ForwardCache { pre, post }
    }

    /// Gradient of `dlogits . logits(x)` with respect to the input, by
    /// reverse-mode chain rule. The ReLU derivative at exactly 0 is 0.
    pub fn input_gradient(&self, x: &[f64], dlogits: &[f64]) -> Vec<f64> {
        assert_eq!(
            x.len(),
            self.input_dim,
            "input_gradient: dimension mismatch"
        );
        assert_eq!(
            dlogits.len(),
            self.num_classes,
            "input_gradient: logit gradient length mismatch"
        );
        let cache = self.forward_cached(x);
        let mut delta = dlogits.to_vec();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let dpre = layer.backprop_activation(&cache.pre[l], delta);
            delta = layer.backprop_input(&dpre);
        }
        delta
    }

    /// Serialize to a JSON model file with full round-trip float precision.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let file = File::create(path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), self)?;
        Ok(())
    }

    /// Parse and validate a JSON model file; a malformed or inconsistent
    /// file yields an error and no partially built model.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        let model: Self = serde_json::from_reader(BufReader::new(file))?;
        model.validate()?;
        Ok(model)
    }
}

struct ForwardCache {
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
}

impl DenseLayer {
    fn preactivation(&self, input: &[f64]) -> Vec<f64> {
        debug_assert_eq!(input.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let row = &self.weights[r * self.cols..(r + 1) * self.cols];
                crate::vecmath::dot(row, input) + self.bias[r]
            })
            .collect()
    }

    fn apply(&self, input: &[f64]) -> Vec<f64> {
        let p = self.preactivation(input);
        match self.activation {
            Activation::Relu => p
                .into_iter()
                .map(|v| if v > 0.0 { v } else { 0.0 })
                .collect(),
            Activation::Identity => p,
        }
    }

    fn backprop_activation(&self, pre: &[f64], mut delta: Vec<f64>) -> Vec<f64> {
        if self.activation == Activation::Relu {
            for (d, &p) in delta.iter_mut().zip(pre) {
                *d = if p > 0.0 { *d } else { 0.0 };
            }
        }
        delta
    }

    fn backprop_input(&self, dpre: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (&d, row) in dpre.iter().zip(self.weights.chunks_exact(self.cols)) {
            for (o, &w) in out.iter_mut().zip(row) {
                *o += d * w;
            }
        }
        out
    }
}

/// Training hyperparameters for [`train_toy`].
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            lr: 0.1,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Trained model plus the post-epoch loss curve and final train accuracy.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: MlpClassifier,
    pub epoch_losses: Vec<f64>,
    pub train_accuracy: f64,
}

/// Mini-batch gradient descent on softmax cross-entropy. Deterministic for a
/// fixed seed: weight init consumes the seed stream, epoch shuffling uses an
/// offset stream. With `epochs = 0` the seeded initialization is returned
/// unchanged.
pub fn train_toy(data: &Dataset, arch: &[usize], cfg: &TrainConfig) -> Result<TrainOutcome> {
    if data.is_empty() {
        return Err(CoreError::InvalidParameter("empty dataset".into()));
    }
    if arch.first() != Some(&data.dim()) {
        return Err(CoreError::InvalidParameter(format!(
            "architecture input width {:?} != data dimension {}",
            arch.first(),
            data.dim()
        )));
    }
    if arch.last() != Some(&data.num_classes) {
        return Err(CoreError::InvalidParameter(format!(
            "architecture output width {:?} != class count {}",
            arch.last(),
            data.num_classes
        )));
    }
    if !cfg.lr.is_finite() || cfg.lr <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "learning rate must be positive, got {}",
            cfg.lr
        )));
    }
    if cfg.batch_size == 0 {
        return Err(CoreError::InvalidParameter(
            "batch_size must be >= 1".into(),
        ));
    }

    let mut model = MlpClassifier::new_seeded(arch, cfg.seed)?;
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9E3779B97F4A7C15));
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        // Fisher-Yates with the dedicated stream keeps epochs reproducible.
        for i in (1..order.len()).rev() {
            let j = shuffle_rng.random_range(0..=i);
            order.swap(i, j);
        }
        for batch in order.chunks(cfg.batch_size) {
            apply_batch(&mut model, data, batch, cfg.lr);
        }
        epoch_losses.push(mean_cross_entropy(&model, data));
    }

    let train_accuracy = accuracy(&model, data);
    Ok(TrainOutcome {
        model,
        epoch_losses,
        train_accuracy,
    })
}

fn apply_batch(model: &mut MlpClassifier, data: &Dataset, batch: &[usize], lr: f64) {
    let mut grads: Vec<(Vec<f64>, Vec<f64>)> = model
        .layers
        .iter()
        .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.bias.len()]))
        .collect();

    for &idx in batch {
        let x = &data.points[idx];
        let cache = model.forward_cached(x);
        let logits = &cache.post[model.layers.len() - 1];
        let mut delta = softmax(logits);
        delta[data.labels[idx]] -= 1.0;
        for (l, layer) in model.layers.iter().enumerate().rev() {
            let dpre = layer.backprop_activation(&cache.pre[l], delta);
            let input: &[f64] = if l == 0 { x } else { &cache.post[l - 1] };
            let (dw, db) = &mut grads[l];
            for r in 0..layer.rows {
                db[r] += dpre[r];
                let row = &mut dw[r * layer.cols..(r + 1) * layer.cols];
                for (w, &a) in row.iter_mut().zip(input) {
                    *w += dpre[r] * a;
                }
            }
            delta = layer.backprop_input(&dpre);
        }
    }

    let scale = lr / batch.len() as f64;
    for (layer, (dw, db)) in model.layers.iter_mut().zip(&grads) {
        for (w, g) in layer.weights.iter_mut().zip(dw) {
            *w -= scale * g;
        }
        for (b, g) in layer.bias.iter_mut().zip(db) {
            *b -= scale * g;
        }
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Mean softmax cross-entropy of the model over a dataset.
pub fn mean_cross_entropy(model: &MlpClassifier, data: &Dataset) -> f64 {
    let mut total = 0.0;
    for (x, &label) in data.points.iter().zip(&data.labels) {
        let p = softmax(&model.logits(x));
        total += -(p[label].max(1e-300)).ln();
    }
    total / data.len() as f64
}

/// Fraction of dataset points the model classifies correctly.
pub fn accuracy(model: &MlpClassifier, data: &Dataset) -> f64 {
    let correct = data
        .points
        .iter()
        .zip(&data.labels)
        .filter(|(x, &label)| model.predict(x) == label)
        .count();
    correct as f64 / data.len() as f64
}
