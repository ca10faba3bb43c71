use super::params::{ParamSet, Real, Tower, TowerParams};
use crate::error::{Error, Result};

/// Tolerance on `‖v‖ = 1` accepted by [`similarity`].
pub const UNIT_NORM_TOLERANCE: f64 = 1e-4;

/// An l2-normalised text encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    /// Normalises `values`. Fails on the zero vector.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroEncoding);
        }
        Ok(Self(values.into_iter().map(|v| v / norm).collect()))
    }

    /// Wraps `values` as-is; [`similarity`] checks the norm.
    pub fn from_raw(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dot product of two unit vectors, clamped to `[-1, 1]`.
pub fn similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Invalid(format!(
            "embedding dims differ: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    for v in [a, b] {
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(Error::NotUnitNorm { norm });
        }
    }
    Ok(dot(a.values(), b.values()).clamp(-1.0, 1.0))
}

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub(crate) struct EncodeTrace {
    pub tower: usize,
    pub ids: Vec<u32>,
    /// Position index of each token into the logit table.
    pub slots: Vec<usize>,
    /// Pooling weight of each token (softmax over its position logits).
    pub weights: Vec<f64>,
    pub pooled: Vec<f64>,
    pub norm: f64,
    pub output: Vec<f64>,
}

fn check_ids<T: Real>(params: &ParamSet<T>, ids: &[u32]) -> Result<()> {
    if ids.is_empty() {
        return Err(Error::EmptyInput);
    }
    let vocab_size = params.vocab_size();
    if let Some(&id) = ids.iter().find(|&&id| id as usize >= vocab_size) {
        return Err(Error::TokenOutOfRange { id, vocab_size });
    }
    Ok(())
}

pub(crate) fn encode_traced<T: Real>(
    params: &ParamSet<T>,
    ids: &[u32],
    tower: Tower,
) -> Result<EncodeTrace> {
    check_ids(params, ids)?;
    let tower_index = params.tower_index(tower);
    let TowerParams {
        embedding,
        projection,
        position_logits,
    } = &params.towers()[tower_index];
    let d = params.dim();
    let last = position_logits.len() - 1;

    let slots: Vec<usize> = (0..ids.len()).map(|k| k.min(last)).collect();
    let logits: Vec<f64> = slots.iter().map(|&s| position_logits[s].to_f64()).collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let weights: Vec<f64> = exps.iter().map(|e| e / total).collect();

    let mut pooled = vec![0.0; d];
    for (&id, &w) in ids.iter().zip(&weights) {
        for (p, e) in pooled.iter_mut().zip(embedding.row(id as usize)) {
            *p += w * e.to_f64();
        }
    }

    let mut projected = vec![0.0; d];
    for (i, out) in projected.iter_mut().enumerate() {
        *out = projection
            .row(i)
            .iter()
            .zip(&pooled)
            .map(|(p, m)| p.to_f64() * m)
            .sum();
    }
    let norm = projected.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroEncoding);
    }
    let output = projected.iter().map(|v| v / norm).collect();
    Ok(EncodeTrace {
        tower: tower_index,
        ids: ids.to_vec(),
        slots,
        weights,
        pooled,
        norm,
        output,
    })
}

/// Encodes token ids: position-weighted pooling of embedding rows, then the
/// tower's projection, then l2 normalisation.
pub fn embed_text<T: Real>(params: &ParamSet<T>, ids: &[u32], tower: Tower) -> Result<EmbeddingVector> {
    encode_traced(params, ids, tower).map(|t| EmbeddingVector(t.output))
}
