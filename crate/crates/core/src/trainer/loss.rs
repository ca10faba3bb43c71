use std::collections::BTreeMap;

use crate::corpus::TrainingExample;
use crate::encoder::{dot, encode_traced, EncodeTrace, ParamSet, Real, Tower};
use crate::error::{Error, Result};
use crate::textproc::{encode_ids, tokenize, Vocabulary};

use super::config::{HardNegativeScope, TrainingConfig};

/// Token ids of one training example after truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedExample {
    pub id: String,
    pub document: Vec<u32>,
    pub summary: Vec<u32>,
    pub negatives: Vec<Vec<u32>>,
}

impl EncodedExample {
    pub fn new(example: &TrainingExample, vocab: &Vocabulary, config: &TrainingConfig) -> Result<Self> {
        let id = &example.pair.id;
        let encode = |text: &str, max_len: usize, what: &str| -> Result<Vec<u32>> {
            let ids = encode_ids(&tokenize(text), vocab, max_len);
            if ids.is_empty() {
                return Err(Error::Example {
                    id: id.clone(),
                    message: format!("{what} is empty after tokenization"),
                });
            }
            Ok(ids)
        };
        let negatives = example
            .negatives
            .iter()
            .enumerate()
            .map(|(k, n)| encode(&n.text, config.max_sum_len, &format!("negative {k}")))
            .collect::<Result<_>>()?;
        Ok(Self {
            id: id.clone(),
            document: encode(&example.pair.document, config.max_doc_len, "document")?,
            summary: encode(&example.pair.summary, config.max_sum_len, "summary")?,
            negatives,
        })
    }
}

/// Gradient of one tower. Embedding rows are stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerGradient {
    pub embedding: BTreeMap<u32, Vec<f64>>,
    pub projection: Vec<f64>,
    pub position_logits: Vec<f64>,
}

/// Loss gradient with the same layout as the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub dim: usize,
    pub towers: Vec<TowerGradient>,
}

impl Gradients {
    fn zeros<T: Real>(params: &ParamSet<T>) -> Self {
        let d = params.dim();
        Self {
            dim: d,
            towers: params
                .towers()
                .iter()
                .map(|t| TowerGradient {
                    embedding: BTreeMap::new(),
                    projection: vec![0.0; d * d],
                    position_logits: vec![0.0; t.position_logits.len()],
                })
                .collect(),
        }
    }

    pub fn embedding(&self, tower: usize, row: u32, col: usize) -> f64 {
        self.towers[tower]
            .embedding
            .get(&row)
            .map_or(0.0, |r| r[col])
    }

    pub fn is_finite(&self) -> bool {
        self.towers.iter().all(|t| {
            t.embedding.values().flatten().all(|v| v.is_finite())
                && t.projection.iter().all(|v| v.is_finite())
                && t.position_logits.iter().all(|v| v.is_finite())
        })
    }

    /// Backpropagates `grad_output` (∂L/∂v) through one encoding.
    #[allow(clippy::needless_range_loop)]
    fn accumulate<T: Real>(&mut self, params: &ParamSet<T>, trace: &EncodeTrace, grad_output: &[f64]) {
        let d = self.dim;
        let tower = &params.towers()[trace.tower];
        let g = &mut self.towers[trace.tower];

        // v = z / |z|  =>  dz = (dv - v (v·dv)) / |z|
        let vg = dot(&trace.output, grad_output);
        let grad_z: Vec<f64> = grad_output
            .iter()
            .zip(&trace.output)
            .map(|(gv, v)| (gv - v * vg) / trace.norm)
            .collect();

        // z = P m
        let mut grad_pooled = vec![0.0; d];
        for i in 0..d {
            let row = &mut g.projection[i * d..(i + 1) * d];
            for j in 0..d {
                row[j] += grad_z[i] * trace.pooled[j];
                grad_pooled[j] += tower.projection.get(i, j).to_f64() * grad_z[i];
            }
        }

        // m = Σ_k w_k E[id_k],  w = softmax(logits[slot_k])
        for (k, (&id, &w)) in trace.ids.iter().zip(&trace.weights).enumerate() {
            let row = tower.embedding.row(id as usize);
            let centered: f64 = row
                .iter()
                .zip(&trace.pooled)
                .zip(&grad_pooled)
                .map(|((e, m), gm)| (e.to_f64() - m) * gm)
                .sum();
            g.position_logits[trace.slots[k]] += w * centered;
            let grow = g.embedding.entry(id).or_insert_with(|| vec![0.0; d]);
            for (ge, gm) in grow.iter_mut().zip(&grad_pooled) {
                *ge += w * gm;
            }
        }
    }
}

/// Loss, gradients and per-example ranks of one batch.
#[derive(Debug, Clone)]
pub struct BatchLossResult {
    pub loss: f64,
    pub gradients: Gradients,
    /// Rank of the true summary among the example's candidates (1 = best,
    /// ties resolved in favour of the true summary).
    pub per_example_rank: Vec<usize>,
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Sampled-softmax NLL over in-batch positives plus hard negatives.
///
/// For each document `i` the candidates are every positive summary in the
/// batch followed by the hard negatives in scope; the loss term is
/// `logsumexp(s/τ) − s(d_i, s_i⁺)/τ`, averaged over the batch.
pub fn batch_loss_encoded<T: Real>(
    params: &ParamSet<T>,
    batch: &[&EncodedExample],
    config: &TrainingConfig,
) -> Result<BatchLossResult> {
    config.validate_loss()?;
    let b = batch.len();
    let has_negatives = config.use_hard_negatives && batch.iter().any(|e| !e.negatives.is_empty());
    if b == 0 || (b < 2 && !has_negatives) {
        return Err(Error::Config(format!(
            "batch of {b} example(s) has no negatives to contrast against"
        )));
    }
    let tau = config.temperature;
    let trace = |ids: &[u32], tower: Tower, id: &str| {
        encode_traced(params, ids, tower).map_err(|e| Error::Example {
            id: id.to_string(),
            message: e.to_string(),
        })
    };

    let docs: Vec<EncodeTrace> = batch
        .iter()
        .map(|e| trace(&e.document, Tower::Document, &e.id))
        .collect::<Result<_>>()?;
    let positives: Vec<EncodeTrace> = batch
        .iter()
        .map(|e| trace(&e.summary, Tower::Summary, &e.id))
        .collect::<Result<_>>()?;
    // (owner index, trace) for every hard negative in the batch.
    let mut negatives: Vec<(usize, EncodeTrace)> = Vec::new();
    if config.use_hard_negatives {
        for (i, e) in batch.iter().enumerate() {
            for ids in &e.negatives {
                negatives.push((i, trace(ids, Tower::Summary, &e.id)?));
            }
        }
    }

    let d = params.dim();
    let mut grad_docs = vec![vec![0.0; d]; b];
    let mut grad_pos = vec![vec![0.0; d]; b];
    let mut grad_neg = vec![vec![0.0; d]; negatives.len()];
    let mut loss = 0.0;
    let mut ranks = Vec::with_capacity(b);

    for i in 0..b {
        let dv = &docs[i].output;
        let in_scope: Vec<usize> = (0..negatives.len())
            .filter(|&k| match config.hard_negative_scope {
                HardNegativeScope::OwnDocument => negatives[k].0 == i,
                HardNegativeScope::WholeBatch => true,
            })
            .collect();
        let sims: Vec<f64> = positives
            .iter()
            .map(|p| dot(dv, &p.output))
            .chain(in_scope.iter().map(|&k| dot(dv, &negatives[k].1.output)))
            .collect();
        let logits: Vec<f64> = sims.iter().map(|s| s / tau).collect();
        let lse = log_sum_exp(&logits);
        loss += lse - logits[i];
        ranks.push(1 + sims.iter().enumerate().filter(|&(c, s)| c != i && *s > sims[i]).count());

        // dL_i/ds_c = (softmax_c − [c = i]) / τ, scaled by 1/B.
        for (c, logit) in logits.iter().enumerate() {
            let mut g = (logit - lse).exp();
            if c == i {
                g -= 1.0;
            }
            g /= tau * b as f64;
            let (cand_out, cand_grad) = if c < b {
                (&positives[c].output, &mut grad_pos[c])
            } else {
                let k = in_scope[c - b];
                (&negatives[k].1.output, &mut grad_neg[k])
            };
            for ((gd, gc), (x, y)) in grad_docs[i].iter_mut().zip(cand_grad.iter_mut()).zip(dv.iter().zip(cand_out)) {
                *gd += g * y;
                *gc += g * x;
            }
        }
    }

    let mut gradients = Gradients::zeros(params);
    for (t, g) in docs.iter().zip(&grad_docs) {
        gradients.accumulate(params, t, g);
    }
    for (t, g) in positives.iter().zip(&grad_pos) {
        gradients.accumulate(params, t, g);
    }
    for ((_, t), g) in negatives.iter().zip(&grad_neg) {
        gradients.accumulate(params, t, g);
    }

    Ok(BatchLossResult {
        loss: loss / b as f64,
        gradients,
        per_example_rank: ranks,
    })
}

/// Encodes `batch` with `vocab` and evaluates [`batch_loss_encoded`].
pub fn batch_loss<T: Real>(
    params: &ParamSet<T>,
    vocab: &Vocabulary,
    batch: &[TrainingExample],
    config: &TrainingConfig,
) -> Result<BatchLossResult> {
    let encoded: Vec<EncodedExample> = batch
        .iter()
        .map(|e| EncodedExample::new(e, vocab, config))
        .collect::<Result<_>>()?;
    let refs: Vec<&EncodedExample> = encoded.iter().collect();
    batch_loss_encoded(params, &refs, config)
}
