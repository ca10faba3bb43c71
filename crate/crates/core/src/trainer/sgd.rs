use std::fmt::Write as _;

use crate::corpus::TrainingExample;
use crate::encoder::{EncoderParams, ParamSet, Real};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::textproc::Vocabulary;

use super::config::TrainingConfig;
use super::loss::{batch_loss_encoded, EncodedExample, Gradients};

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub steps: usize,
    pub mean_loss: f64,
    pub mean_reciprocal_rank: f64,
    pub accuracy_at_1: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub epochs: Vec<EpochStats>,
}

impl TrainingLog {
    pub const TSV_HEADER: &'static str = "epoch\tsteps\tmean_loss\tmrr\taccuracy_at_1";

    /// One tab-separated line per epoch, preceded by a header line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(Self::TSV_HEADER);
        out.push('\n');
        for e in &self.epochs {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                e.epoch, e.steps, e.mean_loss, e.mean_reciprocal_rank, e.accuracy_at_1
            );
        }
        out
    }

    pub fn mean_losses(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.mean_loss).collect()
    }
}

/// `θ ← θ − lr·g`, computed in f64 and stored back at parameter precision.
pub fn sgd_step<T: Real>(params: &mut ParamSet<T>, grads: &Gradients, learning_rate: f64) {
    let d = params.dim();
    for (tower, g) in params.towers_mut().iter_mut().zip(&grads.towers) {
        let table = tower.embedding.as_mut_slice();
        for (&row, grow) in &g.embedding {
            let start = row as usize * d;
            for (v, gv) in table[start..start + d].iter_mut().zip(grow) {
                *v = T::from_f64(v.to_f64() - learning_rate * gv);
            }
        }
        for (v, gv) in tower.projection.as_mut_slice().iter_mut().zip(&g.projection) {
            *v = T::from_f64(v.to_f64() - learning_rate * gv);
        }
        for (v, gv) in tower.position_logits.iter_mut().zip(&g.position_logits) {
            *v = T::from_f64(v.to_f64() - learning_rate * gv);
        }
    }
}

/// Mini-batch SGD over seeded shuffles. Each epoch runs `⌊N/B⌋` steps; the
/// trailing partial batch is dropped.
pub fn train(
    initial: &EncoderParams,
    vocab: &Vocabulary,
    dataset: &[TrainingExample],
    config: &TrainingConfig,
) -> Result<(EncoderParams, TrainingLog)> {
    config.validate()?;
    if initial.vocab_size() != vocab.len() {
        return Err(Error::Config(format!(
            "parameters cover {} tokens but the vocabulary has {}",
            initial.vocab_size(),
            vocab.len()
        )));
    }
    if dataset.len() < config.batch_size {
        return Err(Error::Config(format!(
            "dataset has {} examples, fewer than batch size {}",
            dataset.len(),
            config.batch_size
        )));
    }
    let encoded: Vec<EncodedExample> = dataset
        .iter()
        .map(|e| EncodedExample::new(e, vocab, config))
        .collect::<Result<_>>()?;

    let mut params = initial.clone();
    let mut rng = SeededRng::new(config.seed);
    let mut log = TrainingLog::default();
    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let steps_per_epoch = encoded.len() / config.batch_size;
    let mut step = 0;

    for epoch in 1..=config.epochs {
        rng.shuffle(&mut order);
        let (mut loss_sum, mut rr_sum, mut hits, mut seen) = (0.0, 0.0, 0usize, 0usize);
        for chunk in order.chunks_exact(config.batch_size) {
            step += 1;
            let batch: Vec<&EncodedExample> = chunk.iter().map(|&i| &encoded[i]).collect();
            let result = batch_loss_encoded(&params, &batch, config)?;
            if !result.loss.is_finite() || !result.gradients.is_finite() {
                return Err(Error::Diverged {
                    step,
                    loss: result.loss,
                });
            }
            loss_sum += result.loss;
            for &r in &result.per_example_rank {
                rr_sum += 1.0 / r as f64;
                hits += usize::from(r == 1);
            }
            seen += result.per_example_rank.len();
            sgd_step(&mut params, &result.gradients, config.learning_rate);
        }
        let stats = EpochStats {
            epoch,
            steps: steps_per_epoch,
            mean_loss: loss_sum / steps_per_epoch as f64,
            mean_reciprocal_rank: rr_sum / seen as f64,
            accuracy_at_1: hits as f64 / seen as f64,
        };
        log::debug!(
            "epoch {epoch}: loss {:.6} mrr {:.4} acc@1 {:.4}",
            stats.mean_loss,
            stats.mean_reciprocal_rank,
            stats.accuracy_at_1
        );
        log.epochs.push(stats);
    }
    Ok((params, log))
}

/// Fraction of examples whose summary ranks first among in-batch
/// candidates, batching the dataset in order. Hard negatives are ignored.
pub fn in_batch_accuracy(
    params: &EncoderParams,
    vocab: &Vocabulary,
    dataset: &[TrainingExample],
    config: &TrainingConfig,
) -> Result<f64> {
    let eval_config = TrainingConfig {
        use_hard_negatives: false,
        ..config.clone()
    };
    let encoded: Vec<EncodedExample> = dataset
        .iter()
        .map(|e| EncodedExample::new(e, vocab, &eval_config))
        .collect::<Result<_>>()?;
    let (mut hits, mut seen) = (0usize, 0usize);
    for chunk in encoded.chunks(config.batch_size) {
        if chunk.len() < 2 {
            continue;
        }
        let batch: Vec<&EncodedExample> = chunk.iter().collect();
        let result = batch_loss_encoded(params, &batch, &eval_config)?;
        hits += result.per_example_rank.iter().filter(|&&r| r == 1).count();
        seen += chunk.len();
    }
    if seen == 0 {
        return Err(Error::Config("need at least two examples to measure accuracy".into()));
    }
    Ok(hits as f64 / seen as f64)
}
