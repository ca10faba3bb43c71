use std::collections::BTreeSet;

use crate::corpus::{DocumentSummaryPair, Negative, Origin, TrainingExample};
use crate::encoder::{EncoderParams, Matrix, ParamSet, TowerParams};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::textproc::{Vocabulary, PAD_TOKEN, UNK_TOKEN};

use super::config::TrainingConfig;
use super::loss::{batch_loss_encoded, EncodedExample};

/// Default finite-difference step.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Minimum number of sampled embedding coordinates.
pub const MIN_SAMPLED_COORDINATES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub coordinates_checked: usize,
    pub loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Coordinate {
    Embedding { tower: usize, row: usize, col: usize },
    Projection { tower: usize, index: usize },
    Position { tower: usize, slot: usize },
}

/// Compares analytic gradients against central differences
/// `(L(θ+ε) − L(θ−ε)) / 2ε` on a 64-bit copy of the parameters.
///
/// Checked coordinates: every projection entry, every position logit the
/// batch touches, and a seeded sample of at least
/// [`MIN_SAMPLED_COORDINATES`] embedding entries from rows the batch uses
/// (all of them if there are fewer). The error for one coordinate is
/// `|analytic − numeric| / max(1e-8, |numeric|)`.
pub fn gradient_check(
    params: &EncoderParams,
    vocab: &Vocabulary,
    batch: &[TrainingExample],
    config: &TrainingConfig,
    epsilon: f64,
    seed: u64,
) -> Result<GradCheckReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let encoded: Vec<EncodedExample> = batch
        .iter()
        .map(|e| EncodedExample::new(e, vocab, config))
        .collect::<Result<_>>()?;
    let refs: Vec<&EncodedExample> = encoded.iter().collect();

    let mut shadow = params.to_f64();
    let analytic = batch_loss_encoded(&shadow, &refs, config)?;

    let mut rows = BTreeSet::new();
    let mut max_len = 0;
    for e in &encoded {
        for ids in [&e.document, &e.summary].into_iter().chain(&e.negatives) {
            rows.extend(ids.iter().copied());
            max_len = max_len.max(ids.len());
        }
    }

    let d = shadow.dim();
    let towers = shadow.towers().len();
    let mut candidates = Vec::new();
    for tower in 0..towers {
        for &row in &rows {
            for col in 0..d {
                candidates.push(Coordinate::Embedding {
                    tower,
                    row: row as usize,
                    col,
                });
            }
        }
    }
    let mut rng = SeededRng::new(seed);
    rng.shuffle(&mut candidates);
    candidates.truncate(MIN_SAMPLED_COORDINATES.max(1));
    let mut coords = candidates;
    for tower in 0..towers {
        coords.extend((0..d * d).map(|index| Coordinate::Projection { tower, index }));
        let slots = max_len.min(shadow.positions());
        coords.extend((0..slots).map(|slot| Coordinate::Position { tower, slot }));
    }

    let mut max_err: f64 = 0.0;
    for &c in &coords {
        let a = match c {
            Coordinate::Embedding { tower, row, col } => analytic.gradients.embedding(tower, row as u32, col),
            Coordinate::Projection { tower, index } => analytic.gradients.towers[tower].projection[index],
            Coordinate::Position { tower, slot } => analytic.gradients.towers[tower].position_logits[slot],
        };
        let original = *slot_mut(&mut shadow, c);
        *slot_mut(&mut shadow, c) = original + epsilon;
        let plus = batch_loss_encoded(&shadow, &refs, config)?.loss;
        *slot_mut(&mut shadow, c) = original - epsilon;
        let minus = batch_loss_encoded(&shadow, &refs, config)?.loss;
        *slot_mut(&mut shadow, c) = original;
        let numeric = (plus - minus) / (2.0 * epsilon);
        let err = (a - numeric).abs() / numeric.abs().max(1e-8);
        max_err = max_err.max(err);
    }

    Ok(GradCheckReport {
        max_relative_error: max_err,
        coordinates_checked: coords.len(),
        loss: analytic.loss,
    })
}

fn slot_mut(params: &mut ParamSet<f64>, c: Coordinate) -> &mut f64 {
    let d = params.dim();
    match c {
        Coordinate::Embedding { tower, row, col } => {
            &mut params.towers_mut()[tower].embedding.as_mut_slice()[row * d + col]
        }
        Coordinate::Projection { tower, index } => &mut params.towers_mut()[tower].projection.as_mut_slice()[index],
        Coordinate::Position { tower, slot } => &mut params.towers_mut()[tower].position_logits[slot],
    }
}

/// A small random problem for gradient checking: `batch_size` examples over
/// a synthetic vocabulary of `vocab_size` words, each with
/// `hard_negatives` negatives, and parameters away from their
/// initialisation (random projection and pooling logits). Summaries and
/// negatives are 3-6 words, documents 6-12.
pub fn random_instance(
    vocab_size: usize,
    dim: usize,
    batch_size: usize,
    hard_negatives: usize,
    shared_towers: bool,
    seed: u64,
) -> Result<(EncoderParams, Vocabulary, Vec<TrainingExample>)> {
    if vocab_size < 3 {
        return Err(Error::Config("vocab_size must be at least 3".into()));
    }
    let mut words = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()];
    words.extend((2..vocab_size).map(|i| format!("w{i}")));
    let vocab = Vocabulary::from_list(words.clone())?;

    let mut rng = SeededRng::new(seed);
    const POSITIONS: usize = 16;
    const ROW_SPREAD: f64 = 0.35;
    let towers = (0..if shared_towers { 1 } else { 2 })
        .map(|_| {
            // A shared offset keeps every encoding in one cone, so no softmax
            // saturates and every sampled gradient is well above the
            // finite-difference noise floor.
            let common: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let emb = (0..vocab_size * dim)
                .map(|k| common[k % dim] + rng.uniform(-ROW_SPREAD, ROW_SPREAD))
                .collect();
            let mut proj = Matrix::<f64>::identity(dim);
            for v in proj.as_mut_slice() {
                *v += rng.uniform(-0.3, 0.3);
            }
            TowerParams {
                embedding: Matrix::from_vec(vocab_size, dim, emb).expect("shape"),
                projection: proj,
                position_logits: (0..POSITIONS).map(|_| rng.uniform(-0.5, 0.5)).collect(),
            }
        })
        .collect();
    let params = ParamSet::from_towers(dim, shared_towers, towers)?.to_f32();

    let text = |rng: &mut SeededRng, lo: usize, hi: usize| -> String {
        let n = lo + rng.index(hi - lo + 1);
        (0..n)
            .map(|_| words[2 + rng.index(vocab_size - 2)].clone())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut batch = Vec::with_capacity(batch_size);
    for i in 0..batch_size {
        let document = text(&mut rng, 6, 12);
        let summary = text(&mut rng, 3, 6);
        let mut negatives: Vec<Negative> = Vec::new();
        while negatives.len() < hard_negatives {
            let t = text(&mut rng, 3, 6);
            if t != summary && negatives.iter().all(|n| n.text != t) {
                negatives.push(Negative::lexical(t, Origin::DropWords));
            }
        }
        batch.push(TrainingExample {
            pair: DocumentSummaryPair {
                id: format!("g{i}"),
                document,
                summary,
            },
            negatives,
        });
    }
    Ok((params, vocab, batch))
}
