use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use crate::corpus::{DocumentSummaryPair, Negative, TrainingExample};
use crate::encoder::{embed_str, similarity, EmbeddingVector, EncoderParams, Tower};
use crate::error::{Error, Result};
use crate::textproc::{tokenize, LengthLimits, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiningConfig {
    /// Negatives kept per document.
    pub top_n: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self { top_n: 5 }
    }
}

/// Similarity descending, then candidate id ascending.
fn rank_order(a: &(f64, &str), b: &(f64, &str)) -> Ordering {
    b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(b.1))
}

/// Top-`n` candidates for one query from precomputed similarities.
/// `scored` holds `(similarity, candidate id, candidate index)`.
fn top_n(mut scored: Vec<(f64, &str, usize)>, n: usize) -> Vec<usize> {
    let cmp = |a: &(f64, &str, usize), b: &(f64, &str, usize)| rank_order(&(a.0, a.1), &(b.0, b.1));
    if n == 0 {
        return Vec::new();
    }
    if scored.len() > n {
        scored.select_nth_unstable_by(n - 1, cmp);
        scored.truncate(n);
    }
    scored.sort_by(cmp);
    scored.into_iter().map(|(_, _, i)| i).collect()
}

/// For every pair, the `top_n` other summaries closest to its document.
/// Candidates with the same id or the same text as the pair's own summary
/// are excluded, and a summary text shared by several pairs is offered once
/// under its smallest id. Fewer than `top_n` are returned when the pool is
/// smaller.
pub fn mine_model_negatives(
    params: &EncoderParams,
    vocab: &Vocabulary,
    pairs: &[DocumentSummaryPair],
    config: &MiningConfig,
    limits: LengthLimits,
) -> Result<BTreeMap<String, Vec<Negative>>> {
    let encode = |text: &str, tower: Tower, max_len: usize, id: &str| {
        embed_str(params, vocab, text, tower, max_len).map_err(|e| Error::Example {
            id: id.to_string(),
            message: e.to_string(),
        })
    };
    let docs: Vec<EmbeddingVector> = pairs
        .par_iter()
        .map(|p| encode(&p.document, Tower::Document, limits.max_doc_len, &p.id))
        .collect::<Result<_>>()?;
    let sums: Vec<EmbeddingVector> = pairs
        .par_iter()
        .map(|p| encode(&p.summary, Tower::Summary, limits.max_sum_len, &p.id))
        .collect::<Result<_>>()?;

    let mut representative: HashMap<&str, usize> = HashMap::new();
    for (j, p) in pairs.iter().enumerate() {
        let slot = representative.entry(p.summary.as_str()).or_insert(j);
        if p.id < pairs[*slot].id {
            *slot = j;
        }
    }
    let mut pool: Vec<usize> = representative.into_values().collect();
    pool.sort_unstable();

    let mined: Vec<Vec<Negative>> = pairs
        .par_iter()
        .zip(&docs)
        .map(|(pair, doc)| {
            let mut scored = Vec::with_capacity(pairs.len());
            for &j in &pool {
                let cand = &pairs[j];
                if cand.id == pair.id || cand.summary == pair.summary {
                    continue;
                }
                scored.push((similarity(doc, &sums[j])?, cand.id.as_str(), j));
            }
            Ok(top_n(scored, config.top_n)
                .into_iter()
                .map(|j| Negative::mined(pairs[j].summary.clone(), pairs[j].id.clone()))
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(pairs.iter().map(|p| p.id.clone()).zip(mined).collect())
}

/// Appends mined negatives to the lexical ones. Negatives whose token
/// sequence matches the positive or an earlier negative are skipped.
pub fn combine_negatives(
    lexical: &[TrainingExample],
    mined: &BTreeMap<String, Vec<Negative>>,
) -> Result<Vec<TrainingExample>> {
    let known: HashSet<&str> = lexical.iter().map(|e| e.pair.id.as_str()).collect();
    if let Some(id) = mined.keys().find(|id| !known.contains(id.as_str())) {
        return Err(Error::Example {
            id: id.clone(),
            message: "mined negatives reference an unknown pair".into(),
        });
    }
    Ok(lexical
        .iter()
        .map(|ex| {
            let mut seen: HashSet<Vec<String>> = HashSet::new();
            seen.insert(tokenize(&ex.pair.summary));
            let negatives = ex
                .negatives
                .iter()
                .chain(mined.get(&ex.pair.id).into_iter().flatten())
                .filter(|n| seen.insert(tokenize(&n.text)))
                .cloned()
                .collect();
            TrainingExample {
                pair: ex.pair.clone(),
                negatives,
            }
        })
        .collect())
}
