//! The pipeline stages, each reading and writing the documented formats.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use risekit::corpus::{load_eval_records, load_pairs, load_training_examples, write_training_examples, TrainingExample};
use risekit::encoder::{init_params, load_checkpoint, read_checkpoint, save_checkpoint, EncoderParams};
use risekit::evaluation::{
    aggregate_system_scores, correlation_report, read_scores, score_records, write_scores, TauReport,
    TauVariant,
};
use risekit::negatives::{
    combine_negatives, generate_dataset, mine_model_negatives, AugmentRecipe, LexicalResources,
    MiningConfig,
};
use risekit::textproc::{AntonymLexicon, EntityDetector, LengthLimits, Vocabulary};
use risekit::trainer::{train, TrainingConfig, TrainingLog};

pub fn build_vocab(pairs: &Path, min_count: usize, max_size: usize, out: &Path) -> Result<Vocabulary> {
    let pairs = load_pairs(pairs)?;
    let vocab = Vocabulary::build(&pairs, min_count, max_size)?;
    vocab.save(out)?;
    log::info!("vocabulary: {} tokens -> {}", vocab.len(), out.display());
    Ok(vocab)
}

pub fn resources(antonyms: Option<&Path>, stopwords: Option<&Path>) -> Result<LexicalResources> {
    let mut res = LexicalResources::default();
    if let Some(path) = antonyms {
        res.lexicon = AntonymLexicon::from_file(path)?;
    }
    if let Some(path) = stopwords {
        res.detector = EntityDetector::from_file(path)?;
    }
    Ok(res)
}

pub fn augment(
    pairs: &Path,
    recipe: &AugmentRecipe,
    resources: &LexicalResources,
    seed: u64,
    out: &Path,
) -> Result<Vec<TrainingExample>> {
    let pairs = load_pairs(pairs)?;
    let (examples, warnings) = generate_dataset(&pairs, recipe, resources, seed);
    for w in &warnings {
        log::warn!("{w}");
    }
    write_training_examples(out, &examples)?;
    let total: usize = examples.iter().map(|e| e.negatives.len()).sum();
    log::info!("augment: {total} negatives for {} pairs -> {}", examples.len(), out.display());
    Ok(examples)
}

pub struct TrainSpec {
    pub config: TrainingConfig,
    pub dim: usize,
    pub shared_towers: bool,
}

pub fn train_model(
    examples: &Path,
    vocab: &Path,
    spec: &TrainSpec,
    checkpoint: &Path,
    log_path: &Path,
) -> Result<(EncoderParams, TrainingLog)> {
    let examples = load_training_examples(examples)?;
    let vocab = Vocabulary::load(vocab)?;
    let init = init_params(vocab.len(), spec.dim, spec.config.seed, spec.shared_towers)?;
    let (params, log) = train(&init, &vocab, &examples, &spec.config)?;
    let mut header = serde_json::to_value(&spec.config)?;
    header["dim"] = spec.dim.into();
    save_checkpoint(&params, &vocab, header, checkpoint)?;
    fs::write(log_path, log.to_tsv()).with_context(|| format!("writing {}", log_path.display()))?;
    if let Some(last) = log.epochs.last() {
        log::info!(
            "train: {} epochs, final loss {:.6}, acc@1 {:.4} -> {}",
            log.epochs.len(),
            last.mean_loss,
            last.accuracy_at_1,
            checkpoint.display()
        );
    }
    Ok((params, log))
}

/// Length limits recorded in a checkpoint's training config, or the defaults.
fn checkpoint_limits(checkpoint: &Path) -> Result<LengthLimits> {
    let header = read_checkpoint(checkpoint)?.header;
    Ok(serde_json::from_value::<TrainingConfig>(header.training_config)
        .map(|c| c.limits())
        .unwrap_or_default())
}

pub fn mine(
    pairs: &Path,
    checkpoint: &Path,
    vocab: &Path,
    top_n: usize,
    combine_with: Option<&Path>,
    out: &Path,
) -> Result<Vec<TrainingExample>> {
    let pairs = load_pairs(pairs)?;
    let vocab = Vocabulary::load(vocab)?;
    let params = load_checkpoint(checkpoint, &vocab)?;
    let limits = checkpoint_limits(checkpoint)?;
    let mined = mine_model_negatives(&params, &vocab, &pairs, &MiningConfig { top_n }, limits)?;
    let examples = match combine_with {
        Some(path) => combine_negatives(&load_training_examples(path)?, &mined)?,
        None => pairs
            .into_iter()
            .map(|pair| {
                let negatives = mined[&pair.id].clone();
                TrainingExample { pair, negatives }
            })
            .collect(),
    };
    write_training_examples(out, &examples)?;
    log::info!("mine: top {top_n} for {} pairs -> {}", examples.len(), out.display());
    Ok(examples)
}

pub fn combine(lexical: &Path, mined: &Path, out: &Path) -> Result<Vec<TrainingExample>> {
    let mined_map = load_training_examples(mined)?
        .into_iter()
        .map(|e| (e.pair.id, e.negatives))
        .collect();
    let examples = combine_negatives(&load_training_examples(lexical)?, &mined_map)?;
    write_training_examples(out, &examples)?;
    Ok(examples)
}

pub fn score(checkpoint: &Path, vocab: &Path, eval: &Path, out: &Path) -> Result<()> {
    let vocab = Vocabulary::load(vocab)?;
    let params = load_checkpoint(checkpoint, &vocab)?;
    let records = load_eval_records(eval)?;
    let scores = score_records(&params, &vocab, &records, checkpoint_limits(checkpoint)?)?;
    write_scores(out, &scores)?;
    log::info!("score: {} cells -> {}", scores.len(), out.display());
    Ok(())
}

pub fn evaluate(scores: &Path, eval: &Path, variant: TauVariant, out: &Path) -> Result<TauReport> {
    let scores = read_scores(scores)?;
    let records = load_eval_records(eval)?;
    let table = aggregate_system_scores(&records, &scores)?;
    let report = correlation_report(&table, variant)?;
    fs::write(out, report.render()).with_context(|| format!("writing {}", out.display()))?;
    Ok(report)
}
