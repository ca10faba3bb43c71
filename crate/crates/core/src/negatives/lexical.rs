use rayon::prelude::*;

use super::augment::{drop_chars, drop_words, shuffle_words, swap_antonyms, swap_entities, Augmented};
use super::recipe::{AugmentKind, AugmentRecipe};
use crate::corpus::{DocumentSummaryPair, Negative, TrainingExample};
use crate::rng::SeededRng;
use crate::textproc::{tokenize, AntonymLexicon, EntityDetector};

/// Redraws allowed before a degenerate negative is discarded.
pub const MAX_ATTEMPTS: usize = 8;

/// Resources shared by the augmenters.
#[derive(Debug, Clone)]
pub struct LexicalResources {
    pub detector: EntityDetector,
    pub lexicon: AntonymLexicon,
}

impl Default for LexicalResources {
    fn default() -> Self {
        Self {
            detector: EntityDetector::default(),
            lexicon: AntonymLexicon::bundled().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexicalNegatives {
    pub negatives: Vec<Negative>,
    pub warnings: Vec<String>,
}

pub fn augment(
    kind: AugmentKind,
    pair: &DocumentSummaryPair,
    probability: f64,
    resources: &LexicalResources,
    rng: &mut SeededRng,
) -> Augmented {
    match kind {
        AugmentKind::SwapEntities => {
            swap_entities(&pair.document, &pair.summary, &resources.detector, rng, probability)
        }
        AugmentKind::ShuffleWords => shuffle_words(&pair.summary, rng),
        AugmentKind::DropWords => drop_words(&pair.summary, rng, probability),
        AugmentKind::DropChars => drop_chars(&pair.summary, rng, probability),
        AugmentKind::SwapAntonyms => swap_antonyms(&pair.summary, &resources.lexicon, rng, probability),
    }
}

/// Applies every recipe entry `count` times. A draw that reproduces the
/// positive (as text or as a token sequence) or an earlier negative is
/// redrawn up to [`MAX_ATTEMPTS`] times and then discarded with a warning.
pub fn generate_lexical_negatives(
    pair: &DocumentSummaryPair,
    recipe: &AugmentRecipe,
    resources: &LexicalResources,
    rng: &mut SeededRng,
) -> LexicalNegatives {
    let positive_tokens = tokenize(&pair.summary);
    let mut negatives: Vec<Negative> = Vec::with_capacity(recipe.total());
    let mut warnings = Vec::new();
    for entry in recipe.entries() {
        let mut discarded = 0;
        for _ in 0..entry.count {
            let accepted = (0..MAX_ATTEMPTS).find_map(|_| {
                let out = augment(entry.kind, pair, entry.probability, resources, rng);
                let degenerate = out.text == pair.summary
                    || out.text.trim().is_empty()
                    || tokenize(&out.text) == positive_tokens
                    || negatives.iter().any(|n| n.text == out.text);
                (!degenerate).then_some(out.text)
            });
            match accepted {
                Some(text) => negatives.push(Negative::lexical(text, entry.kind.origin())),
                None => discarded += 1,
            }
        }
        if discarded > 0 {
            warnings.push(format!(
                "pair {}: discarded {discarded} of {} {} negative(s) after {MAX_ATTEMPTS} attempts each",
                pair.id, entry.count, entry.kind
            ));
        }
    }
    LexicalNegatives { negatives, warnings }
}

/// Runs [`generate_lexical_negatives`] over a dataset. Pair `i` draws from
/// the stream `(seed, i)`, so output does not depend on thread count.
pub fn generate_dataset(
    pairs: &[DocumentSummaryPair],
    recipe: &AugmentRecipe,
    resources: &LexicalResources,
    seed: u64,
) -> (Vec<TrainingExample>, Vec<String>) {
    let results: Vec<LexicalNegatives> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| {
            let mut rng = SeededRng::stream(seed, i as u64);
            generate_lexical_negatives(pair, recipe, resources, &mut rng)
        })
        .collect();
    let mut warnings = Vec::new();
    let examples = pairs
        .iter()
        .zip(results)
        .map(|(pair, r)| {
            warnings.extend(r.warnings);
            TrainingExample {
                pair: pair.clone(),
                negatives: r.negatives,
            }
        })
        .collect();
    (examples, warnings)
}
