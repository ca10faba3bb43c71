//! The five lexical augmentations. Each returns the augmented text, the
//! number of edits applied and a `no_op` flag set when the input offers
//! nothing to augment. When no edit is applied the input text is returned
//! verbatim.

use crate::rng::SeededRng;
use crate::textproc::{antonym_of, detokenize, tokenize, AntonymLexicon, EntityDetector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmented {
    pub text: String,
    /// Units changed: spans swapped, tokens moved or dropped, characters dropped.
    pub edits: usize,
    /// The input had nothing the augmentation could act on.
    pub no_op: bool,
}

impl Augmented {
    fn unchanged(text: &str, no_op: bool) -> Self {
        Self {
            text: text.to_string(),
            edits: 0,
            no_op,
        }
    }

    fn edited(original: &str, tokens: &[String], edits: usize) -> Self {
        if edits == 0 {
            return Self::unchanged(original, false);
        }
        Self {
            text: detokenize(tokens),
            edits,
            no_op: false,
        }
    }
}

/// Swaps each summary entity, with probability `p_swap`, for an entity
/// drawn uniformly from the distinct document entities whose surface differs.
pub fn swap_entities(
    document: &str,
    summary: &str,
    detector: &EntityDetector,
    rng: &mut SeededRng,
    p_swap: f64,
) -> Augmented {
    let sum_tokens = tokenize(summary);
    let spans = detector.detect(&sum_tokens);
    if spans.is_empty() {
        return Augmented::unchanged(summary, true);
    }
    let doc_tokens = tokenize(document);
    let mut pool: Vec<Vec<String>> = Vec::new();
    for span in detector.detect(&doc_tokens) {
        let toks = doc_tokens[span.start_token..span.end_token].to_vec();
        if !pool.contains(&toks) {
            pool.push(toks);
        }
    }

    let mut out = Vec::with_capacity(sum_tokens.len());
    let mut cursor = 0;
    let mut edits = 0;
    for span in &spans {
        out.extend_from_slice(&sum_tokens[cursor..span.start_token]);
        let original = &sum_tokens[span.start_token..span.end_token];
        cursor = span.end_token;
        if !rng.chance(p_swap) {
            out.extend_from_slice(original);
            continue;
        }
        let choices: Vec<&Vec<String>> = pool.iter().filter(|t| t.as_slice() != original).collect();
        if choices.is_empty() {
            out.extend_from_slice(original);
            continue;
        }
        out.extend_from_slice(choices[rng.index(choices.len())]);
        edits += 1;
    }
    out.extend_from_slice(&sum_tokens[cursor..]);
    Augmented::edited(summary, &out, edits)
}

/// Uniform Fisher-Yates permutation of the summary tokens.
pub fn shuffle_words(summary: &str, rng: &mut SeededRng) -> Augmented {
    let tokens = tokenize(summary);
    if tokens.len() < 2 {
        return Augmented::unchanged(summary, true);
    }
    let mut shuffled = tokens.clone();
    rng.shuffle(&mut shuffled);
    let moved = tokens.iter().zip(&shuffled).filter(|(a, b)| a != b).count();
    Augmented::edited(summary, &shuffled, moved)
}

/// Drops each token with probability `p_drop`; keeps the first token if
/// every token would be dropped.
pub fn drop_words(summary: &str, rng: &mut SeededRng, p_drop: f64) -> Augmented {
    let tokens = tokenize(summary);
    if tokens.is_empty() {
        return Augmented::unchanged(summary, true);
    }
    let mut kept: Vec<String> = tokens
        .iter()
        .filter(|_| !rng.chance(p_drop))
        .cloned()
        .collect();
    if kept.is_empty() {
        kept.push(tokens[0].clone());
    }
    let edits = tokens.len() - kept.len();
    Augmented::edited(summary, &kept, edits)
}

/// Drops each non-whitespace character with probability `p_drop`. If no
/// non-whitespace character survives, the result is the first one alone.
pub fn drop_chars(summary: &str, rng: &mut SeededRng, p_drop: f64) -> Augmented {
    let Some(first) = summary.chars().find(|c| !c.is_whitespace()) else {
        return Augmented::unchanged(summary, true);
    };
    let mut out = String::with_capacity(summary.len());
    let mut dropped = 0;
    let mut survivors = 0;
    for c in summary.chars() {
        if c.is_whitespace() {
            out.push(c);
        } else if rng.chance(p_drop) {
            dropped += 1;
        } else {
            survivors += 1;
            out.push(c);
        }
    }
    if dropped == 0 {
        return Augmented::unchanged(summary, false);
    }
    if survivors == 0 {
        out = first.to_string();
        dropped -= 1;
    }
    Augmented {
        text: out,
        edits: dropped,
        no_op: false,
    }
}

/// Replaces each token that has a lexicon entry, with probability `p_swap`,
/// by its first antonym.
pub fn swap_antonyms(
    summary: &str,
    lexicon: &AntonymLexicon,
    rng: &mut SeededRng,
    p_swap: f64,
) -> Augmented {
    let mut tokens = tokenize(summary);
    let mut hits = 0;
    let mut edits = 0;
    for tok in tokens.iter_mut() {
        if let Some(ant) = antonym_of(tok, lexicon) {
            hits += 1;
            if rng.chance(p_swap) {
                *tok = ant;
                edits += 1;
            }
        }
    }
    if hits == 0 {
        return Augmented::unchanged(summary, true);
    }
    Augmented::edited(summary, &tokens, edits)
}
