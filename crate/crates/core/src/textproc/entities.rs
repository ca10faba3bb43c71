use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../../resources/stopwords.txt");

/// A run of tokens `[start_token, end_token)` treated as a named entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySpan {
    pub start_token: usize,
    pub end_token: usize,
    pub surface: String,
}

impl EntitySpan {
    pub fn len(&self) -> usize {
        self.end_token - self.start_token
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Capitalised-run entity heuristic.
///
/// A token starting with an uppercase letter is an entity token unless it
/// opens a sentence and is a listed function word ("The", "However", ...).
/// Maximal runs of entity tokens form one span each.
#[derive(Debug, Clone)]
pub struct EntityDetector {
    stopwords: HashSet<String>,
}

impl EntityDetector {
    pub fn from_stopword_list(text: &str) -> Self {
        let stopwords = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { stopwords }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_stopword_list(&text))
    }

    fn is_entity_token(&self, tokens: &[String], k: usize) -> bool {
        let tok = &tokens[k];
        if !tok.chars().next().is_some_and(char::is_uppercase) {
            return false;
        }
        if tok == "I" {
            return false;
        }
        let sentence_initial = k == 0 || matches!(tokens[k - 1].as_str(), "." | "!" | "?");
        !(sentence_initial && self.stopwords.contains(&tok.to_lowercase()))
    }

    pub fn detect(&self, tokens: &[String]) -> Vec<EntitySpan> {
        let mut spans = Vec::new();
        let mut k = 0;
        while k < tokens.len() {
            if !self.is_entity_token(tokens, k) {
                k += 1;
                continue;
            }
            let start = k;
            k += 1;
            // Continuation tokens are never sentence-initial.
            while k < tokens.len() && self.is_entity_token(tokens, k) {
                k += 1;
            }
            spans.push(EntitySpan {
                start_token: start,
                end_token: k,
                surface: tokens[start..k].join(" "),
            });
        }
        spans
    }
}

impl Default for EntityDetector {
    fn default() -> Self {
        Self::from_stopword_list(DEFAULT_STOPWORDS)
    }
}

/// Entity spans under the bundled stopword list.
pub fn detect_entities(tokens: &[String]) -> Vec<EntitySpan> {
    static DETECTOR: OnceLock<EntityDetector> = OnceLock::new();
    DETECTOR.get_or_init(EntityDetector::default).detect(tokens)
}
