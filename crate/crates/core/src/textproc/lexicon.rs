use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUNDLED_LEXICON: &str = include_str!("../../resources/antonyms.txt");

/// Lowercase word → antonyms, parsed from `word: ant1,ant2` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AntonymLexicon {
    entries: HashMap<String, Vec<String>>,
}

impl AntonymLexicon {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: HashMap<String, Vec<String>> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (word, rest) = line.split_once(':').ok_or_else(|| {
                Error::Invalid(format!("antonym lexicon line {}: expected `word: a,b`", n + 1))
            })?;
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(Error::Invalid(format!("antonym lexicon line {}: empty word", n + 1)));
            }
            let list = entries.entry(word.clone()).or_default();
            for ant in rest.split(',').map(|a| a.trim().to_lowercase()).filter(|a| !a.is_empty()) {
                if ant == word {
                    return Err(Error::Invalid(format!(
                        "antonym lexicon line {}: {word:?} maps to itself",
                        n + 1
                    )));
                }
                if !list.contains(&ant) {
                    list.push(ant);
                }
            }
        }
        entries.retain(|_, v| !v.is_empty());
        Ok(Self { entries })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// The lexicon shipped with the crate.
    pub fn bundled() -> &'static AntonymLexicon {
        static LEXICON: OnceLock<AntonymLexicon> = OnceLock::new();
        LEXICON.get_or_init(|| Self::parse(BUNDLED_LEXICON).expect("bundled lexicon is valid"))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn antonyms(&self, word: &str) -> Option<&[String]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }
}

fn apply_case(pattern: &str, word: &str) -> String {
    let mut chars = pattern.chars();
    let first_upper = chars.next().is_some_and(char::is_uppercase);
    let all_upper = first_upper
        && pattern.chars().count() > 1
        && pattern.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase);
    if all_upper {
        word.to_uppercase()
    } else if first_upper {
        let mut w = word.chars();
        match w.next() {
            Some(c) => c.to_uppercase().chain(w).collect(),
            None => String::new(),
        }
    } else {
        word.to_string()
    }
}

/// First listed antonym of `word`, carrying over its capitalisation.
pub fn antonym_of(word: &str, lexicon: &AntonymLexicon) -> Option<String> {
    lexicon
        .antonyms(word)
        .and_then(|list| list.first())
        .map(|ant| apply_case(word, ant))
}
