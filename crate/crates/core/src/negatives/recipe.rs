use std::fmt;
use std::str::FromStr;

use crate::corpus::Origin;
use crate::error::{Error, Result};

/// Default per-entity swap probability for entity and antonym swaps.
pub const DEFAULT_P_SWAP: f64 = 0.5;
/// Default per-unit drop probability for word and character drops.
pub const DEFAULT_P_DROP: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AugmentKind {
    SwapEntities,
    ShuffleWords,
    DropWords,
    DropChars,
    SwapAntonyms,
}

impl AugmentKind {
    pub fn origin(self) -> Origin {
        match self {
            AugmentKind::SwapEntities => Origin::SwapEntities,
            AugmentKind::ShuffleWords => Origin::ShuffleWords,
            AugmentKind::DropWords => Origin::DropWords,
            AugmentKind::DropChars => Origin::DropChars,
            AugmentKind::SwapAntonyms => Origin::SwapAntonyms,
        }
    }
}

impl fmt::Display for AugmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.origin().fmt(f)
    }
}

impl FromStr for AugmentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "SE" => Ok(AugmentKind::SwapEntities),
            "SW" => Ok(AugmentKind::ShuffleWords),
            "DW" => Ok(AugmentKind::DropWords),
            "DC" => Ok(AugmentKind::DropChars),
            "SA" => Ok(AugmentKind::SwapAntonyms),
            other => Err(Error::Config(format!("unknown augmentation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecipeEntry {
    pub kind: AugmentKind,
    pub count: usize,
    /// Swap probability for SE/SA, drop probability for DW/DC; unused by SW.
    pub probability: f64,
}

/// Ordered list of augmentations to apply per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentRecipe {
    entries: Vec<RecipeEntry>,
}

impl AugmentRecipe {
    pub fn new(entries: Vec<RecipeEntry>) -> Result<Self> {
        if entries.iter().map(|e| e.count).sum::<usize>() == 0 {
            return Err(Error::Config("recipe must request at least one negative".into()));
        }
        for e in &entries {
            if e.count == 0 {
                return Err(Error::Config(format!("{} count must be at least 1", e.kind)));
            }
            if !(0.0..=1.0).contains(&e.probability) {
                return Err(Error::Config(format!(
                    "{} probability {} outside [0, 1]",
                    e.kind, e.probability
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Parses `"SE:5,DW:5"`. SE/SA take `p_swap`, DW/DC take `p_drop`.
    pub fn parse(text: &str, p_swap: f64, p_drop: f64) -> Result<Self> {
        let mut entries = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (kind, count) = part
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("recipe entry {part:?} is not KIND:COUNT")))?;
            let kind: AugmentKind = kind.parse()?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad count in recipe entry {part:?}")))?;
            let probability = match kind {
                AugmentKind::SwapEntities | AugmentKind::SwapAntonyms => p_swap,
                AugmentKind::DropWords | AugmentKind::DropChars => p_drop,
                AugmentKind::ShuffleWords => 1.0,
            };
            entries.push(RecipeEntry {
                kind,
                count,
                probability,
            });
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[RecipeEntry] {
        &self.entries
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }
}

impl fmt::Display for AugmentRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| format!("{}:{}", e.kind, e.count)).collect();
        f.write_str(&parts.join(","))
    }
}
