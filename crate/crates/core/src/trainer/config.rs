use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::{LengthLimits, DEFAULT_MAX_DOC_LEN, DEFAULT_MAX_SUM_LEN};

/// Which hard negatives enter a document's softmax denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardNegativeScope {
    /// Only the document's own negatives.
    #[default]
    OwnDocument,
    /// Every negative in the batch.
    WholeBatch,
}

impl fmt::Display for HardNegativeScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HardNegativeScope::OwnDocument => "own_document",
            HardNegativeScope::WholeBatch => "whole_batch",
        })
    }
}

impl FromStr for HardNegativeScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "own_document" => Ok(HardNegativeScope::OwnDocument),
            "whole_batch" => Ok(HardNegativeScope::WholeBatch),
            other => Err(Error::Config(format!(
                "unknown hard-negative scope {other:?} (expected own_document or whole_batch)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub batch_size: usize,
    pub temperature: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub max_doc_len: usize,
    pub max_sum_len: usize,
    pub use_hard_negatives: bool,
    pub hard_negative_scope: HardNegativeScope,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            batch_size: 8,
            temperature: 0.05,
            learning_rate: 0.1,
            epochs: 10,
            seed: 0,
            max_doc_len: DEFAULT_MAX_DOC_LEN,
            max_sum_len: DEFAULT_MAX_SUM_LEN,
            use_hard_negatives: true,
            hard_negative_scope: HardNegativeScope::OwnDocument,
        }
    }
}

impl TrainingConfig {
    pub fn limits(&self) -> LengthLimits {
        LengthLimits {
            max_doc_len: self.max_doc_len,
            max_sum_len: self.max_sum_len,
        }
    }

    pub(crate) fn validate_loss(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::Config(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if self.max_doc_len == 0 || self.max_sum_len == 0 {
            return Err(Error::Config("length limits must be at least 1".into()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_loss()?;
        if self.batch_size < 2 {
            return Err(Error::Config(format!(
                "batch_size must be at least 2, got {}",
                self.batch_size
            )));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        Ok(())
    }
}
