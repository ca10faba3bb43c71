//! Word tokenization, vocabulary, and the lexical resources used by the
//! augmenters (entity heuristic, antonym lexicon).

mod entities;
mod lexicon;
mod tokenize;
mod vocab;

pub use entities::{detect_entities, EntityDetector, EntitySpan};
pub use lexicon::{antonym_of, AntonymLexicon};
pub use tokenize::{detokenize, is_punct, tokenize};
pub use vocab::{encode_ids, Vocabulary, PAD_ID, PAD_TOKEN, UNK_ID, UNK_TOKEN};

/// Default truncation for document inputs.
pub const DEFAULT_MAX_DOC_LEN: usize = 4096;
/// Default truncation for summary inputs.
pub const DEFAULT_MAX_SUM_LEN: usize = 512;

/// Token-count caps applied before encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthLimits {
    pub max_doc_len: usize,
    pub max_sum_len: usize,
}

impl Default for LengthLimits {
    fn default() -> Self {
        Self {
            max_doc_len: DEFAULT_MAX_DOC_LEN,
            max_sum_len: DEFAULT_MAX_SUM_LEN,
        }
    }
}
