//! The dual encoder: token embeddings, position-weighted pooling, a linear
//! projection and l2 normalisation, plus checkpoint persistence.

mod checkpoint;
mod embed;
mod params;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, read_checkpoint, save_checkpoint,
    Checkpoint, CheckpointHeader, FORMAT_VERSION, MAGIC,
};
pub use embed::{embed_text, similarity, EmbeddingVector, UNIT_NORM_TOLERANCE};
pub use params::{
    init_params, init_params_with_positions, EncoderParams, Matrix, ParamSet, Real, Tower,
    TowerParams, DEFAULT_POSITIONS, INIT_SCALE,
};

pub(crate) use embed::{dot, encode_traced, EncodeTrace};

use crate::error::Result;
use crate::textproc::{encode_ids, tokenize, Vocabulary};

/// Tokenizes, truncates to `max_len` and encodes `text` through `tower`.
pub fn embed_str<T: Real>(
    params: &ParamSet<T>,
    vocab: &Vocabulary,
    text: &str,
    tower: Tower,
    max_len: usize,
) -> Result<EmbeddingVector> {
    let ids = encode_ids(&tokenize(text), vocab, max_len);
    embed_text(params, &ids, tower)
}
