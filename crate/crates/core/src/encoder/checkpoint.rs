//! Binary checkpoint format.
//!
//! ```text
//! "RISEKIT1"                  8 bytes magic
//! header_len                  u32 little-endian
//! header                      UTF-8 JSON (version, dims, flags, vocab hash, config echo)
//! payload                     f32 little-endian, row-major:
//!                             embedding table(s), projection(s), position logits
//! digest                      SHA-256 of everything above
//! ```
//!
//! Files are written to a sibling temporary path and renamed into place.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::params::{EncoderParams, Matrix, ParamSet, TowerParams};
use crate::error::{Error, Result};
use crate::textproc::Vocabulary;

pub const MAGIC: &[u8; 8] = b"RISEKIT1";
pub const FORMAT_VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub dim: usize,
    pub vocab_size: usize,
    pub positions: usize,
    pub shared_towers: bool,
    pub vocab_hash: String,
    /// Free-form echo of the training configuration that produced the file.
    pub training_config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub params: EncoderParams,
}

fn payload_len(h: &CheckpointHeader) -> usize {
    let towers = if h.shared_towers { 1 } else { 2 };
    towers * (h.vocab_size * h.dim + h.dim * h.dim + h.positions)
}

pub fn encode_checkpoint(
    params: &EncoderParams,
    vocab_hash: &str,
    training_config: serde_json::Value,
) -> Vec<u8> {
    let header = CheckpointHeader {
        format_version: FORMAT_VERSION,
        dim: params.dim(),
        vocab_size: params.vocab_size(),
        positions: params.positions(),
        shared_towers: params.shared_towers(),
        vocab_hash: vocab_hash.to_string(),
        training_config,
    };
    let header_bytes = serde_json::to_vec(&header).expect("header serialization cannot fail");
    let mut buf = Vec::with_capacity(16 + header_bytes.len() + 4 * payload_len(&header) + DIGEST_LEN);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(header_bytes.len() as u32).to_le_bytes());
    buf.extend_from_slice(&header_bytes);
    let towers = params.towers();
    let sections = towers
        .iter()
        .map(|t| t.embedding.as_slice())
        .chain(towers.iter().map(|t| t.projection.as_slice()))
        .chain(towers.iter().map(|t| t.position_logits.as_slice()));
    for section in sections {
        for v in section {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint> {
    let bad = |m: &str| Error::Checkpoint(m.to_string());
    if bytes.len() < MAGIC.len() + 4 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(bad("not a checkpoint (bad magic)"));
    }
    let header_len = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let header_end = 12usize
        .checked_add(header_len)
        .filter(|&end| end <= bytes.len())
        .ok_or_else(|| bad("truncated header"))?;
    let header: CheckpointHeader = serde_json::from_slice(&bytes[12..header_end])
        .map_err(|e| Error::Checkpoint(format!("malformed header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "format version {} not supported (expected {FORMAT_VERSION})",
            header.format_version
        )));
    }
    if header.dim < 2 || header.vocab_size < 3 || header.positions < 1 {
        return Err(bad("header dimensions out of range"));
    }
    let n = payload_len(&header);
    let payload_end = n
        .checked_mul(4)
        .and_then(|b| header_end.checked_add(b))
        .ok_or_else(|| bad("header dimensions overflow"))?;
    if bytes.len() < payload_end + DIGEST_LEN {
        return Err(bad("truncated payload"));
    }
    if bytes.len() > payload_end + DIGEST_LEN {
        return Err(bad("trailing bytes after digest"));
    }
    let digest = Sha256::digest(&bytes[..payload_end]);
    if digest.as_slice() != &bytes[payload_end..] {
        return Err(bad("checksum mismatch (corrupted file)"));
    }

    let mut values = bytes[header_end..payload_end]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")));
    let mut take = |count: usize| -> Vec<f32> { values.by_ref().take(count).collect() };
    let towers = if header.shared_towers { 1 } else { 2 };
    let (v, d, p) = (header.vocab_size, header.dim, header.positions);
    let embeddings: Vec<Vec<f32>> = (0..towers).map(|_| take(v * d)).collect();
    let projections: Vec<Vec<f32>> = (0..towers).map(|_| take(d * d)).collect();
    let positions: Vec<Vec<f32>> = (0..towers).map(|_| take(p)).collect();
    let tower_params = embeddings
        .into_iter()
        .zip(projections)
        .zip(positions)
        .map(|((e, pr), po)| {
            Ok(TowerParams {
                embedding: Matrix::from_vec(v, d, e)?,
                projection: Matrix::from_vec(d, d, pr)?,
                position_logits: po,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let params = ParamSet::from_towers(d, header.shared_towers, tower_params)
        .map_err(|e| Error::Checkpoint(e.to_string()))?;
    Ok(Checkpoint { header, params })
}

pub fn save_checkpoint(
    params: &EncoderParams,
    vocab: &Vocabulary,
    training_config: serde_json::Value,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    if params.vocab_size() != vocab.len() {
        return Err(Error::Invalid(format!(
            "parameters cover {} tokens but the vocabulary has {}",
            params.vocab_size(),
            vocab.len()
        )));
    }
    let bytes = encode_checkpoint(params, &vocab.hash(), training_config);
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Reads a checkpoint without checking it against a vocabulary.
pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}

/// Reads a checkpoint and verifies it was trained against `vocab`.
pub fn load_checkpoint(path: impl AsRef<Path>, vocab: &Vocabulary) -> Result<EncoderParams> {
    let ckpt = read_checkpoint(path)?;
    let expected = vocab.hash();
    if ckpt.header.vocab_hash != expected {
        return Err(Error::VocabHashMismatch {
            checkpoint: ckpt.header.vocab_hash,
            vocabulary: expected,
        });
    }
    Ok(ckpt.params)
}
