use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::EvalRecord;
use crate::encoder::{embed_str, similarity, ParamSet, Real, Tower};
use crate::error::{Error, Result};
use crate::textproc::{LengthLimits, Vocabulary};

/// Cosine similarity between a document and a candidate summary.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RiseScore(f64);

impl RiseScore {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(-1.0..=1.0).contains(&value) {
            return Err(Error::Invalid(format!("score {value} outside [-1, 1]")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for RiseScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Shortest representation that parses back to the same f64.
        write!(f, "{:?}", self.0)
    }
}

/// `(example_id, system_id)` to score.
pub type ScoreMap = BTreeMap<(String, String), RiseScore>;

pub fn score_summary<T: Real>(
    params: &ParamSet<T>,
    vocab: &Vocabulary,
    document: &str,
    summary: &str,
    limits: LengthLimits,
) -> Result<RiseScore> {
    let doc = embed_str(params, vocab, document, Tower::Document, limits.max_doc_len)?;
    let sum = embed_str(params, vocab, summary, Tower::Summary, limits.max_sum_len)?;
    RiseScore::new(similarity(&doc, &sum)?)
}

/// Scores every record in parallel. Errors name the failing cell.
pub fn score_records<T: Real>(
    params: &ParamSet<T>,
    vocab: &Vocabulary,
    records: &[EvalRecord],
    limits: LengthLimits,
) -> Result<ScoreMap> {
    let scores: Vec<RiseScore> = records
        .par_iter()
        .map(|r| {
            score_summary(params, vocab, &r.document, &r.summary, limits).map_err(|e| Error::Example {
                id: format!("{}/{}", r.example_id, r.system_id),
                message: e.to_string(),
            })
        })
        .collect::<Result<_>>()?;
    let mut map = ScoreMap::new();
    for (r, s) in records.iter().zip(scores) {
        if map.insert(r.cell(), s).is_some() {
            return Err(Error::Invalid(format!(
                "duplicate cell ({}, {})",
                r.example_id, r.system_id
            )));
        }
    }
    Ok(map)
}

/// Writes `example_id<TAB>system_id<TAB>score` lines sorted by cell.
pub fn write_scores(path: impl AsRef<Path>, scores: &ScoreMap) -> Result<()> {
    let path = path.as_ref();
    for (ex, sys) in scores.keys() {
        if [ex, sys].iter().any(|s| s.contains(['\t', '\n', '\r'])) {
            return Err(Error::Invalid(format!("cell ({ex:?}, {sys:?}) contains a tab or newline")));
        }
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for ((ex, sys), score) in scores {
        writeln!(w, "{ex}\t{sys}\t{score}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_scores(path: impl AsRef<Path>) -> Result<ScoreMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = ScoreMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [ex, sys, value] = fields[..] else {
            return Err(Error::parse(path, line_no, format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("score {value:?} is not a number")))?;
        let score = RiseScore::new(value).map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        if map.insert((ex.to_string(), sys.to_string()), score).is_some() {
            return Err(Error::parse(path, line_no, format!("duplicate cell ({ex}, {sys})")));
        }
    }
    if map.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_bounds() {
        assert!(RiseScore::new(1.0).is_ok());
        assert!(RiseScore::new(1.0 + 1e-9).is_err());
        assert!(RiseScore::new(f64::NAN).is_err());
    }

    #[test]
    fn scores_file_round_trip_is_exact() {
        let mut map = ScoreMap::new();
        map.insert(("e1".into(), "s1".into()), RiseScore::new(0.1 + 0.2).unwrap());
        map.insert(("e0".into(), "s2".into()), RiseScore::new(-1.0 / 3.0).unwrap());
        let f = tempfile::NamedTempFile::new().unwrap();
        write_scores(f.path(), &map).unwrap();
        let text = fs::read_to_string(f.path()).unwrap();
        assert!(text.starts_with("e0\ts2\t"));
        assert_eq!(read_scores(f.path()).unwrap(), map);
    }

    #[test]
    fn malformed_scores_rejected() {
        let f = tempfile::NamedTempFile::new().unwrap();
        for bad in ["e1\ts1\n", "e1\ts1\tx\n", "e1\ts1\t2.0\n", "e1\ts1\t0.1\ne1\ts1\t0.2\n", ""] {
            fs::write(f.path(), bad).unwrap();
            assert!(read_scores(f.path()).is_err(), "{bad:?}");
        }
    }
}
