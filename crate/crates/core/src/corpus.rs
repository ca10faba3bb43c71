//! Data model and line-delimited JSON loaders.
//!
//! Three on-disk record kinds are supported, one JSON object per line:
//!
//! ```text
//! pairs:     {"id", "document", "summary"}
//! examples:  {"id", "document", "summary", "negatives": [{"text", "origin", "source_id"?}]}
//! eval:      {"example_id", "system_id", "document", "summary",
//!             "human": {"coherence", "consistency", "fluency", "relevance"}}
//! ```
//!
//! Loaders validate every record and report the 1-based line of the first
//! offending record. Blank lines are ignored.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentSummaryPair {
    pub id: String,
    pub document: String,
    pub summary: String,
}

/// Provenance of a hard negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    /// Entities swapped with ones from the source document.
    #[serde(rename = "SE")]
    SwapEntities,
    /// Words shuffled.
    #[serde(rename = "SW")]
    ShuffleWords,
    /// Words dropped.
    #[serde(rename = "DW")]
    DropWords,
    /// Characters dropped.
    #[serde(rename = "DC")]
    DropChars,
    /// Words replaced by antonyms.
    #[serde(rename = "SA")]
    SwapAntonyms,
    /// Another pair's summary, mined with a trained encoder.
    #[serde(rename = "MINED")]
    Mined,
}

impl Origin {
    pub fn tag(self) -> &'static str {
        match self {
            Origin::SwapEntities => "SE",
            Origin::ShuffleWords => "SW",
            Origin::DropWords => "DW",
            Origin::DropChars => "DC",
            Origin::SwapAntonyms => "SA",
            Origin::Mined => "MINED",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "SE" => Origin::SwapEntities,
            "SW" => Origin::ShuffleWords,
            "DW" => Origin::DropWords,
            "DC" => Origin::DropChars,
            "SA" => Origin::SwapAntonyms,
            "MINED" => Origin::Mined,
            other => return Err(Error::Invalid(format!("unknown origin tag {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Negative {
    pub text: String,
    pub origin: Origin,
    pub source_id: Option<String>,
}

impl Negative {
    pub fn lexical(text: String, origin: Origin) -> Self {
        Self {
            text,
            origin,
            source_id: None,
        }
    }

    pub fn mined(text: String, source_id: String) -> Self {
        Self {
            text,
            origin: Origin::Mined,
            source_id: Some(source_id),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub pair: DocumentSummaryPair,
    pub negatives: Vec<Negative>,
}

impl TrainingExample {
    pub fn without_negatives(pair: DocumentSummaryPair) -> Self {
        Self {
            pair,
            negatives: Vec::new(),
        }
    }

    /// Checks the negative-list invariants: non-empty texts, no copy of the
    /// positive, no duplicates, and `source_id` present exactly on mined ones.
    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Error::Example {
            id: self.pair.id.clone(),
            message,
        };
        let mut seen = HashSet::new();
        for (k, neg) in self.negatives.iter().enumerate() {
            if neg.text.trim().is_empty() {
                return Err(fail(format!("negative {k} is empty")));
            }
            if neg.text == self.pair.summary {
                return Err(fail(format!("negative {k} equals the positive summary")));
            }
            if !seen.insert(neg.text.as_str()) {
                return Err(fail(format!("negative {k} duplicates an earlier negative")));
            }
            match (neg.origin, &neg.source_id) {
                (Origin::Mined, None) => {
                    return Err(fail(format!("mined negative {k} has no source_id")))
                }
                (origin, Some(_)) if origin != Origin::Mined => {
                    return Err(fail(format!("{origin} negative {k} carries a source_id")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// The four human-rated quality dimensions, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Coherence,
    Consistency,
    Fluency,
    Relevance,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Coherence,
        Dimension::Consistency,
        Dimension::Fluency,
        Dimension::Relevance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Coherence => "coherence",
            Dimension::Consistency => "consistency",
            Dimension::Fluency => "fluency",
            Dimension::Relevance => "relevance",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Dimension::Coherence => "Coh",
            Dimension::Consistency => "Con",
            Dimension::Fluency => "Flu",
            Dimension::Relevance => "Rel",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One rating per dimension, indexed by [`Dimension::index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumanRatings(pub [f64; 4]);

impl HumanRatings {
    pub fn get(&self, dim: Dimension) -> f64 {
        self.0[dim.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub example_id: String,
    pub system_id: String,
    pub document: String,
    pub summary: String,
    pub human: HumanRatings,
}

impl EvalRecord {
    pub fn cell(&self) -> (String, String) {
        (self.example_id.clone(), self.system_id.clone())
    }
}

// ---------------------------------------------------------------------------
// Wire records

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    id: String,
    document: String,
    summary: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNegative {
    text: String,
    origin: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_id: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExample {
    id: String,
    document: String,
    summary: String,
    negatives: Vec<RawNegative>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvalRecord {
    example_id: String,
    system_id: String,
    document: String,
    summary: String,
    human: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize)]
struct PairOut<'a> {
    id: &'a str,
    document: &'a str,
    summary: &'a str,
}

#[derive(Serialize)]
struct EvalOut<'a> {
    example_id: &'a str,
    system_id: &'a str,
    document: &'a str,
    summary: &'a str,
    human: BTreeMap<&'static str, f64>,
}

// ---------------------------------------------------------------------------
// Loading

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let lines: Vec<(usize, String)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.to_string()))
        .collect();
    if lines.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(lines)
}

fn parse_line<T: for<'de> Deserialize<'de>>(path: &Path, line: usize, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(path, line, format!("malformed record: {e}")))
}

fn check_pair(path: &Path, line: usize, pair: &DocumentSummaryPair) -> Result<()> {
    if pair.id.is_empty() {
        return Err(Error::parse(path, line, "empty id"));
    }
    if pair.document.trim().is_empty() {
        return Err(Error::parse(path, line, format!("pair {:?} has an empty document", pair.id)));
    }
    if pair.summary.trim().is_empty() {
        return Err(Error::parse(path, line, format!("pair {:?} has an empty summary", pair.id)));
    }
    Ok(())
}

fn check_unique(
    seen: &mut HashMap<String, usize>,
    path: &Path,
    line: usize,
    id: &str,
) -> Result<()> {
    if let Some(first) = seen.insert(id.to_string(), line) {
        return Err(Error::parse(
            path,
            line,
            format!("duplicate id {id:?} (first seen on line {first})"),
        ));
    }
    Ok(())
}

/// Loads a pairs file, preserving file order.
pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<DocumentSummaryPair>> {
    let path = path.as_ref();
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (line, text) in read_lines(path)? {
        let raw: RawPair = parse_line(path, line, &text)?;
        let pair = DocumentSummaryPair {
            id: raw.id,
            document: raw.document,
            summary: raw.summary,
        };
        check_pair(path, line, &pair)?;
        check_unique(&mut seen, path, line, &pair.id)?;
        out.push(pair);
    }
    Ok(out)
}

/// Loads a training-examples file. Origin labels and negative order are kept.
pub fn load_training_examples(path: impl AsRef<Path>) -> Result<Vec<TrainingExample>> {
    let path = path.as_ref();
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (line, text) in read_lines(path)? {
        let raw: RawExample = parse_line(path, line, &text)?;
        let pair = DocumentSummaryPair {
            id: raw.id,
            document: raw.document,
            summary: raw.summary,
        };
        check_pair(path, line, &pair)?;
        check_unique(&mut seen, path, line, &pair.id)?;
        let mut negatives = Vec::with_capacity(raw.negatives.len());
        for neg in raw.negatives {
            let origin = neg
                .origin
                .parse::<Origin>()
                .map_err(|e| Error::parse(path, line, format!("example {:?}: {e}", pair.id)))?;
            negatives.push(Negative {
                text: neg.text,
                origin,
                source_id: neg.source_id,
            });
        }
        let example = TrainingExample { pair, negatives };
        example
            .validate()
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        out.push(example);
    }
    Ok(out)
}

/// Loads evaluation records. The (example, system) grid may be ragged.
pub fn load_eval_records(path: impl AsRef<Path>) -> Result<Vec<EvalRecord>> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, text) in read_lines(path)? {
        let raw: RawEvalRecord = parse_line(path, line, &text)?;
        let cell = format!("({}, {})", raw.example_id, raw.system_id);
        if let Some(extra) = raw
            .human
            .keys()
            .find(|k| !Dimension::ALL.iter().any(|d| d.name() == k.as_str()))
        {
            return Err(Error::parse(path, line, format!("{cell}: unknown dimension {extra:?}")));
        }
        let mut ratings = [0.0; 4];
        for dim in Dimension::ALL {
            let value = raw.human.get(dim.name()).ok_or_else(|| {
                Error::parse(path, line, format!("{cell}: missing dimension {dim}"))
            })?;
            let rating = value.as_f64().ok_or_else(|| {
                Error::parse(path, line, format!("{cell}: non-numeric {dim} rating {value}"))
            })?;
            if !rating.is_finite() {
                return Err(Error::parse(path, line, format!("{cell}: non-finite {dim} rating")));
            }
            ratings[dim.index()] = rating;
        }
        if !seen.insert((raw.example_id.clone(), raw.system_id.clone())) {
            return Err(Error::parse(path, line, format!("duplicate cell {cell}")));
        }
        out.push(EvalRecord {
            example_id: raw.example_id,
            system_id: raw.system_id,
            document: raw.document,
            summary: raw.summary,
            human: HumanRatings(ratings),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Writing

fn write_lines<I>(path: &Path, lines: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("record serialization cannot fail")
}

pub fn pair_to_json(pair: &DocumentSummaryPair) -> String {
    to_json(&PairOut {
        id: &pair.id,
        document: &pair.document,
        summary: &pair.summary,
    })
}

pub fn example_to_json(example: &TrainingExample) -> String {
    to_json(&RawExample {
        id: example.pair.id.clone(),
        document: example.pair.document.clone(),
        summary: example.pair.summary.clone(),
        negatives: example
            .negatives
            .iter()
            .map(|n| RawNegative {
                text: n.text.clone(),
                origin: n.origin.tag().to_string(),
                source_id: n.source_id.clone(),
            })
            .collect(),
    })
}

pub fn eval_record_to_json(record: &EvalRecord) -> String {
    to_json(&EvalOut {
        example_id: &record.example_id,
        system_id: &record.system_id,
        document: &record.document,
        summary: &record.summary,
        human: Dimension::ALL
            .iter()
            .map(|d| (d.name(), record.human.get(*d)))
            .collect(),
    })
}

pub fn write_pairs(path: impl AsRef<Path>, pairs: &[DocumentSummaryPair]) -> Result<()> {
    write_lines(path.as_ref(), pairs.iter().map(pair_to_json))
}

pub fn write_training_examples(path: impl AsRef<Path>, examples: &[TrainingExample]) -> Result<()> {
    write_lines(path.as_ref(), examples.iter().map(example_to_json))
}

pub fn write_eval_records(path: impl AsRef<Path>, records: &[EvalRecord]) -> Result<()> {
    write_lines(path.as_ref(), records.iter().map(eval_record_to_json))
}
