use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::score::ScoreMap;
use super::tau::{kendall_tau, TauVariant};
use crate::corpus::{Dimension, EvalRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemRow {
    pub model_mean: f64,
    /// Indexed by [`Dimension::index`].
    pub human_means: [f64; 4],
    pub count: usize,
}

/// Per-system means over the cells each system has.
pub type SystemScoreTable = BTreeMap<String, SystemRow>;

/// Averages model scores and human ratings per system over exactly the
/// scored cells. Cells are summed in example-id order, so the result does
/// not depend on record order.
pub fn aggregate_system_scores(records: &[EvalRecord], scores: &ScoreMap) -> Result<SystemScoreTable> {
    let mut cells: BTreeMap<&str, BTreeMap<&str, &EvalRecord>> = BTreeMap::new();
    for r in records {
        if !scores.contains_key(&r.cell()) {
            return Err(Error::Invalid(format!(
                "no score for cell ({}, {})",
                r.example_id, r.system_id
            )));
        }
        if cells
            .entry(&r.system_id)
            .or_default()
            .insert(&r.example_id, r)
            .is_some()
        {
            return Err(Error::Invalid(format!(
                "duplicate cell ({}, {})",
                r.example_id, r.system_id
            )));
        }
    }
    Ok(cells
        .into_iter()
        .map(|(sys, by_example)| {
            let count = by_example.len();
            let mut model = 0.0;
            let mut human = [0.0; 4];
            for r in by_example.values() {
                model += scores[&r.cell()].value();
                for (h, v) in human.iter_mut().zip(r.human.0) {
                    *h += v;
                }
            }
            let row = SystemRow {
                model_mean: model / count as f64,
                human_means: human.map(|h| h / count as f64),
                count,
            };
            (sys.to_string(), row)
        })
        .collect())
}

/// System-level tau per dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauReport {
    pub coherence: f64,
    pub consistency: f64,
    pub fluency: f64,
    pub relevance: f64,
    pub average: f64,
    pub variant: TauVariant,
    pub systems: usize,
}

impl TauReport {
    pub fn get(&self, dim: Dimension) -> f64 {
        match dim {
            Dimension::Coherence => self.coherence,
            Dimension::Consistency => self.consistency,
            Dimension::Fluency => self.fluency,
            Dimension::Relevance => self.relevance,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Aligned table with columns Coh, Con, Flu, Rel, Avg.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut header = format!("{:<8}", "metric");
        let mut row = format!("{:<8}", self.variant.to_string());
        for dim in Dimension::ALL {
            let _ = write!(header, " {:>7}", dim.short());
            let _ = write!(row, " {:>7.3}", self.get(dim));
        }
        let _ = write!(header, " {:>7}", "Avg");
        let _ = write!(row, " {:>7.3}", self.average);
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "{row}");
        let _ = writeln!(out, "systems: {}", self.systems);
        out
    }

    /// JSON line followed by the table.
    pub fn render(&self) -> String {
        format!("{}\n{}", self.to_json_line(), self.to_table())
    }
}

pub fn correlation_report(table: &SystemScoreTable, variant: TauVariant) -> Result<TauReport> {
    if table.len() < 2 {
        return Err(Error::Invalid(format!(
            "correlation needs at least 2 systems, found {}",
            table.len()
        )));
    }
    let model: Vec<f64> = table.values().map(|r| r.model_mean).collect();
    let mut taus = [0.0; 4];
    for dim in Dimension::ALL {
        let human: Vec<f64> = table.values().map(|r| r.human_means[dim.index()]).collect();
        taus[dim.index()] = kendall_tau(&model, &human, variant).map_err(|e| match e {
            Error::UndefinedTau(msg) => Error::UndefinedTau(format!("{dim}: {msg}")),
            other => Error::Invalid(format!("{dim}: {other}")),
        })?;
    }
    Ok(TauReport {
        coherence: taus[0],
        consistency: taus[1],
        fluency: taus[2],
        relevance: taus[3],
        average: taus.iter().sum::<f64>() / 4.0,
        variant,
        systems: table.len(),
    })
}
