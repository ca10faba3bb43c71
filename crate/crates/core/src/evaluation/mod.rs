//! Scoring with a trained encoder, per-system aggregation and system-level
//! Kendall correlation against human ratings.

mod report;
mod score;
mod tau;

pub use report::{aggregate_system_scores, correlation_report, SystemRow, SystemScoreTable, TauReport};
pub use score::{read_scores, score_records, score_summary, write_scores, RiseScore, ScoreMap};
pub use tau::{kendall_tau, TauVariant};
