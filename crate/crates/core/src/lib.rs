//! Reference-free summary scoring with a contrastively trained dual encoder.
//!
//! The pipeline: build a [`textproc::Vocabulary`] over (document, summary)
//! pairs, generate hard negatives ([`negatives`]), train the encoder with
//! an in-batch sampled softmax ([`trainer`]), score candidate summaries and
//! correlate per-system scores with human ratings ([`evaluation`]).

pub mod corpus;
pub mod encoder;
pub mod error;
pub mod evaluation;
pub mod negatives;
pub mod rng;
pub mod textproc;
pub mod trainer;

pub use error::{Error, Result};
