//! Distributional similarity toolkit.
//!
//! Builds an unsmoothed relative-frequency model from (noun, verb)
//! cooccurrence pairs, compares conditional verb distributions with a family
//! of similarity functions (L1, L2, cosine, Jaccard, Jensen-Shannon, KL,
//! confusion probability, Kendall's tau and the alpha-skew divergence),
//! smooths unseen pairs by distance-weighted averaging over nearest
//! neighbors, and scores measures on a frequency-controlled pseudoword
//! decision task.

pub mod cli;
pub mod corpus;
pub mod distribution;
pub mod error;
pub mod evaluation;
pub mod manifest;
pub mod measures;
pub mod smoothing;
pub mod synthetic;
pub mod vocab;

pub use corpus::{build_model, ingest_pairs, select_top_nouns, split_corpus, CorpusModel, PairCounts};
pub use distribution::SparseDistribution;
pub use error::{Error, Result};
pub use measures::{MeasureKind, MeasureSpec};
pub use vocab::{NounId, VerbId};
