//! Projection of English POS and dependency annotations onto parallel verse
//! corpora through IBM Model 1/2 word alignment, CoNLL-U emission, and
//! word-order typology measures validated by one-way ANOVA.

pub mod align;
pub mod annotation;
pub mod conllu;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod projection;
pub mod stats;
pub mod synth;
pub mod typology;
pub mod verse;

pub use error::{Error, Result};
