//! Extrinsic plagiarism detection for Arabic-script (Persian-first) text.
//!
//! The engine runs in two stages. Candidate retrieval chunks a suspicious
//! document, turns its most informative sentences into keyword and
//! noun-phrase queries, and searches a TF-IDF inverted index over the source
//! collection. Text alignment then compares the suspicious document with each
//! candidate sentence by sentence and merges matching sentence pairs into
//! reported passages. `evaluation` scores detections with the PAN
//! character-level measures.

pub mod alignment;
pub mod config;
pub mod corpus;
pub mod evaluation;
pub mod index;
pub mod pipeline;
pub mod records;
pub mod report;
pub mod retrieval;
pub mod textnorm;

pub use textnorm::{LanguageResources, NormalizedDocument, Span, Tag, Token};
