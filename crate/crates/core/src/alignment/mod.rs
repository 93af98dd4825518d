//! Text alignment between a suspicious document and one candidate source.
//!
//! Every sentence pair is scored, pairs at or above the threshold are kept,
//! and nearby kept pairs are merged into passages. Three similarity measures
//! are available: cosine over TF-IDF sentence vectors (order-insensitive),
//! and Jaccard over character or word n-gram sets.

mod merge;
mod ngram;
mod vsm;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::ConfigError;
use crate::index::IdfSource;
use crate::textnorm::{NormalizedDocument, Span};

pub use merge::{merge_matches, MatchCluster};
pub use ngram::{collapse_whitespace, match_ngram_sentences, ngram_similarity, NgramProfile};
pub use vsm::{cosine, match_sentences, sentence_vectors, SentenceMatch, SentenceVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    #[default]
    Vsm,
    CharNgram,
    WordNgram,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Vsm, Method::CharNgram, Method::WordNgram];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Vsm => "VSM",
            Method::CharNgram => "CHAR_NGRAM",
            Method::WordNgram => "WORD_NGRAM",
        }
    }

    /// Default n-gram order; unused by VSM.
    pub fn default_n(self) -> usize {
        match self {
            Method::WordNgram => 2,
            _ => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method {s:?} (expected VSM, CHAR_NGRAM or WORD_NGRAM)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignmentConfig {
    pub method: Method,
    /// Minimum sentence similarity for a pair to count as a match.
    pub threshold: f64,
    /// N-gram order; `None` picks the method default.
    pub n: Option<usize>,
    /// Sentences that may be skipped between merged matches.
    pub merge_gap: usize,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        Self {
            method: Method::Vsm,
            threshold: 0.65,
            n: None,
            merge_gap: 1,
        }
    }
}

impl AlignmentConfig {
    pub fn ngram_order(&self) -> usize {
        self.n.unwrap_or_else(|| self.method.default_n())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(ConfigError::Alignment("threshold must lie in (0, 1]".into()));
        }
        if self.n == Some(0) {
            return Err(ConfigError::Alignment("n must be >= 1".into()));
        }
        Ok(())
    }
}

/// A reported passage pair. Spans are raw-text character ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub susp_doc_id: String,
    pub susp_span: Span,
    pub src_doc_id: String,
    pub src_span: Span,
    /// Mean similarity of the merged sentence pairs.
    pub score: f64,
    pub method: Method,
    pub pairs: usize,
    pub susp_sentences: Range<usize>,
    pub src_sentences: Range<usize>,
}

/// Thresholded sentence matches between the two documents.
pub fn sentence_matches(
    susp: &NormalizedDocument,
    src: &NormalizedDocument,
    idf: &impl IdfSource,
    cfg: &AlignmentConfig,
) -> Vec<SentenceMatch> {
    match cfg.method {
        Method::Vsm => match_sentences(&sentence_vectors(susp, idf), &sentence_vectors(src, idf), cfg.threshold),
        method => {
            let n = cfg.ngram_order();
            let profiles = |d: &NormalizedDocument| -> Vec<NgramProfile> {
                (0..d.sentences.len()).map(|s| NgramProfile::for_sentence(d, s, method, n)).collect()
            };
            match_ngram_sentences(&profiles(susp), &profiles(src), cfg.threshold)
        }
    }
}

/// Turns merged sentence clusters into raw-text detections.
pub fn clusters_to_detections(
    susp: &NormalizedDocument,
    src: &NormalizedDocument,
    clusters: &[MatchCluster],
    method: Method,
) -> Vec<Detection> {
    let raw_span = |d: &NormalizedDocument, r: &Range<usize>| {
        let norm = Span::new(d.sentences[r.start].span.start, d.sentences[r.end - 1].span.end);
        d.to_raw_span(norm)
    };
    clusters
        .iter()
        .map(|c| Detection {
            susp_doc_id: susp.doc_id.clone(),
            susp_span: raw_span(susp, &c.susp),
            src_doc_id: src.doc_id.clone(),
            src_span: raw_span(src, &c.src),
            score: c.mean_sim(),
            method,
            pairs: c.pairs,
            susp_sentences: c.susp.clone(),
            src_sentences: c.src.clone(),
        })
        .collect()
}

/// Aligns `susp` against `src` and returns the merged passages.
pub fn align(
    susp: &NormalizedDocument,
    src: &NormalizedDocument,
    idf: &impl IdfSource,
    cfg: &AlignmentConfig,
) -> Vec<Detection> {
    let matches = sentence_matches(susp, src, idf, cfg);
    clusters_to_detections(susp, src, &merge_matches(&matches, cfg.merge_gap), cfg.method)
}
