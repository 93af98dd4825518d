//! Candidate retrieval: narrow the source collection to a handful of
//! candidates per suspicious document.
//!
//! The document is cut into fixed-length chunks. In each chunk the
//! low-content sentences are discarded, keywords are drawn from the sentences
//! holding the highest TF-IDF words, noun phrases are collected, and both are
//! turned into queries against the inverted index. Queries whose terms are
//! already covered by a document retrieved for an earlier chunk are skipped.

mod keywords;
mod query;

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::config::ConfigError;
use crate::index::InvertedIndex;
use crate::textnorm::{NormalizedDocument, NpPattern, Span};

pub use keywords::{
    extract_keywords, extract_noun_phrases, percentile, rank_sentences, ChunkTfIdf, NounPhrase, SentenceKeywords,
};
pub use query::{formulate_queries, search_control, Control, Downloaded, Query, QueryOrigin};

/// Hits requested from the index per query.
pub const HITS_PER_QUERY: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrievalConfig {
    /// Chunk length in tokens.
    pub chunk_len: usize,
    /// A trailing chunk shorter than this is merged into its predecessor.
    pub min_tail: usize,
    /// Fraction of lowest-ranked sentences dropped per chunk.
    pub discard_ratio: f64,
    pub top_sentences: usize,
    pub max_query_terms: usize,
    pub candidates_per_doc: usize,
    /// Percentile of chunk TF-IDF values above which a word counts as "high".
    pub tfidf_high_percentile: f64,
    pub search_control_overlap: f64,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            chunk_len: 500,
            min_tail: 100,
            discard_ratio: 0.20,
            top_sentences: 3,
            max_query_terms: 10,
            candidates_per_doc: 25,
            tfidf_high_percentile: 0.75,
            search_control_overlap: 0.60,
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: &str| Err(ConfigError::Retrieval(m.to_string()));
        if !(self.discard_ratio > 0.0 && self.discard_ratio < 1.0) {
            return err("discard_ratio must lie in (0, 1)");
        }
        if self.min_tail < 1 || self.chunk_len < self.min_tail {
            return err("need chunk_len >= min_tail >= 1");
        }
        if self.candidates_per_doc < 1 || self.top_sentences < 1 || self.max_query_terms < 1 {
            return err("candidates_per_doc, top_sentences and max_query_terms must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.tfidf_high_percentile) {
            return err("tfidf_high_percentile must lie in [0, 1]");
        }
        if !(self.search_control_overlap > 0.0 && self.search_control_overlap <= 1.0) {
            return err("search_control_overlap must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub chunk_id: usize,
    /// Token index range.
    pub tokens: Range<usize>,
    /// Character range in the normalized text.
    pub span: Span,
    /// Sentences whose first token falls in this chunk.
    pub sentences: Vec<usize>,
}

/// Cuts the token sequence into `chunk_len`-token chunks; a final chunk
/// shorter than `min_tail` is merged into the previous one.
pub fn chunk_document(doc: &NormalizedDocument, cfg: &RetrievalConfig) -> Vec<Chunk> {
    let n = doc.tokens.len();
    if n == 0 {
        return Vec::new();
    }
    let chunk_len = cfg.chunk_len.max(1);
    let mut ranges: Vec<Range<usize>> = (0..n)
        .step_by(chunk_len)
        .map(|s| s..(s + chunk_len).min(n))
        .collect();
    if ranges.len() > 1 && ranges.last().unwrap().len() < cfg.min_tail {
        let tail = ranges.pop().unwrap();
        ranges.last_mut().unwrap().end = tail.end;
    }
    let mut chunks: Vec<Chunk> = ranges
        .into_iter()
        .enumerate()
        .map(|(chunk_id, tokens)| Chunk {
            chunk_id,
            span: Span::new(doc.tokens[tokens.start].span.start, doc.tokens[tokens.end - 1].span.end),
            tokens,
            sentences: Vec::new(),
        })
        .collect();
    let mut c = 0;
    for (s, sentence) in doc.sentences.iter().enumerate() {
        let first = sentence.tokens.start;
        while !chunks[c].tokens.contains(&first) {
            c += 1;
        }
        chunks[c].sentences.push(s);
    }
    chunks
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub doc_id: String,
    /// Sum of the document's hit scores over all issued queries.
    pub score: f64,
    /// Number of queries that returned the document.
    pub query_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub query: Query,
    pub control: Control,
    pub hits: Vec<(String, f64)>,
    /// Keywords came from the any-tag fallback.
    pub fallback: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RetrievalResult {
    pub candidates: Vec<Candidate>,
    pub queries: Vec<QueryRecord>,
}

/// Queries produced for one chunk, before search control.
pub fn chunk_queries(
    doc: &NormalizedDocument,
    chunk: &Chunk,
    index: &InvertedIndex,
    np_pattern: &NpPattern,
    cfg: &RetrievalConfig,
) -> Vec<(Query, bool)> {
    if chunk.sentences.is_empty() {
        return Vec::new();
    }
    let stats = ChunkTfIdf::new(doc, chunk, index, cfg.tfidf_high_percentile);
    let kept = rank_sentences(doc, chunk, cfg);
    let keywords = extract_keywords(doc, &kept, &stats, cfg);
    let phrases = extract_noun_phrases(doc, &kept, &stats, np_pattern);
    let queries = formulate_queries(chunk.chunk_id, &keywords, &phrases, cfg);
    queries
        .into_iter()
        .map(|q| {
            let fallback = q
                .sentence
                .and_then(|s| keywords.iter().find(|k| k.sentence == s))
                .is_some_and(|k| k.fallback);
            (q, fallback)
        })
        .collect()
}

/// Runs the full retrieval stage for one suspicious document.
pub fn retrieve_candidates(
    doc: &NormalizedDocument,
    index: &InvertedIndex,
    np_pattern: &NpPattern,
    cfg: &RetrievalConfig,
) -> RetrievalResult {
    let mut downloaded = Downloaded::default();
    let mut seen: HashSet<u32> = HashSet::new();
    let mut aggregate: HashMap<u32, (f64, usize)> = HashMap::new();
    let mut records = Vec::new();

    for chunk in chunk_document(doc, cfg) {
        let mut retrieved_now: Vec<u32> = Vec::new();
        for (query, fallback) in chunk_queries(doc, &chunk, index, np_pattern, cfg) {
            let control = search_control(&query, &downloaded, cfg);
            let mut hits = Vec::new();
            if control == Control::Keep {
                for (d, score) in index.search_docs(&query.terms, HITS_PER_QUERY) {
                    let entry = aggregate.entry(d).or_default();
                    entry.0 += score;
                    entry.1 += 1;
                    retrieved_now.push(d);
                    hits.push((index.doc(d).doc_id.clone(), score));
                }
            }
            records.push(QueryRecord {
                query,
                control,
                hits,
                fallback,
            });
        }
        for d in retrieved_now {
            if seen.insert(d) {
                downloaded.add(index.doc_terms(d).iter().map(|&t| index.term(t).to_string()));
            }
        }
    }

    let mut ranked: Vec<(u32, f64, usize)> = aggregate.into_iter().map(|(d, (s, c))| (d, s, c)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(cfg.candidates_per_doc);
    RetrievalResult {
        candidates: ranked
            .into_iter()
            .map(|(d, score, query_count)| Candidate {
                doc_id: index.doc(d).doc_id.clone(),
                score,
                query_count,
            })
            .collect(),
        queries: records,
    }
}
