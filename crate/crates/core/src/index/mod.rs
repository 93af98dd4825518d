//! TF-IDF inverted index over the source collection.
//!
//! Terms are stems of non-stop-word tokens, TF is the raw in-document count
//! and IDF is smoothed as `ln((N + 1) / (df + 1)) + 1`. Search scores are the
//! cosine between the query's and the document's TF-IDF vectors.

mod persist;

use std::collections::{BTreeMap, HashMap};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::textnorm::NormalizedDocument;

pub use persist::{FORMAT_VERSION, MAGIC};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error("document id or path `{0}` contains a tab or newline")]
    InvalidDocId(String),
    #[error("index I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}: bad magic bytes, not an index file")]
    BadMagic(&'static str),
    #[error("index format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("{0}: file is truncated")]
    Truncated(&'static str),
    #[error("corrupt index: {0}")]
    Corrupt(String),
}

/// Anything that can supply inverse document frequencies.
pub trait IdfSource {
    fn idf(&self, term: &str) -> f64;
}

/// Smoothed IDF, strictly positive and defined for unseen terms (`df = 0`).
pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    ((n_docs as f64 + 1.0) / (df as f64 + 1.0)).ln() + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    /// Internal document number; documents are numbered in `doc_id` order.
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocEntry {
    pub doc_id: String,
    pub path: String,
    pub token_count: u64,
    /// SHA-256 (hex) of the document's sorted `stem\ttf` lines.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    pub doc_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    docs: Vec<DocEntry>,
    terms: Vec<String>,
    term_ids: HashMap<String, u32>,
    postings: Vec<Vec<Posting>>,
    doc_norms: Vec<f64>,
    doc_terms: Vec<Vec<u32>>,
    source_root: String,
    resources_id: String,
}

/// Collects documents before the index is frozen.
#[derive(Debug, Default)]
pub struct IndexBuilder {
    docs: BTreeMap<String, (String, u64, BTreeMap<String, u32>)>,
    source_root: String,
    resources_id: String,
}

impl IndexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Directory that document paths are relative to.
    pub fn source_root(mut self, root: impl Into<String>) -> Self {
        self.source_root = root.into();
        self
    }

    pub fn resources_id(mut self, id: impl Into<String>) -> Self {
        self.resources_id = id.into();
        self
    }

    pub fn add(&mut self, doc: &NormalizedDocument, path: impl Into<String>) -> Result<(), IndexError> {
        let path = path.into();
        for s in [&doc.doc_id, &path] {
            if s.contains(['\t', '\n', '\r']) || s.is_empty() {
                return Err(IndexError::InvalidDocId(s.clone()));
            }
        }
        if self.docs.contains_key(&doc.doc_id) {
            return Err(IndexError::DuplicateDocId(doc.doc_id.clone()));
        }
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for t in doc.tokens.iter().filter(|t| !t.is_stopword) {
            *tf.entry(t.stem.clone()).or_default() += 1;
        }
        self.docs
            .insert(doc.doc_id.clone(), (path, doc.token_count() as u64, tf));
        Ok(())
    }

    pub fn finish(self) -> InvertedIndex {
        let mut docs = Vec::with_capacity(self.docs.len());
        let mut by_term: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        for (doc_no, (doc_id, (path, token_count, tf))) in self.docs.into_iter().enumerate() {
            let digest = term_digest(tf.iter().map(|(t, c)| (t.as_str(), *c)));
            for (term, count) in tf {
                by_term.entry(term).or_default().push(Posting {
                    doc: doc_no as u32,
                    tf: count,
                });
            }
            docs.push(DocEntry {
                doc_id,
                path,
                token_count,
                digest,
            });
        }
        let (terms, postings): (Vec<String>, Vec<Vec<Posting>>) = by_term.into_iter().unzip();
        InvertedIndex::assemble(docs, terms, postings, self.source_root, self.resources_id)
    }
}

fn term_digest<'a>(tf: impl Iterator<Item = (&'a str, u32)>) -> String {
    let mut h = Sha256::new();
    for (term, count) in tf {
        h.update(term.as_bytes());
        h.update(b"\t");
        h.update(count.to_string().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Builds an index whose document paths are the document ids.
pub fn build_index(corpus: &[NormalizedDocument]) -> Result<InvertedIndex, IndexError> {
    let mut builder = IndexBuilder::new();
    for doc in corpus {
        builder.add(doc, doc.doc_id.clone())?;
    }
    Ok(builder.finish())
}

impl InvertedIndex {
    /// Derives norms, term ids and the forward term lists from postings.
    /// Terms must be sorted and postings sorted by document.
    fn assemble(
        docs: Vec<DocEntry>,
        terms: Vec<String>,
        postings: Vec<Vec<Posting>>,
        source_root: String,
        resources_id: String,
    ) -> Self {
        let n = docs.len();
        let mut sq = vec![0.0f64; n];
        let mut doc_terms: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (term_id, plist) in postings.iter().enumerate() {
            let idf = smoothed_idf(n, plist.len());
            for p in plist {
                let w = p.tf as f64 * idf;
                sq[p.doc as usize] += w * w;
                doc_terms[p.doc as usize].push(term_id as u32);
            }
        }
        let doc_norms = sq.into_iter().map(f64::sqrt).collect();
        let term_ids = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self {
            docs,
            terms,
            term_ids,
            postings,
            doc_norms,
            doc_terms,
            source_root,
            resources_id,
        }
    }

    /// Number of indexed documents (N).
    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn df(&self, term: &str) -> usize {
        self.term_ids
            .get(term)
            .map_or(0, |&id| self.postings[id as usize].len())
    }

    pub fn idf(&self, term: &str) -> f64 {
        smoothed_idf(self.n_docs(), self.df(term))
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.term_ids.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.term_ids
            .get(term)
            .map_or(&[], |&id| self.postings[id as usize].as_slice())
    }

    pub fn docs(&self) -> &[DocEntry] {
        &self.docs
    }

    pub fn doc(&self, doc: u32) -> &DocEntry {
        &self.docs[doc as usize]
    }

    pub fn doc_number(&self, doc_id: &str) -> Option<u32> {
        self.docs
            .binary_search_by(|d| d.doc_id.as_str().cmp(doc_id))
            .ok()
            .map(|i| i as u32)
    }

    /// L2 norm of the document's TF-IDF vector.
    pub fn doc_norm(&self, doc: u32) -> f64 {
        self.doc_norms[doc as usize]
    }

    /// Sorted distinct term ids of a document.
    pub fn doc_terms(&self, doc: u32) -> &[u32] {
        &self.doc_terms[doc as usize]
    }

    pub fn source_root(&self) -> &str {
        &self.source_root
    }

    pub fn resources_id(&self) -> &str {
        &self.resources_id
    }

    /// Cosine ranking of documents against the query's TF-IDF vector.
    /// Returns at most `k` hits with non-zero overlap, by descending score
    /// and then ascending `doc_id`.
    pub fn search<S: AsRef<str>>(&self, query: &[S], k: usize) -> Vec<SearchHit> {
        self.search_docs(query, k)
            .into_iter()
            .map(|(doc, score)| SearchHit {
                doc_id: self.docs[doc as usize].doc_id.clone(),
                score,
            })
            .collect()
    }

    /// As [`search`](Self::search), returning internal document numbers.
    pub fn search_docs<S: AsRef<str>>(&self, query: &[S], k: usize) -> Vec<(u32, f64)> {
        if k == 0 || query.is_empty() || self.docs.is_empty() {
            return Vec::new();
        }
        let mut qtf: BTreeMap<&str, u32> = BTreeMap::new();
        for t in query {
            *qtf.entry(t.as_ref()).or_default() += 1;
        }
        let mut qnorm_sq = 0.0;
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for (term, tf) in &qtf {
            let idf = self.idf(term);
            let qw = *tf as f64 * idf;
            qnorm_sq += qw * qw;
            for p in self.postings(term) {
                *acc.entry(p.doc).or_default() += qw * p.tf as f64 * idf;
            }
        }
        let qnorm = qnorm_sq.sqrt();
        let mut hits: Vec<(u32, f64)> = acc
            .into_iter()
            .filter(|(_, dot)| *dot > 0.0)
            .map(|(doc, dot)| (doc, (dot / (qnorm * self.doc_norms[doc as usize])).min(1.0)))
            .collect();
        // doc numbers follow doc_id order, so ascending number == ascending id
        hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        hits.truncate(k);
        hits
    }
}

impl IdfSource for InvertedIndex {
    fn idf(&self, term: &str) -> f64 {
        InvertedIndex::idf(self, term)
    }
}

/// IDF computed over an ad-hoc set of documents, used when no background
/// index is available (e.g. aligning a single pair).
#[derive(Debug, Clone)]
pub struct LocalIdf {
    n_docs: usize,
    df: HashMap<String, usize>,
}

impl LocalIdf {
    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a NormalizedDocument>) -> Self {
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut n_docs = 0;
        for doc in docs {
            n_docs += 1;
            let mut stems: Vec<&str> = doc
                .tokens
                .iter()
                .filter(|t| !t.is_stopword)
                .map(|t| t.stem.as_str())
                .collect();
            stems.sort_unstable();
            stems.dedup();
            for s in stems {
                *df.entry(s.to_string()).or_default() += 1;
            }
        }
        Self { n_docs, df }
    }
}

impl IdfSource for LocalIdf {
    fn idf(&self, term: &str) -> f64 {
        smoothed_idf(self.n_docs, self.df.get(term).copied().unwrap_or(0))
    }
}

/// IDF of 1 for every term.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformIdf;

impl IdfSource for UniformIdf {
    fn idf(&self, _term: &str) -> f64 {
        1.0
    }
}
