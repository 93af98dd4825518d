use std::collections::HashSet;

use super::{NounPhrase, RetrievalConfig, SentenceKeywords};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryOrigin {
    KeywordSentence,
    NounPhrase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub terms: Vec<String>,
    pub chunk_id: usize,
    pub origin: QueryOrigin,
    /// Source sentence for keyword queries.
    pub sentence: Option<usize>,
}

/// One keyword query per selected sentence (capped at `max_query_terms`,
/// sentence order kept) and one noun-phrase query filled from the
/// best-scoring phrases. Empty queries are dropped.
pub fn formulate_queries(
    chunk_id: usize,
    keywords: &[SentenceKeywords],
    phrases: &[NounPhrase],
    cfg: &RetrievalConfig,
) -> Vec<Query> {
    let mut queries: Vec<Query> = keywords
        .iter()
        .filter(|k| !k.terms.is_empty())
        .map(|k| Query {
            terms: k.terms.iter().take(cfg.max_query_terms).cloned().collect(),
            chunk_id,
            origin: QueryOrigin::KeywordSentence,
            sentence: Some(k.sentence),
        })
        .collect();

    let mut seen = HashSet::new();
    let mut np_terms = Vec::new();
    'fill: for phrase in phrases {
        for term in &phrase.terms {
            if np_terms.len() == cfg.max_query_terms {
                break 'fill;
            }
            if seen.insert(term.as_str()) {
                np_terms.push(term.clone());
            }
        }
    }
    if !np_terms.is_empty() {
        queries.push(Query {
            terms: np_terms,
            chunk_id,
            origin: QueryOrigin::NounPhrase,
            sentence: None,
        });
    }
    queries
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Keep,
    Drop,
}

/// Term sets of the documents retrieved so far for one suspicious document.
#[derive(Debug, Clone, Default)]
pub struct Downloaded {
    docs: Vec<HashSet<String>>,
}

impl Downloaded {
    pub fn add(&mut self, terms: impl IntoIterator<Item = String>) {
        self.docs.push(terms.into_iter().collect());
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

/// Drops the query when a single downloaded document already contains at
/// least `search_control_overlap` of its distinct terms.
pub fn search_control(query: &super::Query, downloaded: &Downloaded, cfg: &RetrievalConfig) -> Control {
    let distinct: HashSet<&str> = query.terms.iter().map(String::as_str).collect();
    if distinct.is_empty() {
        return Control::Drop;
    }
    let covered = downloaded.docs.iter().any(|doc| {
        let hit = distinct.iter().filter(|t| doc.contains(**t)).count();
        hit as f64 / distinct.len() as f64 >= cfg.search_control_overlap
    });
    if covered {
        Control::Drop
    } else {
        Control::Keep
    }
}
