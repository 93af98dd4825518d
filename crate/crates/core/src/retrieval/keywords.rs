use std::collections::{HashMap, HashSet};

use crate::index::IdfSource;
use crate::textnorm::{NormalizedDocument, NpPattern, Tag, Token};

use super::{Chunk, RetrievalConfig};

/// TF-IDF of the words in one chunk: TF counted over the chunk's sentences,
/// IDF from the background collection. Stop words weigh 0.
#[derive(Debug, Clone)]
pub struct ChunkTfIdf {
    by_stem: HashMap<String, f64>,
    /// The "high TF-IDF" cut-off.
    pub threshold: f64,
}

impl ChunkTfIdf {
    pub fn new(doc: &NormalizedDocument, chunk: &Chunk, idf: &impl IdfSource, high_percentile: f64) -> Self {
        let mut tf: HashMap<&str, u32> = HashMap::new();
        for &s in &chunk.sentences {
            for t in doc.sentence_tokens(s).iter().filter(|t| !t.is_stopword) {
                *tf.entry(t.stem.as_str()).or_default() += 1;
            }
        }
        let by_stem: HashMap<String, f64> = tf
            .into_iter()
            .map(|(stem, count)| (stem.to_string(), count as f64 * idf.idf(stem)))
            .collect();
        let mut values: Vec<f64> = by_stem.values().copied().collect();
        values.sort_by(f64::total_cmp);
        let threshold = percentile(&values, high_percentile).unwrap_or(f64::INFINITY);
        Self { by_stem, threshold }
    }

    /// Builds the table directly, for tests and callers with precomputed weights.
    pub fn from_table(by_stem: HashMap<String, f64>, threshold: f64) -> Self {
        Self { by_stem, threshold }
    }

    pub fn weight(&self, token: &Token) -> f64 {
        if token.is_stopword {
            return 0.0;
        }
        self.by_stem.get(&token.stem).copied().unwrap_or(0.0)
    }

    pub fn is_high(&self, token: &Token) -> bool {
        !token.is_stopword && self.weight(token) >= self.threshold
    }
}

/// Percentile of sorted values with linear interpolation between the two
/// nearest ranks (`p` in `[0, 1]`).
pub fn percentile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Drops the `floor(discard_ratio * n)` lowest-scoring sentences of the chunk,
/// scoring each by normalized length plus normalized noun count. On equal
/// scores the later sentence goes first. At least one sentence is kept.
/// Returns kept sentence indices in document order.
pub fn rank_sentences(doc: &NormalizedDocument, chunk: &Chunk, cfg: &RetrievalConfig) -> Vec<usize> {
    let n = chunk.sentences.len();
    if n == 0 {
        return Vec::new();
    }
    let stats: Vec<(usize, usize)> = chunk
        .sentences
        .iter()
        .map(|&s| {
            let toks = doc.sentence_tokens(s);
            (toks.len(), toks.iter().filter(|t| t.tag == Tag::Noun).count())
        })
        .collect();
    let max_len = stats.iter().map(|s| s.0).max().unwrap_or(1).max(1) as f64;
    let max_nouns = stats.iter().map(|s| s.1).max().unwrap_or(0).max(1) as f64;
    let scores: Vec<f64> = stats
        .iter()
        .map(|&(len, nouns)| len as f64 / max_len + nouns as f64 / max_nouns)
        .collect();

    let discard = ((cfg.discard_ratio * n as f64).floor() as usize).min(n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    // ascending score; among equals the later position is removed first
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)));
    let dropped: HashSet<usize> = order[..discard].iter().copied().collect();
    (0..n)
        .filter(|i| !dropped.contains(i))
        .map(|i| chunk.sentences[i])
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceKeywords {
    pub sentence: usize,
    /// Keyword stems in sentence order, deduplicated.
    pub terms: Vec<String>,
    /// The chunk had no nouns; terms are the sentence's high TF-IDF words of
    /// any tag.
    pub fallback: bool,
}

/// Picks the `top_sentences` kept sentences with the highest maximum word
/// TF-IDF and extracts their keywords: every noun, plus adjectives and verbs
/// whose TF-IDF reaches the chunk's high threshold.
pub fn extract_keywords(
    doc: &NormalizedDocument,
    kept: &[usize],
    stats: &ChunkTfIdf,
    cfg: &RetrievalConfig,
) -> Vec<SentenceKeywords> {
    let max_weight = |s: usize| {
        doc.sentence_tokens(s)
            .iter()
            .map(|t| stats.weight(t))
            .fold(0.0f64, f64::max)
    };
    let mut ranked: Vec<(usize, f64)> = kept.iter().map(|&s| (s, max_weight(s))).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(cfg.top_sentences);
    let mut selected: Vec<usize> = ranked.into_iter().map(|(s, _)| s).collect();
    selected.sort_unstable();

    let has_nouns = kept
        .iter()
        .any(|&s| doc.sentence_tokens(s).iter().any(|t| t.tag == Tag::Noun && !t.is_stopword));

    selected
        .into_iter()
        .map(|s| {
            let toks = doc.sentence_tokens(s);
            let picked: Vec<&Token> = if has_nouns {
                toks.iter()
                    .filter(|t| !t.is_stopword)
                    .filter(|t| match t.tag {
                        Tag::Noun => true,
                        Tag::Adj | Tag::Verb => stats.is_high(t),
                        Tag::Other => false,
                    })
                    .collect()
            } else {
                let mut high: Vec<&Token> = toks.iter().filter(|t| stats.is_high(t)).collect();
                if high.is_empty() {
                    // the chunk's high words all sit in other sentences
                    high = toks
                        .iter()
                        .filter(|t| !t.is_stopword)
                        .max_by(|a, b| stats.weight(a).total_cmp(&stats.weight(b)))
                        .into_iter()
                        .collect();
                }
                high
            };
            SentenceKeywords {
                sentence: s,
                terms: dedup_in_order(picked.iter().map(|t| t.stem.as_str())),
                fallback: !has_nouns,
            }
        })
        .collect()
}

fn dedup_in_order<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    items
        .filter(|s| seen.insert(*s))
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NounPhrase {
    pub sentence: usize,
    /// Token index of the phrase head.
    pub start: usize,
    pub terms: Vec<String>,
    /// Sum of member TF-IDF weights.
    pub score: f64,
}

/// Greedy left-to-right maximal matches of the noun-phrase tag pattern in
/// the kept sentences. Stop words never take part in a phrase. Sorted by
/// descending score, earlier phrases first on ties.
pub fn extract_noun_phrases(
    doc: &NormalizedDocument,
    kept: &[usize],
    stats: &ChunkTfIdf,
    pattern: &NpPattern,
) -> Vec<NounPhrase> {
    let mut phrases = Vec::new();
    for &s in kept {
        let range = doc.sentences[s].tokens.clone();
        let toks = &doc.tokens[range.clone()];
        for (start, end) in match_pattern(toks, pattern) {
            let members = &toks[start..end];
            phrases.push(NounPhrase {
                sentence: s,
                start: range.start + start,
                terms: members.iter().map(|t| t.stem.clone()).collect(),
                score: members.iter().map(|t| stats.weight(t)).sum(),
            });
        }
    }
    phrases.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.start.cmp(&b.start)));
    phrases
}

/// Local `(start, end)` token ranges matching `pattern`, non-overlapping.
pub(crate) fn match_pattern(toks: &[Token], pattern: &NpPattern) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let t = &toks[i];
        if t.is_stopword || !pattern.head.contains(&t.tag) {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < toks.len()
            && j - i <= pattern.max_tail
            && !toks[j].is_stopword
            && pattern.tail.contains(&toks[j].tag)
        {
            j += 1;
        }
        out.push((i, j));
        i = j;
    }
    out
}
