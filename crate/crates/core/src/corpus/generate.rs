use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Corpus, RawDocument};
use crate::evaluation::GoldCase;
use crate::textnorm::{LanguageResources, Span, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Obfuscation {
    #[default]
    None,
    /// Tokens of every copied sentence are permuted.
    Shuffle,
    /// Tokens are swapped for their synonym-table entry.
    Synonym,
}

/// Parameters of a synthetic corpus.
///
/// Each content word is drawn either from `vocabulary` (common words, with
/// probability `common_rate`) or from a pool of `extra_words` generated rare
/// words. Rare words are what make a document recognizable, much like the
/// long tail of a natural vocabulary. On top of that every source owns
/// `topic_words` further pseudo-words of its own, which fill a `topic_rate`
/// share of its content words, the way a text returns to its subject.
/// Suspicious-document filler around the planted passages uses common words
/// only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenSpec {
    pub seed: u64,
    pub n_src: usize,
    pub n_susp: usize,
    pub cases_per_susp: usize,
    /// Passage length in sentences.
    pub passage_len: usize,
    pub obfuscation: Obfuscation,
    pub vocabulary: Vec<String>,
    /// Generated pseudo-words appended to `vocabulary`.
    pub extra_words: usize,
    /// Pseudo-words owned by each source document.
    pub topic_words: usize,
    pub function_words: Vec<String>,
    /// Inclusive bounds on sentences per source document.
    pub src_sentences: (usize, usize),
    /// Inclusive bounds on words per sentence.
    pub sentence_len: (usize, usize),
    /// Inclusive bounds on filler sentences before each passage.
    pub filler_sentences: (usize, usize),
    pub function_word_rate: f64,
    pub common_rate: f64,
    pub topic_rate: f64,
    pub synonym_prob: f64,
    pub paragraph_rate: f64,
}

impl Default for GenSpec {
    fn default() -> Self {
        let res = LanguageResources::latin();
        let vocabulary = [Tag::Noun, Tag::Adj, Tag::Verb]
            .into_iter()
            .flat_map(|t| res.lexicon_words(t))
            .map(str::to_string)
            .collect();
        Self {
            seed: 7,
            n_src: 50,
            n_susp: 10,
            cases_per_susp: 3,
            passage_len: 10,
            obfuscation: Obfuscation::None,
            vocabulary,
            extra_words: 3000,
            topic_words: 16,
            function_words: res.stopword_list().into_iter().map(str::to_string).collect(),
            src_sentences: (30, 50),
            sentence_len: (10, 18),
            filler_sentences: (6, 12),
            function_word_rate: 0.3,
            common_rate: 0.5,
            topic_rate: 0.2,
            synonym_prob: 0.3,
            paragraph_rate: 0.15,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    Invalid(String),
    #[error("no source of at least {0} sentences after retries")]
    PassageTooLong(usize),
}

const SOURCE_RETRIES: usize = 16;

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Invalid(m.to_string()));
        if self.n_src == 0 || self.n_susp == 0 || self.cases_per_susp == 0 || self.passage_len == 0 {
            return bad("counts must be >= 1");
        }
        if self.vocabulary.is_empty() && self.extra_words == 0 {
            return bad("vocabulary must not be empty");
        }
        for (name, (lo, hi)) in [
            ("src_sentences", self.src_sentences),
            ("sentence_len", self.sentence_len),
            ("filler_sentences", self.filler_sentences),
        ] {
            if lo > hi || (lo == 0 && name != "filler_sentences") {
                return Err(GenError::Invalid(format!("{name} must be a non-empty range of positive values")));
            }
        }
        for p in [self.function_word_rate, self.common_rate, self.topic_rate, self.synonym_prob, self.paragraph_rate] {
            if !(0.0..=1.0).contains(&p) {
                return bad("rates must lie in [0, 1]");
            }
        }
        if self.function_word_rate > 0.0 && self.function_words.is_empty() {
            return bad("function_word_rate > 0 needs function words");
        }
        Ok(())
    }
}

/// Sentences as word lists, plus the separator that follows each sentence.
struct Text {
    sentences: Vec<Vec<String>>,
    seps: Vec<&'static str>,
}

/// Renders `sentences` and returns the character span of each one.
fn render(sentences: &[Vec<String>], seps: &[&str], out: &mut String, out_chars: &mut usize) -> Vec<Span> {
    let mut spans = Vec::with_capacity(sentences.len());
    for (i, s) in sentences.iter().enumerate() {
        let text = format!("{}.", s.join(" "));
        let len = text.chars().count();
        spans.push(Span::new(*out_chars, *out_chars + len));
        out.push_str(&text);
        *out_chars += len;
        if i + 1 < sentences.len() {
            out.push_str(seps[i]);
            *out_chars += seps[i].chars().count();
        }
    }
    spans
}

/// Distinct pseudo-words of two or three consonant-vowel syllables plus a
/// final "s", which the Latin suffix rules tag as plural nouns. No "e" is
/// used, so no other suffix rule can fire.
fn pseudo_words(n: usize, taken: &HashSet<&str>, rng: &mut ChaCha8Rng) -> Vec<String> {
    const CONSONANTS: &[u8] = b"bdfgklmnprtvz";
    const VOWELS: &[u8] = b"aiou";
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.gen_range(2..=3);
        let mut w = String::with_capacity(2 * syllables + 1);
        for _ in 0..syllables {
            w.push(*CONSONANTS.choose(rng).unwrap_or(&b'b') as char);
            w.push(*VOWELS.choose(rng).unwrap_or(&b'a') as char);
        }
        w.push('s');
        if !taken.contains(w.as_str()) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

struct Generator<'a> {
    spec: &'a GenSpec,
    rng: ChaCha8Rng,
    common: Vec<String>,
    rare: Vec<String>,
    /// `topic_words` consecutive entries per source.
    topics: Vec<String>,
    synonyms: HashMap<String, String>,
}

impl<'a> Generator<'a> {
    fn new(spec: &'a GenSpec) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let taken: HashSet<&str> = spec.vocabulary.iter().chain(&spec.function_words).map(String::as_str).collect();
        let mut rare = pseudo_words(spec.extra_words + spec.n_src * spec.topic_words, &taken, &mut rng);
        let topics = rare.split_off(spec.extra_words);
        let common = spec.vocabulary.clone();
        let mut synonyms = HashMap::new();
        for g in [&common, &rare, &topics] {
            for pair in g.chunks_exact(2) {
                synonyms.insert(pair[0].clone(), pair[1].clone());
                synonyms.insert(pair[1].clone(), pair[0].clone());
            }
        }
        Self {
            spec,
            rng,
            common,
            rare,
            topics,
            synonyms,
        }
    }

    /// `source` selects the topic words of that source document; filler has
    /// none and draws from the common words only.
    fn sentence(&mut self, source: Option<usize>) -> Vec<String> {
        let (lo, hi) = self.spec.sentence_len;
        let len = self.rng.gen_range(lo..=hi);
        let k = self.spec.topic_words;
        let rare = source.is_some();
        (0..len)
            .map(|_| {
                if self.rng.gen_bool(self.spec.function_word_rate) {
                    return self.spec.function_words.choose(&mut self.rng).cloned().unwrap_or_default();
                }
                if let Some(i) = source.filter(|_| k > 0) {
                    if self.rng.gen_bool(self.spec.topic_rate) {
                        return self.topics[i * k + self.rng.gen_range(0..k)].clone();
                    }
                }
                let common = !rare
                    || self.rare.is_empty()
                    || (!self.common.is_empty() && self.rng.gen_bool(self.spec.common_rate));
                if common && self.common.is_empty() {
                    return self.rare[self.rng.gen_range(0..self.rare.len())].clone();
                }
                let pool = if common { &self.common } else { &self.rare };
                pool[self.rng.gen_range(0..pool.len())].clone()
            })
            .collect()
    }

    fn text(&mut self, n: usize, source: Option<usize>) -> Text {
        let sentences: Vec<Vec<String>> = (0..n).map(|_| self.sentence(source)).collect();
        let seps = (0..n).map(|_| self.separator()).collect();
        Text { sentences, seps }
    }

    fn separator(&mut self) -> &'static str {
        if self.rng.gen_bool(self.spec.paragraph_rate) {
            "\n\n"
        } else {
            " "
        }
    }

    fn source(&mut self, i: usize) -> Result<Text, GenError> {
        let (lo, hi) = self.spec.src_sentences;
        for _ in 0..SOURCE_RETRIES {
            let n = self.rng.gen_range(lo..=hi);
            if n >= self.spec.passage_len {
                return Ok(self.text(n, Some(i)));
            }
        }
        Err(GenError::PassageTooLong(self.spec.passage_len))
    }

    fn obfuscate(&mut self, sentences: &[Vec<String>]) -> Vec<Vec<String>> {
        let mut out = sentences.to_vec();
        match self.spec.obfuscation {
            Obfuscation::None => {}
            Obfuscation::Shuffle => {
                for s in &mut out {
                    s.shuffle(&mut self.rng);
                }
            }
            Obfuscation::Synonym => {
                // at most 30% of the passage tokens change, whatever the draw
                let total: usize = out.iter().map(Vec::len).sum();
                let mut budget = (total as f64 * 0.3).floor() as usize;
                for w in out.iter_mut().flatten() {
                    if budget == 0 {
                        break;
                    }
                    if let Some(syn) = self.synonyms.get(w.as_str()) {
                        if self.rng.gen_bool(self.spec.synonym_prob) {
                            *w = syn.clone();
                            budget -= 1;
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn src_name(i: usize) -> String {
    format!("source-document{:05}.txt", i + 1)
}

pub fn susp_name(i: usize) -> String {
    format!("suspicious-document{:05}.txt", i + 1)
}

/// Builds a corpus from `spec`. The same spec always yields the same corpus.
pub fn generate(spec: &GenSpec) -> Result<Corpus, GenError> {
    spec.validate()?;
    let mut g = Generator::new(spec);

    let mut sources = Vec::with_capacity(spec.n_src);
    let mut src_docs = Vec::with_capacity(spec.n_src);
    let mut src_spans = Vec::with_capacity(spec.n_src);
    for i in 0..spec.n_src {
        let text = g.source(i)?;
        let mut raw = String::new();
        let spans = render(&text.sentences, &text.seps, &mut raw, &mut 0);
        src_docs.push(RawDocument::new(src_name(i), raw));
        src_spans.push(spans);
        sources.push(text);
    }

    let mut susp_docs = Vec::with_capacity(spec.n_susp);
    let mut gold = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..spec.n_susp {
        let name = susp_name(i);
        let mut order: Vec<usize> = (0..spec.n_src).collect();
        order.shuffle(&mut g.rng);
        let picks: Vec<usize> = (0..spec.cases_per_susp).map(|k| order[k % order.len()]).collect();

        let mut raw = String::new();
        let mut chars = 0usize;
        for (k, &s) in picks.iter().enumerate() {
            let (lo, hi) = spec.filler_sentences;
            let n_fill = g.rng.gen_range(lo..=hi);
            let filler = g.text(n_fill, None);
            if k > 0 {
                let sep = g.separator();
                raw.push_str(sep);
                chars += sep.chars().count();
            }
            if n_fill > 0 {
                render(&filler.sentences, &filler.seps, &mut raw, &mut chars);
                let sep = g.separator();
                raw.push_str(sep);
                chars += sep.chars().count();
            }

            let src = &sources[s];
            let start = g.rng.gen_range(0..=src.sentences.len() - spec.passage_len);
            let end = start + spec.passage_len;
            let copied = g.obfuscate(&src.sentences[start..end]);
            let spans = render(&copied, &src.seps[start..end], &mut raw, &mut chars);
            gold.push(GoldCase::new(
                name.clone(),
                Span::new(spans[0].start, spans[spans.len() - 1].end),
                src_name(s),
                Span::new(src_spans[s][start].start, src_spans[s][end - 1].end),
            ));
        }
        let (lo, hi) = spec.filler_sentences;
        let n_tail = g.rng.gen_range(lo..=hi);
        if n_tail > 0 {
            let sep = g.separator();
            raw.push_str(sep);
            chars += sep.chars().count();
            let tail = g.text(n_tail, None);
            render(&tail.sentences, &tail.seps, &mut raw, &mut chars);
        }
        raw.push('\n');

        let used: BTreeSet<usize> = picks.iter().copied().collect();
        let unused: Vec<usize> = (0..spec.n_src).filter(|s| !used.contains(s)).collect();
        let negative = unused.choose(&mut g.rng).copied();
        let mut srcs: Vec<usize> = used.into_iter().chain(negative).collect();
        srcs.sort_unstable();
        pairs.extend(srcs.into_iter().map(|s| (name.clone(), src_name(s))));
        susp_docs.push(RawDocument::new(name, raw));
    }

    let corpus = Corpus {
        src_docs,
        susp_docs,
        pairs,
        gold,
    };
    debug_assert!(corpus.validate().is_ok());
    Ok(corpus)
}
