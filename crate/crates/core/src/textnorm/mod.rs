//! Offset-preserving normalization, segmentation, stemming and POS tagging
//! for Arabic-script text.
//!
//! Every character of the normalized text remembers the raw character it
//! came from, so positions found downstream (in normalized coordinates) can
//! be reported against the original document.

mod normalize;
mod resources;
mod segment;
mod stem;

use serde::{Deserialize, Serialize};

pub use normalize::{normalize, Normalized};
pub use resources::{CharRewrite, LanguageResources, NpPattern, ResourceError, SuffixRule, Tag};
pub use segment::{segment, Segmentation, Sentence, ZWNJ};
pub use stem::{pos_tag, stem};

/// Half-open character range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end, "inverted span {start}..{end}");
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlap(&self, other: &Span) -> usize {
        self.end.min(other.end).saturating_sub(self.start.max(other.start))
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub stem: String,
    pub tag: Tag,
    /// Character range in the normalized text.
    pub span: Span,
    pub is_stopword: bool,
}

/// A document after normalization, segmentation, stemming and tagging.
#[derive(Debug, Clone)]
pub struct NormalizedDocument {
    pub doc_id: String,
    pub raw_text: String,
    pub norm_text: String,
    /// `offset_map[i]` is the raw character index that produced normalized
    /// character `i`.
    pub offset_map: Vec<usize>,
    pub sentences: Vec<Sentence>,
    pub tokens: Vec<Token>,
    raw_len: usize,
    norm_byte_offsets: Vec<usize>,
}

impl NormalizedDocument {
    pub fn new(doc_id: impl Into<String>, raw_text: impl Into<String>, resources: &LanguageResources) -> Self {
        let raw_text = raw_text.into();
        let Normalized { text, offset_map } = normalize(&raw_text, resources);
        let Segmentation { sentences, tokens } = segment(&text, resources);
        let tokens = tokens
            .into_iter()
            .map(|mut t| {
                t.stem = stem(&t.surface, resources);
                t
            })
            .collect();
        let tokens = pos_tag(tokens, resources);
        let mut norm_byte_offsets: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        norm_byte_offsets.push(text.len());
        Self {
            doc_id: doc_id.into(),
            raw_len: raw_text.chars().count(),
            raw_text,
            norm_text: text,
            offset_map,
            sentences,
            tokens,
            norm_byte_offsets,
        }
    }

    /// Length of the raw text in characters.
    pub fn raw_char_len(&self) -> usize {
        self.raw_len
    }

    pub fn norm_char_len(&self) -> usize {
        self.offset_map.len()
    }

    /// Slice of the normalized text covered by `span`.
    pub fn norm_slice(&self, span: Span) -> &str {
        &self.norm_text[self.norm_byte_offsets[span.start]..self.norm_byte_offsets[span.end]]
    }

    pub fn sentence_text(&self, sentence: usize) -> &str {
        self.norm_slice(self.sentences[sentence].span)
    }

    pub fn sentence_tokens(&self, sentence: usize) -> &[Token] {
        &self.tokens[self.sentences[sentence].tokens.clone()]
    }

    /// Maps a non-empty normalized span to the raw-text span running from
    /// the raw origin of its first character through that of its last.
    pub fn to_raw_span(&self, span: Span) -> Span {
        assert!(!span.is_empty() && span.end <= self.offset_map.len());
        Span::new(self.offset_map[span.start], self.offset_map[span.end - 1] + 1)
    }

    /// Number of tokens (including stop words).
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }
}
