use std::ops::Range;

use super::resources::{LanguageResources, Tag};
use super::{Span, Token};

pub const ZWNJ: char = '\u{200c}';

const TERMINATORS: [char; 4] = ['.', '!', '?', '\u{061f}'];

/// A sentence: its character span in the normalized text and the indices of
/// the tokens it contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub span: Span,
    pub tokens: Range<usize>,
}

impl Sentence {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Segmentation {
    pub sentences: Vec<Sentence>,
    pub tokens: Vec<Token>,
}

fn is_combining_mark(c: char) -> bool {
    matches!(c,
        '\u{0300}'..='\u{036f}'
        | '\u{0610}'..='\u{061a}'
        | '\u{064b}'..='\u{065f}'
        | '\u{0670}'
        | '\u{06d6}'..='\u{06ed}')
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == ZWNJ || is_combining_mark(c)
}

fn is_terminator(c: char) -> bool {
    TERMINATORS.contains(&c)
}

/// Splits normalized text into sentences and tokens.
///
/// A run of terminators (`.`, `!`, `?`, `؟`) ends a sentence when it is
/// followed by whitespace or the end of text, so `3.14` stays whole. A blank
/// line (paragraph break) also ends a sentence. Sentence spans are trimmed of
/// surrounding whitespace and sentences without tokens are dropped.
/// Tokens are maximal runs of letters, digits, combining marks and ZWNJ, with
/// ZWNJ trimmed from both ends.
pub fn segment(norm_text: &str, resources: &LanguageResources) -> Segmentation {
    let chars: Vec<char> = norm_text.chars().collect();
    let tokens = tokenize(&chars, resources);

    let mut raw_sentences: Vec<Span> = Vec::new();
    let mut start: Option<usize> = None;
    let mut last_content = 0usize;
    let close = |start: &mut Option<usize>, end: usize, out: &mut Vec<Span>| {
        if let Some(s) = start.take() {
            if end > s {
                out.push(Span::new(s, end));
            }
        }
    };

    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            if c == '\n' {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_whitespace() && chars[j] != '\n' {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '\n' {
                    close(&mut start, last_content, &mut raw_sentences);
                }
            }
            i += 1;
            continue;
        }
        if start.is_none() {
            start = Some(i);
        }
        if is_terminator(c) {
            let mut j = i;
            while j < chars.len() && is_terminator(chars[j]) {
                j += 1;
            }
            last_content = j;
            if j == chars.len() || chars[j].is_whitespace() {
                close(&mut start, j, &mut raw_sentences);
            }
            i = j;
            continue;
        }
        last_content = i + 1;
        i += 1;
    }
    close(&mut start, last_content, &mut raw_sentences);

    let mut sentences = Vec::with_capacity(raw_sentences.len());
    let mut t = 0;
    for span in raw_sentences {
        while t < tokens.len() && tokens[t].span.start < span.start {
            t += 1;
        }
        let first = t;
        while t < tokens.len() && tokens[t].span.end <= span.end {
            t += 1;
        }
        if t > first {
            sentences.push(Sentence {
                span,
                tokens: first..t,
            });
        }
    }

    Segmentation { sentences, tokens }
}

fn tokenize(chars: &[char], resources: &LanguageResources) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_word_char(chars[i]) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && is_word_char(chars[j]) {
            j += 1;
        }
        let (mut s, mut e) = (i, j);
        while s < e && chars[s] == ZWNJ {
            s += 1;
        }
        while e > s && chars[e - 1] == ZWNJ {
            e -= 1;
        }
        if e > s {
            let surface: String = chars[s..e].iter().collect();
            let is_stopword = resources.is_stopword(&surface);
            tokens.push(Token {
                stem: surface.clone(),
                surface,
                tag: Tag::Other,
                span: Span::new(s, e),
                is_stopword,
            });
        }
        i = j;
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textnorm::testing::tiny_latin;

    fn texts(text: &str, seg: &Segmentation) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        seg.sentences
            .iter()
            .map(|s| chars[s.span.start..s.span.end].iter().collect())
            .collect()
    }

    #[test]
    fn two_persian_terminators() {
        let fa = LanguageResources::persian();
        let seg = segment("الف. ب؟", &fa);
        assert_eq!(seg.sentences.len(), 2);
        assert_eq!(texts("الف. ب؟", &seg), vec!["الف.", "ب؟"]);
    }

    #[test]
    fn whitespace_tokens_have_spans() {
        let seg = segment("a b  c", &tiny_latin());
        let spans: Vec<(usize, usize)> = seg.tokens.iter().map(|t| (t.span.start, t.span.end)).collect();
        assert_eq!(spans, vec![(0, 1), (2, 3), (5, 6)]);
        assert_eq!(seg.sentences.len(), 1);
        assert_eq!(seg.sentences[0].tokens, 0..3);
    }

    #[test]
    fn empty_input_gives_nothing() {
        let seg = segment("", &tiny_latin());
        assert!(seg.sentences.is_empty() && seg.tokens.is_empty());
        let seg = segment("  \n\n ...", &tiny_latin());
        assert!(seg.sentences.is_empty() && seg.tokens.is_empty());
    }

    #[test]
    fn decimal_point_does_not_split() {
        let seg = segment("pi is 3.14 today. next", &tiny_latin());
        assert_eq!(texts("pi is 3.14 today. next", &seg), vec!["pi is 3.14 today.", "next"]);
    }

    #[test]
    fn paragraph_break_splits() {
        let text = "first line\nstill first\n \nsecond";
        let seg = segment(text, &tiny_latin());
        assert_eq!(texts(text, &seg), vec!["first line\nstill first", "second"]);
    }

    #[test]
    fn terminator_runs_stay_together() {
        let text = "what?! yes...";
        let seg = segment(text, &tiny_latin());
        assert_eq!(texts(text, &seg), vec!["what?!", "yes..."]);
    }

    #[test]
    fn zwnj_inside_token_is_not_a_boundary() {
        let fa = LanguageResources::persian();
        let seg = segment("\u{200c}کتاب\u{200c}ها\u{200c} خوب", &fa);
        let surfaces: Vec<&str> = seg.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, vec!["کتاب\u{200c}ها", "خوب"]);
        assert_eq!(seg.tokens[0].span, Span::new(1, 8));
    }

    #[test]
    fn stopwords_flagged() {
        let seg = segment("the cat and dog", &LanguageResources::latin());
        let flags: Vec<bool> = seg.tokens.iter().map(|t| t.is_stopword).collect();
        assert_eq!(flags, vec![true, false, true, false]);
    }
}
