//! Loading of language resource bundles (character map, stop words, suffix
//! rules, POS lexicon and noun-phrase pattern).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::normalize::normalize_str;

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("cannot read resource file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {msg}")]
    Syntax {
        file: &'static str,
        line: usize,
        msg: String,
    },
    #[error("character map is not single-pass: U+{0:04X} is both a rewrite target and a source")]
    ChainedRewrite(u32),
    #[error("unknown resource bundle `{0}` (not a directory and not a built-in bundle)")]
    UnknownBundle(String),
}

/// Reduced part-of-speech tagset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tag {
    Noun,
    Adj,
    Verb,
    Other,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Noun => "NOUN",
            Tag::Adj => "ADJ",
            Tag::Verb => "VERB",
            Tag::Other => "OTHER",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "NOUN" | "N" => Ok(Tag::Noun),
            "ADJ" | "A" => Ok(Tag::Adj),
            "VERB" | "V" => Ok(Tag::Verb),
            "OTHER" | "O" => Ok(Tag::Other),
            other => Err(format!("unknown tag `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharRewrite {
    Replace(char),
    Delete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: String,
    pub min_stem_len: usize,
    /// POS cue for out-of-lexicon words carrying this suffix.
    pub tag_hint: Option<Tag>,
    pub(crate) suffix_chars: usize,
}

impl SuffixRule {
    pub fn new(suffix: impl Into<String>, min_stem_len: usize, tag_hint: Option<Tag>) -> Self {
        let suffix = suffix.into();
        let suffix_chars = suffix.chars().count();
        Self {
            suffix,
            min_stem_len: min_stem_len.max(1),
            tag_hint,
            suffix_chars,
        }
    }
}

/// Tag pattern of the form `HEAD (TAIL|...){0,max_tail}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpPattern {
    pub head: Vec<Tag>,
    pub tail: Vec<Tag>,
    pub max_tail: usize,
}

impl Default for NpPattern {
    fn default() -> Self {
        Self {
            head: vec![Tag::Noun],
            tail: vec![Tag::Noun, Tag::Adj],
            max_tail: 3,
        }
    }
}

impl FromStr for NpPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (head, rest) = match s.find('(') {
            Some(pos) => (s[..pos].trim(), s[pos..].trim()),
            None => (s, ""),
        };
        let head = parse_alternatives(head)?;
        if rest.is_empty() {
            return Ok(Self {
                head,
                tail: Vec::new(),
                max_tail: 0,
            });
        }
        let close = rest.find(')').ok_or("unbalanced parenthesis")?;
        let tail = parse_alternatives(&rest[1..close])?;
        let quant = rest[close + 1..].trim();
        let inner = quant
            .strip_prefix('{')
            .and_then(|q| q.strip_suffix('}'))
            .ok_or("expected {0,K} quantifier")?;
        let (lo, hi) = inner.split_once(',').ok_or("expected {0,K} quantifier")?;
        if lo.trim() != "0" {
            return Err("only {0,K} quantifiers are supported".into());
        }
        let max_tail = hi.trim().parse().map_err(|_| "bad quantifier bound")?;
        Ok(Self {
            head,
            tail,
            max_tail,
        })
    }
}

fn parse_alternatives(s: &str) -> Result<Vec<Tag>, String> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    let tags = s
        .split('|')
        .map(|t| t.trim().parse::<Tag>())
        .collect::<Result<Vec<_>, _>>()?;
    if tags.is_empty() {
        return Err("empty tag alternative".into());
    }
    Ok(tags)
}

/// Immutable language data driving normalization, stemming and tagging.
#[derive(Debug, Clone)]
pub struct LanguageResources {
    id: String,
    pub(crate) char_map: HashMap<char, CharRewrite>,
    pub(crate) stopwords: HashSet<String>,
    pub(crate) suffix_rules: Vec<SuffixRule>,
    pub(crate) pos_lexicon: HashMap<String, Tag>,
    pub(crate) np_pattern: NpPattern,
}

struct BundleText<'a> {
    charmap: &'a str,
    stopwords: &'a str,
    suffixes: &'a str,
    lexicon: &'a str,
    np_pattern: Option<&'a str>,
}

const FA: BundleText<'static> = BundleText {
    charmap: include_str!("../../resources/fa/charmap"),
    stopwords: include_str!("../../resources/fa/stopwords"),
    suffixes: include_str!("../../resources/fa/suffixes"),
    lexicon: include_str!("../../resources/fa/lexicon"),
    np_pattern: Some(include_str!("../../resources/fa/np_pattern")),
};

const LATIN: BundleText<'static> = BundleText {
    charmap: include_str!("../../resources/latin/charmap"),
    stopwords: include_str!("../../resources/latin/stopwords"),
    suffixes: include_str!("../../resources/latin/suffixes"),
    lexicon: include_str!("../../resources/latin/lexicon"),
    np_pattern: Some(include_str!("../../resources/latin/np_pattern")),
};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_hex(file: &'static str, line: usize, field: &str) -> Result<char, ResourceError> {
    u32::from_str_radix(field, 16)
        .ok()
        .and_then(char::from_u32)
        .ok_or_else(|| ResourceError::Syntax {
            file,
            line,
            msg: format!("invalid codepoint `{field}`"),
        })
}

impl LanguageResources {
    /// Builds a bundle from in-memory parts. Entries are normalized through
    /// `char_map`, and suffix rules are sorted longest first.
    pub fn from_parts(
        id: impl Into<String>,
        char_map: HashMap<char, CharRewrite>,
        stopwords: impl IntoIterator<Item = String>,
        suffix_rules: Vec<SuffixRule>,
        pos_lexicon: impl IntoIterator<Item = (String, Tag)>,
        np_pattern: NpPattern,
    ) -> Result<Self, ResourceError> {
        for rewrite in char_map.values() {
            if let CharRewrite::Replace(dst) = rewrite {
                if char_map.contains_key(dst) {
                    return Err(ResourceError::ChainedRewrite(*dst as u32));
                }
            }
        }
        let norm = |s: &str| normalize_str(s, &char_map);
        let stopwords = stopwords.into_iter().map(|w| norm(&w)).collect();
        let mut suffix_rules: Vec<SuffixRule> = suffix_rules
            .into_iter()
            .map(|r| SuffixRule::new(norm(&r.suffix), r.min_stem_len, r.tag_hint))
            .filter(|r| r.suffix_chars > 0)
            .collect();
        // stable: equal-length suffixes keep file order
        suffix_rules.sort_by_key(|r| std::cmp::Reverse(r.suffix_chars));
        let pos_lexicon = pos_lexicon
            .into_iter()
            .map(|(w, t)| (norm(&w), t))
            .collect();
        Ok(Self {
            id: id.into(),
            char_map,
            stopwords,
            suffix_rules,
            pos_lexicon,
            np_pattern,
        })
    }

    fn parse(id: String, text: &BundleText<'_>) -> Result<Self, ResourceError> {
        let mut char_map = HashMap::new();
        for (line, l) in data_lines(text.charmap) {
            let mut fields = l.split_whitespace();
            let (Some(src), Some(dst), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(ResourceError::Syntax {
                    file: "charmap",
                    line,
                    msg: "expected `SRC_HEX DST_HEX|DEL`".into(),
                });
            };
            let src = parse_hex("charmap", line, src)?;
            let rewrite = if dst.eq_ignore_ascii_case("DEL") {
                CharRewrite::Delete
            } else {
                CharRewrite::Replace(parse_hex("charmap", line, dst)?)
            };
            char_map.insert(src, rewrite);
        }

        let stopwords: Vec<String> = data_lines(text.stopwords)
            .map(|(_, l)| l.to_string())
            .collect();

        let mut suffix_rules = Vec::new();
        for (line, l) in data_lines(text.suffixes) {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let syntax = |msg: &str| ResourceError::Syntax {
                file: "suffixes",
                line,
                msg: msg.to_string(),
            };
            if !(2..=3).contains(&fields.len()) {
                return Err(syntax("expected `SUFFIX MIN_LEN [TAG]`"));
            }
            let min_len: usize = fields[1]
                .parse()
                .map_err(|_| syntax("MIN_LEN must be a non-negative integer"))?;
            let tag = match fields.get(2) {
                Some(t) => Some(t.parse::<Tag>().map_err(|e| syntax(&e))?),
                None => None,
            };
            suffix_rules.push(SuffixRule::new(fields[0], min_len, tag));
        }

        let mut lexicon = Vec::new();
        for (line, l) in data_lines(text.lexicon) {
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(ResourceError::Syntax {
                    file: "lexicon",
                    line,
                    msg: "expected `SURFACE TAG`".into(),
                });
            }
            let tag = fields[1].parse::<Tag>().map_err(|msg| ResourceError::Syntax {
                file: "lexicon",
                line,
                msg,
            })?;
            lexicon.push((fields[0].to_string(), tag));
        }

        let np_pattern = match text.np_pattern.and_then(|t| data_lines(t).next()) {
            Some((line, l)) => l.parse().map_err(|msg| ResourceError::Syntax {
                file: "np_pattern",
                line,
                msg,
            })?,
            None => NpPattern::default(),
        };

        Self::from_parts(id, char_map, stopwords, suffix_rules, lexicon, np_pattern)
    }

    /// Loads a bundle directory laid out as described in `resources/README.md`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|source| ResourceError::Io { path, source })
        };
        let charmap = read("charmap")?;
        let stopwords = read("stopwords")?;
        let suffixes = read("suffixes")?;
        let lexicon = read("lexicon")?;
        let np_path = dir.join("np_pattern");
        let np_pattern = if np_path.exists() {
            Some(read("np_pattern")?)
        } else {
            None
        };
        let text = BundleText {
            charmap: &charmap,
            stopwords: &stopwords,
            suffixes: &suffixes,
            lexicon: &lexicon,
            np_pattern: np_pattern.as_deref(),
        };
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "bundle".into());
        Self::parse(format!("{name}@{}", digest(&text)), &text)
    }

    /// Built-in bundles: `fa` (Persian) and `latin` (synthetic test bundle).
    pub fn builtin(name: &str) -> Result<Self, ResourceError> {
        let text = match name {
            "fa" => &FA,
            "latin" => &LATIN,
            other => return Err(ResourceError::UnknownBundle(other.to_string())),
        };
        Self::parse(format!("{name}@{}", digest(text)), text)
    }

    pub fn persian() -> Self {
        Self::builtin("fa").expect("built-in Persian bundle is valid")
    }

    pub fn latin() -> Self {
        Self::builtin("latin").expect("built-in Latin bundle is valid")
    }

    /// Resolves `spec` as a bundle directory if one exists, else as a
    /// built-in bundle name.
    pub fn resolve(spec: &str) -> Result<Self, ResourceError> {
        let path = Path::new(spec);
        if path.is_dir() {
            Self::load_dir(path)
        } else {
            Self::builtin(spec)
        }
    }

    /// Bundle name plus a content digest, e.g. `fa@3f2a...`.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_stopword(&self, surface: &str) -> bool {
        self.stopwords.contains(surface)
    }

    pub fn suffix_rules(&self) -> &[SuffixRule] {
        &self.suffix_rules
    }

    pub fn lexicon_tag(&self, word: &str) -> Option<Tag> {
        self.pos_lexicon.get(word).copied()
    }

    /// Lexicon entries carrying `tag`, in sorted order.
    pub fn lexicon_words(&self, tag: Tag) -> Vec<&str> {
        let mut words: Vec<&str> = self
            .pos_lexicon
            .iter()
            .filter(|(_, t)| **t == tag)
            .map(|(w, _)| w.as_str())
            .collect();
        words.sort_unstable();
        words
    }

    pub fn stopword_list(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.stopwords.iter().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    pub fn np_pattern(&self) -> &NpPattern {
        &self.np_pattern
    }

    pub fn rewrite(&self, c: char) -> Option<CharRewrite> {
        self.char_map.get(&c).copied()
    }
}

fn digest(text: &BundleText<'_>) -> String {
    let mut h = Sha256::new();
    for part in [
        text.charmap,
        text.stopwords,
        text.suffixes,
        text.lexicon,
        text.np_pattern.unwrap_or(""),
    ] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    hex::encode(&h.finalize()[..6])
}
