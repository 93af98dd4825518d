//! Corpora in the PAN directory layout, and a deterministic generator of
//! synthetic corpora with exact gold annotations.
//!
//! ```text
//! corpus/
//!   src/*.txt      source documents
//!   susp/*.txt     suspicious documents
//!   pairs          "suspicious-file source-file" per line (optional)
//!   xml/*.xml      one annotation file per suspicious document (optional)
//! ```

mod generate;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::evaluation::{gold_xml, load_gold, GoldCase, GoldError};

pub use generate::{generate, GenError, GenSpec, Obfuscation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            text: text.into(),
        }
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub src_docs: Vec<RawDocument>,
    pub susp_docs: Vec<RawDocument>,
    pub pairs: Vec<(String, String)>,
    pub gold: Vec<GoldCase>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing directory {0}")]
    MissingDir(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected two file names")]
    PairsSyntax { path: PathBuf, line: usize },
    #[error("pair references unknown document {0}")]
    DanglingPair(String),
    #[error(transparent)]
    Gold(#[from] GoldError),
    #[error("gold case references unknown document {0}")]
    DanglingGold(String),
    #[error("gold case {susp} -> {src} lies outside its document")]
    GoldOutOfBounds { susp: String, src: String },
}

impl CorpusError {
    /// File-system problems as opposed to malformed content.
    pub fn is_io(&self) -> bool {
        matches!(self, CorpusError::Io { .. } | CorpusError::MissingDir(_) | CorpusError::Gold(GoldError::Io { .. }))
    }
}

/// Reads every `*.txt` file of `dir` in name order; the file name is the
/// document id.
pub fn read_text_dir(dir: &Path) -> Result<Vec<RawDocument>, CorpusError> {
    if !dir.is_dir() {
        return Err(CorpusError::MissingDir(dir.to_path_buf()));
    }
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CorpusError::Io { path, source }
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io(dir))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io(dir))?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"));
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).map_err(io(&p))?;
            let doc_id = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            Ok(RawDocument { doc_id, text })
        })
        .collect()
}

fn parse_pairs(text: &str, path: &Path) -> Result<Vec<(String, String)>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            [a, b] => out.push((a.to_string(), b.to_string())),
            _ => {
                return Err(CorpusError::PairsSyntax {
                    path: path.to_path_buf(),
                    line: i + 1,
                })
            }
        }
    }
    Ok(out)
}

/// Reads a corpus directory. `src/` and `susp/` are required; a missing
/// `pairs` file or `xml/` directory means no pairs or no gold.
pub fn load_corpus(dir: &Path) -> Result<Corpus, CorpusError> {
    let src_docs = read_text_dir(&dir.join("src"))?;
    let susp_docs = read_text_dir(&dir.join("susp"))?;
    let pairs_path = dir.join("pairs");
    let pairs = if pairs_path.is_file() {
        let text = std::fs::read_to_string(&pairs_path).map_err(|source| CorpusError::Io {
            path: pairs_path.clone(),
            source,
        })?;
        parse_pairs(&text, &pairs_path)?
    } else {
        Vec::new()
    };
    let xml = dir.join("xml");
    let gold = if xml.is_dir() { load_gold(&xml)? } else { Vec::new() };
    let corpus = Corpus {
        src_docs,
        susp_docs,
        pairs,
        gold,
    };
    corpus.validate()?;
    Ok(corpus)
}

impl Corpus {
    pub fn src(&self, doc_id: &str) -> Option<&RawDocument> {
        self.src_docs.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn susp(&self, doc_id: &str) -> Option<&RawDocument> {
        self.susp_docs.iter().find(|d| d.doc_id == doc_id)
    }

    /// Checks pair and gold references and gold bounds.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let src_len: HashMap<&str, usize> = self.src_docs.iter().map(|d| (d.doc_id.as_str(), d.char_len())).collect();
        let susp_len: HashMap<&str, usize> =
            self.susp_docs.iter().map(|d| (d.doc_id.as_str(), d.char_len())).collect();
        for (s, r) in &self.pairs {
            for (id, known) in [(s, susp_len.contains_key(s.as_str())), (r, src_len.contains_key(r.as_str()))] {
                if !known {
                    return Err(CorpusError::DanglingPair(id.clone()));
                }
            }
        }
        for c in &self.gold {
            let sl = susp_len
                .get(c.susp_doc_id.as_str())
                .ok_or_else(|| CorpusError::DanglingGold(c.susp_doc_id.clone()))?;
            let rl = src_len
                .get(c.src_doc_id.as_str())
                .ok_or_else(|| CorpusError::DanglingGold(c.src_doc_id.clone()))?;
            if c.susp_range.end > *sl || c.src_range.end > *rl {
                return Err(CorpusError::GoldOutOfBounds {
                    susp: c.susp_doc_id.clone(),
                    src: c.src_doc_id.clone(),
                });
            }
        }
        Ok(())
    }

    /// Gold cases of one suspicious document.
    pub fn gold_for<'a>(&'a self, susp_doc_id: &'a str) -> impl Iterator<Item = &'a GoldCase> + 'a {
        self.gold.iter().filter(move |c| c.susp_doc_id == susp_doc_id)
    }

    /// Writes the corpus in the directory layout. Existing files with the
    /// same names are overwritten.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        for sub in ["src", "susp", "xml"] {
            std::fs::create_dir_all(dir.join(sub))?;
        }
        for d in &self.src_docs {
            std::fs::write(dir.join("src").join(&d.doc_id), &d.text)?;
        }
        for d in &self.susp_docs {
            std::fs::write(dir.join("susp").join(&d.doc_id), &d.text)?;
            let cases: Vec<GoldCase> = self.gold_for(&d.doc_id).cloned().collect();
            let stem = Path::new(&d.doc_id).file_stem().unwrap_or_default().to_string_lossy().into_owned();
            std::fs::write(dir.join("xml").join(format!("{stem}.xml")), gold_xml(&d.doc_id, &cases))?;
        }
        let pairs: String = self.pairs.iter().map(|(s, r)| format!("{s} {r}\n")).collect();
        std::fs::write(dir.join("pairs"), pairs)
    }
}
