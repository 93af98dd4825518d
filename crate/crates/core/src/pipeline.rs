//! End-to-end detection: candidate retrieval followed by alignment against
//! every candidate.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::alignment::{align, Detection};
use crate::config::Config;
use crate::index::InvertedIndex;
use crate::records::{sort_rows, DetectionRow};
use crate::retrieval::{retrieve_candidates, RetrievalResult};
use crate::textnorm::{LanguageResources, NormalizedDocument};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read source {path}: {source}")]
    Source {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("source {0} is not available")]
    MissingSource(String),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Results for one suspicious document.
#[derive(Debug, Clone)]
pub struct DocResult {
    pub susp_doc_id: String,
    pub retrieval: RetrievalResult,
    pub detections: Vec<Detection>,
}

/// Runs the two stages against an index. Source documents are normalized on
/// first use and cached for the detector's lifetime.
pub struct Detector<'a> {
    index: &'a InvertedIndex,
    resources: &'a LanguageResources,
    config: &'a Config,
    root: Option<PathBuf>,
    cache: Vec<OnceLock<NormalizedDocument>>,
}

impl<'a> Detector<'a> {
    /// Sources are read from `root` joined with each document's indexed path.
    pub fn new(index: &'a InvertedIndex, resources: &'a LanguageResources, config: &'a Config, root: &Path) -> Self {
        Self {
            index,
            resources,
            config,
            root: Some(root.to_path_buf()),
            cache: (0..index.n_docs()).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Sources come from already normalized documents, matched by doc id.
    pub fn with_documents(
        index: &'a InvertedIndex,
        resources: &'a LanguageResources,
        config: &'a Config,
        sources: impl IntoIterator<Item = NormalizedDocument>,
    ) -> Self {
        let cache: Vec<OnceLock<NormalizedDocument>> = (0..index.n_docs()).map(|_| OnceLock::new()).collect();
        for doc in sources {
            if let Some(d) = index.doc_number(&doc.doc_id) {
                let _ = cache[d as usize].set(doc);
            }
        }
        Self {
            index,
            resources,
            config,
            root: None,
            cache,
        }
    }

    fn source(&self, d: u32) -> Result<&NormalizedDocument, PipelineError> {
        let cell = &self.cache[d as usize];
        if let Some(doc) = cell.get() {
            return Ok(doc);
        }
        let entry = self.index.doc(d);
        let root = self.root.as_ref().ok_or_else(|| PipelineError::MissingSource(entry.doc_id.clone()))?;
        let path = root.join(&entry.path);
        let raw = std::fs::read_to_string(&path).map_err(|source| PipelineError::Source { path, source })?;
        // two workers may race here; both produce the same document
        Ok(cell.get_or_init(|| NormalizedDocument::new(entry.doc_id.clone(), raw, self.resources)))
    }

    pub fn detect_one(&self, susp: &NormalizedDocument) -> Result<DocResult, PipelineError> {
        let retrieval = retrieve_candidates(susp, self.index, self.resources.np_pattern(), &self.config.retrieval);
        let mut detections = Vec::new();
        for cand in &retrieval.candidates {
            let d = self
                .index
                .doc_number(&cand.doc_id)
                .ok_or_else(|| PipelineError::MissingSource(cand.doc_id.clone()))?;
            let src = self.source(d)?;
            detections.extend(align(susp, src, self.index, &self.config.alignment));
        }
        detections.sort_by(|a, b| {
            (a.susp_span.start, &a.src_doc_id, a.src_span.start).cmp(&(b.susp_span.start, &b.src_doc_id, b.src_span.start))
        });
        Ok(DocResult {
            susp_doc_id: susp.doc_id.clone(),
            retrieval,
            detections,
        })
    }

    /// Processes every document, in parallel when `config.workers > 1`.
    /// Results come back in input order whatever the worker count.
    pub fn detect_all(&self, susps: &[NormalizedDocument]) -> Result<Vec<DocResult>, PipelineError> {
        if self.config.workers <= 1 {
            return susps.iter().map(|s| self.detect_one(s)).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.workers)
            .build()
            .map_err(|e| PipelineError::Pool(e.to_string()))?;
        pool.install(|| susps.par_iter().map(|s| self.detect_one(s)).collect())
    }
}

/// All detections of `results` in canonical file order.
pub fn detection_rows(results: &[DocResult]) -> Vec<DetectionRow> {
    let mut rows: Vec<DetectionRow> = results.iter().flat_map(|r| r.detections.iter().map(DetectionRow::from)).collect();
    sort_rows(&mut rows);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::IndexBuilder;

    fn setup() -> (Vec<NormalizedDocument>, LanguageResources) {
        let res = LanguageResources::latin();
        let texts = [
            ("a.txt", "The castle tower stood over the bridge. A garden of flowers filled the market. Doctors repaired the engine."),
            ("b.txt", "Cheese and bread and soup. The piano melody filled the hall. Violins sang."),
            ("c.txt", "Mountain villages sit in the valley. The river runs to the harbor."),
        ];
        let docs = texts.iter().map(|(id, t)| NormalizedDocument::new(*id, *t, &res)).collect();
        (docs, res)
    }

    #[test]
    fn identical_document_is_found_whole() {
        let (docs, res) = setup();
        let mut b = IndexBuilder::new();
        for d in &docs {
            b.add(d, d.doc_id.clone()).unwrap();
        }
        let index = b.finish();
        let cfg = Config::default();
        let det = Detector::with_documents(&index, &res, &cfg, docs.clone());
        let susp = NormalizedDocument::new("s.txt", docs[0].raw_text.clone(), &res);
        let r = det.detect_one(&susp).unwrap();
        let full: Vec<&Detection> = r.detections.iter().filter(|d| d.src_doc_id == "a.txt").collect();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].susp_span.len(), susp.raw_char_len());
        assert_eq!(full[0].src_span.len(), docs[0].raw_char_len());
    }

    #[test]
    fn disjoint_document_yields_nothing() {
        let (docs, res) = setup();
        let mut b = IndexBuilder::new();
        for d in &docs {
            b.add(d, d.doc_id.clone()).unwrap();
        }
        let index = b.finish();
        let cfg = Config::default();
        let det = Detector::with_documents(&index, &res, &cfg, docs);
        let susp = NormalizedDocument::new("s.txt", "Umbrella zebra quokka.", &res);
        let r = det.detect_one(&susp).unwrap();
        assert!(r.retrieval.candidates.is_empty());
        assert!(r.detections.is_empty());
    }

    #[test]
    fn sources_load_from_disk_and_missing_files_error() {
        let (docs, res) = setup();
        let dir = tempfile::tempdir().unwrap();
        let mut b = IndexBuilder::new();
        for d in &docs {
            std::fs::write(dir.path().join(&d.doc_id), &d.raw_text).unwrap();
            b.add(d, d.doc_id.clone()).unwrap();
        }
        let index = b.finish();
        let cfg = Config::default();
        let susp = NormalizedDocument::new("s.txt", docs[1].raw_text.clone(), &res);
        let det = Detector::new(&index, &res, &cfg, dir.path());
        assert!(!det.detect_one(&susp).unwrap().detections.is_empty());

        std::fs::remove_file(dir.path().join("b.txt")).unwrap();
        let det = Detector::new(&index, &res, &cfg, dir.path());
        assert!(matches!(det.detect_one(&susp), Err(PipelineError::Source { .. })));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let (docs, res) = setup();
        let mut b = IndexBuilder::new();
        for d in &docs {
            b.add(d, d.doc_id.clone()).unwrap();
        }
        let index = b.finish();
        let susps: Vec<NormalizedDocument> = docs
            .iter()
            .enumerate()
            .map(|(i, d)| NormalizedDocument::new(format!("s{i}.txt"), d.raw_text.clone(), &res))
            .collect();
        let run = |workers| {
            let cfg = Config { workers, ..Default::default() };
            let det = Detector::with_documents(&index, &res, &cfg, docs.clone());
            detection_rows(&det.detect_all(&susps).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
