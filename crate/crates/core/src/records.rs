//! Tab-separated detection and candidate files.

use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;

use crate::alignment::{Detection, Method};
use crate::evaluation::GoldCase;
use crate::retrieval::Candidate;
use crate::textnorm::Span;

pub const DETECTIONS_HEADER: &str =
    "susp_doc_id\tsusp_offset\tsusp_length\tsrc_doc_id\tsrc_offset\tsrc_length\tscore\tmethod";
pub const CANDIDATES_HEADER: &str = "susp_doc_id\trank\tsrc_doc_id\tscore\tquery_count";

#[derive(Debug, Error)]
pub enum RecordsError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// One line of a detections file.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRow {
    pub susp_doc_id: String,
    pub susp_span: Span,
    pub src_doc_id: String,
    pub src_span: Span,
    pub score: f64,
    pub method: Method,
}

impl From<&Detection> for DetectionRow {
    fn from(d: &Detection) -> Self {
        Self {
            susp_doc_id: d.susp_doc_id.clone(),
            susp_span: d.susp_span,
            src_doc_id: d.src_doc_id.clone(),
            src_span: d.src_span,
            score: d.score,
            method: d.method,
        }
    }
}

impl From<&DetectionRow> for GoldCase {
    fn from(r: &DetectionRow) -> Self {
        GoldCase::new(r.susp_doc_id.clone(), r.susp_span, r.src_doc_id.clone(), r.src_span)
    }
}

impl DetectionRow {
    fn sort_key(&self) -> (&str, usize, &str, usize, usize, usize) {
        (
            &self.susp_doc_id,
            self.susp_span.start,
            &self.src_doc_id,
            self.src_span.start,
            self.susp_span.end,
            self.src_span.end,
        )
    }
}

/// Canonical output order: suspicious document, suspicious offset, then
/// source document and offset.
pub fn sort_rows(rows: &mut [DetectionRow]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then(a.score.total_cmp(&b.score)));
}

pub fn write_detections(mut w: impl Write, rows: &[DetectionRow]) -> io::Result<()> {
    writeln!(w, "{DETECTIONS_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}",
            r.susp_doc_id,
            r.susp_span.start,
            r.susp_span.len(),
            r.src_doc_id,
            r.src_span.start,
            r.src_span.len(),
            r.score,
            r.method
        )?;
    }
    Ok(())
}

pub fn read_detections(r: impl BufRead) -> Result<Vec<DetectionRow>, RecordsError> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if n == 1 && line == DETECTIONS_HEADER {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let syntax = |msg: String| RecordsError::Syntax { line: n, msg };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            return Err(syntax(format!("expected 8 fields, found {}", f.len())));
        }
        let num = |k: usize| -> Result<usize, RecordsError> {
            f[k].parse().map_err(|_| syntax(format!("field {} is not a non-negative integer: {:?}", k + 1, f[k])))
        };
        let (so, sl, ro, rl) = (num(1)?, num(2)?, num(4)?, num(5)?);
        let score: f64 = f[6].parse().map_err(|_| syntax(format!("bad score {:?}", f[6])))?;
        let method: Method = f[7].parse().map_err(syntax)?;
        rows.push(DetectionRow {
            susp_doc_id: f[0].to_string(),
            susp_span: Span::new(so, so + sl),
            src_doc_id: f[3].to_string(),
            src_span: Span::new(ro, ro + rl),
            score,
            method,
        });
    }
    Ok(rows)
}

pub fn read_detections_file(path: &Path) -> Result<Vec<DetectionRow>, RecordsError> {
    read_detections(io::BufReader::new(std::fs::File::open(path)?))
}

pub fn write_candidates<'a>(
    mut w: impl Write,
    per_doc: impl IntoIterator<Item = (&'a str, &'a [Candidate])>,
) -> io::Result<()> {
    writeln!(w, "{CANDIDATES_HEADER}")?;
    for (susp, cands) in per_doc {
        for (rank, c) in cands.iter().enumerate() {
            writeln!(w, "{susp}\t{}\t{}\t{:.6}\t{}", rank + 1, c.doc_id, c.score, c.query_count)?;
        }
    }
    Ok(())
}
