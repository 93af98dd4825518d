//! PAN character-level measures: macro precision and recall, granularity and
//! plagdet, plus the XML gold-annotation format.
//!
//! A case or detection stands for the set of characters it covers in its
//! suspicious document and in its source document. Characters are keyed by
//! the document pair and the side, so a detection only ever counts toward
//! cases of its own suspicious/source pair.

mod gold;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::alignment::Detection;
use crate::textnorm::Span;

pub use gold::{gold_xml, load_gold, load_gold_file, GoldError};

/// A source/suspicious passage pair, used for gold cases and for detections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoldCase {
    pub susp_doc_id: String,
    pub susp_range: Span,
    pub src_doc_id: String,
    pub src_range: Span,
}

impl GoldCase {
    pub fn new(susp_doc_id: impl Into<String>, susp_range: Span, src_doc_id: impl Into<String>, src_range: Span) -> Self {
        Self {
            susp_doc_id: susp_doc_id.into(),
            susp_range,
            src_doc_id: src_doc_id.into(),
            src_range,
        }
    }

    fn char_count(&self) -> usize {
        self.susp_range.len() + self.src_range.len()
    }

    /// True when the two belong to the same document pair and share at
    /// least one character on either side.
    pub fn overlaps(&self, other: &GoldCase) -> bool {
        self.susp_doc_id == other.susp_doc_id
            && self.src_doc_id == other.src_doc_id
            && (self.susp_range.overlap(&other.susp_range) > 0 || self.src_range.overlap(&other.src_range) > 0)
    }
}

impl From<&Detection> for GoldCase {
    fn from(d: &Detection) -> Self {
        GoldCase::new(d.susp_doc_id.clone(), d.susp_span, d.src_doc_id.clone(), d.src_span)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("empty range in {0}")]
    EmptyRange(String),
    #[error("suspicious and source ranges overlap within one passage of {0}")]
    SelfOverlap(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalSummary {
    pub recall: f64,
    pub precision: f64,
    pub granularity: f64,
    pub f_measure: f64,
    pub plagdet: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Side {
    Susp,
    Src,
}

/// Sorted, disjoint intervals per `(susp doc, src doc, side)`.
#[derive(Default)]
struct Coverage<'a>(BTreeMap<(&'a str, &'a str, Side), Vec<Span>>);

impl<'a> Coverage<'a> {
    fn of(cases: &'a [GoldCase]) -> Self {
        let mut raw: BTreeMap<(&str, &str, Side), Vec<Span>> = BTreeMap::new();
        for c in cases {
            raw.entry((&c.susp_doc_id, &c.src_doc_id, Side::Susp)).or_default().push(c.susp_range);
            raw.entry((&c.susp_doc_id, &c.src_doc_id, Side::Src)).or_default().push(c.src_range);
        }
        for spans in raw.values_mut() {
            spans.sort();
            let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
            for s in spans.drain(..) {
                match merged.last_mut() {
                    Some(last) if s.start <= last.end => last.end = last.end.max(s.end),
                    _ => merged.push(s),
                }
            }
            *spans = merged;
        }
        Coverage(raw)
    }

    fn covered(&self, c: &GoldCase, side: Side) -> usize {
        let span = match side {
            Side::Susp => c.susp_range,
            Side::Src => c.src_range,
        };
        let Some(spans) = self.0.get(&(c.susp_doc_id.as_str(), c.src_doc_id.as_str(), side)) else {
            return 0;
        };
        let first = spans.partition_point(|s| s.end <= span.start);
        spans[first..]
            .iter()
            .take_while(|s| s.start < span.end)
            .map(|s| s.overlap(&span))
            .sum()
    }

    fn covered_case(&self, c: &GoldCase) -> usize {
        self.covered(c, Side::Susp) + self.covered(c, Side::Src)
    }
}

fn check(cases: &[GoldCase], what: &str) -> Result<(), EvalError> {
    for c in cases {
        let label = || format!("{what} {} -> {}", c.susp_doc_id, c.src_doc_id);
        if c.susp_range.is_empty() || c.src_range.is_empty() {
            return Err(EvalError::EmptyRange(label()));
        }
        if c.susp_doc_id == c.src_doc_id && c.susp_range.overlap(&c.src_range) > 0 {
            return Err(EvalError::SelfOverlap(label()));
        }
    }
    Ok(())
}

/// Macro-averaged `(precision, recall)`.
pub fn macro_precision_recall(gold: &[GoldCase], det: &[GoldCase]) -> Result<(f64, f64), EvalError> {
    check(gold, "gold case")?;
    check(det, "detection")?;
    match (gold.is_empty(), det.is_empty()) {
        (true, true) => return Ok((1.0, 1.0)),
        (false, true) => return Ok((0.0, 0.0)),
        (true, false) => return Ok((0.0, 1.0)),
        _ => {}
    }
    let gold_cov = Coverage::of(gold);
    let det_cov = Coverage::of(det);
    let frac = |cases: &[GoldCase], cov: &Coverage| -> f64 {
        cases.iter().map(|c| cov.covered_case(c) as f64 / c.char_count() as f64).sum::<f64>() / cases.len() as f64
    };
    Ok((frac(det, &gold_cov), frac(gold, &det_cov)))
}

/// Mean number of detections per detected gold case; 1 when nothing is
/// detected.
pub fn granularity(gold: &[GoldCase], det: &[GoldCase]) -> f64 {
    let (mut detected, mut hits) = (0usize, 0usize);
    for s in gold {
        let n = det.iter().filter(|r| s.overlaps(r)).count();
        if n > 0 {
            detected += 1;
            hits += n;
        }
    }
    if detected == 0 {
        1.0
    } else {
        hits as f64 / detected as f64
    }
}

/// Balanced F1; 0 when both inputs are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn plagdet(precision: f64, recall: f64, granularity: f64) -> f64 {
    f_measure(precision, recall) / (1.0 + granularity).log2()
}

pub fn evaluate(gold: &[GoldCase], det: &[GoldCase]) -> Result<EvalSummary, EvalError> {
    let (precision, recall) = macro_precision_recall(gold, det)?;
    let granularity = granularity(gold, det);
    Ok(EvalSummary {
        recall,
        precision,
        granularity,
        f_measure: f_measure(precision, recall),
        plagdet: plagdet(precision, recall, granularity),
    })
}
