//! Parameter sweeps over a corpus with gold annotations.

use std::collections::HashMap;
use std::io::Write;

use anyhow::{bail, Result};
use plagscan::alignment::{align, AlignmentConfig, Method};
use plagscan::corpus::Corpus;
use plagscan::evaluation::{evaluate, EvalSummary, GoldCase};
use plagscan::index::IndexBuilder;
use plagscan::{LanguageResources, NormalizedDocument};
use serde::Deserialize;

/// Grid file. Points are enumerated method by method, then n, then
/// threshold, in the order written. `n` applies to the n-gram methods only;
/// when it is empty they use their default order.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub methods: Vec<Method>,
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default = "default_merge_gap")]
    pub merge_gap: usize,
    /// Overrides the `--resources` option.
    #[serde(default)]
    pub resources: Option<String>,
}

fn default_merge_gap() -> usize {
    AlignmentConfig::default().merge_gap
}

impl Grid {
    pub fn points(&self) -> Result<Vec<AlignmentConfig>> {
        let mut out = Vec::new();
        for &method in &self.methods {
            let ns: Vec<Option<usize>> = if method == Method::Vsm || self.n.is_empty() {
                vec![None]
            } else {
                self.n.iter().copied().map(Some).collect()
            };
            for &n in &ns {
                for &threshold in &self.thresholds {
                    let cfg = AlignmentConfig {
                        method,
                        threshold,
                        n,
                        merge_gap: self.merge_gap,
                    };
                    cfg.validate()?;
                    out.push(cfg);
                }
            }
        }
        if out.is_empty() {
            bail!("the grid has no points (need at least one method and one threshold)");
        }
        Ok(out)
    }
}

pub struct LabRow {
    pub config: AlignmentConfig,
    pub summary: EvalSummary,
}

/// Aligns every pair of the corpus (its pairs file, or all pairs when it has
/// none) under each grid point and scores the result against the gold.
pub fn run_lab(corpus: &Corpus, res: &LanguageResources, points: &[AlignmentConfig]) -> Result<Vec<LabRow>> {
    let norm = |d: &plagscan::corpus::RawDocument| NormalizedDocument::new(d.doc_id.clone(), d.text.clone(), res);
    let src: Vec<NormalizedDocument> = corpus.src_docs.iter().map(norm).collect();
    let susp: Vec<NormalizedDocument> = corpus.susp_docs.iter().map(norm).collect();
    let mut b = IndexBuilder::new().resources_id(res.id());
    for d in &src {
        b.add(d, d.doc_id.clone())?;
    }
    let index = b.finish();

    let src_by_id: HashMap<&str, &NormalizedDocument> = src.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let susp_by_id: HashMap<&str, &NormalizedDocument> = susp.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let pairs: Vec<(&NormalizedDocument, &NormalizedDocument)> = if corpus.pairs.is_empty() {
        susp.iter().flat_map(|s| src.iter().map(move |r| (s, r))).collect()
    } else {
        corpus
            .pairs
            .iter()
            .map(|(s, r)| (susp_by_id[s.as_str()], src_by_id[r.as_str()]))
            .collect()
    };

    let mut rows = Vec::with_capacity(points.len());
    for cfg in points {
        let mut dets: Vec<GoldCase> = Vec::new();
        for (s, r) in &pairs {
            dets.extend(align(s, r, &index, cfg).iter().map(GoldCase::from));
        }
        rows.push(LabRow {
            config: cfg.clone(),
            summary: evaluate(&corpus.gold, &dets)?,
        });
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "method,n,threshold,precision,recall,granularity,plagdet";

pub fn write_csv(mut w: impl Write, rows: &[LabRow]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        let n = match r.config.method {
            Method::Vsm => String::new(),
            _ => r.config.ngram_order().to_string(),
        };
        let s = &r.summary;
        writeln!(
            w,
            "{},{n},{},{:.6},{:.6},{:.6},{:.6}",
            r.config.method, r.config.threshold, s.precision, s.recall, s.granularity, s.plagdet
        )?;
    }
    Ok(())
}
