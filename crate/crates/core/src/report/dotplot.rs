use std::fmt::Write;

use crate::alignment::{sentence_matches, AlignmentConfig};
use crate::index::IdfSource;
use crate::textnorm::NormalizedDocument;

/// Sentence-pair similarity markers for one document pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Dotplot {
    pub susp_sentences: usize,
    pub src_sentences: usize,
    /// `(susp sentence, src sentence, similarity)` at or above the threshold.
    pub markers: Vec<(usize, usize, f64)>,
}

impl Dotplot {
    pub fn new(susp: &NormalizedDocument, src: &NormalizedDocument, idf: &impl IdfSource, cfg: &AlignmentConfig) -> Self {
        Self {
            susp_sentences: susp.sentences.len(),
            src_sentences: src.sentences.len(),
            markers: sentence_matches(susp, src, idf, cfg)
                .into_iter()
                .map(|m| (m.susp, m.src, m.sim))
                .collect(),
        }
    }

    /// Suspicious sentences run along x, source sentences along y (top to
    /// bottom). Marker opacity follows similarity.
    pub fn to_svg(&self, title: &str) -> String {
        const CELL: f64 = 6.0;
        const MARGIN: f64 = 40.0;
        let w = self.susp_sentences.max(1) as f64 * CELL;
        let h = self.src_sentences.max(1) as f64 * CELL;
        let mut svg = String::new();
        let mut t = String::new();
        super::escape_html(title, &mut t);
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
            w + 2.0 * MARGIN,
            h + 2.0 * MARGIN,
            w + 2.0 * MARGIN,
            h + 2.0 * MARGIN
        );
        let _ = writeln!(svg, "<title>{t}</title>");
        let _ = writeln!(
            svg,
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{w}\" height=\"{h}\" fill=\"#fafafa\" stroke=\"#999\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">suspicious sentences ({})</text>",
            MARGIN + w / 2.0,
            MARGIN - 12.0,
            self.susp_sentences
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">source sentences ({})</text>",
            MARGIN - 12.0,
            MARGIN + h / 2.0,
            MARGIN - 12.0,
            MARGIN + h / 2.0,
            self.src_sentences
        );
        for &(i, j, sim) in &self.markers {
            let _ = writeln!(
                svg,
                "<rect class=\"m\" x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#c1121f\" fill-opacity=\"{:.3}\" data-i=\"{i}\" data-j=\"{j}\"/>",
                MARGIN + i as f64 * CELL,
                MARGIN + j as f64 * CELL,
                0.25 + 0.75 * sim.clamp(0.0, 1.0)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

pub fn dotplot_svg(
    susp: &NormalizedDocument,
    src: &NormalizedDocument,
    idf: &impl IdfSource,
    cfg: &AlignmentConfig,
) -> String {
    Dotplot::new(susp, src, idf, cfg).to_svg(&format!("{} vs {}", susp.doc_id, src.doc_id))
}
