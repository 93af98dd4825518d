//! Static HTML reports for one suspicious document and SVG dot plots for a
//! document pair.

mod dotplot;

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::records::DetectionRow;
use crate::textnorm::Span;

pub use dotplot::{dotplot_svg, Dotplot};

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("detection {index} ({side} span {start}..{end}) lies outside its document of {len} chars")]
    OutOfBounds {
        index: usize,
        side: &'static str,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("detection {index} belongs to {found}, not {expected}")]
    WrongDocument { index: usize, found: String, expected: String },
}

/// The statistics block of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub words: usize,
    pub paragraphs: usize,
    /// Characters covered by at least one detection.
    pub plagiarized_chars: usize,
    pub total_chars: usize,
    /// `plagiarized_chars / total_chars`, 0 for an empty document.
    pub ratio: f64,
}

/// Per-source totals for the legend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceEntry {
    pub src_doc_id: String,
    pub detections: usize,
    /// Suspicious-side characters attributed to this source (union).
    pub chars: usize,
    pub color: &'static str,
}

const PALETTE: [&str; 10] = [
    "#f4a261", "#90be6d", "#4d908e", "#f9c74f", "#e76f51", "#a8dadc", "#cdb4db", "#ffafcc", "#b5838d", "#8ecae6",
];

/// Length of the union of `spans`.
pub fn union_len(spans: impl IntoIterator<Item = Span>) -> usize {
    let mut v: Vec<Span> = spans.into_iter().filter(|s| !s.is_empty()).collect();
    v.sort();
    let mut total = 0;
    let mut cur: Option<Span> = None;
    for s in v {
        match cur {
            Some(ref mut c) if s.start <= c.end => c.end = c.end.max(s.end),
            _ => {
                if let Some(c) = cur {
                    total += c.len();
                }
                cur = Some(s);
            }
        }
    }
    total + cur.map_or(0, |c| c.len())
}

fn paragraph_count(text: &str) -> usize {
    let mut count = 0;
    let mut in_para = false;
    for line in text.lines() {
        if line.trim().is_empty() {
            in_para = false;
        } else if !in_para {
            in_para = true;
            count += 1;
        }
    }
    count
}

pub fn summarize(text: &str, rows: &[DetectionRow]) -> ReportSummary {
    let total_chars = text.chars().count();
    let plagiarized_chars = union_len(rows.iter().map(|r| r.susp_span));
    ReportSummary {
        words: text.split_whitespace().count(),
        paragraphs: paragraph_count(text),
        plagiarized_chars,
        total_chars,
        ratio: if total_chars == 0 { 0.0 } else { plagiarized_chars as f64 / total_chars as f64 },
    }
}

/// Sources in name order, each with a palette color.
pub fn source_entries(rows: &[DetectionRow]) -> Vec<SourceEntry> {
    let mut by_src: BTreeMap<&str, Vec<Span>> = BTreeMap::new();
    for r in rows {
        by_src.entry(&r.src_doc_id).or_default().push(r.susp_span);
    }
    by_src
        .into_iter()
        .enumerate()
        .map(|(i, (src, spans))| SourceEntry {
            src_doc_id: src.to_string(),
            detections: spans.len(),
            chars: union_len(spans),
            color: PALETTE[i % PALETTE.len()],
        })
        .collect()
}

pub fn escape_html(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
}

/// Checks that every row belongs to `susp_doc_id` and fits in the texts.
/// `src_len` returns a source's length in chars when it is known.
pub fn check_rows(
    susp_doc_id: &str,
    susp_len: usize,
    rows: &[DetectionRow],
    src_len: impl Fn(&str) -> Option<usize>,
) -> Result<(), ReportError> {
    for (index, r) in rows.iter().enumerate() {
        if r.susp_doc_id != susp_doc_id {
            return Err(ReportError::WrongDocument {
                index,
                found: r.susp_doc_id.clone(),
                expected: susp_doc_id.to_string(),
            });
        }
        let mut sides = vec![("suspicious", r.susp_span, Some(susp_len))];
        sides.push(("source", r.src_span, src_len(&r.src_doc_id)));
        for (side, span, len) in sides {
            if let Some(len) = len {
                if span.end > len || span.start > span.end {
                    return Err(ReportError::OutOfBounds {
                        index,
                        side,
                        start: span.start,
                        end: span.end,
                        len,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Renders the suspicious text with one `<span class="det">` per detection.
///
/// Detections are visited by start offset. Each span wraps the part of its
/// range that no earlier detection already wrapped, so overlapping
/// detections still yield one element each (possibly empty) and the text
/// appears exactly once.
pub fn render_report(
    susp_doc_id: &str,
    text: &str,
    rows: &[DetectionRow],
    src_len: impl Fn(&str) -> Option<usize>,
) -> Result<String, ReportError> {
    let chars: Vec<char> = text.chars().collect();
    check_rows(susp_doc_id, chars.len(), rows, src_len)?;
    let summary = summarize(text, rows);
    let sources = source_entries(rows);
    let color: BTreeMap<&str, &str> = sources.iter().map(|s| (s.src_doc_id.as_str(), s.color)).collect();

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| (rows[i].susp_span.start, rows[i].susp_span.end, i));

    let mut html = String::with_capacity(text.len() * 2 + 4096);
    let mut title = String::new();
    escape_html(susp_doc_id, &mut title);
    let _ = writeln!(html, "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>");
    let _ = writeln!(html, "<title>Similarity report: {title}</title>");
    let _ = writeln!(
        html,
        "<style>body{{font-family:sans-serif;margin:24px;max-width:960px}}\
         .text{{white-space:pre-wrap;line-height:1.6;border:1px solid #ddd;padding:12px}}\
         .summary td{{padding:2px 12px 2px 0}}.swatch{{display:inline-block;width:12px;height:12px;margin-right:6px}}</style>"
    );
    let _ = writeln!(html, "</head>\n<body>\n<h1>{title}</h1>");

    let _ = writeln!(html, "<table class=\"summary\">");
    let _ = writeln!(html, "<tr><td>Words</td><td id=\"words\">{}</td></tr>", summary.words);
    let _ = writeln!(html, "<tr><td>Paragraphs</td><td id=\"paragraphs\">{}</td></tr>", summary.paragraphs);
    let _ = writeln!(
        html,
        "<tr><td>Plagiarism ratio</td><td id=\"ratio\">{:.1}%</td></tr>",
        summary.ratio * 100.0
    );
    let _ = writeln!(html, "</table>");

    let _ = writeln!(html, "<ul class=\"legend\">");
    for s in &sources {
        let mut id = String::new();
        escape_html(&s.src_doc_id, &mut id);
        let _ = writeln!(
            html,
            "<li class=\"source\"><span class=\"swatch\" style=\"background:{}\"></span>{id}: {} detection{}, {} chars</li>",
            s.color,
            s.detections,
            if s.detections == 1 { "" } else { "s" },
            s.chars
        );
    }
    let _ = writeln!(html, "</ul>");

    html.push_str("<div class=\"text\">");
    let mut cursor = 0usize;
    let mut piece = String::new();
    for &i in &order {
        let r = &rows[i];
        let start = r.susp_span.start.max(cursor);
        let end = r.susp_span.end.max(start);
        piece.clear();
        piece.extend(&chars[cursor..start]);
        escape_html(&piece, &mut html);
        let mut src = String::new();
        escape_html(&r.src_doc_id, &mut src);
        let _ = write!(
            html,
            "<span class=\"det\" data-det=\"{i}\" data-src=\"{src}\" title=\"{src} {:.3}\" style=\"background:{}\">",
            r.score, color[r.src_doc_id.as_str()]
        );
        piece.clear();
        piece.extend(&chars[start..end]);
        escape_html(&piece, &mut html);
        html.push_str("</span>");
        cursor = end;
    }
    piece.clear();
    piece.extend(&chars[cursor..]);
    escape_html(&piece, &mut html);
    html.push_str("</div>\n</body>\n</html>\n");
    Ok(html)
}
