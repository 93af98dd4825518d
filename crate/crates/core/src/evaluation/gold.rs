use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::GoldCase;
use crate::textnorm::Span;

#[derive(Debug, Error)]
pub enum GoldError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed XML in {path}: {source}")]
    Xml {
        path: PathBuf,
        #[source]
        source: roxmltree::Error,
    },
    #[error("bad annotation in {path}: {msg}")]
    Malformed { path: PathBuf, msg: String },
    #[error("negative {attr}={value} in {path}")]
    NegativeOffset { path: PathBuf, attr: &'static str, value: i64 },
}

/// Reads every `*.xml` file in `dir`, in file-name order.
pub fn load_gold(dir: &Path) -> Result<Vec<GoldCase>, GoldError> {
    let io = |source| GoldError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    files.retain(|p| p.extension().is_some_and(|e| e == "xml") && p.is_file());
    files.sort();
    let mut out = Vec::new();
    for f in files {
        out.extend(load_gold_file(&f)?);
    }
    Ok(out)
}

/// Parses one annotation file. An empty file yields no cases.
pub fn load_gold_file(path: &Path) -> Result<Vec<GoldCase>, GoldError> {
    let text = std::fs::read_to_string(path).map_err(|source| GoldError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_gold(&text, path)
}

fn parse_gold(text: &str, path: &Path) -> Result<Vec<GoldCase>, GoldError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let malformed = |msg: String| GoldError::Malformed {
        path: path.to_path_buf(),
        msg,
    };
    let doc = roxmltree::Document::parse(text).map_err(|source| GoldError::Xml {
        path: path.to_path_buf(),
        source,
    })?;
    let root = doc.root_element();
    let susp = root
        .attribute("reference")
        .ok_or_else(|| malformed("root element has no reference attribute".into()))?;

    let mut out = Vec::new();
    for feature in root.descendants().filter(|n| n.has_tag_name("feature")) {
        if feature.attribute("this_offset").is_none() {
            continue;
        }
        let num = |attr: &'static str| -> Result<usize, GoldError> {
            let raw = feature
                .attribute(attr)
                .ok_or_else(|| malformed(format!("feature without {attr}")))?;
            let value: i64 = raw
                .trim()
                .parse()
                .map_err(|_| malformed(format!("{attr}={raw:?} is not an integer")))?;
            if value < 0 {
                return Err(GoldError::NegativeOffset {
                    path: path.to_path_buf(),
                    attr,
                    value,
                });
            }
            Ok(value as usize)
        };
        let src = feature
            .attribute("source_reference")
            .ok_or_else(|| malformed("feature without source_reference".into()))?;
        let (to, tl, so, sl) = (
            num("this_offset")?,
            num("this_length")?,
            num("source_offset")?,
            num("source_length")?,
        );
        if tl == 0 || sl == 0 {
            return Err(malformed("zero-length plagiarism feature".into()));
        }
        out.push(GoldCase::new(susp, Span::new(to, to + tl), src, Span::new(so, so + sl)));
    }
    Ok(out)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Serializes the cases of one suspicious document in the annotation format.
pub fn gold_xml(susp_doc_id: &str, cases: &[GoldCase]) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<document reference=\"{}\">", escape(susp_doc_id));
    for c in cases {
        let _ = writeln!(
            out,
            "<feature name=\"plagiarism\" this_offset=\"{}\" this_length=\"{}\" source_reference=\"{}\" source_offset=\"{}\" source_length=\"{}\"/>",
            c.susp_range.start,
            c.susp_range.len(),
            escape(&c.src_doc_id),
            c.src_range.start,
            c.src_range.len()
        );
    }
    out.push_str("</document>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<GoldCase>, GoldError> {
        parse_gold(text, Path::new("t.xml"))
    }

    #[test]
    fn single_feature() {
        let cases = parse(
            r#"<document reference="susp1.txt">
                 <feature name="about" authors="x"/>
                 <feature name="plagiarism" this_offset="5" this_length="10"
                          source_reference="src1.txt" source_offset="0" source_length="10"/>
               </document>"#,
        )
        .unwrap();
        assert_eq!(cases, vec![GoldCase::new("susp1.txt", Span::new(5, 15), "src1.txt", Span::new(0, 10))]);
    }

    #[test]
    fn two_features() {
        let xml = r#"<document reference="a"><feature this_offset="0" this_length="3" source_reference="b" source_offset="1" source_length="2"/><feature this_offset="9" this_length="1" source_reference="c" source_offset="0" source_length="1"/></document>"#;
        assert_eq!(parse(xml).unwrap().len(), 2);
    }

    #[test]
    fn empty_file() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("  \n").unwrap().is_empty());
    }

    #[test]
    fn error_kinds_are_distinct() {
        assert!(matches!(parse("<document reference='a'>"), Err(GoldError::Xml { .. })));
        let neg = r#"<document reference="a"><feature this_offset="-4" this_length="3" source_reference="b" source_offset="1" source_length="2"/></document>"#;
        assert!(matches!(parse(neg), Err(GoldError::NegativeOffset { attr: "this_offset", value: -4, .. })));
        let nan = r#"<document reference="a"><feature this_offset="x" this_length="3" source_reference="b" source_offset="1" source_length="2"/></document>"#;
        assert!(matches!(parse(nan), Err(GoldError::Malformed { .. })));
        assert!(matches!(parse("<document/>"), Err(GoldError::Malformed { .. })));
    }

    #[test]
    fn writer_round_trips() {
        let cases = vec![
            GoldCase::new("s&1.txt", Span::new(3, 40), "r\"2.txt", Span::new(0, 37)),
            GoldCase::new("s&1.txt", Span::new(100, 101), "r3.txt", Span::new(7, 8)),
        ];
        assert_eq!(parse(&gold_xml("s&1.txt", &cases)).unwrap(), cases);
        assert!(parse(&gold_xml("s", &[])).unwrap().is_empty());
    }

    #[test]
    fn directory_loading_is_sorted_and_skips_other_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = [GoldCase::new("a", Span::new(0, 1), "x", Span::new(0, 1))];
        let b = [GoldCase::new("b", Span::new(0, 1), "x", Span::new(0, 1))];
        std::fs::write(dir.path().join("b.xml"), gold_xml("b", &b)).unwrap();
        std::fs::write(dir.path().join("a.xml"), gold_xml("a", &a)).unwrap();
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let all = load_gold(dir.path()).unwrap();
        assert_eq!(all, [a[0].clone(), b[0].clone()]);
        assert!(matches!(load_gold(&dir.path().join("nope")), Err(GoldError::Io { .. })));
    }
}
