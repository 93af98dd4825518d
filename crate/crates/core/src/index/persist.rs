//! On-disk index layout; see `docs/index-format.md`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{term_digest, DocEntry, IndexError, InvertedIndex, Posting};

pub const MAGIC: [u8; 4] = *b"PLSX";
pub const FORMAT_VERSION: u32 = 1;
const TERMS_MAGIC: [u8; 4] = *b"PLST";
const POSTINGS_MAGIC: [u8; 4] = *b"PLSP";
const DOCS_HEADER: &str = "doc_id\tpath\ttoken_count";

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    file: &'static str,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], file: &'static str) -> Self {
        Self { buf, pos: 0, file }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexError> {
        if self.buf.len() - self.pos < n {
            return Err(IndexError::Truncated(self.file));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn magic(&mut self, expected: [u8; 4]) -> Result<(), IndexError> {
        if self.buf.len() < 4 {
            return Err(IndexError::Truncated(self.file));
        }
        if self.take(4)? != expected {
            return Err(IndexError::BadMagic(self.file));
        }
        Ok(())
    }

    fn u32(&mut self) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, IndexError> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| IndexError::Corrupt(format!("{}: invalid UTF-8 string", self.file)))
    }

    fn finish(&self) -> Result<(), IndexError> {
        if self.pos != self.buf.len() {
            return Err(IndexError::Corrupt(format!("{}: trailing bytes", self.file)));
        }
        Ok(())
    }
}

fn put_str(out: &mut impl Write, s: &str) -> std::io::Result<()> {
    out.write_all(&(s.len() as u32).to_le_bytes())?;
    out.write_all(s.as_bytes())
}

impl InvertedIndex {
    /// Writes `header.bin`, `terms.dat`, `postings.dat` and `docs.tsv` into
    /// `dir`, creating it if needed.
    pub fn persist(&self, dir: impl AsRef<Path>) -> Result<(), IndexError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;

        let mut header = BufWriter::new(File::create(dir.join("header.bin"))?);
        header.write_all(&MAGIC)?;
        header.write_all(&FORMAT_VERSION.to_le_bytes())?;
        header.write_all(&(self.docs.len() as u64).to_le_bytes())?;
        header.write_all(&(self.terms.len() as u64).to_le_bytes())?;
        put_str(&mut header, &self.source_root)?;
        put_str(&mut header, &self.resources_id)?;
        header.flush()?;

        let mut terms = BufWriter::new(File::create(dir.join("terms.dat"))?);
        let mut postings = BufWriter::new(File::create(dir.join("postings.dat"))?);
        terms.write_all(&TERMS_MAGIC)?;
        postings.write_all(&POSTINGS_MAGIC)?;
        for (term, plist) in self.terms.iter().zip(&self.postings) {
            put_str(&mut terms, term)?;
            terms.write_all(&(plist.len() as u32).to_le_bytes())?;
            for p in plist {
                postings.write_all(&p.doc.to_le_bytes())?;
                postings.write_all(&p.tf.to_le_bytes())?;
            }
        }
        terms.flush()?;
        postings.flush()?;

        let mut docs = BufWriter::new(File::create(dir.join("docs.tsv"))?);
        writeln!(docs, "{DOCS_HEADER}")?;
        for d in &self.docs {
            writeln!(docs, "{}\t{}\t{}", d.doc_id, d.path, d.token_count)?;
        }
        docs.flush()?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, IndexError> {
        let dir = dir.as_ref();
        let header_bytes = fs::read(dir.join("header.bin"))?;
        let mut header = Reader::new(&header_bytes, "header.bin");
        header.magic(MAGIC)?;
        let version = header.u32()?;
        if version != FORMAT_VERSION {
            return Err(IndexError::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let n_docs = header.u64()? as usize;
        let n_terms = header.u64()? as usize;
        let source_root = header.string()?;
        let resources_id = header.string()?;
        header.finish()?;

        let terms_bytes = fs::read(dir.join("terms.dat"))?;
        let postings_bytes = fs::read(dir.join("postings.dat"))?;
        let mut tr = Reader::new(&terms_bytes, "terms.dat");
        let mut pr = Reader::new(&postings_bytes, "postings.dat");
        tr.magic(TERMS_MAGIC)?;
        pr.magic(POSTINGS_MAGIC)?;
        let mut terms: Vec<String> = Vec::with_capacity(n_terms.min(1 << 20));
        let mut postings: Vec<Vec<Posting>> = Vec::with_capacity(n_terms.min(1 << 20));
        for _ in 0..n_terms {
            let term = tr.string()?;
            if terms.last().is_some_and(|prev| prev.as_str() >= term.as_str()) {
                return Err(IndexError::Corrupt(format!("terms.dat: `{term}` out of order")));
            }
            let df = tr.u32()? as usize;
            if df == 0 || df > n_docs {
                return Err(IndexError::Corrupt(format!("terms.dat: df {df} for `{term}` outside 1..={n_docs}")));
            }
            let mut plist = Vec::with_capacity(df);
            for _ in 0..df {
                let doc = pr.u32()?;
                let tf = pr.u32()?;
                if doc as usize >= n_docs || tf == 0 || plist.last().is_some_and(|p: &Posting| p.doc >= doc) {
                    return Err(IndexError::Corrupt(format!("postings.dat: bad posting for `{term}`")));
                }
                plist.push(Posting { doc, tf });
            }
            terms.push(term);
            postings.push(plist);
        }
        tr.finish()?;
        pr.finish()?;

        let docs_text = fs::read_to_string(dir.join("docs.tsv"))?;
        let mut lines = docs_text.lines();
        if lines.next() != Some(DOCS_HEADER) {
            return Err(IndexError::Corrupt("docs.tsv: missing header".into()));
        }
        let mut per_doc: Vec<Vec<(&str, u32)>> = vec![Vec::new(); n_docs];
        for (term, plist) in terms.iter().zip(&postings) {
            for p in plist {
                per_doc[p.doc as usize].push((term, p.tf));
            }
        }
        let mut docs: Vec<DocEntry> = Vec::with_capacity(n_docs);
        for (line, tf) in lines.by_ref().zip(per_doc) {
            let fields: Vec<&str> = line.split('\t').collect();
            let [doc_id, path, token_count] = fields[..] else {
                return Err(IndexError::Corrupt(format!("docs.tsv: bad row `{line}`")));
            };
            let token_count = token_count
                .parse()
                .map_err(|_| IndexError::Corrupt(format!("docs.tsv: bad token count in `{line}`")))?;
            if docs.last().is_some_and(|d| d.doc_id.as_str() >= doc_id) {
                return Err(IndexError::Corrupt(format!("docs.tsv: `{doc_id}` out of order")));
            }
            docs.push(DocEntry {
                doc_id: doc_id.to_string(),
                path: path.to_string(),
                token_count,
                digest: term_digest(tf.into_iter()),
            });
        }
        if docs.len() != n_docs {
            return Err(IndexError::Truncated("docs.tsv"));
        }
        if lines.next().is_some() {
            return Err(IndexError::Corrupt("docs.tsv: more rows than documents".into()));
        }
        Ok(Self::assemble(docs, terms, postings, source_root, resources_id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{build_index, IndexBuilder};
    use crate::textnorm::{LanguageResources, NormalizedDocument};

    fn fixture() -> InvertedIndex {
        let res = LanguageResources::latin();
        let mut b = IndexBuilder::new().source_root("/src").resources_id(res.id());
        for (id, text) in [
            ("d1", "river forest. river bank"),
            ("d2", "forest ocean ocean"),
            ("d3", "the ocean"),
            ("d4", "glacier"),
            ("d5", "river river river"),
        ] {
            b.add(&NormalizedDocument::new(id, text, &res), format!("{id}.txt")).unwrap();
        }
        b.finish()
    }

    #[test]
    fn round_trip_empty() {
        let tmp = tempfile::tempdir().unwrap();
        let idx = build_index(&[]).unwrap();
        idx.persist(tmp.path()).unwrap();
        assert_eq!(InvertedIndex::load(tmp.path()).unwrap(), idx);
    }

    #[test]
    fn round_trip_fixture_is_bit_exact() {
        let tmp = tempfile::tempdir().unwrap();
        let idx = fixture();
        idx.persist(tmp.path()).unwrap();
        let back = InvertedIndex::load(tmp.path()).unwrap();
        assert_eq!(back, idx);
        for d in 0..idx.n_docs() as u32 {
            assert_eq!(back.doc_norm(d).to_bits(), idx.doc_norm(d).to_bits());
        }
        assert_eq!(back.source_root(), "/src");
    }

    #[test]
    fn bad_magic() {
        let tmp = tempfile::tempdir().unwrap();
        fixture().persist(tmp.path()).unwrap();
        let path = tmp.path().join("header.bin");
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] = b'X';
        fs::write(&path, bytes).unwrap();
        assert!(matches!(InvertedIndex::load(tmp.path()), Err(IndexError::BadMagic("header.bin"))));
    }

    #[test]
    fn version_mismatch() {
        let tmp = tempfile::tempdir().unwrap();
        fixture().persist(tmp.path()).unwrap();
        let path = tmp.path().join("header.bin");
        let mut bytes = fs::read(&path).unwrap();
        bytes[4..8].copy_from_slice(&99u32.to_le_bytes());
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            InvertedIndex::load(tmp.path()),
            Err(IndexError::VersionMismatch { found: 99, expected: 1 })
        ));
    }

    #[test]
    fn truncated_postings() {
        let tmp = tempfile::tempdir().unwrap();
        fixture().persist(tmp.path()).unwrap();
        let path = tmp.path().join("postings.dat");
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(InvertedIndex::load(tmp.path()), Err(IndexError::Truncated("postings.dat"))));
    }

    #[test]
    fn truncated_docs_table() {
        let tmp = tempfile::tempdir().unwrap();
        fixture().persist(tmp.path()).unwrap();
        let path = tmp.path().join("docs.tsv");
        let text = fs::read_to_string(&path).unwrap();
        let cut: Vec<&str> = text.lines().take(3).collect();
        fs::write(&path, cut.join("\n")).unwrap();
        assert!(matches!(InvertedIndex::load(tmp.path()), Err(IndexError::Truncated("docs.tsv"))));
    }

    #[test]
    fn missing_file_is_io_error() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(InvertedIndex::load(tmp.path()), Err(IndexError::Io(_))));
    }
}
