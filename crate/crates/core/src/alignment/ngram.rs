use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use crate::textnorm::NormalizedDocument;

use super::vsm::SentenceMatch;
use super::Method;

/// The n-gram set of one sentence. Grams are stored as sorted, deduplicated
/// 64-bit hashes; units are kept for the shorter-than-n equality rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramProfile {
    units: Vec<u64>,
    grams: Vec<u64>,
    n: usize,
}

fn hash_of<T: Hash + ?Sized>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Sentence text with every whitespace run collapsed to one space.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if !in_space {
                out.push(' ');
            }
            in_space = true;
        } else {
            out.push(c);
            in_space = false;
        }
    }
    out
}

impl NgramProfile {
    pub fn from_units(units: Vec<u64>, n: usize) -> Self {
        let n = n.max(1);
        let mut grams: Vec<u64> = if units.len() >= n {
            units.windows(n).map(hash_of).collect()
        } else {
            Vec::new()
        };
        grams.sort_unstable();
        grams.dedup();
        Self { units, grams, n }
    }

    pub fn chars(text: &str, n: usize) -> Self {
        Self::from_units(collapse_whitespace(text).chars().map(|c| c as u64).collect(), n)
    }

    pub fn words<S: AsRef<str>>(stems: &[S], n: usize) -> Self {
        Self::from_units(stems.iter().map(|s| hash_of(s.as_ref())).collect(), n)
    }

    pub fn for_sentence(doc: &NormalizedDocument, sentence: usize, method: Method, n: usize) -> Self {
        match method {
            Method::WordNgram => {
                let stems: Vec<&str> = doc.sentence_tokens(sentence).iter().map(|t| t.stem.as_str()).collect();
                Self::words(&stems, n)
            }
            _ => Self::chars(doc.sentence_text(sentence), n),
        }
    }

    fn is_short(&self) -> bool {
        self.units.len() < self.n
    }
}

/// Jaccard coefficient of the two n-gram sets. When either side has fewer
/// than `n` units the result is 1 if the unit sequences are equal, else 0.
pub fn ngram_similarity(a: &NgramProfile, b: &NgramProfile) -> f64 {
    if a.is_short() || b.is_short() {
        return if a.units == b.units { 1.0 } else { 0.0 };
    }
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.grams.len() && j < b.grams.len() {
        match a.grams[i].cmp(&b.grams[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.grams.len() + b.grams.len() - inter;
    inter as f64 / union as f64
}

/// All sentence pairs whose n-gram similarity reaches `threshold`, ordered
/// by `(susp, src)`.
pub fn match_ngram_sentences(susp: &[NgramProfile], src: &[NgramProfile], threshold: f64) -> Vec<SentenceMatch> {
    let mut postings: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut short_src: HashMap<&[u64], Vec<usize>> = HashMap::new();
    for (j, p) in src.iter().enumerate() {
        if p.is_short() {
            short_src.entry(p.units.as_slice()).or_default().push(j);
        } else {
            for &g in &p.grams {
                postings.entry(g).or_default().push(j);
            }
        }
    }
    let mut out = Vec::new();
    let mut inter = vec![0usize; src.len()];
    let mut touched = Vec::new();
    for (i, p) in susp.iter().enumerate() {
        if p.is_short() {
            if let Some(js) = short_src.get(p.units.as_slice()) {
                out.extend(js.iter().map(|&j| SentenceMatch { susp: i, src: j, sim: 1.0 }));
            }
            continue;
        }
        for g in &p.grams {
            if let Some(js) = postings.get(g) {
                for &j in js {
                    if inter[j] == 0 {
                        touched.push(j);
                    }
                    inter[j] += 1;
                }
            }
        }
        touched.sort_unstable();
        for &j in &touched {
            let union = p.grams.len() + src[j].grams.len() - inter[j];
            let sim = inter[j] as f64 / union as f64;
            if sim >= threshold {
                out.push(SentenceMatch { susp: i, src: j, sim });
            }
            inter[j] = 0;
        }
        touched.clear();
    }
    out
}
