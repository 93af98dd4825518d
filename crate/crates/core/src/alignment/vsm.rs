use std::collections::{BTreeMap, HashMap};

use crate::index::IdfSource;
use crate::textnorm::NormalizedDocument;

/// Sparse TF-IDF vector of one sentence, sorted by term.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SentenceVector {
    pub weights: Vec<(String, f64)>,
    norm_sq: f64,
}

impl SentenceVector {
    pub fn from_counts<'a>(counts: impl IntoIterator<Item = (&'a str, u32)>, idf: &impl IdfSource) -> Self {
        let mut tf: BTreeMap<&str, u32> = BTreeMap::new();
        for (t, c) in counts {
            *tf.entry(t).or_default() += c;
        }
        let weights: Vec<(String, f64)> = tf
            .into_iter()
            .map(|(t, c)| (t.to_string(), c as f64 * idf.idf(t)))
            .collect();
        let norm_sq = weights.iter().map(|(_, w)| w * w).sum();
        Self { weights, norm_sq }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sq == 0.0
    }
}

/// One vector per sentence over its non-stop-word stems.
pub fn sentence_vectors(doc: &NormalizedDocument, idf: &impl IdfSource) -> Vec<SentenceVector> {
    (0..doc.sentences.len())
        .map(|s| {
            SentenceVector::from_counts(
                doc.sentence_tokens(s)
                    .iter()
                    .filter(|t| !t.is_stopword)
                    .map(|t| (t.stem.as_str(), 1)),
                idf,
            )
        })
        .collect()
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(u: &SentenceVector, v: &SentenceVector) -> f64 {
    if u.is_zero() || v.is_zero() {
        return 0.0;
    }
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < u.weights.len() && j < v.weights.len() {
        match u.weights[i].0.cmp(&v.weights[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += u.weights[i].1 * v.weights[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    (dot / (u.norm_sq * v.norm_sq).sqrt()).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceMatch {
    pub susp: usize,
    pub src: usize,
    pub sim: f64,
}

/// All sentence pairs with cosine at least `threshold`, ordered by `(susp, src)`.
/// Zero vectors never match.
pub fn match_sentences(susp: &[SentenceVector], src: &[SentenceVector], threshold: f64) -> Vec<SentenceMatch> {
    let mut postings: HashMap<&str, Vec<(usize, f64)>> = HashMap::new();
    for (j, v) in src.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
        for (t, w) in &v.weights {
            postings.entry(t.as_str()).or_default().push((j, *w));
        }
    }
    let mut out = Vec::new();
    let mut dots: Vec<Option<f64>> = vec![None; src.len()];
    let mut touched: Vec<usize> = Vec::new();
    for (i, u) in susp.iter().enumerate().filter(|(_, u)| !u.is_zero()) {
        // terms are visited in sorted order, matching `cosine`'s summation
        for (t, w) in &u.weights {
            if let Some(list) = postings.get(t.as_str()) {
                for &(j, vw) in list {
                    let d = dots[j].get_or_insert_with(|| {
                        touched.push(j);
                        0.0
                    });
                    *d += w * vw;
                }
            }
        }
        touched.sort_unstable();
        for &j in &touched {
            let dot = dots[j].take().unwrap_or(0.0);
            let sim = (dot / (u.norm_sq * src[j].norm_sq).sqrt()).clamp(0.0, 1.0);
            if sim >= threshold {
                out.push(SentenceMatch { susp: i, src: j, sim });
            }
        }
        touched.clear();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::UniformIdf;
    use crate::textnorm::LanguageResources;
    use proptest::prelude::*;

    fn vec_of(terms: &[(&str, u32)]) -> SentenceVector {
        SentenceVector::from_counts(terms.iter().copied(), &UniformIdf)
    }

    #[test]
    fn distinct_terms_unit_idf() {
        let v = vec_of(&[("a", 1), ("b", 1), ("c", 1)]);
        assert!(v.weights.iter().all(|(_, w)| *w == 1.0));
        assert!((v.norm() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stopword_sentence_is_zero() {
        let doc = NormalizedDocument::new("d", "the of and. river bank.", &LanguageResources::latin());
        let vs = sentence_vectors(&doc, &UniformIdf);
        assert!(vs[0].is_zero());
        assert!(!vs[1].is_zero());
        assert_eq!(cosine(&vs[0], &vs[1]), 0.0);
    }

    #[test]
    fn cosine_cases() {
        let u = vec_of(&[("a", 1), ("b", 1)]);
        assert_eq!(cosine(&u, &u), 1.0);
        assert_eq!(cosine(&u, &vec_of(&[("c", 1)])), 0.0);
        let v = vec_of(&[("a", 1)]);
        assert!((cosine(&u, &v) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn identical_documents_match_diagonal() {
        let doc = NormalizedDocument::new(
            "d",
            "river valley harbor. piano violin melody. cheese bread soup.",
            &LanguageResources::latin(),
        );
        let vs = sentence_vectors(&doc, &UniformIdf);
        let m = match_sentences(&vs, &vs, 0.65);
        assert_eq!(m.len(), 3);
        assert!(m.iter().all(|p| p.susp == p.src && p.sim == 1.0));
    }

    fn small_vectors() -> impl Strategy<Value = Vec<SentenceVector>> {
        prop::collection::vec(
            prop::collection::vec((0u8..8, 1u32..3), 0..6).prop_map(|terms| {
                let owned: Vec<(String, u32)> = terms.into_iter().map(|(t, c)| (format!("t{t}"), c)).collect();
                SentenceVector::from_counts(owned.iter().map(|(t, c)| (t.as_str(), *c)), &UniformIdf)
            }),
            0..8,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn matches_equal_brute_force(a in small_vectors(), b in small_vectors(), theta in 0.05f64..1.0) {
            let fast = match_sentences(&a, &b, theta);
            let mut brute = Vec::new();
            for (i, u) in a.iter().enumerate() {
                for (j, v) in b.iter().enumerate() {
                    let sim = cosine(u, v);
                    if sim >= theta {
                        brute.push((i, j, sim));
                    }
                }
            }
            prop_assert_eq!(fast.len(), brute.len());
            for (f, (i, j, sim)) in fast.iter().zip(brute) {
                prop_assert_eq!((f.susp, f.src), (i, j));
                prop_assert!((f.sim - sim).abs() < 1e-12);
            }
        }

        #[test]
        fn cosine_is_symmetric(a in small_vectors(), b in small_vectors()) {
            for u in &a {
                for v in &b {
                    prop_assert_eq!(cosine(u, v), cosine(v, u));
                }
            }
        }
    }
}
