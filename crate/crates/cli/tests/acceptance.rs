//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any of them fails.
//!
//! Set `PLAGSCAN_PAN16_DIR` to a corpus directory (`src/`, `susp/`, `xml/`)
//! to also score the Persian PlagDet 2016 training data. That report is
//! informational and never fails the suite.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use plagscan::alignment::{align, merge_matches, sentence_matches, AlignmentConfig, Method, SentenceMatch};
use plagscan::config::Config;
use plagscan::corpus::{generate, load_corpus, Corpus, GenSpec, Obfuscation};
use plagscan::evaluation::{evaluate, f_measure, granularity, macro_precision_recall, plagdet, EvalSummary, GoldCase};
use plagscan::index::{IndexBuilder, InvertedIndex, LocalIdf};
use plagscan::pipeline::{detection_rows, Detector};
use plagscan::retrieval::{chunk_document, RetrievalConfig};
use plagscan::textnorm::normalize;
use plagscan::{LanguageResources, NormalizedDocument, Span};
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestCaseError, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

// Published system scores: (system, recall, precision, granularity, F, plagdet).
const TABLE: [(&str, f64, f64, f64, f64, f64); 10] = [
    ("Hamtajoo", 0.9221, 0.9345, 1.0, 0.9282, 0.9282),
    ("Mashhadirajab", 0.9191, 0.9268, 1.0014, 0.9230, 0.9220),
    ("Gharavi", 0.8582, 0.9592, 1.0, 0.9059, 0.9059),
    ("Momtaz", 0.8504, 0.8925, 1.0, 0.8710, 0.8710),
    ("Minaei", 0.7960, 0.9203, 1.0396, 0.8536, 0.8301),
    ("Esteki", 0.7012, 0.9333, 1.0, 0.8008, 0.8008),
    ("Talebpour", 0.8361, 0.9638, 1.2275, 0.8954, 0.7749),
    ("Ehsan", 0.7049, 0.7496, 1.0, 0.7266, 0.7266),
    ("Gillam", 0.4140, 0.7548, 1.5280, 0.5347, 0.3996),
    ("Mansourizadeh", 0.8065, 0.9000, 3.5369, 0.8507, 0.3899),
];

fn table_closure() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for (_, r, p, g, f, pd) in TABLE {
        worst = worst.max((f_measure(p, r) - f).abs()).max((plagdet(p, r, g) - pd).abs());
    }
    let el = t0.elapsed();
    outcome(
        worst <= 3e-4 && el < Duration::from_secs(1),
        format!("max deviation {worst:.2e} over {} rows in {}", TABLE.len(), secs(el)),
    )
}

struct Prepared {
    corpus: Corpus,
    res: LanguageResources,
    src: Vec<NormalizedDocument>,
    susp: Vec<NormalizedDocument>,
    index: InvertedIndex,
}

fn normalize_all(docs: &[plagscan::corpus::RawDocument], res: &LanguageResources) -> Vec<NormalizedDocument> {
    docs.iter()
        .map(|d| NormalizedDocument::new(d.doc_id.clone(), d.text.clone(), res))
        .collect()
}

fn prepare(corpus: Corpus, res: LanguageResources) -> Prepared {
    let src = normalize_all(&corpus.src_docs, &res);
    let susp = normalize_all(&corpus.susp_docs, &res);
    let mut b = IndexBuilder::new().resources_id(res.id());
    for d in &src {
        b.add(d, d.doc_id.clone()).expect("distinct ids");
    }
    let index = b.finish();
    Prepared { corpus, res, src, susp, index }
}

fn generated(seed: u64, obfuscation: Obfuscation) -> Prepared {
    let spec = GenSpec { seed, obfuscation, ..Default::default() };
    prepare(generate(&spec).expect("valid spec"), LanguageResources::latin())
}

fn config_for(res: &LanguageResources) -> Config {
    Config {
        resources: res.id().split('@').next().unwrap_or_default().to_string(),
        workers: 1,
        ..Default::default()
    }
}

/// Runs the full pipeline and returns its summary with retrieval hits for
/// gold cases of at least `min_tokens` tokens.
fn pipeline(p: &Prepared, min_tokens: usize) -> (EvalSummary, usize, usize) {
    let cfg = config_for(&p.res);
    let det = Detector::with_documents(&p.index, &p.res, &cfg, p.src.clone());
    let results = det.detect_all(&p.susp).expect("sources are in memory");
    let (mut found, mut total) = (0, 0);
    for (doc, r) in p.susp.iter().zip(&results) {
        for case in p.corpus.gold_for(&doc.doc_id) {
            let tokens = doc
                .tokens
                .iter()
                .filter(|t| case.susp_range.contains_span(&doc.to_raw_span(t.span)))
                .count();
            if tokens < min_tokens {
                continue;
            }
            total += 1;
            found += r.retrieval.candidates.iter().any(|c| c.doc_id == case.src_doc_id) as usize;
        }
    }
    let dets: Vec<GoldCase> = detection_rows(&results).iter().map(GoldCase::from).collect();
    (evaluate(&p.corpus.gold, &dets).expect("valid detections"), found, total)
}

fn generated_corpus() -> (Outcome, Outcome) {
    let t0 = Instant::now();
    let p = generated(GenSpec::default().seed, Obfuscation::None);
    let (s, found, total) = pipeline(&p, 100);
    let el = t0.elapsed();
    let max_candidates = {
        let cfg = config_for(&p.res);
        let det = Detector::with_documents(&p.index, &p.res, &cfg, p.src.clone());
        p.susp
            .iter()
            .map(|d| det.detect_one(d).expect("in memory").retrieval.candidates.len())
            .max()
            .unwrap_or(0)
    };
    let quality = outcome(
        s.plagdet >= 0.95 && s.granularity <= 1.05 && el < Duration::from_secs(60),
        format!(
            "{} cases: plagdet {:.4} (P {:.4} R {:.4}) granularity {:.4} in {} on one worker",
            p.corpus.gold.len(),
            s.plagdet,
            s.precision,
            s.recall,
            s.granularity,
            secs(el)
        ),
    );
    let retrieval = outcome(
        total > 0 && found as f64 >= 0.9 * total as f64 && max_candidates <= 25,
        format!(
            "true source retrieved for {found}/{total} passages of >= 100 tokens ({:.1}%), at most {max_candidates} candidates",
            100.0 * found as f64 / total.max(1) as f64
        ),
    );
    (quality, retrieval)
}

fn seed_spread() {
    for seed in [11, 23, 42, 99] {
        let (s, found, total) = pipeline(&generated(seed, Obfuscation::None), 100);
        println!(
            "INFO seed {seed}: plagdet {:.4} granularity {:.4} retrieval {found}/{total}",
            s.plagdet, s.granularity
        );
    }
}

fn pair_recall(p: &Prepared, cfg: &AlignmentConfig) -> f64 {
    let mut dets = Vec::new();
    for (s, r) in &p.corpus.pairs {
        let susp = p.susp.iter().find(|d| &d.doc_id == s).expect("pair ids exist");
        let src = p.src.iter().find(|d| &d.doc_id == r).expect("pair ids exist");
        dets.extend(align(susp, src, &p.index, cfg).iter().map(GoldCase::from));
    }
    evaluate(&p.corpus.gold, &dets).expect("valid detections").recall
}

fn shuffle() -> Outcome {
    let seed = GenSpec::default().seed;
    let plain = generated(seed, Obfuscation::None);
    let shuffled = generated(seed, Obfuscation::Shuffle);
    let vsm = AlignmentConfig::default();
    let chars = AlignmentConfig { method: Method::CharNgram, n: Some(4), ..Default::default() };
    let (v0, v1) = (pair_recall(&plain, &vsm), pair_recall(&shuffled, &vsm));
    let (c0, c1) = (pair_recall(&plain, &chars), pair_recall(&shuffled, &chars));
    outcome(
        (v0 - v1).abs() < 0.02 && c0 - c1 >= 0.2,
        format!("VSM recall {v0:.4} -> {v1:.4}, CHAR_NGRAM n=4 recall {c0:.4} -> {c1:.4}"),
    )
}

fn case_strategy() -> impl Strategy<Value = GoldCase> {
    (0usize..2, 0usize..2, 0usize..40, 1usize..15, 0usize..40, 1usize..15).prop_map(|(s, r, a, la, b, lb)| {
        GoldCase::new(format!("s{s}"), Span::new(a, a + la), format!("r{r}"), Span::new(b, b + lb))
    })
}

type CharKey = (String, String, bool, usize);

/// Every character of a case as (susp doc, src doc, source side, position).
fn chars(c: &GoldCase) -> Vec<CharKey> {
    let side = |src: bool, span: Span| {
        (span.start..span.end).map(move |i| (c.susp_doc_id.clone(), c.src_doc_id.clone(), src, i))
    };
    side(false, c.susp_range).chain(side(true, c.src_range)).collect()
}

fn oracle(gold: &[GoldCase], det: &[GoldCase]) -> (f64, f64, f64) {
    let union = |cases: &[GoldCase]| cases.iter().flat_map(chars).collect::<HashSet<CharKey>>();
    let frac = |cases: &[GoldCase], other: &HashSet<CharKey>| {
        cases
            .iter()
            .map(|c| {
                let cs = chars(c);
                cs.iter().filter(|k| other.contains(*k)).count() as f64 / cs.len() as f64
            })
            .sum::<f64>()
            / cases.len() as f64
    };
    let (p, r) = if det.is_empty() {
        (0.0, 0.0)
    } else {
        (frac(det, &union(gold)), frac(gold, &union(det)))
    };
    let (mut detected, mut hits) = (0, 0);
    for g in gold {
        let gs: HashSet<CharKey> = chars(g).into_iter().collect();
        let n = det.iter().filter(|d| chars(d).iter().any(|k| gs.contains(k))).count();
        if n > 0 {
            detected += 1;
            hits += n;
        }
    }
    let gran = if detected == 0 { 1.0 } else { hits as f64 / detected as f64 };
    (p, r, gran)
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(RunnerConfig { cases, failure_persistence: None, ..RunnerConfig::default() })
}

fn oracle_check() -> Outcome {
    const CASES: u32 = 1000;
    let strategy = (
        prop::collection::vec(case_strategy(), 1..6),
        prop::collection::vec(case_strategy(), 0..9),
    );
    let result = runner(CASES).run(&strategy, |(gold, det)| {
        let (p, r) = macro_precision_recall(&gold, &det).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let g = granularity(&gold, &det);
        let (op, or, og) = oracle(&gold, &det);
        prop_assert!((p - op).abs() <= 1e-12, "precision {} vs oracle {}", p, op);
        prop_assert!((r - or).abs() <= 1e-12, "recall {} vs oracle {}", r, or);
        prop_assert!((g - og).abs() <= 1e-12, "granularity {} vs oracle {}", g, og);
        Ok(())
    });
    match result {
        Ok(()) => outcome(true, format!("{CASES} random instances agree within 1e-12")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_plagscan");
    let dir = tempfile::tempdir().expect("temp dir");
    let path = |p: &str| dir.path().join(p).to_string_lossy().into_owned();
    let run = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        if out.status.success() {
            Ok(())
        } else {
            Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
        }
    };
    let steps = || -> Result<bool, String> {
        run(&["gen", "--out", &path("corpus")])?;
        run(&["index", "--src", &path("corpus/src"), "--out", &path("idx"), "--resources", "latin"])?;
        for w in ["1", "8"] {
            run(&[
                "detect", "--susp", &path("corpus/susp"), "--index", &path("idx"), "--resources", "latin",
                "--workers", w, "--out", &path(&format!("det{w}.tsv")),
            ])?;
        }
        let read = |f: &str| std::fs::read(dir.path().join(f)).map_err(|e| e.to_string());
        Ok(read("det1.tsv")? == read("det8.tsv")?)
    };
    match steps() {
        Ok(same) => outcome(same, if same { "1 and 8 workers wrote identical bytes" } else { "outputs differ" }),
        Err(e) => outcome(false, e),
    }
}

const WORDS: [&str; 12] = [
    "castle", "tower", "bridge", "garden", "river", "valley", "piano", "melody", "cheese", "bread", "doctor", "engine",
];

fn sentences() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0..WORDS.len(), 1..8), 0..12)
}

fn render(ss: &[Vec<usize>]) -> String {
    ss.iter()
        .map(|s| s.iter().map(|&w| WORDS[w]).collect::<Vec<_>>().join(" ") + ".")
        .collect::<Vec<_>>()
        .join(" ")
}

fn suite(name: &str, result: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<String, String> {
    result.map(|()| name.to_string()).map_err(|e| format!("{name}: {e}"))
}

fn properties() -> Outcome {
    const CASES: u32 = 256;
    let latin = LanguageResources::latin();
    let persian = LanguageResources::persian();
    let mut done = Vec::new();
    let mut failed = Vec::new();
    let mut record = |r: Result<String, String>| match r {
        Ok(n) => done.push(n),
        Err(e) => failed.push(e),
    };

    record(suite(
        "chunk partition",
        runner(CASES).run(&(sentences(), 1usize..20, 0usize..20), |(ss, chunk_len, min_tail)| {
            let doc = NormalizedDocument::new("d", render(&ss), &latin);
            let cfg = RetrievalConfig { chunk_len, min_tail, ..Default::default() };
            let chunks = chunk_document(&doc, &cfg);
            let n = doc.tokens.len();
            prop_assert_eq!(chunks.is_empty(), n == 0);
            let mut next = 0;
            for (k, c) in chunks.iter().enumerate() {
                prop_assert_eq!(c.chunk_id, k);
                prop_assert_eq!(c.tokens.start, next);
                prop_assert!(c.tokens.end > c.tokens.start);
                if k + 1 < chunks.len() {
                    prop_assert_eq!(c.tokens.len(), chunk_len);
                } else if chunks.len() > 1 {
                    prop_assert!(c.tokens.len() >= min_tail.min(chunk_len));
                }
                next = c.tokens.end;
            }
            prop_assert_eq!(next, n);
            let owned: Vec<usize> = chunks.iter().flat_map(|c| c.sentences.iter().copied()).collect();
            prop_assert_eq!(owned, (0..doc.sentences.len()).collect::<Vec<_>>());
            Ok(())
        }),
    ));

    record(suite(
        "threshold monotonicity",
        runner(CASES).run(&(sentences(), sentences(), 0.05f64..1.0, 0.05f64..1.0), |(a, b, t1, t2)| {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let da = NormalizedDocument::new("a", render(&a), &latin);
            let db = NormalizedDocument::new("b", render(&b), &latin);
            let idf = LocalIdf::from_documents([&da, &db]);
            for method in Method::ALL {
                let pairs = |threshold: f64| -> BTreeSet<(usize, usize)> {
                    let cfg = AlignmentConfig { method, threshold, ..Default::default() };
                    sentence_matches(&da, &db, &idf, &cfg).iter().map(|m| (m.susp, m.src)).collect()
                };
                prop_assert!(pairs(hi).is_subset(&pairs(lo)), "{} at {} vs {}", method, hi, lo);
            }
            Ok(())
        }),
    ));

    let matches = prop::collection::btree_set((0usize..30, 0usize..30), 0..40);
    record(suite(
        "merge pair conservation",
        runner(CASES).run(&(matches, 0usize..3), |(set, gap)| {
            let ms: Vec<SentenceMatch> = set
                .into_iter()
                .map(|(a, b)| SentenceMatch { susp: a, src: b, sim: 0.5 + ((a * 7 + b) % 5) as f64 / 10.0 })
                .collect();
            let clusters = merge_matches(&ms, gap);
            prop_assert_eq!(clusters.iter().map(|c| c.pairs).sum::<usize>(), ms.len());
            let total: f64 = ms.iter().map(|m| m.sim).sum();
            prop_assert!((clusters.iter().map(|c| c.sim_sum).sum::<f64>() - total).abs() < 1e-9);
            for m in &ms {
                prop_assert!(clusters.iter().any(|c| c.susp.contains(&m.susp) && c.src.contains(&m.src)));
            }
            Ok(())
        }),
    ));

    record(suite(
        "idempotent normalization",
        runner(CASES).run(&"[ a-zA-Z0-9\u{0600}-\u{06FF}\u{06F0}-\u{06F9}\u{200C}\u{064B}-\u{0652}.،؟!-]{0,60}", |text| {
            for res in [&latin, &persian] {
                let once = normalize(&text, res);
                prop_assert_eq!(&normalize(&once.text, res).text, &once.text);
                prop_assert_eq!(once.offset_map.len(), once.text.chars().count());
                let doc = NormalizedDocument::new("d", once.text.clone(), res);
                prop_assert_eq!(&doc.norm_text, &once.text);
            }
            Ok(())
        }),
    ));

    record(suite(
        "index round-trip",
        runner(CASES).run(&prop::collection::vec(sentences(), 0..6), |docs| {
            let norm: Vec<NormalizedDocument> = docs
                .iter()
                .enumerate()
                .map(|(i, ss)| NormalizedDocument::new(format!("d{i}.txt"), render(ss), &latin))
                .collect();
            let mut b = IndexBuilder::new().resources_id(latin.id()).source_root("/tmp/src");
            for d in &norm {
                b.add(d, d.doc_id.clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
            }
            let index = b.finish();
            let dir = tempfile::tempdir().map_err(|e| TestCaseError::fail(e.to_string()))?;
            let (one, two) = (dir.path().join("one"), dir.path().join("two"));
            index.persist(&one).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let loaded = InvertedIndex::load(&one).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(&loaded, &index);
            loaded.persist(&two).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(same_files(&one, &two));
            Ok(())
        }),
    ));

    let pass = failed.is_empty();
    let detail = if pass {
        format!("{} suites x {CASES} cases: {}", done.len(), done.join(", "))
    } else {
        failed.join("; ")
    };
    outcome(pass, detail)
}

fn same_files(a: &Path, b: &Path) -> bool {
    let list = |d: &Path| -> Vec<(std::ffi::OsString, Vec<u8>)> {
        let mut v: Vec<_> = std::fs::read_dir(d)
            .map(|it| it.filter_map(Result::ok).map(|e| (e.file_name(), std::fs::read(e.path()).unwrap_or_default())).collect())
            .unwrap_or_default();
        v.sort();
        v
    };
    let (x, y) = (list(a), list(b));
    !x.is_empty() && x == y
}

fn pan16() {
    let Some(dir) = std::env::var_os("PLAGSCAN_PAN16_DIR") else {
        println!("SKIP PlagDet 2016 corpus: PLAGSCAN_PAN16_DIR is not set");
        return;
    };
    let t0 = Instant::now();
    let corpus = match load_corpus(Path::new(&dir)) {
        Ok(c) => c,
        Err(e) => {
            println!("INFO PlagDet 2016 corpus: cannot load: {e}");
            return;
        }
    };
    let (s, _, _) = pipeline(&prepare(corpus, LanguageResources::persian()), 0);
    println!(
        "INFO PlagDet 2016 corpus: plagdet {:.4} (P {:.4} R {:.4} G {:.4}) in {}; soft bound 0.80 {}",
        s.plagdet,
        s.precision,
        s.recall,
        s.granularity,
        secs(t0.elapsed()),
        if s.plagdet >= 0.80 { "met" } else { "not met" }
    );
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![("published score closure", table_closure())];
    let (quality, retrieval) = generated_corpus();
    results.push(("generated corpus detection", quality));
    results.push(("shuffle robustness", shuffle()));
    results.push(("candidate retrieval", retrieval));
    results.push(("character-set oracle", oracle_check()));
    results.push(("worker determinism", determinism()));
    results.push(("property suites", properties()));

    let mut failures = 0;
    for (k, (name, o)) in results.iter().enumerate() {
        println!("{} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
        failures += !o.pass as usize;
    }
    seed_spread();
    pan16();
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
