//! `plagscan`: index sources, detect reused passages, evaluate and sweep
//! detectors, and render reports.

mod lab;
mod manifest;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use plagscan::alignment::{align, Detection};
use plagscan::config::{Config, ConfigError};
use plagscan::corpus::{generate, load_corpus, read_text_dir, CorpusError, GenSpec, RawDocument};
use plagscan::evaluation::{evaluate, GoldCase};
use plagscan::index::{IdfSource, IndexBuilder, InvertedIndex, LocalIdf};
use plagscan::pipeline::{detection_rows, Detector, PipelineError};
use plagscan::records::{read_detections_file, write_candidates, write_detections, DetectionRow, RecordsError};
use plagscan::report::{dotplot_svg, render_report};
use plagscan::{LanguageResources, NormalizedDocument};

use crate::manifest::{dir_digest, now, RunManifest};

#[derive(Parser)]
#[command(name = "plagscan", version, about = "Text-reuse detection against a source collection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an inverted index over a directory of source texts.
    Index(IndexArgs),
    /// Retrieve candidates and align a suspicious file or directory.
    Detect(DetectArgs),
    /// Align one suspicious file against one source file.
    Align(AlignArgs),
    /// Score a detections file against a corpus's gold annotations.
    Eval(EvalArgs),
    /// Sweep alignment methods and parameters over a corpus.
    Lab(LabArgs),
    /// Render an HTML report for one suspicious document.
    Report(ReportArgs),
    /// Write a synthetic corpus with gold annotations.
    Gen(GenArgs),
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Resource directory or built-in bundle name (`fa`, `latin`).
    #[arg(long, default_value = "fa")]
    resources: String,
}

#[derive(Args)]
struct DetectArgs {
    /// A text file or a directory of `*.txt` files.
    #[arg(long)]
    susp: PathBuf,
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `workers` from the config.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides `resources` from the config.
    #[arg(long)]
    resources: Option<String>,
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long)]
    susp: PathBuf,
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Take IDF from this index instead of from the two documents.
    #[arg(long)]
    index: Option<PathBuf>,
    /// Also write a sentence dot plot.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Detections file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    resources: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    det: PathBuf,
}

#[derive(Args)]
struct LabArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "fa")]
    resources: String,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    det: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Suspicious document id; needed when the detections cover several.
    #[arg(long)]
    susp: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    /// Generator spec as JSON; omitted fields take their defaults.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

/// A request that cannot be served as given (exit code 1).
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_DATA: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        let io = cause.is::<std::io::Error>()
            || cause.downcast_ref::<CorpusError>().is_some_and(CorpusError::is_io)
            || cause.downcast_ref::<ConfigError>().is_some_and(ConfigError::is_io)
            || matches!(cause.downcast_ref::<RecordsError>(), Some(RecordsError::Io(_)))
            || matches!(
                cause.downcast_ref::<PipelineError>(),
                Some(PipelineError::Source { .. } | PipelineError::MissingSource(_))
            );
        if io {
            return EXIT_IO;
        }
    }
    EXIT_DATA
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Index(a) => cmd_index(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Align(a) => cmd_align(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Lab(a) => cmd_lab(a),
        Command::Report(a) => cmd_report(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", message(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

/// The error chain joined by ": ", skipping causes whose text the previous
/// message already ends with (library errors often embed their source).
fn message(err: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in err.chain() {
        let s = cause.to_string();
        if msg.is_empty() {
            msg = s;
        } else if !msg.ends_with(&s) {
            msg.push_str(": ");
            msg.push_str(&s);
        }
    }
    msg
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn resources(spec: &str) -> Result<LanguageResources> {
    LanguageResources::resolve(spec).with_context(|| format!("cannot load resources `{spec}`"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn read_file(path: &Path) -> Result<RawDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let id = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
    Ok(RawDocument::new(id, text))
}

fn normalize_all(docs: &[RawDocument], res: &LanguageResources) -> Vec<NormalizedDocument> {
    docs.iter()
        .map(|d| NormalizedDocument::new(d.doc_id.clone(), d.text.clone(), res))
        .collect()
}

fn cmd_index(a: IndexArgs) -> Result<()> {
    let res = resources(&a.resources)?;
    let docs = read_text_dir(&a.src)?;
    let root = std::fs::canonicalize(&a.src).with_context(|| format!("cannot resolve {}", a.src.display()))?;
    let mut b = IndexBuilder::new()
        .source_root(root.to_string_lossy().into_owned())
        .resources_id(res.id());
    for d in normalize_all(&docs, &res) {
        let path = d.doc_id.clone();
        b.add(&d, path)?;
    }
    let index = b.finish();
    index.persist(&a.out).with_context(|| format!("cannot write index to {}", a.out.display()))?;
    eprintln!("indexed {} documents, {} terms", index.n_docs(), index.n_terms());
    Ok(())
}

fn cmd_detect(a: DetectArgs) -> Result<()> {
    let started_at = now();
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(r) = a.resources {
        cfg.resources = r;
    }
    cfg.validate()?;
    let res = resources(&cfg.resources)?;
    let index = InvertedIndex::load(&a.index).with_context(|| format!("cannot load index {}", a.index.display()))?;
    if !index.resources_id().is_empty() && index.resources_id() != res.id() {
        eprintln!(
            "warning: index was built with resources {} but detection uses {}",
            index.resources_id(),
            res.id()
        );
    }
    let raw = if a.susp.is_dir() { read_text_dir(&a.susp)? } else { vec![read_file(&a.susp)?] };
    let susp = normalize_all(&raw, &res);

    let detector = Detector::new(&index, &res, &cfg, Path::new(index.source_root()));
    let results = detector.detect_all(&susp)?;
    let rows = detection_rows(&results);

    let mut w = create(&a.out)?;
    write_detections(&mut w, &rows)?;
    w.flush()?;
    let cand_path = sibling(&a.out, "candidates.tsv");
    let mut w = create(&cand_path)?;
    write_candidates(
        &mut w,
        results.iter().map(|r| (r.susp_doc_id.as_str(), r.retrieval.candidates.as_slice())),
    )?;
    w.flush()?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "detect",
        resources_id: res.id().to_string(),
        index_dir: a.index.display().to_string(),
        index_digest: dir_digest(&a.index)?,
        inputs: raw.iter().map(|d| d.doc_id.clone()).collect(),
        detections: rows.len(),
        config: cfg,
        started_at,
        finished_at: now(),
    };
    let mut w = create(&sibling(&a.out, "manifest.json"))?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;
    eprintln!("{} documents, {} detections", susp.len(), rows.len());
    Ok(())
}

/// `<out>.<suffix>` next to `out`.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn align_pair(
    susp: &NormalizedDocument,
    src: &NormalizedDocument,
    idf: &impl IdfSource,
    cfg: &Config,
    svg: Option<&Path>,
) -> Result<Vec<Detection>> {
    if let Some(path) = svg {
        std::fs::write(path, dotplot_svg(susp, src, idf, &cfg.alignment))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(align(susp, src, idf, &cfg.alignment))
}

fn cmd_align(a: AlignArgs) -> Result<()> {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(r) = a.resources {
        cfg.resources = r;
    }
    cfg.validate()?;
    let res = resources(&cfg.resources)?;
    let docs = normalize_all(&[read_file(&a.susp)?, read_file(&a.src)?], &res);
    let (susp, src) = (&docs[0], &docs[1]);
    let dets = match &a.index {
        Some(dir) => {
            let index = InvertedIndex::load(dir).with_context(|| format!("cannot load index {}", dir.display()))?;
            align_pair(susp, src, &index, &cfg, a.svg.as_deref())?
        }
        None => align_pair(susp, src, &LocalIdf::from_documents([susp, src]), &cfg, a.svg.as_deref())?,
    };
    let mut rows: Vec<DetectionRow> = dets.iter().map(DetectionRow::from).collect();
    plagscan::records::sort_rows(&mut rows);
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            write_detections(&mut w, &rows)?;
            w.flush()?;
        }
        None => write_detections(std::io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let rows = read_detections_file(&a.det).with_context(|| format!("cannot load {}", a.det.display()))?;
    let dets: Vec<GoldCase> = rows.iter().map(GoldCase::from).collect();
    let summary = evaluate(&corpus.gold, &dets)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_lab(a: LabArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.grid).with_context(|| format!("cannot read {}", a.grid.display()))?;
    let grid: lab::Grid = serde_json::from_str(&text).with_context(|| format!("invalid grid {}", a.grid.display()))?;
    let points = grid.points()?;
    let res = resources(grid.resources.as_deref().unwrap_or(&a.resources))?;
    let corpus = load_corpus(&a.corpus)?;
    let rows = lab::run_lab(&corpus, &res, &points)?;
    let mut w = create(&a.out)?;
    lab::write_csv(&mut w, &rows)?;
    w.flush()?;
    eprintln!("{} grid points", rows.len());
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let rows = read_detections_file(&a.det).with_context(|| format!("cannot load {}", a.det.display()))?;
    let susp_id = match a.susp {
        Some(id) => id,
        None => {
            let mut ids: Vec<&str> = rows.iter().map(|r| r.susp_doc_id.as_str()).collect();
            ids.dedup();
            match (ids.as_slice(), corpus.susp_docs.as_slice()) {
                ([one], _) => one.to_string(),
                ([], [only]) => only.doc_id.clone(),
                _ => {
                    return Err(UsageError(
                        "the detections do not name a single suspicious document; pass --susp".into(),
                    )
                    .into())
                }
            }
        }
    };
    let Some(doc) = corpus.susp(&susp_id) else {
        bail!("suspicious document {susp_id} is not in {}", a.corpus.display());
    };
    let rows: Vec<DetectionRow> = rows.into_iter().filter(|r| r.susp_doc_id == susp_id).collect();
    if let Some(r) = rows.iter().find(|r| corpus.src(&r.src_doc_id).is_none()) {
        bail!("source document {} is not in {}", r.src_doc_id, a.corpus.display());
    }
    let html = render_report(&susp_id, &doc.text, &rows, |id| corpus.src(id).map(RawDocument::char_len))?;
    std::fs::write(&a.out, html).with_context(|| format!("cannot write {}", a.out.display()))?;
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let mut spec = match &a.spec {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            serde_json::from_str::<GenSpec>(&text).with_context(|| format!("invalid generator spec {}", p.display()))?
        }
        None => GenSpec::default(),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let corpus = generate(&spec)?;
    corpus.write(&a.out).with_context(|| format!("cannot write corpus to {}", a.out.display()))?;
    eprintln!(
        "{} sources, {} suspicious documents, {} cases",
        corpus.src_docs.len(),
        corpus.susp_docs.len(),
        corpus.gold.len()
    );
    Ok(())
}
