//! `biblio`: file checker, analyses and the HTTP server from the command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 input could not be parsed,
//! 3 input not eligible for the analysis, 4 invalid parameters or usage.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use biblio_core::ingest::to_canonical_csv;
use biblio_core::{
    check_capabilities, load_dataset, parse_dataset, AnalysisError, AnalysisKind, AnalysisParams, Dataset,
    MappingSet, SourceKind,
};
use biblio_service::Config;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INELIGIBLE: u8 = 3;
const EXIT_PARAMS: u8 = 4;

#[derive(Parser)]
#[command(name = "biblio", version, about = "Bibliometric text analysis over Scopus, Web of Science, Lens and custom exports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report which analyses the file supports.
    Check {
        #[command(flatten)]
        input: Input,
        /// Print the capability report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Lemmatize or stem keyword columns (writes result.csv and keywords_map.csv).
    Stem(Run<StemFlags>),
    /// LDA topic model.
    Lda(Run<TopicFlags>),
    /// Biterm topic model for short texts.
    Btm(Run<TopicFlags>),
    /// k-means over document embeddings, topics labeled by class-based TF-IDF.
    Ctfidf(Run<CtfidfFlags>),
    /// Association rules and the keyword network.
    Net(Run<NetFlags>),
    /// Document type / source / year hierarchy with citation means.
    Sunburst(Run<SunburstFlags>),
    /// Rewrite the input as CSV with canonical column names.
    Convert {
        #[command(flatten)]
        input: Input,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service. Flags override the BIBLIO_* environment variables.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Maximum upload size in bytes.
        #[arg(long)]
        upload_limit: Option<usize>,
    },
}

#[derive(Args)]
struct Input {
    /// Export file (CSV, tab-delimited or tagged WoS text).
    input: PathBuf,
    /// Skip detection and parse as this source.
    #[arg(long, value_parser = parse_source)]
    source: Option<SourceKind>,
    /// Directory of field-mapping JSON files replacing the bundled ones.
    #[arg(long)]
    mappings: Option<PathBuf>,
}

fn parse_source(s: &str) -> Result<SourceKind, String> {
    s.parse()
}

#[derive(Args)]
struct Run<F: Args> {
    #[command(flatten)]
    input: Input,
    /// Output directory.
    #[arg(long, default_value = "biblio-out")]
    out: PathBuf,
    /// Base parameters as a JSON object; individual flags override its keys.
    #[arg(long)]
    params: Option<String>,
    /// Print a JSON summary instead of one line per file.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    flags: F,
}

/// Flags that translate into analysis parameters with the same names.
trait ParamFlags {
    fn fill(&self, params: &mut Map<String, Value>) -> anyhow::Result<()>;
}

fn set<T: serde::Serialize>(params: &mut Map<String, Value>, key: &str, value: &Option<T>) {
    if let Some(v) = value {
        params.insert(key.to_string(), json!(v));
    }
}

#[derive(Args)]
struct StemFlags {
    /// lemmatize or stem.
    #[arg(long)]
    method: Option<String>,
    /// Keyword column to rewrite (repeatable); all populated ones by default.
    #[arg(long = "columns", alias = "column")]
    columns: Vec<String>,
}

impl ParamFlags for StemFlags {
    fn fill(&self, p: &mut Map<String, Value>) -> anyhow::Result<()> {
        set(p, "method", &self.method);
        if !self.columns.is_empty() {
            p.insert("columns".into(), json!(self.columns));
        }
        Ok(())
    }
}

#[derive(Args)]
struct PrepFlags {
    #[arg(long)]
    column: Option<String>,
    #[arg(long, value_name = "BOOL")]
    lowercase: Option<bool>,
    #[arg(long, alias = "remove_punctuation", value_name = "BOOL")]
    remove_punctuation: Option<bool>,
    #[arg(long, alias = "remove_copyright", value_name = "BOOL")]
    remove_copyright: Option<bool>,
    /// Extra stopwords, comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    stopwords: Vec<String>,
    /// none, lemmatize or stem.
    #[arg(long)]
    normalization: Option<String>,
}

impl ParamFlags for PrepFlags {
    fn fill(&self, p: &mut Map<String, Value>) -> anyhow::Result<()> {
        set(p, "column", &self.column);
        set(p, "lowercase", &self.lowercase);
        set(p, "remove_punctuation", &self.remove_punctuation);
        set(p, "remove_copyright", &self.remove_copyright);
        if !self.stopwords.is_empty() {
            p.insert("stopwords".into(), json!(self.stopwords));
        }
        set(p, "normalization", &self.normalization);
        Ok(())
    }
}

#[derive(Args)]
struct TopicFlags {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, alias = "top_n")]
    top_n: Option<usize>,
    /// Relevance weight in [0, 1].
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    prep: PrepFlags,
}

impl ParamFlags for TopicFlags {
    fn fill(&self, p: &mut Map<String, Value>) -> anyhow::Result<()> {
        set(p, "k", &self.k);
        set(p, "alpha", &self.alpha);
        set(p, "beta", &self.beta);
        set(p, "iterations", &self.iterations);
        set(p, "seed", &self.seed);
        set(p, "top_n", &self.top_n);
        set(p, "lambda", &self.lambda);
        self.prep.fill(p)
    }
}

#[derive(Args)]
struct CtfidfFlags {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, alias = "top_n")]
    top_n: Option<usize>,
    /// Sidecar CSV of precomputed document vectors (`row_index,v0,v1,...`).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[command(flatten)]
    prep: PrepFlags,
}

impl ParamFlags for CtfidfFlags {
    fn fill(&self, p: &mut Map<String, Value>) -> anyhow::Result<()> {
        set(p, "k", &self.k);
        set(p, "seed", &self.seed);
        set(p, "top_n", &self.top_n);
        if let Some(path) = &self.embeddings {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            p.insert("embeddings".into(), Value::String(text));
        }
        self.prep.fill(p)
    }
}

#[derive(Args)]
struct NetFlags {
    #[arg(long)]
    column: Option<String>,
    #[arg(long, alias = "min_support")]
    min_support: Option<f64>,
    #[arg(long, alias = "min_confidence")]
    min_confidence: Option<f64>,
    #[arg(long, alias = "max_len")]
    max_len: Option<usize>,
    /// Keep only edges between these items (comma separated or repeated).
    #[arg(long, alias = "selected_nodes", value_delimiter = ',')]
    selected_nodes: Vec<String>,
}

impl ParamFlags for NetFlags {
    fn fill(&self, p: &mut Map<String, Value>) -> anyhow::Result<()> {
        set(p, "column", &self.column);
        set(p, "min_support", &self.min_support);
        set(p, "min_confidence", &self.min_confidence);
        set(p, "max_len", &self.max_len);
        if !self.selected_nodes.is_empty() {
            p.insert("selected_nodes".into(), json!(self.selected_nodes));
        }
        Ok(())
    }
}

#[derive(Args)]
struct SunburstFlags {
    #[arg(long, alias = "year_min")]
    year_min: Option<i32>,
    #[arg(long, alias = "year_max")]
    year_max: Option<i32>,
}

impl ParamFlags for SunburstFlags {
    fn fill(&self, p: &mut Map<String, Value>) -> anyhow::Result<()> {
        set(p, "year_min", &self.year_min);
        set(p, "year_max", &self.year_max);
        Ok(())
    }
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl std::fmt::Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self::new(EXIT_OTHER, format!("{e:#}"))
    }
}

fn load(input: &Input) -> Result<Dataset, Failure> {
    let mappings = match &input.mappings {
        Some(dir) => MappingSet::load_dir(dir).map_err(|e| Failure::new(EXIT_OTHER, e))?,
        None => MappingSet::bundled(),
    };
    let raw = fs::read(&input.input)
        .with_context(|| format!("reading {}", input.input.display()))
        .map_err(Failure::from)?;
    let name = input.input.file_name().map_or(String::new(), |n| n.to_string_lossy().into_owned());
    let parsed = match input.source {
        Some(kind) => parse_dataset(&raw, kind, &mappings),
        None => load_dataset(&raw, &name, &mappings),
    };
    let ds = parsed.map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", input.input.display())))?;
    for w in &ds.warnings {
        eprintln!("warning: row {} column {}: {}", w.row, w.column, w.message);
    }
    Ok(ds)
}

fn run_analysis<F: Args + ParamFlags>(kind: AnalysisKind, run: &Run<F>) -> Result<(), Failure> {
    let mut params = match &run.params {
        Some(text) => match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(map)) => map,
            Ok(_) => return Err(Failure::new(EXIT_PARAMS, "--params must be a JSON object")),
            Err(e) => return Err(Failure::new(EXIT_PARAMS, format!("--params: {e}"))),
        },
        None => Map::new(),
    };
    run.flags.fill(&mut params)?;
    let params = AnalysisParams::from_json(kind, &Value::Object(params)).map_err(analysis_failure)?;
    let ds = load(&run.input)?;
    let output = biblio_core::run(&ds, &params).map_err(analysis_failure)?;
    write_outputs(&run.out, &output.files, run.json, kind)
}

fn analysis_failure(e: AnalysisError) -> Failure {
    match &e {
        AnalysisError::InvalidParams(_) => Failure::new(EXIT_PARAMS, e),
        AnalysisError::NotEligible { .. } => Failure::new(EXIT_INELIGIBLE, e),
        AnalysisError::Failed(_) => Failure::new(EXIT_OTHER, e),
    }
}

fn write_outputs(dir: &Path, files: &[(String, String)], as_json: bool, kind: AnalysisKind) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::from)?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::from)?;
        if !as_json {
            println!("wrote {} ({} bytes)", path.display(), content.len());
        }
        written.push(json!({ "path": path, "bytes": content.len() }));
    }
    if as_json {
        println!("{}", json!({ "analysis": kind, "out": dir, "files": written }));
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check { input, json } => {
            let ds = load(&input)?;
            let report = check_capabilities(&ds);
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                println!("source: {}  rows: {}", ds.source, ds.row_count);
                print!("{}", report.to_table());
            }
            Ok(())
        }
        Command::Stem(run) => run_analysis(AnalysisKind::KeywordsStem, &run),
        Command::Lda(run) => run_analysis(AnalysisKind::TopicLda, &run),
        Command::Btm(run) => run_analysis(AnalysisKind::TopicBtm, &run),
        Command::Ctfidf(run) => run_analysis(AnalysisKind::TopicCtfidf, &run),
        Command::Net(run) => run_analysis(AnalysisKind::Network, &run),
        Command::Sunburst(run) => run_analysis(AnalysisKind::Sunburst, &run),
        Command::Convert { input, out } => {
            let csv = to_canonical_csv(&load(&input)?);
            match out {
                Some(path) => fs::write(&path, csv)
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(Failure::from),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
        Command::Serve {
            port,
            data_dir,
            workers,
            upload_limit,
        } => {
            let mut config = Config::from_env().map_err(|e| Failure::new(EXIT_PARAMS, e))?;
            if let Some(p) = port {
                config.port = p;
            }
            if let Some(d) = data_dir {
                config.data_dir = d;
            }
            if let Some(w) = workers {
                config.workers = w.max(1);
            }
            if let Some(l) = upload_limit {
                config.upload_limit = l;
            }
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
                )
                .init();
            let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
            rt.block_on(biblio_service::serve(config)).context("server error")?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAMS } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
