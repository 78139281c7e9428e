//! One entry point per analysis, shared by the CLI and the HTTP service so
//! both write the same bytes for the same dataset, parameters and seed.
//!
//! Parameters arrive as a JSON object and are checked against the analysis's
//! schema (unknown keys rejected) before anything runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::assocnet::{
    self, build_graph, build_transactions, derive_rules, item_counts, mine_itemsets_bounded, rules_to_csv,
    AssociationRule, RuleGraph,
};
use crate::capability::{check_capabilities, detect_keyword_columns, Analysis};
use crate::ingest::{canonical, to_canonical_csv, Dataset};
use crate::keystem::{stem_keywords, KeywordMethod};
use crate::sunburst::{build_sunburst, SunburstError};
use crate::textprep::{build_corpus, Normalization, PrepOptions, TokenizedCorpus};
use crate::topics::{
    argmax, btm_extract_biterms, btm_fit, cluster_embeddings, ctfidf, lda_fit, parse_embeddings, sort_ranked,
    TermWeight, TopicError, TopicModelParams, TopicModelResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisKind {
    KeywordsStem,
    TopicLda,
    TopicBtm,
    TopicCtfidf,
    Network,
    Sunburst,
}

impl AnalysisKind {
    pub const ALL: [AnalysisKind; 6] = [
        Self::KeywordsStem,
        Self::TopicLda,
        Self::TopicBtm,
        Self::TopicCtfidf,
        Self::Network,
        Self::Sunburst,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::KeywordsStem => "keywords_stem",
            Self::TopicLda => "topic_lda",
            Self::TopicBtm => "topic_btm",
            Self::TopicCtfidf => "topic_ctfidf",
            Self::Network => "network",
            Self::Sunburst => "sunburst",
        }
    }

    /// The file-checker verdict that gates this analysis.
    pub fn capability(self) -> Analysis {
        match self {
            Self::KeywordsStem => Analysis::KeywordsStem,
            Self::TopicLda | Self::TopicBtm | Self::TopicCtfidf => Analysis::TopicModeling,
            Self::Network => Analysis::BidirectionalNetwork,
            Self::Sunburst => Analysis::Sunburst,
        }
    }

    /// Name of the CSV served as the job's tabular download.
    pub fn primary_csv(self) -> &'static str {
        match self {
            Self::KeywordsStem => "result.csv",
            Self::TopicLda | Self::TopicBtm | Self::TopicCtfidf => "top_terms.csv",
            Self::Network => "rules.csv",
            Self::Sunburst => "sunburst.csv",
        }
    }
}

impl fmt::Display for AnalysisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnalysisKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown analysis `{s}`"))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dataset is not eligible; missing: {}", .missing_fields.join(", "))]
    NotEligible { missing_fields: Vec<String> },
    #[error("analysis failed: {0}")]
    Failed(String),
}

fn invalid(e: impl fmt::Display) -> AnalysisError {
    AnalysisError::InvalidParams(e.to_string())
}

fn failed(e: impl fmt::Display) -> AnalysisError {
    AnalysisError::Failed(e.to_string())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StemParams {
    pub method: KeywordMethod,
    /// Keyword columns to rewrite; empty selects every populated one.
    pub columns: Vec<String>,
}

/// Text preprocessing switches shared by the three topic pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopicJobParams {
    /// Free-text column; defaults to Abstract for LDA and Title for BTM.
    pub column: Option<String>,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    pub top_n: usize,
    pub lambda: f64,
    pub lowercase: bool,
    pub remove_punctuation: bool,
    pub remove_copyright: bool,
    pub stopwords: Vec<String>,
    pub normalization: Normalization,
}

impl Default for TopicJobParams {
    fn default() -> Self {
        let m = TopicModelParams::default();
        let p = PrepOptions::default();
        Self {
            column: None,
            k: m.k,
            alpha: m.alpha,
            beta: m.beta,
            iterations: m.iterations,
            seed: m.seed,
            top_n: m.top_n,
            lambda: m.lambda_relevance,
            lowercase: p.lowercase,
            remove_punctuation: p.remove_punctuation,
            remove_copyright: p.remove_copyright,
            stopwords: Vec::new(),
            normalization: p.normalization,
        }
    }
}

impl TopicJobParams {
    pub fn model(&self) -> TopicModelParams {
        TopicModelParams {
            k: self.k,
            alpha: self.alpha,
            beta: self.beta,
            iterations: self.iterations,
            seed: self.seed,
            top_n: self.top_n,
            lambda_relevance: self.lambda,
        }
    }

    pub fn prep(&self) -> PrepOptions {
        prep_options(
            self.lowercase,
            self.remove_punctuation,
            self.remove_copyright,
            &self.stopwords,
            self.normalization,
        )
    }
}

fn prep_options(
    lowercase: bool,
    remove_punctuation: bool,
    remove_copyright: bool,
    stopwords: &[String],
    normalization: Normalization,
) -> PrepOptions {
    PrepOptions {
        lowercase,
        remove_punctuation,
        remove_copyright,
        extra_stopwords: stopwords.iter().cloned().collect(),
        normalization,
    }
    .normalized()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CtfidfParams {
    pub column: Option<String>,
    pub k: usize,
    pub seed: u64,
    pub top_n: usize,
    /// Sidecar CSV text (`row_index,v0,...`). Without it, documents are
    /// embedded as TF-IDF vectors over the most frequent terms.
    pub embeddings: Option<String>,
    pub lowercase: bool,
    pub remove_punctuation: bool,
    pub remove_copyright: bool,
    pub stopwords: Vec<String>,
    pub normalization: Normalization,
}

impl Default for CtfidfParams {
    fn default() -> Self {
        let t = TopicJobParams::default();
        Self {
            column: None,
            k: t.k,
            seed: t.seed,
            top_n: t.top_n,
            embeddings: None,
            lowercase: t.lowercase,
            remove_punctuation: t.remove_punctuation,
            remove_copyright: t.remove_copyright,
            stopwords: Vec::new(),
            normalization: t.normalization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkParams {
    /// Semicolon-delimited column; defaults to the first usable keyword column.
    pub column: Option<String>,
    pub min_support: f64,
    pub min_confidence: f64,
    /// Largest itemset mined. Bounds the search on long keyword lists.
    pub max_len: usize,
    /// Restrict the graph to these items.
    pub selected_nodes: Option<Vec<String>>,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            column: None,
            min_support: assocnet::DEFAULT_MIN_SUPPORT,
            min_confidence: assocnet::DEFAULT_MIN_CONFIDENCE,
            max_len: 3,
            selected_nodes: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SunburstParams {
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
}

impl SunburstParams {
    pub fn year_range(&self) -> Option<(i32, i32)> {
        match (self.year_min, self.year_max) {
            (None, None) => None,
            (lo, hi) => Some((lo.unwrap_or(i32::MIN), hi.unwrap_or(i32::MAX))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisParams {
    KeywordsStem(StemParams),
    TopicLda(TopicJobParams),
    TopicBtm(TopicJobParams),
    TopicCtfidf(CtfidfParams),
    Network(NetworkParams),
    Sunburst(SunburstParams),
}

impl AnalysisParams {
    /// Parses and validates a JSON parameter object (`null` means defaults).
    pub fn from_json(kind: AnalysisKind, value: &Value) -> Result<Self, AnalysisError> {
        let value = if value.is_null() {
            Value::Object(Default::default())
        } else {
            value.clone()
        };
        if !value.is_object() {
            return Err(invalid("params must be a JSON object"));
        }
        let params = match kind {
            AnalysisKind::KeywordsStem => Self::KeywordsStem(serde_json::from_value(value).map_err(invalid)?),
            AnalysisKind::TopicLda => Self::TopicLda(serde_json::from_value(value).map_err(invalid)?),
            AnalysisKind::TopicBtm => Self::TopicBtm(serde_json::from_value(value).map_err(invalid)?),
            AnalysisKind::TopicCtfidf => Self::TopicCtfidf(serde_json::from_value(value).map_err(invalid)?),
            AnalysisKind::Network => Self::Network(serde_json::from_value(value).map_err(invalid)?),
            AnalysisKind::Sunburst => Self::Sunburst(serde_json::from_value(value).map_err(invalid)?),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn kind(&self) -> AnalysisKind {
        match self {
            Self::KeywordsStem(_) => AnalysisKind::KeywordsStem,
            Self::TopicLda(_) => AnalysisKind::TopicLda,
            Self::TopicBtm(_) => AnalysisKind::TopicBtm,
            Self::TopicCtfidf(_) => AnalysisKind::TopicCtfidf,
            Self::Network(_) => AnalysisKind::Network,
            Self::Sunburst(_) => AnalysisKind::Sunburst,
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        match self {
            Self::KeywordsStem(_) => Ok(()),
            Self::TopicLda(p) | Self::TopicBtm(p) => p.model().validate().map_err(map_topic_error),
            Self::TopicCtfidf(p) => {
                if p.k < 2 {
                    return Err(invalid(format!("k must be at least 2, got {}", p.k)));
                }
                if p.top_n == 0 {
                    return Err(invalid("top_n must be at least 1"));
                }
                Ok(())
            }
            Self::Network(p) => {
                if !(p.min_support > 0.0 && p.min_support <= 1.0) {
                    return Err(invalid(assocnet::AssocError::InvalidSupport(p.min_support)));
                }
                if !(p.min_confidence > 0.0 && p.min_confidence <= 1.0) {
                    return Err(invalid(assocnet::AssocError::InvalidConfidence(p.min_confidence)));
                }
                if p.max_len < 2 {
                    return Err(invalid("max_len must be at least 2"));
                }
                Ok(())
            }
            Self::Sunburst(p) => match p.year_range() {
                Some((lo, hi)) if lo > hi => Err(invalid(SunburstError::InvalidRange(lo, hi))),
                _ => Ok(()),
            },
        }
    }
}

/// Files produced by one run. `files` includes `result.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutput {
    pub kind: AnalysisKind,
    pub result_json: String,
    pub files: Vec<(String, String)>,
}

impl AnalysisOutput {
    fn new(kind: AnalysisKind, result: &impl Serialize, mut files: Vec<(String, String)>) -> Self {
        let mut result_json = serde_json::to_string_pretty(result).expect("results serialize");
        result_json.push('\n');
        files.insert(0, ("result.json".to_string(), result_json.clone()));
        Self {
            kind,
            result_json,
            files,
        }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn primary_csv(&self) -> Option<&str> {
        self.file(self.kind.primary_csv())
    }
}

/// Fails with the file checker's missing fields when `kind` cannot run.
pub fn check_eligible(ds: &Dataset, kind: AnalysisKind) -> Result<(), AnalysisError> {
    let report = check_capabilities(ds);
    let cap = report.get(kind.capability());
    if cap.eligible {
        Ok(())
    } else {
        Err(AnalysisError::NotEligible {
            missing_fields: cap.missing_fields.clone(),
        })
    }
}

pub fn run(ds: &Dataset, params: &AnalysisParams) -> Result<AnalysisOutput, AnalysisError> {
    check_eligible(ds, params.kind())?;
    params.validate()?;
    match params {
        AnalysisParams::KeywordsStem(p) => run_stem(ds, p),
        AnalysisParams::TopicLda(p) => run_topic_model(ds, p, AnalysisKind::TopicLda),
        AnalysisParams::TopicBtm(p) => run_topic_model(ds, p, AnalysisKind::TopicBtm),
        AnalysisParams::TopicCtfidf(p) => run_ctfidf(ds, p),
        AnalysisParams::Network(p) => run_network(ds, p),
        AnalysisParams::Sunburst(p) => run_sunburst(ds, p),
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to Vec");
    for row in rows {
        w.write_record(&row).expect("write to Vec");
    }
    String::from_utf8(w.into_inner().expect("flush Vec")).expect("utf-8")
}

#[derive(Serialize)]
struct StemReport<'a> {
    analysis: AnalysisKind,
    method: KeywordMethod,
    columns: &'a [String],
    rows: usize,
    distinct_keywords_before: usize,
    distinct_keywords_after: usize,
    keyword_map: Vec<MapEntry<'a>>,
}

#[derive(Serialize)]
struct MapEntry<'a> {
    original: &'a str,
    modified: &'a str,
}

fn distinct_keywords(ds: &Dataset, columns: &[String]) -> usize {
    ds.records
        .iter()
        .flat_map(|r| columns.iter().filter_map(|c| r.keyword_fields.get(c)).flatten())
        .collect::<BTreeSet<_>>()
        .len()
}

fn run_stem(ds: &Dataset, p: &StemParams) -> Result<AnalysisOutput, AnalysisError> {
    let columns = if p.columns.is_empty() {
        check_capabilities(ds).keywords_stem.usable_columns
    } else {
        p.columns.clone()
    };
    let (out, map) = stem_keywords(ds, p.method, &columns).map_err(invalid)?;
    let report = StemReport {
        analysis: AnalysisKind::KeywordsStem,
        method: p.method,
        columns: &columns,
        rows: out.row_count,
        distinct_keywords_before: distinct_keywords(ds, &columns),
        distinct_keywords_after: distinct_keywords(&out, &columns),
        keyword_map: map
            .pairs
            .iter()
            .map(|(o, m)| MapEntry {
                original: o,
                modified: m,
            })
            .collect(),
    };
    Ok(AnalysisOutput::new(
        AnalysisKind::KeywordsStem,
        &report,
        vec![
            ("result.csv".into(), to_canonical_csv(&out)),
            ("keywords_map.csv".into(), map.to_csv()),
        ],
    ))
}

/// The explicit column, else the first usable one from `preferred`, else
/// the first usable text column.
fn text_column(ds: &Dataset, explicit: &Option<String>, preferred: &[&str]) -> Result<String, AnalysisError> {
    if let Some(c) = explicit {
        return Ok(c.clone());
    }
    let usable = check_capabilities(ds).topic_modeling.usable_columns;
    preferred
        .iter()
        .map(|s| s.to_string())
        .find(|c| usable.contains(c))
        .or_else(|| usable.first().cloned())
        .ok_or_else(|| AnalysisError::NotEligible {
            missing_fields: vec![canonical::TITLE.into(), canonical::ABSTRACT.into()],
        })
}

#[derive(Serialize)]
struct TopicReport<'a> {
    analysis: AnalysisKind,
    column: &'a str,
    preprocessing: &'a PrepOptions,
    documents: usize,
    #[serde(flatten)]
    model: &'a TopicModelResult,
    dominant_topics: Vec<usize>,
}

fn map_topic_error(e: TopicError) -> AnalysisError {
    match e {
        TopicError::InvalidParams(msg) => AnalysisError::InvalidParams(msg),
        TopicError::InvalidLambda(_) => invalid(e),
        _ => failed(e),
    }
}

fn run_topic_model(ds: &Dataset, p: &TopicJobParams, kind: AnalysisKind) -> Result<AnalysisOutput, AnalysisError> {
    let preferred: &[&str] = if kind == AnalysisKind::TopicBtm {
        &[canonical::TITLE, canonical::ABSTRACT]
    } else {
        &[canonical::ABSTRACT, canonical::TITLE]
    };
    let column = text_column(ds, &p.column, preferred)?;
    let prep = p.prep();
    let corpus = build_corpus(ds, &column, &prep).map_err(invalid)?;
    let model = p.model();
    let result = if kind == AnalysisKind::TopicBtm {
        btm_fit(&corpus, &btm_extract_biterms(&corpus), &model)
    } else {
        lda_fit(&corpus, &model)
    }
    .map_err(map_topic_error)?;

    let report = TopicReport {
        analysis: kind,
        column: &column,
        preprocessing: &prep,
        documents: corpus.num_docs(),
        model: &result,
        dominant_topics: result.dominant_topics(),
    };
    let top_terms = csv_string(
        &["topic", "rank", "term", "probability", "relevance_term", "relevance"],
        result.top_terms.iter().zip(&result.relevance).enumerate().flat_map(|(t, (top, rel))| {
            (0..top.len().max(rel.len())).map(move |i| {
                let (a, b) = (top.get(i), rel.get(i));
                vec![
                    t.to_string(),
                    (i + 1).to_string(),
                    a.map(|x| x.term.clone()).unwrap_or_default(),
                    a.map(|x| x.weight.to_string()).unwrap_or_default(),
                    b.map(|x| x.term.clone()).unwrap_or_default(),
                    b.map(|x| x.weight.to_string()).unwrap_or_default(),
                ]
            })
        }),
    );
    let mut phi_header = vec!["topic"];
    phi_header.extend(result.vocabulary.iter().map(String::as_str));
    let phi = csv_string(
        &phi_header,
        result.phi.iter().enumerate().map(|(t, row)| {
            std::iter::once(t.to_string())
                .chain(row.iter().map(f64::to_string))
                .collect()
        }),
    );
    let topic_cols: Vec<String> = (0..model.k).map(|t| format!("topic_{t}")).collect();
    let mut theta_header = vec!["row_index", "dominant_topic"];
    theta_header.extend(topic_cols.iter().map(String::as_str));
    let theta = csv_string(
        &theta_header,
        result.theta.iter().enumerate().map(|(d, row)| {
            [corpus.doc_ids[d].to_string(), argmax(row).to_string()]
                .into_iter()
                .chain(row.iter().map(f64::to_string))
                .collect()
        }),
    );
    Ok(AnalysisOutput::new(
        kind,
        &report,
        vec![
            ("top_terms.csv".into(), top_terms),
            ("phi.csv".into(), phi),
            ("theta.csv".into(), theta),
        ],
    ))
}

/// Number of vocabulary terms used for fallback document vectors.
pub const FALLBACK_EMBEDDING_TERMS: usize = 300;

/// L2-normalized smoothed TF-IDF vectors over the most frequent terms.
pub fn tfidf_vectors(corpus: &TokenizedCorpus, max_terms: usize) -> Vec<Vec<f64>> {
    let mut by_freq: Vec<(usize, f64)> = corpus
        .term_frequencies
        .iter()
        .enumerate()
        .map(|(w, &f)| (w, f as f64))
        .collect();
    sort_ranked(&mut by_freq, &corpus.vocabulary);
    let kept: BTreeMap<usize, usize> = by_freq
        .iter()
        .take(max_terms)
        .enumerate()
        .map(|(col, &(w, _))| (w, col))
        .collect();
    let dim = kept.len();
    let mut df = vec![0usize; dim];
    for doc in &corpus.docs {
        let cols: BTreeSet<usize> = doc.iter().filter_map(|w| kept.get(w).copied()).collect();
        for c in cols {
            df[c] += 1;
        }
    }
    let n = corpus.num_docs() as f64;
    let idf: Vec<f64> = df.iter().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect();
    corpus
        .docs
        .iter()
        .map(|doc| {
            let mut v = vec![0.0; dim];
            for w in doc {
                if let Some(&c) = kept.get(w) {
                    v[c] += 1.0;
                }
            }
            for (x, i) in v.iter_mut().zip(&idf) {
                *x *= i;
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for x in v.iter_mut() {
                    *x /= norm;
                }
            }
            v
        })
        .collect()
}

#[derive(Serialize)]
struct CtfidfReport<'a> {
    analysis: AnalysisKind,
    column: &'a str,
    preprocessing: &'a PrepOptions,
    k: usize,
    seed: u64,
    embedding_source: &'static str,
    labels: &'a [usize],
    cluster_sizes: Vec<usize>,
    top_terms: Vec<&'a [TermWeight]>,
    vocabulary: &'a [String],
    weights: &'a [Vec<f64>],
}

fn run_ctfidf(ds: &Dataset, p: &CtfidfParams) -> Result<AnalysisOutput, AnalysisError> {
    let column = text_column(ds, &p.column, &[canonical::ABSTRACT, canonical::TITLE])?;
    let prep = prep_options(
        p.lowercase,
        p.remove_punctuation,
        p.remove_copyright,
        &p.stopwords,
        p.normalization,
    );
    let corpus = build_corpus(ds, &column, &prep).map_err(invalid)?;
    let (vectors, source) = match &p.embeddings {
        Some(text) => (parse_embeddings(text, ds.row_count).map_err(invalid)?, "sidecar"),
        None => (tfidf_vectors(&corpus, FALLBACK_EMBEDDING_TERMS), "tfidf"),
    };
    let labels = cluster_embeddings(&vectors, p.k, p.seed).map_err(failed)?;
    let result = ctfidf(&corpus, &labels).map_err(map_topic_error)?;

    let mut cluster_sizes = vec![0usize; p.k];
    for &l in &labels {
        cluster_sizes[l] += 1;
    }
    // Rows for every cluster id, including clusters that ended up empty.
    let top_terms: Vec<&[TermWeight]> = (0..p.k)
        .map(|c| match result.classes.binary_search(&c) {
            Ok(i) => &result.ranked[i][..result.ranked[i].len().min(p.top_n)],
            Err(_) => &[][..],
        })
        .collect();
    let report = CtfidfReport {
        analysis: AnalysisKind::TopicCtfidf,
        column: &column,
        preprocessing: &prep,
        k: p.k,
        seed: p.seed,
        embedding_source: source,
        labels: &labels,
        cluster_sizes,
        top_terms: top_terms.clone(),
        vocabulary: &result.vocabulary,
        weights: &result.weights,
    };
    let terms_csv = csv_string(
        &["topic", "rank", "term", "weight"],
        top_terms.iter().enumerate().flat_map(|(c, terms)| {
            terms
                .iter()
                .enumerate()
                .map(move |(i, t)| vec![c.to_string(), (i + 1).to_string(), t.term.clone(), t.weight.to_string()])
        }),
    );
    let labels_csv = csv_string(
        &["row_index", "topic"],
        labels
            .iter()
            .zip(&corpus.doc_ids)
            .map(|(l, row)| vec![row.to_string(), l.to_string()]),
    );
    Ok(AnalysisOutput::new(
        AnalysisKind::TopicCtfidf,
        &report,
        vec![
            ("top_terms.csv".into(), terms_csv),
            ("labels.csv".into(), labels_csv),
        ],
    ))
}

#[derive(Serialize)]
struct NetworkReport<'a> {
    analysis: AnalysisKind,
    column: &'a str,
    transactions: usize,
    min_support: f64,
    min_confidence: f64,
    max_len: usize,
    frequent_itemsets: usize,
    rules: &'a [AssociationRule],
    graph: &'a RuleGraph,
}

fn network_column(ds: &Dataset, p: &NetworkParams) -> Result<String, AnalysisError> {
    if let Some(c) = &p.column {
        return Ok(c.clone());
    }
    let usable = check_capabilities(ds).bidirectional_network.usable_columns;
    detect_keyword_columns(ds)
        .into_iter()
        .find(|c| usable.contains(c))
        .or_else(|| usable.first().cloned())
        .ok_or_else(|| AnalysisError::NotEligible {
            missing_fields: vec![canonical::KEYWORDS.into()],
        })
}

fn run_network(ds: &Dataset, p: &NetworkParams) -> Result<AnalysisOutput, AnalysisError> {
    let column = network_column(ds, p)?;
    let transactions = build_transactions(ds, &column).map_err(invalid)?;
    let itemsets = mine_itemsets_bounded(&transactions, p.min_support, Some(p.max_len)).map_err(invalid)?;
    let rules = derive_rules(&itemsets, p.min_confidence).map_err(invalid)?;
    let selected: Option<BTreeSet<String>> = p.selected_nodes.as_ref().map(|s| s.iter().cloned().collect());
    let graph = build_graph(&rules, &item_counts(&transactions), selected.as_ref());
    let report = NetworkReport {
        analysis: AnalysisKind::Network,
        column: &column,
        transactions: transactions.len(),
        min_support: p.min_support,
        min_confidence: p.min_confidence,
        max_len: p.max_len,
        frequent_itemsets: itemsets.len(),
        rules: &rules,
        graph: &graph,
    };
    let mut graph_json = serde_json::to_string_pretty(&graph).expect("graph serializes");
    graph_json.push('\n');
    Ok(AnalysisOutput::new(
        AnalysisKind::Network,
        &report,
        vec![
            ("rules.csv".into(), rules_to_csv(&rules)),
            ("graph.json".into(), graph_json),
            ("graph.graphml".into(), graph.to_graphml()),
        ],
    ))
}

fn run_sunburst(ds: &Dataset, p: &SunburstParams) -> Result<AnalysisOutput, AnalysisError> {
    let result = build_sunburst(ds, p.year_range()).map_err(|e| match e {
        SunburstError::NotEligible(missing_fields) => AnalysisError::NotEligible { missing_fields },
        SunburstError::InvalidRange(..) => invalid(e),
        SunburstError::EmptyAfterFilter => failed(e),
    })?;
    let f = &result.flat;
    let csv = csv_string(
        &["id", "label", "parent", "count", "value"],
        (0..f.ids.len()).map(|i| {
            vec![
                f.ids[i].clone(),
                f.labels[i].clone(),
                f.parents[i].clone(),
                f.values[i].to_string(),
                f.colors[i].to_string(),
            ]
        }),
    );
    Ok(AnalysisOutput::new(
        AnalysisKind::Sunburst,
        &result,
        vec![("sunburst.csv".into(), csv)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_dataset, MappingSet, SourceKind};
    use serde_json::json;

    fn full() -> Dataset {
        let mut text = String::from(
            "Title,Abstract,Author Keywords,Publication Year,Citations,Document Type,Source Title\n",
        );
        for i in 0..12 {
            let (kw, words) = if i % 2 == 0 {
                ("graph; network; Networks", "graph network node edge community")
            } else {
                ("topic; model", "topic model latent dirichlet allocation")
            };
            text.push_str(&format!(
                "Paper {i} on {words},{words} {words} study,{kw},{},{i},Article,J{}\n",
                2018 + i % 3,
                i % 2
            ));
        }
        parse_dataset(text.as_bytes(), SourceKind::Custom, &MappingSet::bundled()).unwrap()
    }

    fn params(kind: AnalysisKind, v: Value) -> AnalysisParams {
        AnalysisParams::from_json(kind, &v).unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in AnalysisKind::ALL {
            assert_eq!(k.as_str().parse::<AnalysisKind>().unwrap(), k);
            assert_eq!(serde_json::to_value(k).unwrap(), json!(k.as_str()));
        }
    }

    #[test]
    fn param_validation() {
        let bad = |kind, v: Value| AnalysisParams::from_json(kind, &v).unwrap_err();
        assert!(matches!(bad(AnalysisKind::TopicLda, json!({"k": 1})), AnalysisError::InvalidParams(_)));
        assert!(matches!(bad(AnalysisKind::TopicBtm, json!({"bogus": 1})), AnalysisError::InvalidParams(_)));
        assert!(matches!(bad(AnalysisKind::TopicCtfidf, json!({"k": 1})), AnalysisError::InvalidParams(_)));
        assert!(matches!(bad(AnalysisKind::Network, json!({"min_support": 0})), AnalysisError::InvalidParams(_)));
        assert!(matches!(
            bad(AnalysisKind::Sunburst, json!({"year_min": 2020, "year_max": 2010})),
            AnalysisError::InvalidParams(_)
        ));
        assert!(matches!(bad(AnalysisKind::KeywordsStem, json!([1])), AnalysisError::InvalidParams(_)));
        assert_eq!(
            params(AnalysisKind::KeywordsStem, Value::Null),
            AnalysisParams::KeywordsStem(StemParams::default())
        );
    }

    #[test]
    fn every_analysis_runs_on_full_dataset() {
        let ds = full();
        let cases = [
            (AnalysisKind::KeywordsStem, json!({})),
            (AnalysisKind::TopicLda, json!({"k": 2, "iterations": 20})),
            (AnalysisKind::TopicBtm, json!({"k": 2, "iterations": 20})),
            (AnalysisKind::TopicCtfidf, json!({"k": 2})),
            (AnalysisKind::Network, json!({"min_support": 0.2})),
            (AnalysisKind::Sunburst, json!({})),
        ];
        for (kind, v) in cases {
            let out = run(&ds, &params(kind, v)).unwrap();
            assert!(out.primary_csv().is_some(), "{kind}");
            assert!(serde_json::from_str::<Value>(&out.result_json).is_ok());
            assert_eq!(out.file("result.json"), Some(out.result_json.as_str()));
        }
    }

    #[test]
    fn stem_outputs() {
        let out = run(&full(), &params(AnalysisKind::KeywordsStem, json!({}))).unwrap();
        let map = out.file("keywords_map.csv").unwrap();
        assert!(map.starts_with("original,modified\n"));
        assert!(map.contains("networks,network\n"));
        let v: Value = serde_json::from_str(&out.result_json).unwrap();
        assert_eq!(v["distinct_keywords_before"], 5);
        assert_eq!(v["distinct_keywords_after"], 4);
    }

    #[test]
    fn runs_are_byte_identical() {
        let ds = full();
        let p = params(AnalysisKind::TopicLda, json!({"k": 2, "iterations": 30, "seed": 5}));
        assert_eq!(run(&ds, &p).unwrap(), run(&ds, &p).unwrap());
    }

    #[test]
    fn ineligible_sunburst() {
        let ds = full().without_columns(&["Document Type"]);
        assert_eq!(
            run(&ds, &params(AnalysisKind::Sunburst, json!({}))),
            Err(AnalysisError::NotEligible {
                missing_fields: vec!["Document Type".into()]
            })
        );
    }

    #[test]
    fn ctfidf_with_sidecar() {
        let ds = full();
        let mut side = String::from("row_index,v0,v1\n");
        for i in 0..ds.row_count {
            side.push_str(&format!("{i},{},0\n", (i % 2) as f64 * 10.0));
        }
        let out = run(&ds, &params(AnalysisKind::TopicCtfidf, json!({"k": 2, "embeddings": side}))).unwrap();
        let v: Value = serde_json::from_str(&out.result_json).unwrap();
        assert_eq!(v["embedding_source"], "sidecar");
        let labels: Vec<usize> = serde_json::from_value(v["labels"].clone()).unwrap();
        assert!(labels.iter().step_by(2).all(|&l| l == labels[0]));
        assert!(labels.iter().skip(1).step_by(2).all(|&l| l != labels[0]));
    }

    #[test]
    fn tfidf_vectors_are_unit_or_zero() {
        let c = TokenizedCorpus::from_token_docs(&[vec!["a", "b", "a"], vec![], vec!["c"]]);
        let v = tfidf_vectors(&c, 2);
        assert_eq!(v[0].len(), 2);
        assert!((v[0].iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(v[1].iter().all(|&x| x == 0.0));
        assert!(v[2].iter().all(|&x| x == 0.0));
    }
}
