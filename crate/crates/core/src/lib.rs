//! Bibliometric text-analysis engine.
//!
//! Parses Scopus, Web of Science, Lens and custom exports into a common
//! [`Dataset`], reports which analyses the data supports, and runs keyword
//! normalization, topic models, association-rule networks and sunburst
//! hierarchies over it. [`analysis`] ties these together behind one
//! parameter surface shared by the CLI and the HTTP service.

pub mod analysis;
pub mod assocnet;
pub mod capability;
pub mod ingest;
pub mod keystem;
pub mod sunburst;
pub mod synthetic;
pub mod textprep;
pub mod topics;

pub use analysis::{run, AnalysisError, AnalysisKind, AnalysisOutput, AnalysisParams};
pub use assocnet::{AssociationRule, RuleGraph};
pub use capability::{check_capabilities, detect_keyword_columns, Analysis, Capability, CapabilityReport};
pub use ingest::{
    detect_source, load_dataset, parse_dataset, split_multivalue, BiblioRecord, ColumnInfo, ColumnKind, Dataset,
    IngestError, MappingSet, RowWarning, SourceKind,
};
pub use keystem::{stem_keywords, KeywordMap, KeywordMethod};
pub use sunburst::{build_sunburst, SunburstNode, SunburstResult};
pub use textprep::{PrepOptions, TokenizedCorpus};
pub use topics::{TopicModelParams, TopicModelResult};
