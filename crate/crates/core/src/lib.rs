//! Corpus relatedness statistics and transfer-learning pipelines for
//! sarcasm and hate-speech corpora.
//!
//! The crate is organised bottom-up:
//!
//! - [`corpus`]: column-mapped CSV/TSV ingestion, label canonicalisation,
//!   vote filtering, deterministic splits and class weights.
//! - [`text`]: tokenisation, n-gram tables, top-k ranking and unigram
//!   distributions.
//! - [`relatedness`]: Jaccard over top-k n-gram sets, Jensen-Shannon
//!   divergence, and the bootstrapped comparison protocol.
//! - [`model`]: a hashed-feature logistic classifier with class weighting,
//!   l1 soft-thresholding and weight transfer between stages.
//! - [`metrics`]: confusion matrices, precision/recall/F1, MCC, AUC and
//!   with/without delta reports.
//! - [`runner`]: config-driven experiments (similarity, single-step,
//!   sequential, ablation) that write reports to disk.

pub mod corpus;
pub mod error;
pub mod metrics;
pub mod model;
pub mod relatedness;
pub mod runner;
pub mod stats;
pub mod text;

pub use corpus::{
    class_weights, filter_sarcasm_votes, load_ethos, load_implicit_hate, load_sarc, project_labels,
    split, BinaryTask, CanonicalClass, ClassWeights, Corpus, Document, IngestReport, Ingested,
    RawLabel, Source, SplitSpec, Votes,
};
pub use error::{Error, ErrorCategory, Result};
pub use metrics::{auc, compare, confusion, mcc, prf, ConfusionMatrix, DeltaReport, EvalReport};
pub use model::{featurize, predict_score, train, transfer, FeatureSpec, LinearModel, TrainConfig};
pub use relatedness::{
    bootstrap_similarity, jaccard, jsd, overlap_counts, BootstrapSpec, OverlapCount,
    SimilarityMetric, SimilarityReport,
};
pub use text::{extract_ngrams, tokenize, unigram_distribution, Ngram, NgramTable, Orders};
