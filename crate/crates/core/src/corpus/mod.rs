//! Canonical documents and corpora, label projection, splits and class weights.

mod adapter;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use adapter::load_sarcasm_as;
pub use adapter::{
    load_ethos, load_implicit_hate, load_sarc, ClassValues, DelimitedFormat, EthosAdapter,
    ImplicitHateAdapter, IngestReport, Ingested, RowError, SarcAdapter,
};

pub const SCHEMA_VERSION: &str = "1";

/// The four-way class every source label is mapped onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalClass {
    Neutral,
    Sarcasm,
    ImplicitHate,
    ExplicitHate,
}

impl CanonicalClass {
    pub const ALL: [CanonicalClass; 4] = [
        CanonicalClass::Neutral,
        CanonicalClass::Sarcasm,
        CanonicalClass::ImplicitHate,
        CanonicalClass::ExplicitHate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CanonicalClass::Neutral => "neutral",
            CanonicalClass::Sarcasm => "sarcasm",
            CanonicalClass::ImplicitHate => "implicit_hate",
            CanonicalClass::ExplicitHate => "explicit_hate",
        }
    }
}

impl fmt::Display for CanonicalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The label exactly as it appeared in the source file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawLabel {
    Score(f64),
    Text(String),
}

/// Up/down vote counts carried alongside Reddit comments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Votes {
    pub ups: i64,
    pub downs: i64,
}

/// One text sample.
///
/// Fields are read-only after construction; the canonical class is fixed by
/// the loader that created the document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DocumentRecord")]
pub struct Document {
    id: String,
    text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    parent_text: Option<String>,
    raw_label: RawLabel,
    canonical_class: CanonicalClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    votes: Option<Votes>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    mixed_hate: bool,
}

#[derive(Deserialize)]
struct DocumentRecord {
    id: String,
    text: String,
    #[serde(default)]
    parent_text: Option<String>,
    raw_label: RawLabel,
    canonical_class: CanonicalClass,
    #[serde(default)]
    votes: Option<Votes>,
    #[serde(default)]
    mixed_hate: bool,
}

impl TryFrom<DocumentRecord> for Document {
    type Error = Error;

    fn try_from(r: DocumentRecord) -> Result<Self> {
        let mut doc = Document::new(r.id, r.text, r.raw_label, r.canonical_class)?;
        doc.parent_text = r.parent_text;
        doc.votes = r.votes;
        doc.mixed_hate = r.mixed_hate;
        Ok(doc)
    }
}

impl Document {
    /// Fails if `text` is empty after trimming whitespace.
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        raw_label: RawLabel,
        canonical_class: CanonicalClass,
    ) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::InvalidDocument {
                id,
                reason: "text is empty".into(),
            });
        }
        Ok(Document {
            id,
            text,
            parent_text: None,
            raw_label,
            canonical_class,
            votes: None,
            mixed_hate: false,
        })
    }

    /// Attaches a parent comment. Blank parents are stored as absent.
    pub fn with_parent(mut self, parent: Option<String>) -> Self {
        self.parent_text = parent.filter(|p| !p.trim().is_empty());
        self
    }

    pub fn with_votes(mut self, votes: Votes) -> Self {
        self.votes = Some(votes);
        self
    }

    pub fn with_mixed_hate(mut self, mixed: bool) -> Self {
        self.mixed_hate = mixed;
        self
    }

    fn with_id(mut self, id: String) -> Self {
        self.id = id;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn parent_text(&self) -> Option<&str> {
        self.parent_text.as_deref()
    }

    pub fn raw_label(&self) -> &RawLabel {
        &self.raw_label
    }

    pub fn canonical_class(&self) -> CanonicalClass {
        self.canonical_class
    }

    pub fn votes(&self) -> Option<Votes> {
        self.votes
    }

    /// Set on ETHOS hate rows, which mix implicit and explicit hate.
    pub fn mixed_hate(&self) -> bool {
        self.mixed_hate
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Sarc,
    SarcasmV2,
    ImplicitHateCorpus,
    Ethos,
    Combined,
}

impl Source {
    pub fn tag(self) -> &'static str {
        match self {
            Source::Sarc => "sarc",
            Source::SarcasmV2 => "sarcasm_v2",
            Source::ImplicitHateCorpus => "implicit_hate",
            Source::Ethos => "ethos",
            Source::Combined => "combined",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// An ordered, immutable collection of documents with unique ids.
///
/// Cloning is cheap: documents are shared behind an `Arc`.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    documents: Arc<Vec<Document>>,
    source: Source,
    schema_version: String,
}

impl Corpus {
    pub fn new(source: Source, documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::DuplicateId(d.id.clone()));
            }
        }
        Ok(Self::new_unchecked(source, documents))
    }

    fn new_unchecked(source: Source, documents: Vec<Document>) -> Self {
        Corpus {
            documents: Arc::new(documents),
            source,
            schema_version: SCHEMA_VERSION.to_owned(),
        }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn schema_version(&self) -> &str {
        &self.schema_version
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.documents.iter().map(|d| d.id()).collect()
    }

    /// Documents in order, keeping only those matching `keep`.
    pub fn filter(&self, keep: impl Fn(&Document) -> bool) -> Corpus {
        let docs = self.documents.iter().filter(|d| keep(d)).cloned().collect();
        Corpus::new_unchecked(self.source, docs)
    }

    pub fn class_histogram(&self) -> BTreeMap<CanonicalClass, usize> {
        let mut h = BTreeMap::new();
        for d in self.iter() {
            *h.entry(d.canonical_class).or_insert(0) += 1;
        }
        h
    }

    /// A seeded random subset of `n` documents, kept in original order.
    pub fn subsample(&self, n: usize, seed: u64) -> Corpus {
        if n >= self.len() {
            return self.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = rand::seq::index::sample(&mut rng, self.len(), n).into_vec();
        picked.sort_unstable();
        let docs = picked.into_iter().map(|i| self.documents[i].clone()).collect();
        Corpus::new_unchecked(self.source, docs)
    }

    /// Writes one JSON document per line.
    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> Result<()> {
        for d in self.iter() {
            serde_json::to_writer(&mut writer, d)?;
            writer
                .write_all(b"\n")
                .map_err(|e| Error::io("<jsonl>", e))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(source: Source, reader: R) -> Result<Corpus> {
        let mut docs = Vec::new();
        for line in reader.lines() {
            let line = line.map_err(|e| Error::io("<jsonl>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            docs.push(serde_json::from_str(&line)?);
        }
        Corpus::new(source, docs)
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Keeps Reddit comments with strictly more than `min_ups` up-votes and at
/// most `max_downs` down-votes, preserving order.
pub fn filter_sarcasm_votes(corpus: &Corpus, min_ups: i64, max_downs: i64) -> Result<Corpus> {
    if corpus.source() != Source::Sarc {
        return Err(Error::Precondition(format!(
            "vote filtering applies to sarc corpora, got {}",
            corpus.source()
        )));
    }
    if let Some(d) = corpus.iter().find(|d| d.votes.is_none()) {
        return Err(Error::Precondition(format!(
            "document `{}` has no vote metadata",
            d.id
        )));
    }
    Ok(corpus.filter(|d| {
        let v = d.votes.expect("checked above");
        v.ups > min_ups && v.downs <= max_downs
    }))
}

/// Concatenates corpora in the given order and shuffles the result by `seed`.
///
/// Ids are prefixed with the source tag so documents from different files
/// cannot collide.
pub fn combine(parts: &[&Corpus], seed: u64) -> Result<Corpus> {
    let mut docs: Vec<Document> = parts
        .iter()
        .flat_map(|c| {
            let tag = c.source().tag();
            c.iter()
                .map(move |d| d.clone().with_id(format!("{tag}:{}", d.id)))
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    docs.shuffle(&mut rng);
    Corpus::new(Source::Combined, docs)
}

/// A binary projection of the four canonical classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryTask {
    Sarcasm,
    Hate,
}

impl BinaryTask {
    pub fn name(self) -> &'static str {
        match self {
            BinaryTask::Sarcasm => "sarcasm",
            BinaryTask::Hate => "hate",
        }
    }

    pub fn label(self, class: CanonicalClass) -> u8 {
        use CanonicalClass::*;
        match (self, class) {
            (BinaryTask::Sarcasm, Sarcasm | ImplicitHate) => 1,
            (BinaryTask::Sarcasm, Neutral | ExplicitHate) => 0,
            (BinaryTask::Hate, ImplicitHate | ExplicitHate) => 1,
            (BinaryTask::Hate, Neutral | Sarcasm) => 0,
        }
    }
}

impl fmt::Display for BinaryTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Documents of a corpus paired with binary labels for one task.
#[derive(Clone, Debug)]
pub struct LabeledView<'a> {
    pub task: BinaryTask,
    pub documents: &'a [Document],
    pub labels: Vec<u8>,
}

impl<'a> LabeledView<'a> {
    pub fn iter(&self) -> impl Iterator<Item = (&'a Document, u8)> + '_ {
        self.documents.iter().zip(self.labels.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn project_labels(corpus: &Corpus, task: BinaryTask) -> LabeledView<'_> {
    LabeledView {
        task,
        documents: corpus.documents(),
        labels: corpus
            .iter()
            .map(|d| task.label(d.canonical_class))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    #[serde(default = "default_true")]
    pub stratified: bool,
}

fn default_true() -> bool {
    true
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Partitions `corpus` into train and test sets. Both keep corpus order.
///
/// Stratified splits shuffle each canonical class separately and send
/// `round(fraction * n_class)` members to train, clamped so both sides keep
/// at least one member of every class.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus)> {
    spec.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus(corpus.source().tag().into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut in_train = vec![false; corpus.len()];
    let groups: Vec<Vec<usize>> = if spec.stratified {
        let mut by_class: BTreeMap<CanonicalClass, Vec<usize>> = BTreeMap::new();
        for (i, d) in corpus.iter().enumerate() {
            by_class.entry(d.canonical_class).or_default().push(i);
        }
        if let Some((class, members)) = by_class.iter().find(|(_, m)| m.len() < 2) {
            return Err(Error::Stratification {
                class: class.to_string(),
                count: members.len(),
            });
        }
        by_class.into_values().collect()
    } else {
        vec![(0..corpus.len()).collect()]
    };
    for mut group in groups {
        let n = group.len();
        let mut take = (spec.train_fraction * n as f64).round() as usize;
        if spec.stratified {
            take = take.clamp(1, n - 1);
        }
        group.shuffle(&mut rng);
        for &i in &group[..take] {
            in_train[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (d, &t) in corpus.iter().zip(&in_train) {
        if t {
            train.push(d.clone());
        } else {
            test.push(d.clone());
        }
    }
    Ok((
        Corpus::new_unchecked(corpus.source(), train),
        Corpus::new_unchecked(corpus.source(), test),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub negative: f64,
    pub positive: f64,
}

impl ClassWeights {
    pub const UNIT: ClassWeights = ClassWeights {
        negative: 1.0,
        positive: 1.0,
    };

    pub fn weight(&self, label: u8) -> f64 {
        if label == 1 {
            self.positive
        } else {
            self.negative
        }
    }
}

/// Balanced weights `N / (2 * count(c))`.
pub fn class_weights(labels: &[u8]) -> Result<ClassWeights> {
    let positives = labels.iter().filter(|&&l| l == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 {
        return Err(Error::SingleClass(0));
    }
    if negatives == 0 {
        return Err(Error::SingleClass(1));
    }
    let n = labels.len() as f64;
    Ok(ClassWeights {
        negative: n / (2.0 * negatives as f64),
        positive: n / (2.0 * positives as f64),
    })
}
