//! Column-mapped CSV/TSV loaders for the three source datasets.
//!
//! Columns are always named explicitly in the adapter; there is no header
//! sniffing. Rows that cannot be mapped are skipped and tallied in an
//! [`IngestReport`] instead of aborting the load.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CanonicalClass, Corpus, Document, RawLabel, Source, Votes};
use crate::error::{Error, Result};

const MAX_REPORTED_ERRORS: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelimitedFormat {
    #[serde(default = "DelimitedFormat::default_delimiter")]
    pub delimiter: char,
    #[serde(default = "DelimitedFormat::default_quote")]
    pub quote: char,
    #[serde(default = "DelimitedFormat::default_headers")]
    pub has_headers: bool,
}

impl DelimitedFormat {
    fn default_delimiter() -> char {
        ','
    }
    fn default_quote() -> char {
        '"'
    }
    fn default_headers() -> bool {
        true
    }

    pub fn csv() -> Self {
        DelimitedFormat {
            delimiter: ',',
            quote: '"',
            has_headers: true,
        }
    }

    pub fn tsv() -> Self {
        DelimitedFormat {
            delimiter: '\t',
            ..Self::csv()
        }
    }

    pub fn with_delimiter(delimiter: char) -> Self {
        DelimitedFormat {
            delimiter,
            ..Self::csv()
        }
    }

    fn ascii(c: char, what: &str) -> Result<u8> {
        if c.is_ascii() {
            Ok(c as u8)
        } else {
            Err(Error::Config(format!("{what} {c:?} must be a single ASCII character")))
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::ascii(self.delimiter, "delimiter")?;
        Self::ascii(self.quote, "quote character")?;
        Ok(())
    }
}

impl Default for DelimitedFormat {
    fn default() -> Self {
        Self::csv()
    }
}

/// One skipped row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub reason: String,
    pub detail: String,
}

/// Tally of what happened to each input row.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub source: String,
    pub path: String,
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_skipped: usize,
    pub skip_reasons: BTreeMap<String, usize>,
    /// Number of invalid UTF-8 sequences replaced with U+FFFD.
    pub utf8_replacements: usize,
    /// The first skipped rows, for diagnostics.
    pub errors: Vec<RowError>,
}

impl IngestReport {
    fn skip(&mut self, line: u64, reason: &str, detail: String) {
        self.rows_skipped += 1;
        *self.skip_reasons.entry(reason.to_owned()).or_insert(0) += 1;
        if self.errors.len() < MAX_REPORTED_ERRORS {
            self.errors.push(RowError {
                line,
                reason: reason.to_owned(),
                detail,
            });
        }
    }
}

/// A loaded corpus with its ingest report.
#[derive(Clone, Debug)]
pub struct Ingested {
    pub corpus: Corpus,
    pub report: IngestReport,
}

struct Skip {
    reason: &'static str,
    detail: String,
}

impl Skip {
    fn new(reason: &'static str, detail: impl Into<String>) -> Self {
        Skip {
            reason,
            detail: detail.into(),
        }
    }
}

struct Row {
    fields: Vec<String>,
    index: usize,
}

impl Row {
    fn get(&self, col: usize) -> std::result::Result<&str, Skip> {
        self.fields
            .get(col)
            .map(String::as_str)
            .ok_or_else(|| Skip::new("missing_field", format!("row has no field {col}")))
    }

    fn opt(&self, col: Option<usize>) -> std::result::Result<Option<&str>, Skip> {
        col.map(|c| self.get(c)).transpose()
    }
}

fn decode(bytes: &[u8], replacements: &mut usize) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_owned(),
        Err(_) => {
            *replacements += bytes
                .utf8_chunks()
                .filter(|c| !c.invalid().is_empty())
                .count();
            String::from_utf8_lossy(bytes).into_owned()
        }
    }
}

struct DelimitedSource {
    path: PathBuf,
    reader: csv::Reader<BufReader<File>>,
    headers: Option<Vec<String>>,
    report: IngestReport,
}

impl DelimitedSource {
    fn open(path: &Path, format: &DelimitedFormat, source: Source) -> Result<Self> {
        format.validate()?;
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(format.delimiter as u8)
            .quote(format.quote as u8)
            .has_headers(format.has_headers)
            .flexible(true)
            .from_reader(BufReader::new(file));
        let mut report = IngestReport {
            source: source.tag().to_owned(),
            path: path.display().to_string(),
            ..Default::default()
        };
        let headers = if format.has_headers {
            let raw = reader.byte_headers().map_err(|e| Error::Csv {
                path: path.to_owned(),
                source: e,
            })?;
            let mut names: Vec<String> = raw
                .iter()
                .map(|h| decode(h, &mut report.utf8_replacements).trim().to_owned())
                .collect();
            if let Some(first) = names.first_mut() {
                *first = first.trim_start_matches('\u{FEFF}').to_owned();
            }
            Some(names)
        } else {
            None
        };
        Ok(DelimitedSource {
            path: path.to_owned(),
            reader,
            headers,
            report,
        })
    }

    /// Resolves a column by header name, or by zero-based index when the file has no header.
    fn column(&self, name: &str) -> Result<usize> {
        let found = match &self.headers {
            Some(h) => h.iter().position(|c| c == name),
            None => name.trim().parse::<usize>().ok(),
        };
        found.ok_or_else(|| Error::MissingColumn {
            column: name.to_owned(),
            path: self.path.clone(),
        })
    }

    fn optional_column(&self, name: Option<&str>) -> Result<Option<usize>> {
        name.map(|n| self.column(n)).transpose()
    }

    fn load<F>(mut self, source: Source, id_col: Option<usize>, mut map: F) -> Result<Ingested>
    where
        F: FnMut(&Row) -> std::result::Result<Document, Skip>,
    {
        let mut docs = Vec::new();
        let mut seen = HashSet::new();
        let mut record = csv::ByteRecord::new();
        let mut index = 0usize;
        loop {
            let line = self.reader.position().line();
            match self.reader.read_byte_record(&mut record) {
                Ok(false) => break,
                Ok(true) => {}
                Err(e) => {
                    if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                        return Err(Error::Csv {
                            path: self.path,
                            source: e,
                        });
                    }
                    self.report.rows_read += 1;
                    self.report.skip(line, "malformed_record", e.to_string());
                    continue;
                }
            }
            let line = record.position().map_or(line, |p| p.line());
            self.report.rows_read += 1;
            let row = Row {
                fields: record
                    .iter()
                    .map(|f| decode(f, &mut self.report.utf8_replacements))
                    .collect(),
                index,
            };
            index += 1;
            let mapped = map(&row).and_then(|doc| {
                let id = match id_col {
                    Some(c) => row.get(c)?.trim().to_owned(),
                    None => format!("{}-{}", source.tag(), row.index),
                };
                if id.is_empty() {
                    return Err(Skip::new("missing_id", "id field is empty"));
                }
                if !seen.insert(id.clone()) {
                    return Err(Skip::new("duplicate_id", format!("id `{id}` already seen")));
                }
                Ok(doc.with_id(id))
            });
            match mapped {
                Ok(doc) => docs.push(doc),
                Err(skip) => self.report.skip(line, skip.reason, skip.detail),
            }
        }
        self.report.rows_kept = docs.len();
        Ok(Ingested {
            corpus: Corpus::new_unchecked(source, docs),
            report: self.report,
        })
    }
}

fn document(text: &str, raw: RawLabel, class: CanonicalClass) -> std::result::Result<Document, Skip> {
    // Placeholder id; replaced once the row's id is resolved.
    Document::new(String::new(), text, raw, class)
        .map_err(|_| Skip::new("empty_text", "text is empty after trimming"))
}

fn parse_votes(v: Option<&str>, what: &str) -> std::result::Result<Option<i64>, Skip> {
    v.map(|s| {
        let s = s.trim();
        s.parse::<i64>()
            .or_else(|_| {
                // Some exports write integral counts as floats ("12.0").
                s.parse::<f64>()
                    .ok()
                    .filter(|f| f.is_finite() && f.fract() == 0.0)
                    .map(|f| f as i64)
                    .ok_or(())
            })
            .map_err(|_| Skip::new("invalid_votes", format!("{what} `{s}` is not an integer")))
    })
    .transpose()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SarcColumns {
    #[serde(default)]
    pub id: Option<String>,
    pub text: String,
    #[serde(default)]
    pub parent: Option<String>,
    pub label: String,
    #[serde(default)]
    pub ups: Option<String>,
    #[serde(default)]
    pub downs: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SarcasmLabelValues {
    pub positive: String,
    pub negative: String,
}

/// Adapter for binary sarcasm files (Reddit SARC and similar).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SarcAdapter {
    #[serde(default)]
    pub format: DelimitedFormat,
    #[serde(default = "SarcAdapter::default_columns")]
    pub columns: SarcColumns,
    #[serde(default = "SarcAdapter::default_labels")]
    pub labels: SarcasmLabelValues,
}

impl SarcAdapter {
    fn default_columns() -> SarcColumns {
        SarcColumns {
            id: None,
            text: "comment".into(),
            parent: Some("parent_comment".into()),
            label: "label".into(),
            ups: Some("ups".into()),
            downs: Some("downs".into()),
        }
    }

    fn default_labels() -> SarcasmLabelValues {
        SarcasmLabelValues {
            positive: "1".into(),
            negative: "0".into(),
        }
    }
}

impl Default for SarcAdapter {
    fn default() -> Self {
        SarcAdapter {
            format: DelimitedFormat::csv(),
            columns: Self::default_columns(),
            labels: Self::default_labels(),
        }
    }
}

/// Loads a sarcasm file: positive label → Sarcasm, negative → Neutral.
pub fn load_sarc(path: &Path, adapter: &SarcAdapter) -> Result<Ingested> {
    load_sarcasm_as(path, adapter, Source::Sarc)
}

pub(crate) fn load_sarcasm_as(path: &Path, adapter: &SarcAdapter, source: Source) -> Result<Ingested> {
    let src = DelimitedSource::open(path, &adapter.format, source)?;
    let cols = &adapter.columns;
    let text = src.column(&cols.text)?;
    let label = src.column(&cols.label)?;
    let parent = src.optional_column(cols.parent.as_deref())?;
    let ups = src.optional_column(cols.ups.as_deref())?;
    let downs = src.optional_column(cols.downs.as_deref())?;
    let id = src.optional_column(cols.id.as_deref())?;
    let labels = &adapter.labels;
    src.load(source, id, |row| {
        let raw = row.get(label)?.trim();
        let class = if raw == labels.positive {
            CanonicalClass::Sarcasm
        } else if raw == labels.negative {
            CanonicalClass::Neutral
        } else {
            return Err(Skip::new("unknown_label", format!("label `{raw}`")));
        };
        let ups = parse_votes(row.opt(ups)?, "ups")?;
        let downs = parse_votes(row.opt(downs)?, "downs")?;
        let mut doc = document(row.get(text)?, RawLabel::Text(raw.to_owned()), class)?
            .with_parent(row.opt(parent)?.map(str::to_owned));
        if let (Some(ups), Some(downs)) = (ups, downs) {
            doc = doc.with_votes(Votes { ups, downs });
        }
        Ok(doc)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassValues {
    pub not_hate: String,
    pub implicit_hate: String,
    pub explicit_hate: String,
}

impl Default for ClassValues {
    fn default() -> Self {
        ClassValues {
            not_hate: "not_hate".into(),
            implicit_hate: "implicit_hate".into(),
            explicit_hate: "explicit_hate".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplicitHateColumns {
    #[serde(default)]
    pub id: Option<String>,
    pub text: String,
    pub class: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplicitHateAdapter {
    #[serde(default = "DelimitedFormat::tsv")]
    pub format: DelimitedFormat,
    #[serde(default = "ImplicitHateAdapter::default_columns")]
    pub columns: ImplicitHateColumns,
    #[serde(default)]
    pub class_values: ClassValues,
}

impl ImplicitHateAdapter {
    fn default_columns() -> ImplicitHateColumns {
        ImplicitHateColumns {
            id: None,
            text: "post".into(),
            class: "class".into(),
        }
    }
}

impl Default for ImplicitHateAdapter {
    fn default() -> Self {
        ImplicitHateAdapter {
            format: DelimitedFormat::tsv(),
            columns: Self::default_columns(),
            class_values: ClassValues::default(),
        }
    }
}

/// Loads the Implicit Hate Corpus top-level three-way labels.
pub fn load_implicit_hate(path: &Path, adapter: &ImplicitHateAdapter) -> Result<Ingested> {
    let src = DelimitedSource::open(path, &adapter.format, Source::ImplicitHateCorpus)?;
    let text = src.column(&adapter.columns.text)?;
    let class = src.column(&adapter.columns.class)?;
    let id = src.optional_column(adapter.columns.id.as_deref())?;
    let values = &adapter.class_values;
    src.load(Source::ImplicitHateCorpus, id, |row| {
        let raw = row.get(class)?.trim();
        let canonical = if raw == values.not_hate {
            CanonicalClass::Neutral
        } else if raw == values.implicit_hate {
            CanonicalClass::ImplicitHate
        } else if raw == values.explicit_hate {
            CanonicalClass::ExplicitHate
        } else {
            return Err(Skip::new("unknown_class", format!("class `{raw}`")));
        };
        document(row.get(text)?, RawLabel::Text(raw.to_owned()), canonical)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EthosColumns {
    #[serde(default)]
    pub id: Option<String>,
    pub text: String,
    pub score: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EthosAdapter {
    #[serde(default = "EthosAdapter::default_format")]
    pub format: DelimitedFormat,
    #[serde(default = "EthosAdapter::default_columns")]
    pub columns: EthosColumns,
}

impl EthosAdapter {
    fn default_format() -> DelimitedFormat {
        DelimitedFormat::with_delimiter(';')
    }

    fn default_columns() -> EthosColumns {
        EthosColumns {
            id: None,
            text: "comment".into(),
            score: "isHate".into(),
        }
    }
}

impl Default for EthosAdapter {
    fn default() -> Self {
        EthosAdapter {
            format: Self::default_format(),
            columns: Self::default_columns(),
        }
    }
}

/// Loads ETHOS, binarizing the continuous score with `score >= threshold`.
///
/// Hate rows become `ExplicitHate` with the mixed-hate flag set, since the
/// source does not separate implicit from explicit hate.
pub fn load_ethos(path: &Path, adapter: &EthosAdapter, threshold: f64) -> Result<Ingested> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Config(format!(
            "ethos threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let src = DelimitedSource::open(path, &adapter.format, Source::Ethos)?;
    let text = src.column(&adapter.columns.text)?;
    let score = src.column(&adapter.columns.score)?;
    let id = src.optional_column(adapter.columns.id.as_deref())?;
    src.load(Source::Ethos, id, |row| {
        let raw = row.get(score)?.trim();
        let value: f64 = raw
            .parse()
            .map_err(|_| Skip::new("invalid_score", format!("score `{raw}`")))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Skip::new("score_out_of_range", format!("score {value}")));
        }
        let hate = value >= threshold;
        let class = if hate {
            CanonicalClass::ExplicitHate
        } else {
            CanonicalClass::Neutral
        };
        Ok(document(row.get(text)?, RawLabel::Score(value), class)?.with_mixed_hate(hate))
    })
}
