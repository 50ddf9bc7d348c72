//! Tokenization, n-gram tables and unigram distributions.
//!
//! Tokens are lowercased, whitespace-delimited and stripped of leading and
//! trailing punctuation. Intra-word apostrophes and hyphens survive, so
//! `"it's"` and `"self-made"` stay single tokens. No stop-word removal or
//! stemming is applied: shared function words are part of the measured
//! overlap between corpora.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};

const EXTRA_PUNCTUATION: &[char] = &[
    '\u{2018}', '\u{2019}', '\u{201A}', '\u{201B}', '\u{201C}', '\u{201D}', '\u{201E}', '\u{201F}',
    '\u{00AB}', '\u{00BB}', '\u{2039}', '\u{203A}', '\u{2010}', '\u{2011}', '\u{2012}', '\u{2013}',
    '\u{2014}', '\u{2015}', '\u{2026}', '\u{00A1}', '\u{00BF}', '\u{00B7}', '\u{2022}', '\u{3001}',
    '\u{3002}', '\u{FF01}', '\u{FF0C}', '\u{FF1F}',
];

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || EXTRA_PUNCTUATION.contains(&c)
}

/// Splits `text` into lowercase tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let trimmed = raw.trim_matches(is_punctuation);
            if trimmed.is_empty() {
                return None;
            }
            Some(trimmed.to_lowercase())
        })
        .collect()
}

/// Which n-gram orders to extract. Never empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Orders {
    unigrams: bool,
    bigrams: bool,
}

impl Orders {
    pub const UNIGRAMS: Orders = Orders {
        unigrams: true,
        bigrams: false,
    };
    pub const BIGRAMS: Orders = Orders {
        unigrams: false,
        bigrams: true,
    };
    pub const BOTH: Orders = Orders {
        unigrams: true,
        bigrams: true,
    };

    pub fn new(orders: &[u8]) -> Result<Self> {
        let mut out = Orders {
            unigrams: false,
            bigrams: false,
        };
        for &o in orders {
            match o {
                1 => out.unigrams = true,
                2 => out.bigrams = true,
                other => {
                    return Err(Error::Config(format!(
                        "n-gram order {other} is not supported (expected 1 or 2)"
                    )))
                }
            }
        }
        if !out.unigrams && !out.bigrams {
            return Err(Error::Config("n-gram orders must not be empty".into()));
        }
        Ok(out)
    }

    pub fn unigrams(self) -> bool {
        self.unigrams
    }

    pub fn bigrams(self) -> bool {
        self.bigrams
    }
}

impl Default for Orders {
    fn default() -> Self {
        Orders::BOTH
    }
}

impl TryFrom<Vec<u8>> for Orders {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Orders::new(&v)
    }
}

impl From<Orders> for Vec<u8> {
    fn from(o: Orders) -> Self {
        let mut v = Vec::new();
        if o.unigrams {
            v.push(1);
        }
        if o.bigrams {
            v.push(2);
        }
        v
    }
}

/// A unigram or bigram.
///
/// Ordering follows the byte order of the space-joined form, which is the
/// tie-break rule for [`NgramTable::top_k`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ngram {
    Unigram(String),
    Bigram(String, String),
}

impl Ngram {
    pub fn order(&self) -> usize {
        match self {
            Ngram::Unigram(_) => 1,
            Ngram::Bigram(..) => 2,
        }
    }

    pub fn joined(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Ngram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ngram::Unigram(a) => f.write_str(a),
            Ngram::Bigram(a, b) => write!(f, "{a} {b}"),
        }
    }
}

fn joined_bytes<'a>(parts: &'a [&'a str]) -> impl Iterator<Item = u8> + 'a {
    parts.iter().enumerate().flat_map(|(i, p)| {
        let sep: &[u8] = if i > 0 { b" " } else { b"" };
        sep.iter().chain(p.as_bytes()).copied()
    })
}

/// Compares the space-joined byte sequences of two n-grams given as token slices.
pub(crate) fn cmp_joined(a: &[&str], b: &[&str]) -> Ordering {
    joined_bytes(a).cmp(joined_bytes(b))
}

impl Ord for Ngram {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ngram::Unigram(a), Ngram::Unigram(b)) => a.cmp(b),
            (Ngram::Unigram(a), Ngram::Bigram(c, d)) => cmp_joined(&[a], &[c, d]),
            (Ngram::Bigram(a, b), Ngram::Unigram(c)) => cmp_joined(&[a, b], &[c]),
            (Ngram::Bigram(a, b), Ngram::Bigram(c, d)) => cmp_joined(&[a, b], &[c, d]),
        }
    }
}

impl PartialOrd for Ngram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Occurrence counts of n-grams.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NgramTable {
    counts: HashMap<Ngram, u64>,
    total: u64,
}

impl NgramTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds every contiguous n-gram of `tokens` for the requested orders.
    pub fn add_tokens<S: AsRef<str>>(&mut self, tokens: &[S], orders: Orders) {
        if orders.unigrams {
            for t in tokens {
                self.bump(Ngram::Unigram(t.as_ref().to_owned()));
            }
        }
        if orders.bigrams {
            for w in tokens.windows(2) {
                self.bump(Ngram::Bigram(w[0].as_ref().to_owned(), w[1].as_ref().to_owned()));
            }
        }
    }

    fn bump(&mut self, ngram: Ngram) {
        *self.counts.entry(ngram).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn count(&self, ngram: &Ngram) -> u64 {
        self.counts.get(ngram).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ngram, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }

    /// All entries, highest count first, ties in ascending n-gram order.
    pub fn ranked(&self) -> Vec<(Ngram, u64)> {
        let mut entries: Vec<(Ngram, u64)> =
            self.counts.iter().map(|(k, &v)| (k.clone(), v)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries
    }

    /// The `k` highest-ranked n-grams (fewer if the table is smaller).
    pub fn top_k(&self, k: usize) -> Vec<(Ngram, u64)> {
        let mut ranked = self.ranked();
        ranked.truncate(k);
        ranked
    }

    /// Writes `ngram,count` rows in ranked order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Csv {
            path: "<ngram export>".into(),
            source: e,
        };
        w.write_record(["ngram", "count"]).map_err(csv_err)?;
        for (ngram, count) in self.ranked() {
            w.write_record([ngram.to_string(), count.to_string()])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<ngram export>", e))?;
        Ok(())
    }
}

/// Builds the n-gram table of a single token sequence.
pub fn extract_ngrams<S: AsRef<str>>(tokens: &[S], orders: Orders) -> NgramTable {
    let mut table = NgramTable::new();
    table.add_tokens(tokens, orders);
    table
}

/// A probability distribution over tokens.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnigramDistribution {
    probs: BTreeMap<String, f64>,
}

impl UnigramDistribution {
    /// Normalizes raw counts. Zero counts are dropped from the support.
    pub fn from_counts<I, S>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut merged: BTreeMap<String, u64> = BTreeMap::new();
        for (t, c) in counts {
            if c > 0 {
                *merged.entry(t.into()).or_insert(0) += c;
            }
        }
        let total: u64 = merged.values().sum();
        if total == 0 {
            return Err(Error::Precondition(
                "unigram distribution needs at least one token".into(),
            ));
        }
        let probs = merged
            .into_iter()
            .map(|(t, c)| (t, c as f64 / total as f64))
            .collect();
        Ok(UnigramDistribution { probs })
    }

    /// Wraps explicit probabilities, checking they sum to 1 within 1e-9.
    pub fn from_probs<I, S>(probs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (t, p) in probs {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::Precondition(format!("invalid probability {p}")));
            }
            if p > 0.0 {
                *map.entry(t.into()).or_insert(0.0) += p;
            }
        }
        let dist = UnigramDistribution { probs: map };
        dist.check_normalized()?;
        Ok(dist)
    }

    pub fn check_normalized(&self) -> Result<()> {
        let sum: f64 = self.probs.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(())
    }

    pub fn prob(&self, token: &str) -> f64 {
        self.probs.get(token).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }
}

/// Unigram distribution over the comment texts of `docs` (parent texts excluded).
pub fn unigram_distribution<'a, I>(docs: I) -> Result<UnigramDistribution>
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    for doc in docs {
        for t in tokenize(doc.text()) {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    UnigramDistribution::from_counts(counts)
}

/// Interned token ids shared by several corpora, used by the bootstrap hot path.
#[derive(Debug, Default)]
pub struct Vocabulary {
    ids: HashMap<String, u32>,
    words: Vec<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = u32::try_from(self.words.len()).expect("vocabulary exceeds u32 range");
        assert!(id < u32::MAX, "vocabulary exceeds u32 range");
        self.words.push(token.to_owned());
        self.ids.insert(token.to_owned(), id);
        id
    }

    pub fn encode(&mut self, text: &str) -> Vec<u32> {
        tokenize(text).iter().map(|t| self.intern(t)).collect()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    fn key_parts(&self, key: NgramKey) -> ([&str; 2], usize) {
        match key.split() {
            (a, None) => ([self.word(a), ""], 1),
            (a, Some(b)) => ([self.word(a), self.word(b)], 2),
        }
    }

    pub(crate) fn key_to_ngram(&self, key: NgramKey) -> Ngram {
        match key.split() {
            (a, None) => Ngram::Unigram(self.word(a).to_owned()),
            (a, Some(b)) => Ngram::Bigram(self.word(a).to_owned(), self.word(b).to_owned()),
        }
    }
}

/// A packed unigram or bigram over [`Vocabulary`] ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct NgramKey(u64);

const UNIGRAM_TAG: u64 = u32::MAX as u64;

impl NgramKey {
    pub(crate) fn unigram(a: u32) -> Self {
        NgramKey(((a as u64) << 32) | UNIGRAM_TAG)
    }

    pub(crate) fn bigram(a: u32, b: u32) -> Self {
        NgramKey(((a as u64) << 32) | b as u64)
    }

    fn split(self) -> (u32, Option<u32>) {
        let a = (self.0 >> 32) as u32;
        let b = self.0 & UNIGRAM_TAG;
        (a, (b != UNIGRAM_TAG).then_some(b as u32))
    }
}

/// Top-k of packed counts under the same rule as [`NgramTable::top_k`].
pub(crate) fn top_k_keys(
    counts: &HashMap<NgramKey, u32>,
    k: usize,
    vocab: &Vocabulary,
) -> Vec<NgramKey> {
    let mut entries: Vec<(NgramKey, u32)> = counts.iter().map(|(&k, &c)| (k, c)).collect();
    let cmp = |a: &(NgramKey, u32), b: &(NgramKey, u32)| {
        b.1.cmp(&a.1)
            .then_with(|| {
                let (pa, na) = vocab.key_parts(a.0);
                let (pb, nb) = vocab.key_parts(b.0);
                cmp_joined(&pa[..na], &pb[..nb])
            })
    };
    if k == 0 {
        return Vec::new();
    }
    if entries.len() > k {
        entries.select_nth_unstable_by(k - 1, cmp);
        entries.truncate(k);
    }
    entries.sort_by(cmp);
    entries.into_iter().map(|(key, _)| key).collect()
}
