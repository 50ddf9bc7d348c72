//! Lexical relatedness between corpora.
//!
//! Two measures are provided: Jaccard similarity over the top-k combined
//! unigram+bigram rankings of two samples, and Jensen-Shannon divergence
//! between their unigram distributions. [`bootstrap_similarity`] repeats
//! either measure over independent random subsamples and summarizes the
//! iterations.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::stats::Summary;
use crate::text::{top_k_keys, Ngram, NgramKey, UnigramDistribution, Vocabulary};

/// `|a ∩ b| / |a ∪ b|`, or 1.0 when both sets are empty.
pub fn jaccard<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let shared = small.iter().filter(|x| large.contains(x)).count();
    let union = a.len() + b.len() - shared;
    if union == 0 {
        1.0
    } else {
        shared as f64 / union as f64
    }
}

/// Venn-style partition sizes of two sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapCount {
    pub shared: usize,
    pub unique_a: usize,
    pub unique_b: usize,
}

pub fn overlap_counts<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> OverlapCount {
    let shared = a.iter().filter(|x| b.contains(x)).count();
    OverlapCount {
        shared,
        unique_a: a.len() - shared,
        unique_b: b.len() - shared,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JsdVariant {
    /// Divergence in bits, bounded by [0, 1].
    #[default]
    DivergenceBase2,
    /// Square root of the divergence in nats, bounded by [0, sqrt(ln 2)].
    DistanceBaseE,
}

/// Jensen-Shannon divergence over aligned probability pairs.
///
/// Computed as the mean of the two KL divergences to the midpoint, skipping
/// zero-probability terms.
fn jsd_aligned(pairs: impl Iterator<Item = (f64, f64)>, variant: JsdVariant) -> f64 {
    let mut nats = 0.0;
    for (p, q) in pairs {
        let m = 0.5 * (p + q);
        if p > 0.0 {
            nats += 0.5 * p * (p / m).ln();
        }
        if q > 0.0 {
            nats += 0.5 * q * (q / m).ln();
        }
    }
    let nats = nats.max(0.0);
    match variant {
        JsdVariant::DivergenceBase2 => (nats / std::f64::consts::LN_2).clamp(0.0, 1.0),
        JsdVariant::DistanceBaseE => nats.sqrt().clamp(0.0, 1.0),
    }
}

/// Base-2 Jensen-Shannon divergence.
pub fn jsd(p: &UnigramDistribution, q: &UnigramDistribution) -> Result<f64> {
    jsd_with(p, q, JsdVariant::DivergenceBase2)
}

pub fn jsd_with(p: &UnigramDistribution, q: &UnigramDistribution, variant: JsdVariant) -> Result<f64> {
    p.check_normalized()?;
    q.check_normalized()?;
    let (pp, qp) = (p.probs(), q.probs());
    let pairs = pp
        .iter()
        .map(|(t, &pv)| (pv, qp.get(t).copied().unwrap_or(0.0)))
        .chain(
            qp.iter()
                .filter(|(t, _)| !pp.contains_key(*t))
                .map(|(_, &qv)| (0.0, qv)),
        );
    Ok(jsd_aligned(pairs, variant))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMetric {
    Jaccard,
    Jsd,
}

impl SimilarityMetric {
    pub fn name(self) -> &'static str {
        match self {
            SimilarityMetric::Jaccard => "jaccard",
            SimilarityMetric::Jsd => "jsd",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSpec {
    pub iterations: usize,
    pub sample_size: usize,
    #[serde(default = "BootstrapSpec::default_top_k")]
    pub top_k: usize,
    pub seed: u64,
    pub metric: SimilarityMetric,
    #[serde(default)]
    pub jsd_variant: JsdVariant,
    #[serde(default = "BootstrapSpec::default_keep")]
    pub keep_per_iteration: bool,
}

impl BootstrapSpec {
    fn default_top_k() -> usize {
        1000
    }

    fn default_keep() -> bool {
        true
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.sample_size == 0 || self.top_k == 0 {
            return Err(Error::Config(
                "bootstrap iterations, sample_size and top_k must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub pair: (String, String),
    pub metric: String,
    pub iterations: usize,
    pub sample_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_iteration: Option<Vec<f64>>,
}

impl SimilarityReport {
    pub fn summary(&self) -> Summary {
        Summary {
            mean: self.mean,
            std: self.std,
            min: self.min,
            max: self.max,
        }
    }
}

/// Writes one `pair,metric,mean,std,min,max` row per report.
pub fn write_similarity_csv<W: Write>(reports: &[SimilarityReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::Csv {
        path: "<similarity csv>".into(),
        source: e,
    };
    w.write_record(["pair", "metric", "mean", "std", "min", "max"])
        .map_err(err)?;
    for r in reports {
        w.write_record([
            format!("{} vs {}", r.pair.0, r.pair.1),
            r.metric.clone(),
            r.mean.to_string(),
            r.std.to_string(),
            r.min.to_string(),
            r.max.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("<similarity csv>", e))?;
    Ok(())
}

/// Both corpora tokenized once over a shared vocabulary.
struct EncodedPair {
    vocab: Vocabulary,
    docs: [Vec<Vec<u32>>; 2],
}

impl EncodedPair {
    fn new(a: &Corpus, b: &Corpus) -> Self {
        let mut vocab = Vocabulary::new();
        let mut encode = |c: &Corpus| c.iter().map(|d| vocab.encode(d.text())).collect();
        let da = encode(a);
        let db = encode(b);
        EncodedPair {
            vocab,
            docs: [da, db],
        }
    }
}

fn side_rng(seed: u64, iteration: usize, side: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ iteration as u64);
    rng.set_stream(side);
    rng
}

fn draw(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, n, k).into_vec();
    idx.sort_unstable();
    idx
}

fn ngram_counts<'a>(docs: impl Iterator<Item = &'a Vec<u32>>) -> HashMap<NgramKey, u32> {
    let mut counts = HashMap::new();
    for d in docs {
        for &t in d {
            *counts.entry(NgramKey::unigram(t)).or_insert(0) += 1;
        }
        for w in d.windows(2) {
            *counts.entry(NgramKey::bigram(w[0], w[1])).or_insert(0) += 1;
        }
    }
    counts
}

struct Comparison<'a> {
    a: &'a Corpus,
    b: &'a Corpus,
    names: (&'a str, &'a str),
    encoded: EncodedPair,
    spec: &'a BootstrapSpec,
}

impl<'a> Comparison<'a> {
    fn new(a: &'a Corpus, b: &'a Corpus, names: (&'a str, &'a str), spec: &'a BootstrapSpec) -> Result<Self> {
        spec.validate()?;
        for (c, name) in [(a, names.0), (b, names.1)] {
            if c.is_empty() {
                return Err(Error::EmptyCorpus(name.to_owned()));
            }
            if spec.sample_size > c.len() {
                return Err(Error::SampleTooLarge {
                    corpus: name.to_owned(),
                    requested: spec.sample_size,
                    available: c.len(),
                });
            }
        }
        Ok(Comparison {
            a,
            b,
            names,
            encoded: EncodedPair::new(a, b),
            spec,
        })
    }

    fn samples(&self, iteration: usize) -> [Vec<usize>; 2] {
        let k = self.spec.sample_size;
        let mut ra = side_rng(self.spec.seed, iteration, 0);
        let mut rb = side_rng(self.spec.seed, iteration, 1);
        [draw(self.a.len(), k, &mut ra), draw(self.b.len(), k, &mut rb)]
    }

    fn top_sets(&self, iteration: usize) -> [Vec<NgramKey>; 2] {
        let [sa, sb] = self.samples(iteration);
        let top = |side: usize, idx: &[usize]| {
            let counts = ngram_counts(idx.iter().map(|&i| &self.encoded.docs[side][i]));
            top_k_keys(&counts, self.spec.top_k, &self.encoded.vocab)
        };
        [top(0, &sa), top(1, &sb)]
    }

    fn jaccard_at(&self, iteration: usize) -> f64 {
        let [ta, tb] = self.top_sets(iteration);
        let ta: HashSet<NgramKey> = ta.into_iter().collect();
        let tb: HashSet<NgramKey> = tb.into_iter().collect();
        jaccard(&ta, &tb)
    }

    fn jsd_at(&self, iteration: usize) -> f64 {
        let [sa, sb] = self.samples(iteration);
        let v = self.encoded.vocab.len();
        let mut ca = vec![0u64; v];
        let mut cb = vec![0u64; v];
        let (mut na, mut nb) = (0u64, 0u64);
        for &i in &sa {
            for &t in &self.encoded.docs[0][i] {
                ca[t as usize] += 1;
                na += 1;
            }
        }
        for &i in &sb {
            for &t in &self.encoded.docs[1][i] {
                cb[t as usize] += 1;
                nb += 1;
            }
        }
        if na == 0 || nb == 0 {
            // A sample with no tokens has no distribution; treat as maximally distant
            // unless both are empty.
            return if na == nb { 0.0 } else { 1.0 };
        }
        let pairs = ca
            .iter()
            .zip(&cb)
            .filter(|(&x, &y)| x > 0 || y > 0)
            .map(|(&x, &y)| (x as f64 / na as f64, y as f64 / nb as f64));
        jsd_aligned(pairs, self.spec.jsd_variant)
    }

    fn run(&self) -> SimilarityReport {
        let values: Vec<f64> = (0..self.spec.iterations)
            .into_par_iter()
            .map(|i| match self.spec.metric {
                SimilarityMetric::Jaccard => self.jaccard_at(i),
                SimilarityMetric::Jsd => self.jsd_at(i),
            })
            .collect();
        let s = Summary::from_values(&values).expect("iterations >= 1");
        SimilarityReport {
            pair: (self.names.0.to_owned(), self.names.1.to_owned()),
            metric: self.spec.metric.name().to_owned(),
            iterations: self.spec.iterations,
            sample_size: self.spec.sample_size,
            top_k: (self.spec.metric == SimilarityMetric::Jaccard).then_some(self.spec.top_k),
            mean: s.mean,
            std: s.std,
            min: s.min,
            max: s.max,
            per_iteration: self.spec.keep_per_iteration.then_some(values),
        }
    }
}

/// Repeats the configured metric over `spec.iterations` independent subsamples.
///
/// Iteration `i` draws `sample_size` documents without replacement from each
/// corpus, with RNG streams derived from `seed ^ i`, so the per-iteration
/// values do not depend on how iterations are scheduled across threads.
pub fn bootstrap_similarity(a: &Corpus, b: &Corpus, spec: &BootstrapSpec) -> Result<SimilarityReport> {
    let names = (a.source().tag(), b.source().tag());
    bootstrap_similarity_named(a, b, names, spec)
}

pub fn bootstrap_similarity_named(
    a: &Corpus,
    b: &Corpus,
    names: (&str, &str),
    spec: &BootstrapSpec,
) -> Result<SimilarityReport> {
    Ok(Comparison::new(a, b, names, spec)?.run())
}

/// The top-k sets of one bootstrap iteration, partitioned for Venn plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VennIteration {
    pub iteration: usize,
    pub counts: OverlapCount,
    pub shared: Vec<String>,
    pub unique_a: Vec<String>,
    pub unique_b: Vec<String>,
}

impl VennIteration {
    /// CSV with `section,ngram` rows, sections in the order shared, unique_a, unique_b.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Csv {
            path: "<overlap csv>".into(),
            source: e,
        };
        w.write_record(["section", "ngram"]).map_err(err)?;
        for (section, items) in [
            ("shared", &self.shared),
            ("unique_a", &self.unique_a),
            ("unique_b", &self.unique_b),
        ] {
            for n in items {
                w.write_record([section, n.as_str()]).map_err(err)?;
            }
        }
        w.flush().map_err(|e| Error::io("<overlap csv>", e))?;
        Ok(())
    }
}

/// Reconstructs the top-k sets of a single Jaccard iteration.
pub fn venn_iteration(a: &Corpus, b: &Corpus, spec: &BootstrapSpec, iteration: usize) -> Result<VennIteration> {
    let names = (a.source().tag(), b.source().tag());
    let cmp = Comparison::new(a, b, names, spec)?;
    let [ta, tb] = cmp.top_sets(iteration);
    let vocab = &cmp.encoded.vocab;
    let to_set = |keys: Vec<NgramKey>| -> HashSet<Ngram> {
        keys.into_iter().map(|k| vocab.key_to_ngram(k)).collect()
    };
    let (sa, sb) = (to_set(ta), to_set(tb));
    let sorted = |it: Vec<&Ngram>| {
        let mut v: Vec<&Ngram> = it;
        v.sort();
        v.into_iter().map(|n| n.joined()).collect::<Vec<_>>()
    };
    Ok(VennIteration {
        iteration,
        counts: overlap_counts(&sa, &sb),
        shared: sorted(sa.intersection(&sb).collect()),
        unique_a: sorted(sa.difference(&sb).collect()),
        unique_b: sorted(sb.difference(&sa).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CanonicalClass, Document, RawLabel, Source};

    fn set(items: &[&str]) -> HashSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&set(&["a", "b", "c"]), &set(&["b", "c", "d"])), 0.5);
        assert_eq!(jaccard(&set(&["a", "b"]), &set(&["a", "b"])), 1.0);
        assert_eq!(jaccard(&set(&["a"]), &set(&["b"])), 0.0);
        assert_eq!(jaccard(&set(&[]), &set(&[])), 1.0);
    }

    #[test]
    fn overlap_examples() {
        let c = overlap_counts(&set(&["a", "b"]), &set(&["b", "c", "d"]));
        assert_eq!(
            c,
            OverlapCount {
                shared: 1,
                unique_a: 1,
                unique_b: 2
            }
        );
        let same = overlap_counts(&set(&["x", "y", "z"]), &set(&["x", "y", "z"]));
        assert_eq!((same.shared, same.unique_a, same.unique_b), (3, 0, 0));
    }

    #[test]
    fn jsd_examples() {
        let p = UnigramDistribution::from_probs([("x", 1.0)]).unwrap();
        let q = UnigramDistribution::from_probs([("x", 0.5), ("y", 0.5)]).unwrap();
        assert!((jsd(&p, &q).unwrap() - 0.31128).abs() < 1e-4);
        assert_eq!(jsd(&p, &p).unwrap(), 0.0);
        let r = UnigramDistribution::from_probs([("z", 1.0)]).unwrap();
        assert_eq!(jsd(&p, &r).unwrap(), 1.0);
        let d = jsd_with(&p, &r, JsdVariant::DistanceBaseE).unwrap();
        assert!((d - std::f64::consts::LN_2.sqrt()).abs() < 1e-12);
    }

    fn corpus(source: Source, texts: &[&str]) -> Corpus {
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                Document::new(format!("d{i}"), *t, RawLabel::Score(0.0), CanonicalClass::Neutral)
                    .unwrap()
            })
            .collect();
        Corpus::new(source, docs).unwrap()
    }

    fn spec(metric: SimilarityMetric, sample_size: usize) -> BootstrapSpec {
        BootstrapSpec {
            iterations: 20,
            sample_size,
            top_k: 10,
            seed: 5,
            metric,
            jsd_variant: JsdVariant::DivergenceBase2,
            keep_per_iteration: true,
        }
    }

    #[test]
    fn self_comparison_with_full_samples() {
        let c = corpus(Source::Sarc, &["a b c", "b c d", "the cat sat", "a a a"]);
        let j = bootstrap_similarity(&c, &c, &spec(SimilarityMetric::Jaccard, 4)).unwrap();
        assert!(j.per_iteration.unwrap().iter().all(|&v| v == 1.0));
        let s = bootstrap_similarity(&c, &c, &spec(SimilarityMetric::Jsd, 4)).unwrap();
        assert!(s.per_iteration.unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sample_size_errors_name_the_corpus() {
        let a = corpus(Source::Sarc, &["a", "b"]);
        let b = corpus(Source::Ethos, &["c"]);
        match bootstrap_similarity(&a, &b, &spec(SimilarityMetric::Jsd, 2)) {
            Err(Error::SampleTooLarge { corpus, .. }) => assert_eq!(corpus, "ethos"),
            other => panic!("unexpected {other:?}"),
        }
        let empty = Corpus::new(Source::Ethos, vec![]).unwrap();
        assert!(matches!(
            bootstrap_similarity(&a, &empty, &spec(SimilarityMetric::Jsd, 1)),
            Err(Error::EmptyCorpus(_))
        ));
    }

    #[test]
    fn venn_matches_iteration_jaccard() {
        let a = corpus(Source::Sarc, &["a b c d", "e f g", "a c e", "h i j k l", "m n"]);
        let b = corpus(Source::Ethos, &["a b x", "y z a", "c d e f", "q r s"]);
        let sp = spec(SimilarityMetric::Jaccard, 3);
        let report = bootstrap_similarity(&a, &b, &sp).unwrap();
        let values = report.per_iteration.unwrap();
        for (i, &v) in values.iter().enumerate().take(5) {
            let venn = venn_iteration(&a, &b, &sp, i).unwrap();
            let c = venn.counts;
            let expected = c.shared as f64 / (c.shared + c.unique_a + c.unique_b) as f64;
            assert_eq!(v, expected);
            assert_eq!(venn.shared.len(), c.shared);
        }
    }
}
