//! Hashed-feature logistic classifier with weight transfer between stages.
//!
//! Each n-gram of a document is hashed with a seeded XXH3 into one of
//! `hash_dims` buckets. With two input streams the parent comment is hashed
//! into a second, disjoint block. Training is plain SGD on the (optionally
//! class-weighted) logistic loss, with l1 applied by soft-thresholding the
//! weights touched at each step.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::corpus::{class_weights, ClassWeights, Document};
use crate::error::{Error, Result};
use crate::text::{tokenize, Orders};

/// Seed of the feature hash. Changing it invalidates every serialized model.
pub const FEATURE_HASH_SEED: u64 = 0x6861_7465_6c65_7801;

const MIN_HASH_DIMS: usize = 1 << 10;
const SCORE_EPS: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Streams {
    CommentOnly,
    CommentPlusParent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    #[serde(default = "FeatureSpec::default_dims")]
    pub hash_dims: usize,
    #[serde(default)]
    pub orders: Orders,
    #[serde(default = "FeatureSpec::default_streams")]
    pub streams: Streams,
    #[serde(default = "FeatureSpec::default_signed")]
    pub signed_hashing: bool,
}

impl FeatureSpec {
    fn default_dims() -> usize {
        1 << 18
    }
    fn default_streams() -> Streams {
        Streams::CommentPlusParent
    }
    fn default_signed() -> bool {
        true
    }

    pub fn validate(&self) -> Result<()> {
        if !self.hash_dims.is_power_of_two() || self.hash_dims < MIN_HASH_DIMS {
            return Err(Error::Config(format!(
                "hash_dims must be a power of two >= {MIN_HASH_DIMS}, got {}",
                self.hash_dims
            )));
        }
        if self.hash_dims > u32::MAX as usize / 2 {
            return Err(Error::Config("hash_dims is too large".into()));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match self.streams {
            Streams::CommentOnly => self.hash_dims,
            Streams::CommentPlusParent => 2 * self.hash_dims,
        }
    }

    /// Bucket and sign of an n-gram's space-joined form within block 0.
    pub fn hash_slot(&self, ngram: &str) -> (u32, f64) {
        let h = xxh3_64_with_seed(ngram.as_bytes(), FEATURE_HASH_SEED);
        let index = (h & (self.hash_dims as u64 - 1)) as u32;
        let sign = if self.signed_hashing && (h >> 63) == 1 {
            -1.0
        } else {
            1.0
        };
        (index, sign)
    }
}

impl Default for FeatureSpec {
    fn default() -> Self {
        FeatureSpec {
            hash_dims: Self::default_dims(),
            orders: Orders::BOTH,
            streams: Self::default_streams(),
            signed_hashing: Self::default_signed(),
        }
    }
}

/// Sorted, duplicate-free sparse vector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVector {
    /// Sums duplicate indices and drops exact zeros.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut out = SparseVector::default();
        for (i, v) in pairs {
            if out.indices.last() == Some(&i) {
                *out.values.last_mut().unwrap() += v;
            } else {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        let (indices, values) = out
            .indices
            .into_iter()
            .zip(out.values)
            .filter(|(_, v)| *v != 0.0)
            .unzip();
        SparseVector { indices, values }
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn get(&self, index: u32) -> f64 {
        self.indices
            .binary_search(&index)
            .map_or(0.0, |p| self.values[p])
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| dense[i as usize] * v).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }
}

fn push_block(out: &mut Vec<(u32, f64)>, text: &str, spec: &FeatureSpec, offset: u32) {
    let tokens = tokenize(text);
    if spec.orders.unigrams() {
        for t in &tokens {
            let (i, s) = spec.hash_slot(t);
            out.push((offset + i, s));
        }
    }
    if spec.orders.bigrams() {
        let mut buf = String::new();
        for w in tokens.windows(2) {
            buf.clear();
            buf.push_str(&w[0]);
            buf.push(' ');
            buf.push_str(&w[1]);
            let (i, s) = spec.hash_slot(&buf);
            out.push((offset + i, s));
        }
    }
}

/// Hashed n-gram counts before normalization.
pub fn featurize_raw(doc: &Document, spec: &FeatureSpec) -> SparseVector {
    let mut pairs = Vec::new();
    push_block(&mut pairs, doc.text(), spec, 0);
    if spec.streams == Streams::CommentPlusParent {
        if let Some(parent) = doc.parent_text() {
            push_block(&mut pairs, parent, spec, spec.hash_dims as u32);
        }
    }
    SparseVector::from_pairs(pairs)
}

/// Hashed n-gram features, l2-normalized when nonzero.
pub fn featurize(doc: &Document, spec: &FeatureSpec) -> SparseVector {
    let mut v = featurize_raw(doc, spec);
    let norm = v.norm();
    if norm > 0.0 {
        for x in &mut v.values {
            *x /= norm;
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    #[serde(default = "TrainConfig::default_lr")]
    pub learning_rate: f64,
    #[serde(default = "TrainConfig::default_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub l1_lambda: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "TrainConfig::default_weighted")]
    pub class_weighted: bool,
}

impl TrainConfig {
    fn default_lr() -> f64 {
        0.05
    }
    fn default_epochs() -> usize {
        5
    }
    fn default_weighted() -> bool {
        true
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.l1_lambda.is_finite() && self.l1_lambda >= 0.0) {
            return Err(Error::Config(format!(
                "l1_lambda must be non-negative and finite, got {}",
                self.l1_lambda
            )));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: Self::default_lr(),
            epochs: Self::default_epochs(),
            l1_lambda: 0.0,
            seed: 0,
            class_weighted: Self::default_weighted(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    weights: Vec<f64>,
    bias: f64,
    feature_spec: FeatureSpec,
    lineage: Vec<String>,
}

impl LinearModel {
    pub fn zeros(spec: FeatureSpec) -> Self {
        LinearModel {
            weights: vec![0.0; spec.dimension()],
            bias: 0.0,
            feature_spec: spec,
            lineage: Vec::new(),
        }
    }

    pub fn from_parts(spec: FeatureSpec, weights: Vec<f64>, bias: f64, lineage: Vec<String>) -> Result<Self> {
        if weights.len() != spec.dimension() {
            return Err(Error::FeatureSpecMismatch(format!(
                "{} weights for a {}-dimensional feature spec",
                weights.len(),
                spec.dimension()
            )));
        }
        Ok(LinearModel {
            weights,
            bias,
            feature_spec: spec,
            lineage,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn feature_spec(&self) -> &FeatureSpec {
        &self.feature_spec
    }

    pub fn lineage(&self) -> &[String] {
        &self.lineage
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bias == 0.0 && self.weights.iter().all(|&w| w == 0.0)
    }

    pub fn margin(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    /// Bitwise equality of weights and bias.
    pub fn same_parameters(&self, other: &LinearModel) -> bool {
        self.bias.to_bits() == other.bias.to_bits()
            && self.weights.len() == other.weights.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Mutable access for hand-built models in tests and tools.
    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn set_bias(&mut self, bias: f64) {
        self.bias = bias;
    }
}

/// Logistic function clamped into the open interval (0, 1).
pub fn sigmoid(z: f64) -> f64 {
    let s = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    s.clamp(SCORE_EPS, 1.0 - SCORE_EPS)
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub fn predict_score(model: &LinearModel, doc: &Document) -> f64 {
    sigmoid(model.margin(&featurize(doc, &model.feature_spec)))
}

/// Copies a model as the initialization of `next_stage`.
pub fn transfer(model: &LinearModel, next_stage: &str) -> LinearModel {
    let mut copy = model.clone();
    copy.lineage.push(next_stage.to_owned());
    copy
}

/// A featurized example with its label and loss weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedExample {
    pub features: SparseVector,
    pub label: u8,
    pub weight: f64,
}

/// Full-batch objective: weighted logistic loss plus `l1 * ||w||_1`.
pub fn objective(model: &LinearModel, batch: &[WeightedExample], l1: f64) -> f64 {
    let data: f64 = batch
        .iter()
        .map(|ex| {
            let z = model.margin(&ex.features);
            ex.weight * (softplus(z) - ex.label as f64 * z)
        })
        .sum();
    data + l1 * model.l1_norm()
}

/// Gradient of [`objective`] over the coordinates touched by `batch`, plus the bias.
///
/// The l1 term contributes `l1 * sign(w)` (0 at `w = 0`); untouched weights
/// only see that term and are not listed.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub weights: BTreeMap<u32, f64>,
    pub bias: f64,
}

pub fn gradient(model: &LinearModel, batch: &[WeightedExample], l1: f64) -> Gradient {
    let mut weights = BTreeMap::new();
    let mut bias = 0.0;
    for ex in batch {
        let z = model.margin(&ex.features);
        let residual = ex.weight * (logistic_exact(z) - ex.label as f64);
        bias += residual;
        for (i, x) in ex.features.iter() {
            *weights.entry(i).or_insert(0.0) += residual * x;
        }
    }
    if l1 > 0.0 {
        for (&i, g) in weights.iter_mut() {
            let w = model.weights[i as usize];
            if w != 0.0 {
                *g += l1 * w.signum();
            }
        }
    }
    Gradient { weights, bias }
}

fn logistic_exact(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Featurizes labeled documents and attaches class weights.
pub fn weighted_examples(
    data: &[(&Document, u8)],
    spec: &FeatureSpec,
    class_weighted: bool,
) -> Result<Vec<WeightedExample>> {
    let labels: Vec<u8> = data.iter().map(|d| d.1).collect();
    let weights = class_weights(&labels)?;
    let weights = if class_weighted {
        weights
    } else {
        ClassWeights::UNIT
    };
    Ok(data
        .par_iter()
        .map(|(doc, label)| WeightedExample {
            features: featurize(doc, spec),
            label: *label,
            weight: weights.weight(*label),
        })
        .collect())
}

/// Trains on `data` by SGD, starting from `init` or from zero weights.
///
/// `stage` is appended to the lineage unless the initialization already ends
/// with it (as it does after [`transfer`]).
pub fn train(
    data: &[(&Document, u8)],
    config: &TrainConfig,
    spec: &FeatureSpec,
    init: Option<&LinearModel>,
    stage: &str,
) -> Result<LinearModel> {
    config.validate()?;
    spec.validate()?;
    if let Some(m) = init {
        if m.feature_spec != *spec {
            return Err(Error::FeatureSpecMismatch(format!(
                "initial model uses {:?}, training requested {:?}",
                m.feature_spec, spec
            )));
        }
    }
    let examples = weighted_examples(data, spec, config.class_weighted)?;
    let mut model = init.cloned().unwrap_or_else(|| LinearModel::zeros(*spec));
    sgd(&mut model, &examples, config);
    if model.lineage.last().map(String::as_str) != Some(stage) {
        model.lineage.push(stage.to_owned());
    }
    Ok(model)
}

/// Runs SGD in place over pre-featurized examples.
pub fn sgd(model: &mut LinearModel, examples: &[WeightedExample], config: &TrainConfig) {
    let lr = config.learning_rate;
    let shrink = lr * config.l1_lambda;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    for epoch in 0..config.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(epoch as u64);
        order.sort_unstable();
        order.shuffle(&mut rng);
        for &i in &order {
            let ex = &examples[i];
            let z = model.margin(&ex.features);
            let g = ex.weight * (logistic_exact(z) - ex.label as f64);
            for (j, x) in ex.features.iter() {
                let w = &mut model.weights[j as usize];
                *w -= lr * g * x;
                if shrink > 0.0 {
                    *w = w.signum() * (w.abs() - shrink).max(0.0);
                }
            }
            model.bias -= lr * g;
        }
    }
}

const MODEL_FORMAT: &str = "hatelex-linear-model";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "encoding", rename_all = "snake_case")]
enum WeightEncoding {
    Dense { values: Vec<f64> },
    Sparse { len: usize, indices: Vec<u32>, values: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    feature_spec: FeatureSpec,
    bias: f64,
    lineage: Vec<String>,
    weights: WeightEncoding,
}

impl LinearModel {
    /// Serializes as JSON, choosing a sparse encoding when fewer than a third
    /// of the weights are nonzero. Every weight round-trips bit for bit.
    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        let nonzero: Vec<(u32, f64)> = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.to_bits() != 0)
            .map(|(i, &w)| (i as u32, w))
            .collect();
        let weights = if nonzero.len() * 3 < self.weights.len() {
            let (indices, values) = nonzero.into_iter().unzip();
            WeightEncoding::Sparse {
                len: self.weights.len(),
                indices,
                values,
            }
        } else {
            WeightEncoding::Dense {
                values: self.weights.clone(),
            }
        };
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            feature_spec: self.feature_spec,
            bias: self.bias,
            lineage: self.lineage.clone(),
            weights,
        };
        serde_json::to_writer(writer, &file)?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let file: ModelFile = serde_json::from_reader(reader)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::Precondition(format!(
                "unsupported model container {} v{}",
                file.format, file.version
            )));
        }
        file.feature_spec.validate()?;
        let weights = match file.weights {
            WeightEncoding::Dense { values } => values,
            WeightEncoding::Sparse {
                len,
                indices,
                values,
            } => {
                if indices.len() != values.len() {
                    return Err(Error::Precondition("sparse weights are ragged".into()));
                }
                let mut w = vec![0.0; len];
                for (i, v) in indices.into_iter().zip(values) {
                    *w.get_mut(i as usize).ok_or_else(|| {
                        Error::Precondition(format!("weight index {i} out of range"))
                    })? = v;
                }
                w
            }
        };
        LinearModel::from_parts(file.feature_spec, weights, file.bias, file.lineage)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CanonicalClass, RawLabel};

    fn doc(text: &str) -> Document {
        Document::new(text, text, RawLabel::Score(0.0), CanonicalClass::Neutral).unwrap()
    }

    fn small_spec() -> FeatureSpec {
        FeatureSpec {
            hash_dims: 1 << 10,
            ..FeatureSpec::default()
        }
    }

    #[test]
    fn feature_spec_validation() {
        assert!(FeatureSpec::default().validate().is_ok());
        let bad = FeatureSpec {
            hash_dims: 1000,
            ..FeatureSpec::default()
        };
        assert!(bad.validate().is_err());
        let tiny = FeatureSpec {
            hash_dims: 512,
            ..FeatureSpec::default()
        };
        assert!(tiny.validate().is_err());
        assert_eq!(small_spec().dimension(), 2048);
    }

    #[test]
    fn featurize_examples() {
        let spec = small_spec();
        let blank = Document::new("b", "!!!", RawLabel::Score(0.0), CanonicalClass::Neutral).unwrap();
        assert!(featurize(&blank, &spec).is_zero());

        assert_eq!(featurize(&doc("same words here"), &spec), featurize(&doc("same words here"), &spec));

        let unsigned = FeatureSpec {
            signed_hashing: false,
            orders: Orders::UNIGRAMS,
            ..spec
        };
        let (idx, _) = unsigned.hash_slot("a");
        assert_eq!(featurize_raw(&doc("a"), &unsigned).get(idx), 1.0);
        assert_eq!(featurize_raw(&doc("a a"), &unsigned).get(idx), 2.0);
        let n = featurize(&doc("a b c"), &unsigned).norm();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parent_goes_to_second_block() {
        let spec = small_spec();
        let d = doc("hello there").with_parent(Some("general kenobi".into()));
        let v = featurize(&d, &spec);
        assert!(v.indices.iter().any(|&i| i as usize >= spec.hash_dims));
        let comment_only = FeatureSpec {
            streams: Streams::CommentOnly,
            ..spec
        };
        let v = featurize(&d, &comment_only);
        assert!(v.indices.iter().all(|&i| (i as usize) < spec.hash_dims));
        let no_parent = featurize(&doc("hello there"), &spec);
        assert!(no_parent.indices.iter().all(|&i| (i as usize) < spec.hash_dims));
    }

    #[test]
    fn predict_examples() {
        let spec = FeatureSpec {
            signed_hashing: false,
            ..small_spec()
        };
        let zero = LinearModel::zeros(spec);
        assert_eq!(predict_score(&zero, &doc("anything at all")), 0.5);

        let mut m = LinearModel::zeros(spec);
        let (idx, _) = spec.hash_slot("x");
        m.weights_mut()[idx as usize] = 2.0;
        let expected = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((predict_score(&m, &doc("x")) - expected).abs() < 1e-12);
        assert!((expected - 0.8808).abs() < 1e-4);

        m.set_bias(1e6);
        let s = predict_score(&m, &doc("x"));
        assert!(s > 0.0 && s < 1.0);
    }

    fn toy() -> Vec<(Document, u8)> {
        vec![(doc("good"), 0), (doc("bad"), 1)]
    }

    #[test]
    fn separable_toy_set_is_learned() {
        let data = toy();
        let view: Vec<(&Document, u8)> = data.iter().map(|(d, l)| (d, *l)).collect();
        let cfg = TrainConfig {
            epochs: 50,
            ..TrainConfig::default()
        };
        let m = train(&view, &cfg, &small_spec(), None, "toy").unwrap();
        for (d, l) in &data {
            let pred = (predict_score(&m, d) >= 0.5) as u8;
            assert_eq!(pred, *l);
        }
        assert_eq!(m.lineage(), ["toy"]);
    }

    #[test]
    fn training_is_deterministic() {
        let data = toy();
        let view: Vec<(&Document, u8)> = data.iter().map(|(d, l)| (d, *l)).collect();
        let cfg = TrainConfig {
            seed: 11,
            l1_lambda: 1e-3,
            ..TrainConfig::default()
        };
        let a = train(&view, &cfg, &small_spec(), None, "s").unwrap();
        let b = train(&view, &cfg, &small_spec(), None, "s").unwrap();
        assert!(a.same_parameters(&b));
    }

    #[test]
    fn vanishing_learning_rate_keeps_init() {
        let data = toy();
        let view: Vec<(&Document, u8)> = data.iter().map(|(d, l)| (d, *l)).collect();
        let cfg = TrainConfig::default();
        let base = train(&view, &cfg, &small_spec(), None, "sarcasm").unwrap();
        let init = transfer(&base, "implicit_hate");
        let tiny = TrainConfig {
            learning_rate: 1e-14,
            epochs: 1,
            ..cfg.clone()
        };
        let next = train(&view, &tiny, &small_spec(), Some(&init), "implicit_hate").unwrap();
        for (a, b) in next.weights().iter().zip(init.weights()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(next.lineage(), ["sarcasm", "implicit_hate"]);
        assert!(matches!(
            train(&view, &TrainConfig { epochs: 0, ..cfg }, &small_spec(), None, "x"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn single_class_and_spec_mismatch_fail() {
        let d = doc("only");
        let cfg = TrainConfig::default();
        assert!(matches!(
            train(&[(&d, 1)], &cfg, &small_spec(), None, "x"),
            Err(Error::SingleClass(_))
        ));
        let data = toy();
        let view: Vec<(&Document, u8)> = data.iter().map(|(d, l)| (d, *l)).collect();
        let other = LinearModel::zeros(FeatureSpec::default());
        assert!(matches!(
            train(&view, &cfg, &small_spec(), Some(&other), "x"),
            Err(Error::FeatureSpecMismatch(_))
        ));
    }

    #[test]
    fn transfer_copies_and_isolates() {
        let data = toy();
        let view: Vec<(&Document, u8)> = data.iter().map(|(d, l)| (d, *l)).collect();
        let cfg = TrainConfig::default();
        let src = train(&view, &cfg, &small_spec(), None, "sarcasm").unwrap();
        let snapshot = src.clone();
        let copy = transfer(&src, "implicit_hate");
        assert_eq!(copy.lineage(), ["sarcasm", "implicit_hate"]);
        for d in ["good", "bad", "neither"] {
            assert_eq!(predict_score(&src, &doc(d)), predict_score(&copy, &doc(d)));
        }
        let flipped: Vec<(&Document, u8)> = data.iter().map(|(d, l)| (d, 1 - *l)).collect();
        let _ = train(&flipped, &cfg, &small_spec(), Some(&copy), "implicit_hate").unwrap();
        assert!(src.same_parameters(&snapshot));

        let zero = transfer(&LinearModel::zeros(small_spec()), "next");
        assert!(zero.is_zero());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let data = toy();
        let view: Vec<(&Document, u8)> = data.iter().map(|(d, l)| (d, *l)).collect();
        let mut m = train(&view, &TrainConfig::default(), &small_spec(), None, "s").unwrap();
        m.weights_mut()[3] = -0.0;
        m.weights_mut()[4] = 0.1 + 0.2;
        let mut buf = Vec::new();
        m.write_json(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).contains("\"sparse\""));
        let back = LinearModel::read_json(buf.as_slice()).unwrap();
        assert!(back.same_parameters(&m));
        assert_eq!(back.lineage(), m.lineage());

        let mut dense = LinearModel::zeros(small_spec());
        for (i, w) in dense.weights_mut().iter_mut().enumerate() {
            *w = (i as f64).sin() / 3.0;
        }
        let mut buf = Vec::new();
        dense.write_json(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).contains("\"dense\""));
        assert!(LinearModel::read_json(buf.as_slice()).unwrap().same_parameters(&dense));
    }
}
