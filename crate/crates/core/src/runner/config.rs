//! Declarative run configuration.
//!
//! A config is read from TOML (or from the JSON snapshot embedded in a
//! previous report), then [`RunConfig::resolve`] fills every unset seed and
//! per-dataset default so the resolved value alone reproduces a run.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::corpus::{BinaryTask, EthosAdapter, ImplicitHateAdapter, SarcAdapter, SplitSpec};
use crate::error::{Error, Result};
use crate::model::{FeatureSpec, TrainConfig};
use crate::relatedness::{BootstrapSpec, JsdVariant, SimilarityMetric};

/// Derives an independent seed for a named component from the global seed.
pub fn derive_seed(global: u64, component: &str) -> u64 {
    xxh3_64_with_seed(component.as_bytes(), global)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetName {
    Sarc,
    ImplicitHate,
    Ethos,
    SarcasmV2,
}

impl DatasetName {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetName::Sarc => "sarc",
            DatasetName::ImplicitHate => "implicit_hate",
            DatasetName::Ethos => "ethos",
            DatasetName::SarcasmV2 => "sarcasm_v2",
        }
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry<A> {
    pub path: PathBuf,
    #[serde(default)]
    pub adapter: A,
    /// Keep at most this many documents (seeded subsample, original order).
    #[serde(default)]
    pub max_documents: Option<usize>,
    /// Keep this fraction of documents (seeded subsample, original order).
    #[serde(default)]
    pub sample_fraction: Option<f64>,
    /// Seed for `max_documents` / `sample_fraction`; also used for single-step caps.
    #[serde(default)]
    pub subsample_seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Datasets {
    #[serde(default)]
    pub sarc: Option<DatasetEntry<SarcAdapter>>,
    #[serde(default)]
    pub implicit_hate: Option<DatasetEntry<ImplicitHateAdapter>>,
    #[serde(default)]
    pub ethos: Option<DatasetEntry<EthosAdapter>>,
    /// Optional second sarcasm corpus used as a similarity baseline.
    #[serde(default)]
    pub sarcasm_v2: Option<DatasetEntry<SarcAdapter>>,
}

impl Datasets {
    pub fn configured(&self) -> Vec<DatasetName> {
        let mut v = Vec::new();
        if self.sarc.is_some() {
            v.push(DatasetName::Sarc);
        }
        if self.implicit_hate.is_some() {
            v.push(DatasetName::ImplicitHate);
        }
        if self.ethos.is_some() {
            v.push(DatasetName::Ethos);
        }
        if self.sarcasm_v2.is_some() {
            v.push(DatasetName::SarcasmV2);
        }
        v
    }

    pub fn has(&self, name: DatasetName) -> bool {
        self.configured().contains(&name)
    }

    fn paths_mut(&mut self) -> Vec<&mut PathBuf> {
        let mut v = Vec::new();
        if let Some(d) = &mut self.sarc {
            v.push(&mut d.path);
        }
        if let Some(d) = &mut self.implicit_hate {
            v.push(&mut d.path);
        }
        if let Some(d) = &mut self.ethos {
            v.push(&mut d.path);
        }
        if let Some(d) = &mut self.sarcasm_v2 {
            v.push(&mut d.path);
        }
        v
    }

    fn subsample_seeds_mut(&mut self) -> Vec<(DatasetName, &mut Option<u64>)> {
        let mut v = Vec::new();
        if let Some(d) = &mut self.sarc {
            v.push((DatasetName::Sarc, &mut d.subsample_seed));
        }
        if let Some(d) = &mut self.implicit_hate {
            v.push((DatasetName::ImplicitHate, &mut d.subsample_seed));
        }
        if let Some(d) = &mut self.ethos {
            v.push((DatasetName::Ethos, &mut d.subsample_seed));
        }
        if let Some(d) = &mut self.sarcasm_v2 {
            v.push((DatasetName::SarcasmV2, &mut d.subsample_seed));
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preprocessing {
    #[serde(default = "Preprocessing::default_threshold")]
    pub ethos_threshold: f64,
    #[serde(default = "Preprocessing::default_vote_filter")]
    pub vote_filter: bool,
    #[serde(default = "Preprocessing::default_min_ups")]
    pub min_ups: i64,
    #[serde(default)]
    pub max_downs: i64,
}

impl Preprocessing {
    fn default_threshold() -> f64 {
        0.33
    }
    fn default_vote_filter() -> bool {
        true
    }
    fn default_min_ups() -> i64 {
        10
    }
}

impl Default for Preprocessing {
    fn default() -> Self {
        Preprocessing {
            ethos_threshold: Self::default_threshold(),
            vote_filter: Self::default_vote_filter(),
            min_ups: Self::default_min_ups(),
            max_downs: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSettings {
    pub train_fraction: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_true")]
    pub stratified: bool,
}

fn default_true() -> bool {
    true
}

impl SplitSettings {
    fn with_fraction(train_fraction: f64) -> Self {
        SplitSettings {
            train_fraction,
            seed: None,
            stratified: true,
        }
    }

    pub fn spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            seed: self.seed.expect("config resolved"),
            stratified: self.stratified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSettings {
    #[serde(default = "TrainSettings::default_lr")]
    pub learning_rate: f64,
    #[serde(default = "TrainSettings::default_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub l1_lambda: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_true")]
    pub class_weighted: bool,
}

impl TrainSettings {
    fn default_lr() -> f64 {
        TrainConfig::default().learning_rate
    }
    fn default_epochs() -> usize {
        TrainConfig::default().epochs
    }

    pub fn config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            l1_lambda: self.l1_lambda,
            seed: self.seed.expect("config resolved"),
            class_weighted: self.class_weighted,
        }
    }
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            learning_rate: Self::default_lr(),
            epochs: Self::default_epochs(),
            l1_lambda: 0.0,
            seed: None,
            class_weighted: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityRun {
    pub a: DatasetName,
    pub b: DatasetName,
    pub metric: SimilarityMetric,
    #[serde(default = "SimilarityRun::default_iterations")]
    pub iterations: usize,
    pub sample_size: usize,
    #[serde(default = "SimilarityRun::default_top_k")]
    pub top_k: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub jsd_variant: JsdVariant,
    #[serde(default = "default_true")]
    pub keep_per_iteration: bool,
}

impl SimilarityRun {
    fn default_iterations() -> usize {
        1000
    }
    fn default_top_k() -> usize {
        1000
    }

    fn new(a: DatasetName, b: DatasetName, metric: SimilarityMetric, sample_size: usize) -> Self {
        SimilarityRun {
            a,
            b,
            metric,
            iterations: Self::default_iterations(),
            sample_size,
            top_k: Self::default_top_k(),
            seed: None,
            jsd_variant: JsdVariant::default(),
            keep_per_iteration: true,
        }
    }

    pub fn spec(&self) -> BootstrapSpec {
        BootstrapSpec {
            iterations: self.iterations,
            sample_size: self.sample_size,
            top_k: self.top_k,
            seed: self.seed.expect("config resolved"),
            metric: self.metric,
            jsd_variant: self.jsd_variant,
            keep_per_iteration: self.keep_per_iteration,
        }
    }

    fn label(&self) -> String {
        format!("similarity:{}:{}:{}", self.a, self.b, self.metric.name())
    }
}

/// Parameters of the automatic sarcasm-vs-sarcasm baseline comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineSettings {
    #[serde(default = "SimilarityRun::default_iterations")]
    pub iterations: usize,
    #[serde(default = "BaselineSettings::default_sample")]
    pub sample_size: usize,
    #[serde(default = "SimilarityRun::default_top_k")]
    pub top_k: usize,
}

impl BaselineSettings {
    fn default_sample() -> usize {
        1000
    }
}

impl Default for BaselineSettings {
    fn default() -> Self {
        BaselineSettings {
            iterations: SimilarityRun::default_iterations(),
            sample_size: Self::default_sample(),
            top_k: SimilarityRun::default_top_k(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityConfig {
    #[serde(default = "SimilarityConfig::default_runs")]
    pub runs: Vec<SimilarityRun>,
    #[serde(default)]
    pub baseline: BaselineSettings,
    /// Which bootstrap iteration to export as a Venn overlap for Jaccard runs.
    #[serde(default)]
    pub venn_iteration: usize,
}

impl SimilarityConfig {
    /// Sarcasm vs. each hate corpus, both metrics, at the published sample sizes.
    fn default_runs() -> Vec<SimilarityRun> {
        use DatasetName::*;
        use SimilarityMetric::*;
        vec![
            SimilarityRun::new(Sarc, ImplicitHate, Jaccard, 5000),
            SimilarityRun::new(Sarc, Ethos, Jaccard, 500),
            SimilarityRun::new(Sarc, ImplicitHate, Jsd, 1000),
            SimilarityRun::new(Sarc, Ethos, Jsd, 500),
        ]
    }
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            runs: Self::default_runs(),
            baseline: BaselineSettings::default(),
            venn_iteration: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceCaps {
    #[serde(default)]
    pub sarc: Option<usize>,
    #[serde(default)]
    pub implicit_hate: Option<usize>,
    #[serde(default)]
    pub ethos: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleStepConfig {
    #[serde(default = "SingleStepConfig::default_split")]
    pub split: SplitSettings,
    #[serde(default)]
    pub train: TrainSettings,
    /// Per-source document caps applied before combination; unset keeps all.
    #[serde(default)]
    pub caps: SourceCaps,
    #[serde(default)]
    pub combine_seed: Option<u64>,
}

impl SingleStepConfig {
    fn default_split() -> SplitSettings {
        SplitSettings::with_fraction(0.8)
    }
}

impl Default for SingleStepConfig {
    fn default() -> Self {
        SingleStepConfig {
            split: Self::default_split(),
            train: TrainSettings::default(),
            caps: SourceCaps::default(),
            combine_seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    pub name: String,
    pub dataset: DatasetName,
    pub task: BinaryTask,
    #[serde(default)]
    pub split: Option<SplitSettings>,
    #[serde(default)]
    pub train: TrainSettings,
    /// Must equal the global feature spec when given.
    #[serde(default)]
    pub features: Option<FeatureSpec>,
    /// Also evaluate on the neutral + implicit-hate subset of the test split.
    #[serde(default)]
    pub implicit_only_eval: Option<bool>,
}

impl StageConfig {
    fn new(name: &str, dataset: DatasetName, task: BinaryTask) -> Self {
        StageConfig {
            name: name.to_owned(),
            dataset,
            task,
            split: None,
            train: TrainSettings::default(),
            features: None,
            implicit_only_eval: None,
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        self.split.as_ref().expect("config resolved").spec()
    }

    pub fn implicit_only(&self) -> bool {
        self.implicit_only_eval.unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequentialConfig {
    #[serde(default = "SequentialConfig::default_stages")]
    pub stages: Vec<StageConfig>,
}

impl SequentialConfig {
    fn default_stages() -> Vec<StageConfig> {
        vec![
            StageConfig::new("sarcasm", DatasetName::Sarc, BinaryTask::Sarcasm),
            StageConfig::new("implicit_hate", DatasetName::ImplicitHate, BinaryTask::Hate),
            StageConfig::new("ethos", DatasetName::Ethos, BinaryTask::Hate),
        ]
    }
}

impl Default for SequentialConfig {
    fn default() -> Self {
        SequentialConfig {
            stages: Self::default_stages(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblationConfig {
    /// Stage removed from the baseline arm.
    #[serde(default = "AblationConfig::default_stage")]
    pub pretrain_stage: String,
    /// When false both arms keep the pre-training stage (a null ablation).
    #[serde(default = "default_true")]
    pub drop_in_baseline: bool,
}

impl AblationConfig {
    fn default_stage() -> String {
        "sarcasm".into()
    }
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            pretrain_stage: Self::default_stage(),
            drop_in_baseline: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Similarity,
    SingleStep,
    Sequential,
    Ablation,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Similarity => "similarity",
            Experiment::SingleStep => "single-step",
            Experiment::Sequential => "sequential",
            Experiment::Ablation => "ablation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "RunConfig::default_output")]
    pub output_dir: PathBuf,
    /// Label attached to every evaluation so results are never mistaken for another model's.
    #[serde(default = "RunConfig::default_model")]
    pub model_name: String,
    #[serde(default = "RunConfig::default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub datasets: Datasets,
    #[serde(default)]
    pub preprocessing: Preprocessing,
    #[serde(default)]
    pub features: FeatureSpec,
    #[serde(default)]
    pub similarity: SimilarityConfig,
    #[serde(default)]
    pub single_step: SingleStepConfig,
    #[serde(default)]
    pub sequential: SequentialConfig,
    #[serde(default)]
    pub ablation: AblationConfig,
}

impl RunConfig {
    fn default_output() -> PathBuf {
        PathBuf::from("out")
    }
    fn default_model() -> String {
        "hashed-logistic".into()
    }
    fn default_threshold() -> f64 {
        0.5
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads TOML, or a JSON report snapshot when the extension is `.json`.
    /// Relative paths are resolved against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            // Accept either a bare config or a report carrying one under `config`.
            let value = match value.get("config") {
                Some(inner) if value.get("experiment").is_some() => inner.clone(),
                _ => value,
            };
            serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?
        } else {
            Self::from_toml_str(&text)?
        };
        let base = path
            .parent()
            .map(|p| if p.as_os_str().is_empty() { Path::new(".") } else { p })
            .unwrap_or(Path::new("."));
        let base = base.canonicalize().unwrap_or_else(|_| base.to_path_buf());
        cfg.rebase(&base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        for p in self.datasets.paths_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
    }

    /// Fills unset seeds and per-stage defaults in place.
    pub fn resolve(&mut self) {
        let g = self.seed;
        let fill = |slot: &mut Option<u64>, label: &str| {
            if slot.is_none() {
                *slot = Some(derive_seed(g, label));
            }
        };
        for (name, seed) in self.datasets.subsample_seeds_mut() {
            fill(seed, &format!("subsample:{name}"));
        }
        for run in &mut self.similarity.runs {
            let label = run.label();
            fill(&mut run.seed, &label);
        }
        fill(&mut self.single_step.split.seed, "single_step:split");
        fill(&mut self.single_step.train.seed, "single_step:train");
        fill(&mut self.single_step.combine_seed, "single_step:combine");
        for stage in &mut self.sequential.stages {
            let split = stage.split.get_or_insert_with(|| {
                SplitSettings::with_fraction(match stage.dataset {
                    DatasetName::Ethos => 0.4,
                    _ => 0.8,
                })
            });
            fill(&mut split.seed, &format!("stage:{}:split", stage.name));
            fill(&mut stage.train.seed, &format!("stage:{}:train", stage.name));
            if stage.implicit_only_eval.is_none() {
                stage.implicit_only_eval = Some(stage.dataset == DatasetName::ImplicitHate);
            }
        }
    }

    /// Sarcasm-vs-baseline runs appended when a second sarcasm corpus is configured.
    pub fn similarity_runs(&self) -> Vec<SimilarityRun> {
        let mut runs = self.similarity.runs.clone();
        let mentions_baseline = runs
            .iter()
            .any(|r| r.a == DatasetName::SarcasmV2 || r.b == DatasetName::SarcasmV2);
        if self.datasets.sarcasm_v2.is_some() && !mentions_baseline {
            let b = &self.similarity.baseline;
            for metric in [SimilarityMetric::Jaccard, SimilarityMetric::Jsd] {
                let mut run = SimilarityRun::new(DatasetName::Sarc, DatasetName::SarcasmV2, metric, b.sample_size);
                run.iterations = b.iterations;
                run.top_k = b.top_k;
                run.seed = Some(derive_seed(self.seed, &run.label()));
                runs.push(run);
            }
        }
        runs
    }

    fn require(&self, name: DatasetName, experiment: Experiment) -> Result<()> {
        if self.datasets.has(name) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{} needs dataset `{name}`",
                experiment.name()
            )))
        }
    }

    /// Checks the config for `experiment`. Expects a resolved config.
    pub fn validate(&self, experiment: Experiment) -> Result<()> {
        self.features.validate()?;
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config(format!("threshold must lie in (0, 1), got {}", self.threshold)));
        }
        let t = self.preprocessing.ethos_threshold;
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Config(format!("ethos_threshold must lie in (0, 1), got {t}")));
        }
        if let Some(sarc) = &self.datasets.sarc {
            if self.preprocessing.vote_filter
                && (sarc.adapter.columns.ups.is_none() || sarc.adapter.columns.downs.is_none())
            {
                return Err(Error::Config(
                    "vote_filter needs `ups` and `downs` columns in the sarc adapter".into(),
                ));
            }
        }
        self.validate_datasets()?;
        match experiment {
            Experiment::Similarity => self.validate_similarity(),
            Experiment::SingleStep => {
                for d in [DatasetName::Sarc, DatasetName::ImplicitHate, DatasetName::Ethos] {
                    self.require(d, experiment)?;
                }
                self.single_step.split.spec().validate()?;
                self.single_step.train.config().validate()
            }
            Experiment::Sequential => self.validate_stages(&self.sequential.stages, experiment),
            Experiment::Ablation => {
                self.validate_stages(&self.sequential.stages, experiment)?;
                let stage = &self.ablation.pretrain_stage;
                if !self.sequential.stages.iter().any(|s| &s.name == stage) {
                    return Err(Error::Config(format!(
                        "ablation pretrain_stage `{stage}` is not a sequential stage"
                    )));
                }
                if self.sequential.stages.len() < 2 {
                    return Err(Error::Config("ablation needs at least two stages".into()));
                }
                Ok(())
            }
        }
    }

    fn validate_datasets(&self) -> Result<()> {
        let d = &self.datasets;
        let entries: Vec<(DatasetName, &Path, Option<f64>)> = [
            d.sarc.as_ref().map(|e| (DatasetName::Sarc, e.path.as_path(), e.sample_fraction)),
            d.implicit_hate
                .as_ref()
                .map(|e| (DatasetName::ImplicitHate, e.path.as_path(), e.sample_fraction)),
            d.ethos.as_ref().map(|e| (DatasetName::Ethos, e.path.as_path(), e.sample_fraction)),
            d.sarcasm_v2
                .as_ref()
                .map(|e| (DatasetName::SarcasmV2, e.path.as_path(), e.sample_fraction)),
        ]
        .into_iter()
        .flatten()
        .collect();
        for (name, path, fraction) in entries {
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "dataset `{name}` path {} does not exist",
                    path.display()
                )));
            }
            if let Some(f) = fraction {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::Config(format!(
                        "dataset `{name}` sample_fraction must lie in (0, 1], got {f}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn validate_similarity(&self) -> Result<()> {
        if self.datasets.configured().len() < 2 {
            return Err(Error::Config("similarity needs at least two datasets".into()));
        }
        let runs = self.similarity_runs();
        if runs.is_empty() {
            return Err(Error::Config("no similarity runs configured".into()));
        }
        for run in &runs {
            self.require(run.a, Experiment::Similarity)?;
            self.require(run.b, Experiment::Similarity)?;
            run.spec().validate()?;
        }
        Ok(())
    }

    fn validate_stages(&self, stages: &[StageConfig], experiment: Experiment) -> Result<()> {
        if stages.is_empty() {
            return Err(Error::Config("no sequential stages configured".into()));
        }
        let mut names = HashSet::new();
        for stage in stages {
            if !names.insert(stage.name.as_str()) {
                return Err(Error::Config(format!("duplicate stage name `{}`", stage.name)));
            }
        }
        for stage in stages {
            self.require(stage.dataset, experiment)?;
            if let Some(f) = &stage.features {
                if *f != self.features {
                    return Err(Error::FeatureSpecMismatch(format!(
                        "stage `{}` overrides the feature spec; weights cannot transfer across stages",
                        stage.name
                    )));
                }
            }
            stage.split_spec().validate()?;
            stage.train.config().validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_materialize() {
        let mut cfg = RunConfig::from_toml_str("seed = 7").unwrap();
        cfg.resolve();
        assert_eq!(cfg.sequential.stages.len(), 3);
        let ethos = &cfg.sequential.stages[2];
        assert_eq!(ethos.split.as_ref().unwrap().train_fraction, 0.4);
        assert!(cfg.sequential.stages[1].implicit_only());
        assert!(cfg.similarity.runs.iter().all(|r| r.seed.is_some()));
        assert_eq!(cfg.preprocessing.ethos_threshold, 0.33);
        assert_eq!(cfg.preprocessing.min_ups, 10);

        let mut again = cfg.clone();
        again.resolve();
        assert_eq!(again, cfg);
    }

    #[test]
    fn global_seed_changes_derived_seeds() {
        let mut a = RunConfig::from_toml_str("seed = 1").unwrap();
        let mut b = RunConfig::from_toml_str("seed = 2").unwrap();
        a.resolve();
        b.resolve();
        assert_ne!(a.single_step.split.seed, b.single_step.split.seed);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::from_toml_str("sed = 1"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn duplicate_stage_names_rejected() {
        let mut cfg = RunConfig::from_toml_str(
            r#"
            [[sequential.stages]]
            name = "a"
            dataset = "ethos"
            task = "hate"
            [[sequential.stages]]
            name = "a"
            dataset = "ethos"
            task = "hate"
            "#,
        )
        .unwrap();
        cfg.resolve();
        let err = cfg.validate_stages(&cfg.sequential.stages, Experiment::Sequential);
        assert!(matches!(err, Err(Error::Config(m)) if m.contains("duplicate")));
    }
}
