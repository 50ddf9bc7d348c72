//! Config-driven experiments and on-disk reports.
//!
//! Every experiment writes under the configured output directory:
//! `reports/` (JSON + CSV), `models/` (one JSON model per trained stage) and
//! `ingest/` (one ingest report per dataset). File names start with
//! `{experiment}-seed{seed}`.

mod config;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{
    combine, filter_sarcasm_votes, load_ethos, load_implicit_hate, load_sarcasm_as, project_labels,
    split, BinaryTask, CanonicalClass, Corpus, Document, IngestReport, Ingested, Source,
};
use crate::error::{Error, Result};
use crate::metrics::{compare, DeltaReport, EvalReport};
use crate::model::{predict_score, train, transfer, LinearModel};
use crate::relatedness::{
    bootstrap_similarity_named, venn_iteration, write_similarity_csv, OverlapCount,
    SimilarityMetric, SimilarityReport,
};

pub use config::{
    derive_seed, AblationConfig, BaselineSettings, DatasetEntry, DatasetName, Datasets, Experiment,
    Preprocessing, RunConfig, SequentialConfig, SimilarityConfig, SimilarityRun, SingleStepConfig,
    SourceCaps, SplitSettings, StageConfig, TrainSettings,
};

pub const WITH_PRETRAINING: &str = "with_pretraining";
pub const WITHOUT_PRETRAINING: &str = "without_pretraining";

/// Resolves defaults and validates `config` for `experiment`.
pub fn prepare(mut config: RunConfig, experiment: Experiment) -> Result<RunConfig> {
    config.resolve();
    config.validate(experiment)?;
    if experiment == Experiment::Similarity {
        let venn = config.similarity.venn_iteration;
        for run in config.similarity_runs() {
            if run.metric == SimilarityMetric::Jaccard && venn >= run.iterations {
                return Err(Error::Config(format!(
                    "venn_iteration {venn} is out of range for {} iterations",
                    run.iterations
                )));
            }
        }
    }
    Ok(config)
}

/// What happened to one dataset between the file and the experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetIngest {
    pub report: IngestReport,
    /// Documents left after the up/down vote filter, when it applies.
    pub after_vote_filter: Option<usize>,
    pub documents_used: usize,
    pub class_histogram: BTreeMap<CanonicalClass, usize>,
}

/// Loaded, filtered and subsampled corpora keyed by dataset.
#[derive(Clone, Debug, Default)]
pub struct Data {
    corpora: BTreeMap<DatasetName, Corpus>,
    ingest: BTreeMap<DatasetName, DatasetIngest>,
}

impl Data {
    pub fn get(&self, name: DatasetName) -> Result<&Corpus> {
        self.corpora
            .get(&name)
            .ok_or_else(|| Error::Config(format!("dataset `{name}` was not loaded")))
    }

    pub fn ingest(&self) -> &BTreeMap<DatasetName, DatasetIngest> {
        &self.ingest
    }
}

/// Loads `names` (in parallel) with the configured preprocessing.
pub fn load_datasets(config: &RunConfig, names: &[DatasetName]) -> Result<Data> {
    let loaded: Vec<(DatasetName, Corpus, DatasetIngest)> = names
        .par_iter()
        .map(|&name| load_one(config, name).map(|(c, i)| (name, c, i)))
        .collect::<Result<_>>()?;
    let mut data = Data::default();
    for (name, corpus, ingest) in loaded {
        data.corpora.insert(name, corpus);
        data.ingest.insert(name, ingest);
    }
    Ok(data)
}

fn load_one(config: &RunConfig, name: DatasetName) -> Result<(Corpus, DatasetIngest)> {
    let d = &config.datasets;
    let missing = || Error::Config(format!("dataset `{name}` is not configured"));
    let pre = &config.preprocessing;
    let (ingested, limits) = match name {
        DatasetName::Sarc => {
            let e = d.sarc.as_ref().ok_or_else(missing)?;
            (load_sarcasm_as(&e.path, &e.adapter, Source::Sarc)?, limits(e))
        }
        DatasetName::SarcasmV2 => {
            let e = d.sarcasm_v2.as_ref().ok_or_else(missing)?;
            (load_sarcasm_as(&e.path, &e.adapter, Source::SarcasmV2)?, limits(e))
        }
        DatasetName::ImplicitHate => {
            let e = d.implicit_hate.as_ref().ok_or_else(missing)?;
            (load_implicit_hate(&e.path, &e.adapter)?, limits(e))
        }
        DatasetName::Ethos => {
            let e = d.ethos.as_ref().ok_or_else(missing)?;
            (load_ethos(&e.path, &e.adapter, pre.ethos_threshold)?, limits(e))
        }
    };
    let Ingested { mut corpus, report } = ingested;
    let mut after_vote_filter = None;
    if name == DatasetName::Sarc && pre.vote_filter {
        corpus = filter_sarcasm_votes(&corpus, pre.min_ups, pre.max_downs)?;
        after_vote_filter = Some(corpus.len());
    }
    let (max_documents, fraction, seed) = limits;
    let mut n = corpus.len();
    if let Some(f) = fraction {
        n = ((n as f64) * f).round() as usize;
    }
    if let Some(m) = max_documents {
        n = n.min(m);
    }
    if n < corpus.len() {
        corpus = corpus.subsample(n, seed.unwrap_or(0));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus(name.to_string()));
    }
    let ingest = DatasetIngest {
        report,
        after_vote_filter,
        documents_used: corpus.len(),
        class_histogram: corpus.class_histogram(),
    };
    Ok((corpus, ingest))
}

fn limits<A>(e: &DatasetEntry<A>) -> (Option<usize>, Option<f64>, Option<u64>) {
    (e.max_documents, e.sample_fraction, e.subsample_seed)
}

/// A test-set evaluation and the ids it was computed over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// `sarcasm` or `hate`: the label projection used for this evaluation.
    pub label: String,
    /// `all`, or `implicit_only` for the neutral + implicit-hate subset.
    pub subset: String,
    /// Hex SHA-256 of the evaluated document ids joined by newlines.
    pub ids_digest: String,
    pub report: EvalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub dataset: String,
    pub task: BinaryTask,
    /// `zero` or `transfer:<previous stage>`.
    pub init: String,
    pub lineage: Vec<String>,
    pub train_size: usize,
    pub test_size: usize,
    pub evaluations: Vec<Evaluation>,
    pub model_file: String,
}

/// A trained stage with the exact model it started from.
#[derive(Clone, Debug)]
pub struct StageOutcome {
    pub name: String,
    /// The model training started from: the zero model or a transfer.
    pub init: LinearModel,
    pub model: LinearModel,
    pub report: StageReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmReport {
    pub name: String,
    /// Resolved config that runs this arm alone as a sequential experiment.
    pub config: RunConfig,
    pub stages: Vec<StageReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedDelta {
    pub name: String,
    pub baseline: String,
    pub treatment: String,
    pub delta: DeltaReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapSummary {
    pub pair: (String, String),
    pub iteration: usize,
    pub top_k: usize,
    pub counts: OverlapCount,
    /// Shared n-grams as a fraction of the first corpus's top-k set.
    pub shared_fraction: f64,
    pub file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub model: String,
    pub seed: u64,
    pub config: RunConfig,
    pub ingest: BTreeMap<String, DatasetIngest>,
    #[serde(default)]
    pub similarity: Vec<SimilarityReport>,
    #[serde(default)]
    pub overlaps: Vec<OverlapSummary>,
    #[serde(default)]
    pub stages: Vec<StageReport>,
    #[serde(default)]
    pub arms: Vec<ArmReport>,
    #[serde(default)]
    pub deltas: Vec<NamedDelta>,
    /// Output files relative to the output directory.
    pub files: Vec<String>,
    /// Wall-clock seconds per phase; not covered by determinism guarantees.
    pub timings: BTreeMap<String, f64>,
}

impl ExperimentReport {
    /// The report with timings cleared, for reproducibility comparisons.
    pub fn without_timings(&self) -> ExperimentReport {
        let mut r = self.clone();
        r.timings.clear();
        r
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub report_path: PathBuf,
    /// Trained stages in execution order (ablation: with-pretraining arm first).
    pub outcomes: Vec<StageOutcome>,
}

struct Writer {
    root: PathBuf,
    prefix: String,
    files: Vec<String>,
}

impl Writer {
    fn new(config: &RunConfig, experiment: Experiment) -> Result<Self> {
        for sub in ["reports", "models", "ingest"] {
            let dir = config.output_dir.join(sub);
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        Ok(Writer {
            root: config.output_dir.clone(),
            prefix: format!("{}-seed{}", experiment.name(), config.seed),
            files: Vec::new(),
        })
    }

    fn name(&self, dir: &str, parts: &[&str], ext: &str) -> String {
        let mut name = format!("{dir}/{}", self.prefix);
        for p in parts {
            name.push('-');
            name.push_str(p);
        }
        name.push('.');
        name.push_str(ext);
        name
    }

    fn write(&mut self, rel: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<PathBuf> {
        let path = self.root.join(rel);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.files.push(rel.to_owned());
        Ok(path)
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<PathBuf> {
        self.write(rel, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n").map_err(|e| Error::io(rel, e))
        })
    }

    fn ingest(&mut self, data: &Data) -> Result<BTreeMap<String, DatasetIngest>> {
        let mut out = BTreeMap::new();
        for (name, ingest) in &data.ingest {
            let rel = self.name("ingest", &[name.as_str()], "json");
            self.json(&rel, ingest)?;
            out.insert(name.to_string(), ingest.clone());
        }
        Ok(out)
    }

    fn stage(&mut self, arm: Option<&str>, outcome: &mut StageOutcome) -> Result<()> {
        let mut parts: Vec<&str> = arm.into_iter().collect();
        parts.push(&outcome.name);
        let rel = self.name("models", &parts, "json");
        let model = &outcome.model;
        self.write(&rel, |w| model.write_json(w))?;
        outcome.report.model_file = rel;
        for e in &outcome.report.evaluations {
            let mut p = parts.clone();
            p.extend([e.label.as_str(), e.subset.as_str()]);
            let rel = self.name("reports", &p, "csv");
            self.write(&rel, |w| e.report.write_csv(w))?;
        }
        Ok(())
    }

    fn finish(mut self, mut report: ExperimentReport) -> Result<(ExperimentReport, PathBuf)> {
        let rel = self.name("reports", &[], "json");
        self.files.push(rel.clone());
        self.files.sort();
        report.files = std::mem::take(&mut self.files);
        let path = self.root.join(&rel);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, &report)?;
        w.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok((report, path))
    }
}

fn ids_digest<'a>(ids: impl Iterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for (i, id) in ids.enumerate() {
        if i > 0 {
            h.update(b"\n");
        }
        h.update(id.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn evaluate(config: &RunConfig, model: &LinearModel, test: &Corpus, task: BinaryTask, subset: &str) -> Result<Evaluation> {
    let view = project_labels(test, task);
    let scores: Vec<f64> = test.documents().par_iter().map(|d| predict_score(model, d)).collect();
    let report = EvalReport::from_scores(task.name(), &config.model_name, &scores, &view.labels, config.threshold)?;
    Ok(Evaluation {
        label: task.name().to_owned(),
        subset: subset.to_owned(),
        ids_digest: ids_digest(test.iter().map(Document::id)),
        report,
    })
}

fn implicit_only(test: &Corpus) -> Corpus {
    test.filter(|d| {
        matches!(
            d.canonical_class(),
            CanonicalClass::Neutral | CanonicalClass::ImplicitHate
        )
    })
}

fn run_stage(
    config: &RunConfig,
    data: &Data,
    stage: &StageConfig,
    previous: Option<(&str, &LinearModel)>,
) -> Result<StageOutcome> {
    let corpus = data.get(stage.dataset)?;
    let (train_set, test_set) = split(corpus, &stage.split_spec())?;
    let init = previous.map_or_else(|| LinearModel::zeros(config.features), |(_, m)| transfer(m, &stage.name));
    let view = project_labels(&train_set, stage.task);
    let pairs: Vec<(&Document, u8)> = view.iter().collect();
    let model = train(
        &pairs,
        &stage.train.config(),
        &config.features,
        Some(&init),
        &stage.name,
    )?;
    let mut evaluations = vec![evaluate(config, &model, &test_set, stage.task, "all")?];
    if stage.implicit_only() {
        let subset = implicit_only(&test_set);
        evaluations.push(evaluate(config, &model, &subset, stage.task, "implicit_only")?);
    }
    let report = StageReport {
        name: stage.name.clone(),
        dataset: stage.dataset.to_string(),
        task: stage.task,
        init: previous.map_or_else(|| "zero".to_owned(), |(n, _)| format!("transfer:{n}")),
        lineage: model.lineage().to_vec(),
        train_size: train_set.len(),
        test_size: test_set.len(),
        evaluations,
        model_file: String::new(),
    };
    Ok(StageOutcome {
        name: stage.name.clone(),
        init,
        model,
        report,
    })
}

/// Trains `stages` in order, each initialized from the transfer of the previous one.
pub fn run_stages(config: &RunConfig, data: &Data, stages: &[StageConfig]) -> Result<Vec<StageOutcome>> {
    let mut out: Vec<StageOutcome> = Vec::with_capacity(stages.len());
    for stage in stages {
        let previous = out.last().map(|o| (o.name.as_str(), &o.model));
        let outcome = run_stage(config, data, stage, previous).map_err(|e| Error::in_stage(&stage.name, e))?;
        out.push(outcome);
    }
    Ok(out)
}

fn stage_datasets(stages: &[StageConfig]) -> Vec<DatasetName> {
    let mut names: Vec<DatasetName> = stages.iter().map(|s| s.dataset).collect();
    names.sort();
    names.dedup();
    names
}

fn seconds(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn empty_report(config: &RunConfig, experiment: Experiment) -> ExperimentReport {
    ExperimentReport {
        experiment: experiment.name().to_owned(),
        model: config.model_name.clone(),
        seed: config.seed,
        config: config.clone(),
        ingest: BTreeMap::new(),
        similarity: Vec::new(),
        overlaps: Vec::new(),
        stages: Vec::new(),
        arms: Vec::new(),
        deltas: Vec::new(),
        files: Vec::new(),
        timings: BTreeMap::new(),
    }
}

/// Resolves, validates and runs `experiment`, writing all outputs.
pub fn run(experiment: Experiment, config: RunConfig) -> Result<RunOutput> {
    let config = prepare(config, experiment)?;
    match experiment {
        Experiment::Similarity => run_similarity(&config),
        Experiment::SingleStep => run_single_step(&config),
        Experiment::Sequential => run_sequential(&config),
        Experiment::Ablation => run_ablation(&config),
    }
}

fn run_similarity(config: &RunConfig) -> Result<RunOutput> {
    let experiment = Experiment::Similarity;
    let mut report = empty_report(config, experiment);
    let mut writer = Writer::new(config, experiment)?;
    let runs = config.similarity_runs();
    let mut names: Vec<DatasetName> = runs.iter().flat_map(|r| [r.a, r.b]).collect();
    names.sort();
    names.dedup();

    let t = Instant::now();
    let data = load_datasets(config, &names)?;
    report.timings.insert("ingest".into(), seconds(t));
    report.ingest = writer.ingest(&data)?;

    let t = Instant::now();
    for run in &runs {
        let (a, b) = (data.get(run.a)?, data.get(run.b)?);
        let spec = run.spec();
        let r = bootstrap_similarity_named(a, b, (run.a.as_str(), run.b.as_str()), &spec)?;
        if run.metric == SimilarityMetric::Jaccard {
            let i = config.similarity.venn_iteration;
            let venn = venn_iteration(a, b, &spec, i)?;
            let rel = writer.name("reports", &["overlap", run.a.as_str(), run.b.as_str()], "csv");
            writer.write(&rel, |w| venn.write_csv(w))?;
            let side = venn.counts.shared + venn.counts.unique_a;
            report.overlaps.push(OverlapSummary {
                pair: (run.a.to_string(), run.b.to_string()),
                iteration: i,
                top_k: run.top_k,
                counts: venn.counts,
                shared_fraction: if side == 0 {
                    0.0
                } else {
                    venn.counts.shared as f64 / side as f64
                },
                file: rel,
            });
        }
        report.similarity.push(r);
    }
    report.timings.insert("bootstrap".into(), seconds(t));
    let rel = writer.name("reports", &["similarity"], "csv");
    let sims = &report.similarity;
    writer.write(&rel, |w| write_similarity_csv(sims, w))?;

    let (report, report_path) = writer.finish(report)?;
    Ok(RunOutput {
        report,
        report_path,
        outcomes: Vec::new(),
    })
}

fn run_single_step(config: &RunConfig) -> Result<RunOutput> {
    let experiment = Experiment::SingleStep;
    const STAGE: &str = "single_step";
    let mut report = empty_report(config, experiment);
    let mut writer = Writer::new(config, experiment)?;

    let t = Instant::now();
    let names = [DatasetName::Sarc, DatasetName::ImplicitHate, DatasetName::Ethos];
    let data = load_datasets(config, &names)?;
    report.timings.insert("ingest".into(), seconds(t));
    report.ingest = writer.ingest(&data)?;

    let t = Instant::now();
    let ss = &config.single_step;
    let caps = [ss.caps.sarc, ss.caps.implicit_hate, ss.caps.ethos];
    let parts: Vec<Corpus> = names
        .iter()
        .zip(caps)
        .map(|(&name, cap)| {
            let c = data.get(name)?;
            Ok(match cap {
                Some(n) => c.subsample(n, derive_seed(config.seed, &format!("single_step:cap:{name}"))),
                None => c.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let refs: Vec<&Corpus> = parts.iter().collect();
    let stage_err = |e| Error::in_stage(STAGE, e);
    let combined = combine(&refs, ss.combine_seed.expect("config resolved")).map_err(stage_err)?;
    let (train_set, test_set) = split(&combined, &ss.split.spec()).map_err(stage_err)?;
    let view = project_labels(&train_set, BinaryTask::Sarcasm);
    let pairs: Vec<(&Document, u8)> = view.iter().collect();
    let init = LinearModel::zeros(config.features);
    let model = train(&pairs, &ss.train.config(), &config.features, Some(&init), STAGE).map_err(stage_err)?;
    let evaluations = [BinaryTask::Sarcasm, BinaryTask::Hate]
        .into_iter()
        .map(|task| evaluate(config, &model, &test_set, task, "all"))
        .collect::<Result<Vec<_>>>()
        .map_err(stage_err)?;
    report.timings.insert("train_eval".into(), seconds(t));

    let mut outcome = StageOutcome {
        name: STAGE.to_owned(),
        init,
        report: StageReport {
            name: STAGE.to_owned(),
            dataset: Source::Combined.tag().to_owned(),
            task: BinaryTask::Sarcasm,
            init: "zero".to_owned(),
            lineage: model.lineage().to_vec(),
            train_size: train_set.len(),
            test_size: test_set.len(),
            evaluations,
            model_file: String::new(),
        },
        model,
    };
    writer.stage(None, &mut outcome)?;
    report.stages.push(outcome.report.clone());
    let (report, report_path) = writer.finish(report)?;
    Ok(RunOutput {
        report,
        report_path,
        outcomes: vec![outcome],
    })
}

fn run_sequential(config: &RunConfig) -> Result<RunOutput> {
    let experiment = Experiment::Sequential;
    let mut report = empty_report(config, experiment);
    let mut writer = Writer::new(config, experiment)?;
    let stages = &config.sequential.stages;

    let t = Instant::now();
    let data = load_datasets(config, &stage_datasets(stages))?;
    report.timings.insert("ingest".into(), seconds(t));
    report.ingest = writer.ingest(&data)?;

    let t = Instant::now();
    let mut outcomes = run_stages(config, &data, stages)?;
    report.timings.insert("stages".into(), seconds(t));
    for o in &mut outcomes {
        writer.stage(None, o)?;
        report.stages.push(o.report.clone());
    }
    let (report, report_path) = writer.finish(report)?;
    Ok(RunOutput {
        report,
        report_path,
        outcomes,
    })
}

/// The sequential config of each arm: (name, stages).
pub fn ablation_arms(config: &RunConfig) -> [(&'static str, Vec<StageConfig>); 2] {
    let all = config.sequential.stages.clone();
    let baseline = if config.ablation.drop_in_baseline {
        all.iter()
            .filter(|s| s.name != config.ablation.pretrain_stage)
            .cloned()
            .collect()
    } else {
        all.clone()
    };
    [(WITH_PRETRAINING, all), (WITHOUT_PRETRAINING, baseline)]
}

fn find<'a>(stages: &'a [StageReport], stage: &str, subset: &str) -> Option<&'a Evaluation> {
    stages
        .iter()
        .find(|s| s.name == stage)?
        .evaluations
        .iter()
        .find(|e| e.subset == subset)
}

fn run_ablation(config: &RunConfig) -> Result<RunOutput> {
    let experiment = Experiment::Ablation;
    let mut report = empty_report(config, experiment);
    let mut writer = Writer::new(config, experiment)?;

    let t = Instant::now();
    let data = load_datasets(config, &stage_datasets(&config.sequential.stages))?;
    report.timings.insert("ingest".into(), seconds(t));
    report.ingest = writer.ingest(&data)?;

    let mut all_outcomes = Vec::new();
    for (arm, stages) in ablation_arms(config) {
        let t = Instant::now();
        let mut outcomes = run_stages(config, &data, &stages)?;
        report.timings.insert(format!("arm:{arm}"), seconds(t));
        for o in &mut outcomes {
            writer.stage(Some(arm), o)?;
        }
        let mut arm_config = config.clone();
        arm_config.sequential.stages = stages;
        report.arms.push(ArmReport {
            name: arm.to_owned(),
            config: arm_config,
            stages: outcomes.iter().map(|o| o.report.clone()).collect(),
        });
        all_outcomes.extend(outcomes);
    }

    // Cross-arm deltas for every stage both arms trained, then the
    // implicit-only vs. all-hate comparison inside the pre-trained arm.
    let (with, without) = (&report.arms[0].stages, &report.arms[1].stages);
    let mut deltas = Vec::new();
    for stage in without {
        for e in &stage.evaluations {
            let Some(t) = find(with, &stage.name, &e.subset) else {
                continue;
            };
            deltas.push(NamedDelta {
                name: format!("{}-{}-pretraining", stage.name, e.subset),
                baseline: format!("{WITHOUT_PRETRAINING}/{}/{}", stage.name, e.subset),
                treatment: format!("{WITH_PRETRAINING}/{}/{}", stage.name, t.subset),
                delta: compare(&e.report, &t.report)?,
            });
        }
    }
    for stage in with {
        if let (Some(all), Some(imp)) = (find(with, &stage.name, "all"), find(with, &stage.name, "implicit_only")) {
            deltas.push(NamedDelta {
                name: format!("{}-implicit_only-vs-all", stage.name),
                baseline: format!("{WITH_PRETRAINING}/{}/implicit_only", stage.name),
                treatment: format!("{WITH_PRETRAINING}/{}/all", stage.name),
                delta: compare(&imp.report, &all.report)?,
            });
        }
    }
    for d in &deltas {
        let rel = writer.name("reports", &["delta", &d.name], "csv");
        writer.write(&rel, |w| d.delta.write_csv(w))?;
    }
    report.deltas = deltas;
    let (report, report_path) = writer.finish(report)?;
    Ok(RunOutput {
        report,
        report_path,
        outcomes: all_outcomes,
    })
}

/// Reads a report JSON written by [`run`].
pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_order_sensitive() {
        let a = ids_digest(["x", "y"].into_iter());
        let b = ids_digest(["y", "x"].into_iter());
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
        assert_eq!(
            ids_digest(std::iter::empty()),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn arms_drop_only_the_pretraining_stage() {
        let mut cfg = RunConfig::from_toml_str("").unwrap();
        cfg.resolve();
        let [(_, with), (_, without)] = ablation_arms(&cfg);
        assert_eq!(with.len(), 3);
        let names: Vec<_> = without.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["implicit_hate", "ethos"]);
        assert_eq!(with[1], without[0]);

        cfg.ablation.drop_in_baseline = false;
        let [(_, with), (_, without)] = ablation_arms(&cfg);
        assert_eq!(with, without);
    }
}
