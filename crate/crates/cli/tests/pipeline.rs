use std::fs;
use std::path::{Path, PathBuf};

use hatelex_core::runner::{self, read_report, Experiment, RunConfig, StageConfig};
use hatelex_core::{ErrorCategory, LinearModel, SimilarityMetric};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn config(out: &Path) -> RunConfig {
    let mut c = RunConfig::from_file(&fixtures().join("config.toml")).unwrap();
    c.output_dir = out.to_path_buf();
    c
}

fn without_timings(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn sequential_transfers_weights_stage_to_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = runner::run(Experiment::Sequential, config(dir.path())).unwrap();
    let stages = &out.outcomes;
    assert_eq!(stages.len(), 3);
    assert!(stages[0].init.is_zero());
    assert!(stages[1].init.same_parameters(&stages[0].model));
    assert!(stages[2].init.same_parameters(&stages[1].model));
    assert_eq!(stages[2].model.lineage(), ["sarcasm", "implicit_hate", "ethos"]);

    let ethos = &out.report.stages[2];
    let n = ethos.train_size + ethos.test_size;
    assert!((ethos.train_size as f64 - 0.4 * n as f64).abs() <= 2.0, "{} of {n}", ethos.train_size);
    let ihc = &out.report.stages[1];
    let subsets: Vec<_> = ihc.evaluations.iter().map(|e| e.subset.as_str()).collect();
    assert_eq!(subsets, ["all", "implicit_only"]);

    let model_path = dir.path().join(&ethos.model_file);
    let reloaded = LinearModel::read_json(fs::File::open(model_path).unwrap()).unwrap();
    assert!(reloaded.same_parameters(&stages[2].model));
    assert_eq!(reloaded.lineage(), stages[2].model.lineage());
}

#[test]
fn skipping_the_first_stage_trains_from_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.sequential.stages.remove(0);
    let out = runner::run(Experiment::Sequential, c).unwrap();
    assert!(out.outcomes[0].init.is_zero());
    assert_eq!(out.report.stages[0].init, "zero");
    assert_eq!(out.outcomes[1].model.lineage(), ["implicit_hate", "ethos"]);
}

#[test]
fn ablation_is_reproducible_and_emits_four_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let first = runner::run(Experiment::Ablation, config(dir.path())).unwrap();
    let a = without_timings(&first.report_path);
    let second = runner::run(Experiment::Ablation, config(dir.path())).unwrap();
    assert_eq!(a, without_timings(&second.report_path));

    let r = &first.report;
    assert_eq!(r.deltas.len(), 4);
    assert_eq!(r.arms.len(), 2);
    let names: Vec<_> = r.arms[1].config.sequential.stages.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["implicit_hate", "ethos"]);
    let without = first
        .outcomes
        .iter()
        .find(|o| o.report.init == "zero" && o.name == "implicit_hate")
        .unwrap();
    assert!(without.init.is_zero());
}

#[test]
fn null_ablation_has_zero_cross_arm_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.ablation.drop_in_baseline = false;
    let out = runner::run(Experiment::Ablation, c).unwrap();
    let cross: Vec<_> = out.report.deltas.iter().filter(|d| d.name.ends_with("-pretraining")).collect();
    assert_eq!(cross.len(), 4);
    for d in cross {
        for row in &d.delta.rows {
            assert!(row.change.is_none_or(|c| c == 0.0), "{}: {:?}", d.name, row);
        }
    }
}

#[test]
fn report_snapshot_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = runner::run(Experiment::Sequential, config(dir.path())).unwrap();
    let expected = without_timings(&first.report_path);
    let snapshot = RunConfig::from_file(&first.report_path).unwrap();
    assert_eq!(snapshot, first.report.config);
    let again = runner::run(Experiment::Sequential, snapshot).unwrap();
    assert_eq!(without_timings(&again.report_path), expected);
}

#[test]
fn single_step_reuses_one_test_set_for_both_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = runner::run(Experiment::SingleStep, config(dir.path())).unwrap();
    let stage = &out.report.stages[0];
    let labels: Vec<_> = stage.evaluations.iter().map(|e| e.label.as_str()).collect();
    assert_eq!(labels, ["sarcasm", "hate"]);
    assert_eq!(stage.evaluations[0].ids_digest, stage.evaluations[1].ids_digest);
    assert_eq!(stage.evaluations[0].report.n, stage.test_size);

    let again = read_report(&out.report_path).unwrap();
    assert_eq!(again, out.report);
}

#[test]
fn single_step_without_hate_positives_reports_undefined_recall() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    fs::copy(fixtures().join("sarc.csv"), data.join("sarc.csv")).unwrap();
    let mut ihc = String::from("post\tclass\n");
    let mut ethos = String::from("comment;isHate\n");
    for i in 0..40 {
        ihc.push_str(&format!("ordinary post number {i}\tnot_hate\n"));
        ethos.push_str(&format!("plain remark {i};0.{:02}\n", i % 30));
    }
    fs::write(data.join("ihc.tsv"), ihc).unwrap();
    fs::write(data.join("ethos.csv"), ethos).unwrap();
    let mut c = config(&dir.path().join("out"));
    c.datasets.sarc.as_mut().unwrap().path = data.join("sarc.csv");
    c.datasets.implicit_hate.as_mut().unwrap().path = data.join("ihc.tsv");
    c.datasets.implicit_hate.as_mut().unwrap().adapter.columns.id = None;
    c.datasets.ethos.as_mut().unwrap().path = data.join("ethos.csv");

    let out = runner::run(Experiment::SingleStep, c).unwrap();
    let hate = &out.report.stages[0].evaluations[1];
    assert_eq!(hate.label, "hate");
    assert_eq!(hate.report.recall, None);
    assert_eq!(hate.report.auc, None);
    let json = fs::read_to_string(&out.report_path).unwrap();
    assert!(json.contains("\"recall\": null"));
}

#[test]
fn similarity_counts_pairs_and_adds_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let out = runner::run(Experiment::Similarity, config(dir.path())).unwrap();
    let r = &out.report;
    assert_eq!(r.similarity.len(), 6);
    assert!(r.similarity.iter().any(|s| s.pair.1 == "sarcasm_v2"));
    for o in &r.overlaps {
        assert_eq!(o.counts.shared + o.counts.unique_a, o.top_k);
        assert_eq!(o.counts.shared + o.counts.unique_b, o.top_k);
        assert!(dir.path().join(&o.file).is_file());
    }

    let mut c = config(dir.path());
    c.datasets.sarcasm_v2 = None;
    c.similarity.runs.truncate(1);
    c.similarity.runs[0].iterations = 1000;
    c.similarity.runs[0].sample_size = 100;
    let out = runner::run(Experiment::Similarity, c).unwrap();
    assert_eq!(out.report.similarity.len(), 1);
    assert_eq!(out.report.similarity[0].per_iteration.as_ref().unwrap().len(), 1000);
}

#[test]
fn self_pair_covering_the_corpus_has_unit_jaccard() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(dir.path());
    c.datasets.sarcasm_v2 = None;
    c.similarity.runs.truncate(1);
    let run = &mut c.similarity.runs[0];
    run.a = runner::DatasetName::Ethos;
    run.b = runner::DatasetName::Ethos;
    run.metric = SimilarityMetric::Jaccard;
    run.iterations = 5;
    run.sample_size = 500;
    let out = runner::run(Experiment::Similarity, c).unwrap();
    assert_eq!(out.report.similarity[0].mean, 1.0);
}

#[test]
fn errors_fall_into_exit_code_categories() {
    let dir = tempfile::tempdir().unwrap();

    let mut c = config(dir.path());
    let mut odd = c.features;
    odd.hash_dims *= 2;
    c.sequential.stages[1].features = Some(odd);
    let err = runner::run(Experiment::Sequential, c).unwrap_err();
    assert_eq!(err.category(), ErrorCategory::Config);
    assert!(!dir.path().join("models").exists(), "nothing may train before validation");

    let mut c = config(dir.path());
    c.datasets.ethos.as_mut().unwrap().path = dir.path().join("missing.csv");
    assert_eq!(runner::run(Experiment::Sequential, c).unwrap_err().category(), ErrorCategory::Config);

    let mut c = config(dir.path());
    let dup: StageConfig = c.sequential.stages[0].clone();
    c.sequential.stages.push(dup);
    assert_eq!(runner::run(Experiment::Sequential, c).unwrap_err().category(), ErrorCategory::Config);

    let mut c = config(dir.path());
    c.datasets.ethos.as_mut().unwrap().adapter.columns.text = "no_such_column".into();
    let err = runner::run(Experiment::Sequential, c).unwrap_err();
    assert_eq!(err.category(), ErrorCategory::Ingest);
    assert!(err.to_string().contains("no_such_column"));

    let mut c = config(dir.path());
    c.sequential.stages[0].task = hatelex_core::BinaryTask::Hate;
    let err = runner::run(Experiment::Sequential, c).unwrap_err();
    assert_eq!(err.category(), ErrorCategory::Runtime);
    assert!(err.to_string().contains("sarcasm"), "{err}");
}
