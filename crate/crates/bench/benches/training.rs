use criterion::{criterion_group, criterion_main, Criterion};
use hatelex_bench::synthetic_corpus;
use hatelex_core::{project_labels, train, BinaryTask, FeatureSpec, TrainConfig};

fn bench(c: &mut Criterion) {
    let corpus = synthetic_corpus(2000, 3);
    let view = project_labels(&corpus, BinaryTask::Sarcasm);
    let pairs: Vec<_> = view.iter().collect();
    let spec = FeatureSpec::default();
    let config = TrainConfig {
        epochs: 2,
        ..TrainConfig::default()
    };
    c.bench_function("train_2000_docs_2_epochs", |b| {
        b.iter(|| train(&pairs, &config, &spec, None, "bench").unwrap())
    });
}

criterion_group!(benches, bench);
criterion_main!(benches);
