use std::collections::BTreeSet;
use std::io::Write;

use hatelex_core::corpus::{combine, EthosAdapter, SarcAdapter};
use hatelex_core::{
    class_weights, filter_sarcasm_votes, load_ethos, load_sarc, split, BinaryTask, CanonicalClass,
    Corpus, Document, RawLabel, Source, SplitSpec, Votes,
};
use proptest::prelude::*;

const CLASSES: [CanonicalClass; 4] = [
    CanonicalClass::Neutral,
    CanonicalClass::Sarcasm,
    CanonicalClass::ImplicitHate,
    CanonicalClass::ExplicitHate,
];

fn sarc_corpus(votes: &[(i64, i64)]) -> Corpus {
    let docs = votes
        .iter()
        .enumerate()
        .map(|(i, &(ups, downs))| {
            Document::new(format!("s{i}"), "text", RawLabel::Text("1".into()), CanonicalClass::Sarcasm)
                .unwrap()
                .with_votes(Votes { ups, downs })
        })
        .collect();
    Corpus::new(Source::Sarc, docs).unwrap()
}

fn labeled_corpus(classes: &[usize]) -> Corpus {
    let docs = classes
        .iter()
        .enumerate()
        .map(|(i, &c)| Document::new(format!("d{i}"), format!("doc {i}"), RawLabel::Text(c.to_string()), CLASSES[c]).unwrap())
        .collect();
    Corpus::new(Source::ImplicitHateCorpus, docs).unwrap()
}

fn ids(c: &Corpus) -> Vec<String> {
    c.ids().into_iter().map(str::to_owned).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn vote_filter_is_idempotent(votes in prop::collection::vec((0i64..30, 0i64..3), 0..60)) {
        let c = sarc_corpus(&votes);
        let once = filter_sarcasm_votes(&c, 10, 0).unwrap();
        let twice = filter_sarcasm_votes(&once, 10, 0).unwrap();
        prop_assert_eq!(ids(&once), ids(&twice));
        prop_assert!(once.iter().all(|d| d.votes().unwrap().ups > 10 && d.votes().unwrap().downs == 0));
    }

    #[test]
    fn raising_the_ethos_threshold_never_adds_hate(
        scores in prop::collection::vec(0u32..=1000, 1..40),
        t1 in 1u32..999,
        dt in 0u32..500,
    ) {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "comment;isHate").unwrap();
        for (i, s) in scores.iter().enumerate() {
            writeln!(f, "row {i};{}", *s as f64 / 1000.0).unwrap();
        }
        f.flush().unwrap();
        let lo = t1 as f64 / 1000.0;
        let hi = ((t1 + dt).min(999)) as f64 / 1000.0;
        let hate = |t: f64| -> BTreeSet<String> {
            load_ethos(f.path(), &EthosAdapter::default(), t)
                .unwrap()
                .corpus
                .iter()
                .filter(|d| d.canonical_class() == CanonicalClass::ExplicitHate)
                .map(|d| d.id().to_owned())
                .collect()
        };
        prop_assert!(hate(hi).is_subset(&hate(lo)));
    }

    #[test]
    fn split_partitions_and_repeats(
        classes in prop::collection::vec(0usize..4, 8..80),
        fraction in 0.1f64..0.9,
        seed in any::<u64>(),
    ) {
        let c = labeled_corpus(&classes);
        let spec = SplitSpec { train_fraction: fraction, seed, stratified: false };
        let (train, test) = split(&c, &spec).unwrap();
        let (train2, test2) = split(&c, &spec).unwrap();
        prop_assert_eq!(ids(&train), ids(&train2));
        prop_assert_eq!(ids(&test), ids(&test2));
        let a: BTreeSet<String> = ids(&train).into_iter().collect();
        let b: BTreeSet<String> = ids(&test).into_iter().collect();
        prop_assert!(a.is_disjoint(&b));
        let all: BTreeSet<String> = ids(&c).into_iter().collect();
        prop_assert_eq!(a.union(&b).cloned().collect::<BTreeSet<_>>(), all);
    }

    #[test]
    fn class_weights_balance_total_mass(neg in 1usize..2000, pos in 1usize..2000) {
        let mut labels = vec![0u8; neg];
        labels.extend(std::iter::repeat_n(1u8, pos));
        let w = class_weights(&labels).unwrap();
        let (a, b) = (w.negative * neg as f64, w.positive * pos as f64);
        prop_assert!((a - b).abs() <= 1e-9 * a.max(b));
    }
}

#[test]
fn task_projection_table_is_exact() {
    let expected = [(0, 0), (1, 0), (1, 1), (0, 1)];
    for (class, (sarcasm, hate)) in CLASSES.into_iter().zip(expected) {
        assert_eq!(BinaryTask::Sarcasm.label(class), sarcasm, "{class}");
        assert_eq!(BinaryTask::Hate.label(class), hate, "{class}");
    }
}

#[test]
fn stratified_split_keeps_every_class_on_both_sides() {
    let classes: Vec<usize> = (0..40).map(|i| i % 4).collect();
    let c = labeled_corpus(&classes);
    let spec = SplitSpec { train_fraction: 0.75, seed: 3, stratified: true };
    let (train, test) = split(&c, &spec).unwrap();
    assert_eq!(train.len(), 32);
    for class in CLASSES {
        assert_eq!(train.class_histogram()[&class], 8);
        assert_eq!(test.class_histogram()[&class], 2);
    }
}

#[test]
fn sarc_rows_keep_parent_and_votes() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "label,comment,parent_comment,ups,downs").unwrap();
    writeln!(f, "1,\"THEY PAY IN EUROS SO IT'S A SOCIALIST COUNTRY\",\"Greece is capitalist\",15,0").unwrap();
    writeln!(f, "0,nice day,,3,0").unwrap();
    f.flush().unwrap();
    let got = load_sarc(f.path(), &SarcAdapter::default()).unwrap();
    let docs = got.corpus.documents();
    assert_eq!(docs[0].canonical_class(), CanonicalClass::Sarcasm);
    assert_eq!(docs[0].parent_text(), Some("Greece is capitalist"));
    assert_eq!(docs[1].canonical_class(), CanonicalClass::Neutral);
    assert_eq!(docs[1].parent_text(), None);
    let kept = filter_sarcasm_votes(&got.corpus, 10, 0).unwrap();
    assert_eq!(kept.len(), 1);
}

#[test]
fn combine_is_seeded_and_prefixes_ids() {
    let a = labeled_corpus(&[0, 1, 2, 3]);
    let b = sarc_corpus(&[(11, 0), (12, 0)]);
    let x = combine(&[&b, &a], 5).unwrap();
    let y = combine(&[&b, &a], 5).unwrap();
    assert_eq!(ids(&x), ids(&y));
    assert_eq!(x.len(), 6);
    assert!(x.ids().iter().all(|id| id.starts_with("sarc:") || id.starts_with("implicit_hate:")));
}
