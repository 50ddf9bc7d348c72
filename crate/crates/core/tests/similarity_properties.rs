use std::collections::{BTreeMap, HashSet};

use hatelex_core::relatedness::{jsd_with, venn_iteration, JsdVariant};
use hatelex_core::stats::Summary;
use hatelex_core::text::UnigramDistribution;
use hatelex_core::{
    bootstrap_similarity, jaccard, jsd, overlap_counts, BootstrapSpec, CanonicalClass, Corpus,
    Document, RawLabel, SimilarityMetric, Source,
};
use proptest::prelude::*;

fn small_set() -> impl Strategy<Value = HashSet<u8>> {
    prop::collection::hash_set(0u8..30, 0..=20)
}

fn distribution() -> impl Strategy<Value = BTreeMap<String, f64>> {
    prop::collection::btree_map("[a-j]", 1u32..100, 1..=10).prop_map(|m| {
        let total: u32 = m.values().sum();
        m.into_iter()
            .map(|(k, v)| (k, v as f64 / total as f64))
            .collect()
    })
}

fn dist(m: &BTreeMap<String, f64>) -> UnigramDistribution {
    UnigramDistribution::from_probs(m.iter().map(|(k, v)| (k.as_str(), *v))).unwrap()
}

/// H(M) - (H(P) + H(Q)) / 2 in bits, written out from the entropy definition.
fn entropy_jsd(p: &BTreeMap<String, f64>, q: &BTreeMap<String, f64>) -> f64 {
    let h = |xs: &mut dyn Iterator<Item = f64>| -> f64 {
        xs.filter(|&x| x > 0.0).map(|x| -x * x.log2()).sum()
    };
    let keys: HashSet<&String> = p.keys().chain(q.keys()).collect();
    let get = |m: &BTreeMap<String, f64>, k: &String| m.get(k).copied().unwrap_or(0.0);
    let hm = h(&mut keys.iter().map(|k| (get(p, k) + get(q, k)) / 2.0));
    hm - (h(&mut p.values().copied()) + h(&mut q.values().copied())) / 2.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jaccard_matches_enumeration(a in small_set(), b in small_set()) {
        let inter = (0u8..30).filter(|x| a.contains(x) && b.contains(x)).count();
        let union = (0u8..30).filter(|x| a.contains(x) || b.contains(x)).count();
        let want = if union == 0 { 1.0 } else { inter as f64 / union as f64 };
        prop_assert_eq!(jaccard(&a, &b), want);
        prop_assert_eq!(jaccard(&a, &b), jaccard(&b, &a));
        prop_assert!((0.0..=1.0).contains(&jaccard(&a, &b)));
        let c = overlap_counts(&a, &b);
        prop_assert_eq!(c.shared + c.unique_a, a.len());
        prop_assert_eq!(c.shared + c.unique_b, b.len());
    }

    #[test]
    fn jsd_matches_entropy_form(p in distribution(), q in distribution()) {
        let (dp, dq) = (dist(&p), dist(&q));
        let v = jsd(&dp, &dq).unwrap();
        prop_assert!((v - entropy_jsd(&p, &q)).abs() <= 1e-9);
        prop_assert!((v - jsd(&dq, &dp).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(jsd(&dp, &dp).unwrap(), 0.0);
    }

    #[test]
    fn distance_variant_is_sqrt_of_natural_log_divergence(p in distribution(), q in distribution()) {
        let (dp, dq) = (dist(&p), dist(&q));
        let bits = jsd(&dp, &dq).unwrap();
        let d = jsd_with(&dp, &dq, JsdVariant::DistanceBaseE).unwrap();
        prop_assert!((d * d - bits * std::f64::consts::LN_2).abs() <= 1e-9);
    }
}

#[test]
fn identity_and_disjoint_cases() {
    let a: HashSet<&str> = ["x", "y"].into();
    let b: HashSet<&str> = ["z"].into();
    assert_eq!(jaccard(&a, &a), 1.0);
    assert_eq!(jaccard(&a, &b), 0.0);

    let p = UnigramDistribution::from_probs([("x", 1.0)]).unwrap();
    let q = UnigramDistribution::from_probs([("y", 1.0)]).unwrap();
    assert_eq!(jsd(&p, &p).unwrap(), 0.0);
    assert!((jsd(&p, &q).unwrap() - 1.0).abs() < 1e-12);

    let q = UnigramDistribution::from_probs([("x", 0.5), ("y", 0.5)]).unwrap();
    assert!((jsd(&p, &q).unwrap() - 0.31128).abs() < 1e-4);
}

fn corpus(seed: u64, n: usize) -> Corpus {
    const WORDS: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"];
    let mut s = seed | 1;
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        s
    };
    let docs = (0..n)
        .map(|i| {
            let len = 2 + (next() % 8) as usize;
            let text: Vec<&str> = (0..len).map(|_| WORDS[(next() % 12) as usize]).collect();
            Document::new(format!("{i}"), text.join(" "), RawLabel::Text("0".into()), CanonicalClass::Neutral).unwrap()
        })
        .collect();
    Corpus::new(Source::Sarc, docs).unwrap()
}

fn spec(metric: SimilarityMetric, seed: u64) -> BootstrapSpec {
    BootstrapSpec {
        iterations: 40,
        sample_size: 30,
        top_k: 15,
        seed,
        metric,
        jsd_variant: JsdVariant::DivergenceBase2,
        keep_per_iteration: true,
    }
}

#[test]
fn bootstrap_is_deterministic_and_summary_recomputes() {
    let (a, b) = (corpus(1, 120), corpus(2, 90));
    for metric in [SimilarityMetric::Jaccard, SimilarityMetric::Jsd] {
        let r1 = bootstrap_similarity(&a, &b, &spec(metric, 9)).unwrap();
        let r2 = bootstrap_similarity(&a, &b, &spec(metric, 9)).unwrap();
        assert_eq!(r1, r2);
        let values = r1.per_iteration.clone().unwrap();
        assert_eq!(values.len(), 40);
        assert_eq!(Summary::from_values(&values).unwrap(), r1.summary());
        assert!(r1.min <= r1.mean && r1.mean <= r1.max && r1.std >= 0.0);

        let other = bootstrap_similarity(&a, &b, &spec(metric, 10)).unwrap();
        assert_ne!(other.per_iteration, r1.per_iteration);
    }
}

#[test]
fn bootstrap_does_not_depend_on_thread_count() {
    let (a, b) = (corpus(3, 100), corpus(4, 100));
    let s = spec(SimilarityMetric::Jaccard, 5);
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| bootstrap_similarity(&a, &b, &s).unwrap());
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| bootstrap_similarity(&a, &b, &s).unwrap());
    assert_eq!(one, many);
}

#[test]
fn venn_partition_sizes_equal_top_k() {
    let (a, b) = (corpus(5, 80), corpus(6, 80));
    let s = spec(SimilarityMetric::Jaccard, 11);
    let report = bootstrap_similarity(&a, &b, &s).unwrap();
    for i in [0, 7, 39] {
        let v = venn_iteration(&a, &b, &s, i).unwrap();
        assert_eq!(v.counts.shared + v.counts.unique_a, s.top_k);
        assert_eq!(v.counts.shared + v.counts.unique_b, s.top_k);
        let union = (v.counts.shared + v.counts.unique_a + v.counts.unique_b) as f64;
        let j = report.per_iteration.as_ref().unwrap()[i];
        assert_eq!(v.counts.shared as f64 / union, j);
    }
}

#[test]
fn self_comparison_over_whole_corpus() {
    let a = corpus(7, 25);
    let mut s = spec(SimilarityMetric::Jaccard, 1);
    s.sample_size = 25;
    let r = bootstrap_similarity(&a, &a, &s).unwrap();
    assert!(r.per_iteration.unwrap().iter().all(|&v| v == 1.0));
    s.metric = SimilarityMetric::Jsd;
    let r = bootstrap_similarity(&a, &a, &s).unwrap();
    assert!(r.per_iteration.unwrap().iter().all(|&v| v == 0.0));
}
