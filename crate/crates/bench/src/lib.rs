//! Synthetic inputs shared by the benchmarks.

use hatelex_core::{CanonicalClass, Corpus, Document, RawLabel, Source};

const WORDS: &[&str] = &[
    "the", "a", "people", "really", "great", "news", "again", "always", "never", "those", "they",
    "we", "love", "wow", "sure", "totally", "city", "team", "game", "work", "today", "every",
    "nobody", "thanks", "another", "weather", "monday", "meeting", "phone", "battery",
];

/// `n` short documents drawn from a small vocabulary with a Zipf-like skew.
pub fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let docs = (0..n)
        .map(|i| {
            let len = 5 + (next() % 15) as usize;
            let text: Vec<&str> = (0..len)
                .map(|_| {
                    let r = (next() % 1000) as f64 / 1000.0;
                    WORDS[((r * r) * WORDS.len() as f64) as usize]
                })
                .collect();
            let (raw, class) = if next() % 2 == 0 {
                ("1", CanonicalClass::Sarcasm)
            } else {
                ("0", CanonicalClass::Neutral)
            };
            Document::new(format!("d{i}"), text.join(" "), RawLabel::Text(raw.into()), class)
                .expect("non-empty text")
        })
        .collect();
    Corpus::new(Source::Sarc, docs).expect("unique ids")
}
