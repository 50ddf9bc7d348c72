//! Writes the synthetic 500-document fixtures used by the CLI tests.
//!
//! ```text
//! cargo run -p hatelex-core --example make_fixtures -- crates/cli/tests/fixtures
//! ```
//!
//! The vocabulary is deliberately bland; what matters is that sarcasm, implicit
//! and explicit rows draw on partly shared word pools so the similarity
//! statistics and classifiers have something to find.

use std::fs;
use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROWS: usize = 500;

const COMMON: &[&str] = &[
    "the", "a", "to", "and", "of", "is", "it", "that", "this", "in", "for", "on", "with", "just",
    "people", "time", "today", "really", "think", "know", "good", "new", "work", "city", "news",
];
const NEUTRAL: &[&str] = &[
    "weather", "game", "recipe", "garden", "train", "music", "movie", "coffee", "weekend", "book",
    "team", "score", "park", "photo", "library", "bridge", "river", "concert",
];
const SARCASTIC: &[&str] = &[
    "oh", "great", "sure", "totally", "wow", "genius", "brilliant", "obviously", "thanks",
    "exactly", "shocking", "amazing", "clearly", "love",
];
const IMPLICIT: &[&str] = &[
    "those", "they", "always", "their", "kind", "outsiders", "replace", "real", "our", "values",
    "taking", "over", "so-called", "typical", "sure", "obviously", "clearly",
];
const EXPLICIT: &[&str] = &[
    "hate", "awful", "disgusting", "vermin", "filthy", "worthless", "get", "out", "ban", "them",
    "groupx", "groupy",
];

fn sentence(rng: &mut ChaCha8Rng, pools: &[(&[&str], f64)]) -> String {
    let len = rng.random_range(6..18);
    let total: f64 = pools.iter().map(|p| p.1).sum();
    (0..len)
        .map(|_| {
            let mut r = rng.random::<f64>() * total;
            let mut pick = pools[0].0;
            for (pool, w) in pools {
                if r < *w {
                    pick = pool;
                    break;
                }
                r -= w;
            }
            *pick.choose(rng).expect("non-empty pool")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn punctuate(rng: &mut ChaCha8Rng, mut s: String) -> String {
    if rng.random_bool(0.4) {
        s.push_str(["!", ".", "?", "..."][rng.random_range(0..4)]);
    }
    s
}

fn sarc(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("label,comment,author,subreddit,score,ups,downs,date,created_utc,parent_comment\n");
    for i in 0..ROWS {
        let sarcastic = i % 2 == 0;
        let text = if sarcastic {
            sentence(rng, &[(COMMON, 0.5), (SARCASTIC, 0.35), (IMPLICIT, 0.15)])
        } else {
            sentence(rng, &[(COMMON, 0.6), (NEUTRAL, 0.4)])
        };
        let parent = sentence(rng, &[(COMMON, 0.6), (NEUTRAL, 0.4)]);
        // About one row in eight fails the vote filter.
        let (ups, downs) = match rng.random_range(0..8) {
            0 => (rng.random_range(0..=10), 0),
            1 => (rng.random_range(11..200), rng.random_range(1..5)),
            _ => (rng.random_range(11..500), 0),
        };
        let text = punctuate(rng, text);
        out.push_str(&format!(
            "{},\"{}\",user{},sub{},{},{},{},2016-10,1476000000,\"{}\"\n",
            u8::from(sarcastic),
            text,
            i % 37,
            i % 5,
            ups - downs,
            ups,
            downs,
            parent
        ));
    }
    // One unusable row to exercise the ingest report.
    out.push_str("1,\"\",user0,sub0,12,12,0,2016-10,1476000000,\"empty comment\"\n");
    out
}

fn implicit_hate(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("ID\tpost\tclass\n");
    for i in 0..ROWS {
        let (class, text) = match i % 10 {
            0..=5 => ("not_hate", sentence(rng, &[(COMMON, 0.6), (NEUTRAL, 0.4)])),
            6..=8 => (
                "implicit_hate",
                sentence(rng, &[(COMMON, 0.45), (IMPLICIT, 0.4), (SARCASTIC, 0.15)]),
            ),
            _ => ("explicit_hate", sentence(rng, &[(COMMON, 0.4), (EXPLICIT, 0.6)])),
        };
        let text = punctuate(rng, text);
        out.push_str(&format!("ihc{i:04}\t{text}\t{class}\n"));
    }
    out.push_str("ihc9999\tsomething here\tunknown_class\n");
    out
}

fn ethos(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("comment;isHate\n");
    for i in 0..ROWS {
        let (score, text) = if i % 20 < 7 {
            let pools: &[(&[&str], f64)] = if rng.random_bool(0.5) {
                &[(COMMON, 0.4), (EXPLICIT, 0.6)]
            } else {
                &[(COMMON, 0.4), (IMPLICIT, 0.4), (EXPLICIT, 0.2)]
            };
            (rng.random_range(0.33..=1.0), sentence(rng, pools))
        } else {
            (rng.random_range(0.0..0.33), sentence(rng, &[(COMMON, 0.6), (NEUTRAL, 0.4)]))
        };
        let text = punctuate(rng, text).replace(';', ",");
        out.push_str(&format!("{text};{score:.6}\n"));
    }
    out
}

fn sarcasm_v2(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("Corpus,Label,ID,Quote Text,Response Text\n");
    for i in 0..ROWS {
        let sarcastic = i % 2 == 1;
        let text = if sarcastic {
            sentence(rng, &[(COMMON, 0.55), (SARCASTIC, 0.45)])
        } else {
            sentence(rng, &[(COMMON, 0.6), (NEUTRAL, 0.4)])
        };
        let quote = sentence(rng, &[(COMMON, 0.6), (NEUTRAL, 0.4)]);
        out.push_str(&format!(
            "GEN,{},GEN_{}_{i},\"{quote}\",\"{}\"\n",
            if sarcastic { "sarc" } else { "notsarc" },
            if sarcastic { "sarc" } else { "notsarc" },
            punctuate(rng, text)
        ));
    }
    out
}

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/cli/tests/fixtures".into()),
    );
    fs::create_dir_all(&dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(20240501);
    fs::write(dir.join("sarc.csv"), sarc(&mut rng))?;
    fs::write(dir.join("implicit_hate.tsv"), implicit_hate(&mut rng))?;
    fs::write(dir.join("ethos.csv"), ethos(&mut rng))?;
    fs::write(dir.join("sarcasm_v2.csv"), sarcasm_v2(&mut rng))?;
    println!("fixtures written to {}", dir.display());
    Ok(())
}
