use std::collections::BTreeSet;

use ndk_core::textfeat::{featurize, gss, tokenize, CategoryStats, FeatureMode, Vocabulary};
use proptest::prelude::*;

const DOCS: [(&str, &str); 4] = [
    ("apple banana apple", "fruit"),
    ("banana cherry", "fruit"),
    ("dog cat", "animal"),
    ("dog eel", "animal"),
];

fn toy() -> (Vec<Vec<String>>, Vocabulary, CategoryStats) {
    let docs: Vec<Vec<String>> = DOCS.iter().map(|(t, _)| tokenize(t)).collect();
    let labels: Vec<BTreeSet<String>> = DOCS.iter().map(|(_, c)| BTreeSet::from([c.to_string()])).collect();
    let vocab = Vocabulary::build(&docs);
    let cats = vec!["animal".to_string(), "fruit".to_string()];
    let stats = CategoryStats::build(&docs, &labels, &vocab, &cats).unwrap();
    (docs, vocab, stats)
}

fn close(a: f64, b: f64) {
    assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
}

// Hand computation: terms apple,banana,cat,cherry,dog,eel get indices 0..5;
// doc frequencies 1,2,1,1,2,1 over 4 documents.
#[test]
fn four_document_hand_oracle() {
    let (docs, vocab, stats) = toy();
    assert_eq!(vocab.len(), 6);
    assert_eq!(vocab.index_of("cherry"), Some(3));

    // tfidf of doc 1: apple (2/3)ln4, banana (1/3)ln2, i.e. 4:1 before normalizing.
    let x = featurize(&docs[0], &vocab, &stats, None, FeatureMode::TfidfOnly).unwrap();
    assert_eq!(x.indices(), &[0, 1]);
    close(x.get(0), 4.0 / 17f64.sqrt());
    close(x.get(1), 1.0 / 17f64.sqrt());

    // GSS for fruit: apple 1/4*2/4 = 0.125, banana 2/4*2/4 = 0.25.
    close(gss(&stats, 0, 1).unwrap(), 0.125);
    close(gss(&stats, 1, 1).unwrap(), 0.25);
    close(gss(&stats, 0, 0).unwrap(), -0.125);
    // squared geometric means: apple ln2/6, banana ln2/12.
    let x = featurize(&docs[0], &vocab, &stats, Some("fruit"), FeatureMode::GeometricMean).unwrap();
    close(x.get(0), (2.0f64 / 3.0).sqrt());
    close(x.get(1), (1.0f64 / 3.0).sqrt());
    // every term of doc 1 is negatively associated with animal.
    let x = featurize(&docs[0], &vocab, &stats, Some("animal"), FeatureMode::GeometricMean).unwrap();
    assert!(x.is_empty());

    // doc 3 for animal: dog (1/2)ln2 * 0.25, cat ln2 * 0.125, equal products.
    let x = featurize(&docs[2], &vocab, &stats, Some("animal"), FeatureMode::GeometricMean).unwrap();
    close(x.get(2), 0.5f64.sqrt());
    close(x.get(4), 0.5f64.sqrt());
    let x = featurize(&docs[2], &vocab, &stats, None, FeatureMode::TfidfOnly).unwrap();
    close(x.get(2), 2.0 / 5f64.sqrt());
    close(x.get(4), 1.0 / 5f64.sqrt());

    // unseen terms count toward the length but are dropped.
    let probe = tokenize("apple zebra");
    let x = featurize(&probe, &vocab, &stats, None, FeatureMode::TfidfOnly).unwrap();
    assert_eq!(x.indices(), &[0]);
    close(x.get(0), 1.0);
    assert_eq!(vocab.len(), 6);
}

fn corpus_strategy() -> impl Strategy<Value = Vec<(Vec<u8>, u8)>> {
    proptest::collection::vec((proptest::collection::vec(0u8..12, 0..15), 0u8..3), 1..25)
}

proptest! {
    #[test]
    fn gss_bounds_and_unit_norms(corpus in corpus_strategy()) {
        let docs: Vec<Vec<String>> = corpus
            .iter()
            .map(|(ts, _)| ts.iter().map(|t| format!("t{t}")).collect())
            .collect();
        let labels: Vec<BTreeSet<String>> =
            corpus.iter().map(|(_, c)| BTreeSet::from([format!("c{c}")])).collect();
        let cats: Vec<String> = (0..3).map(|c| format!("c{c}")).collect();
        let vocab = Vocabulary::build(&docs);
        let stats = CategoryStats::build(&docs, &labels, &vocab, &cats).unwrap();
        for t in 0..vocab.len() {
            for c in 0..3 {
                let g = gss(&stats, t, c).unwrap();
                prop_assert!((-0.25..=0.25).contains(&g));
                let [tc, t_nc, nt_c, nt_nc] = stats.cells(t, c);
                prop_assert_eq!(tc + t_nc + nt_c + nt_nc, docs.len());
                if tc * nt_nc > t_nc * nt_c {
                    prop_assert!(g > 0.0);
                }
            }
        }
        for d in &docs {
            for mode in [FeatureMode::TfidfOnly, FeatureMode::GeometricMean] {
                for c in &cats {
                    let x = featurize(d, &vocab, &stats, Some(c), mode).unwrap();
                    let n = x.squared_norm().sqrt();
                    prop_assert!(n == 0.0 || (n - 1.0).abs() <= 1e-12);
                    prop_assert!(x.values().iter().all(|v| *v > 0.0));
                }
            }
        }
    }
}
