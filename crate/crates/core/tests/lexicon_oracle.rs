use std::collections::BTreeMap;

use chrono::{TimeZone, Utc};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use offanchor::corpus::{Document, LabelRecord};
use offanchor::lexicon::{mine_lexicon, valence_exact, LexiconConfig};
use offanchor::normalize::{normalize, tokenize, NormalizationConfig};

const VOCAB: [&str; 8] = ["كلب", "حمار", "جميل", "اليوم", "ورد", "غبي", "يا", "🐷"];

/// Brute force: recount every term and apply 2 r_off / (r_off + r_cln) - 1.
fn reference(docs: &[(Vec<usize>, bool)]) -> Vec<(String, u64, u64, BigRational)> {
    let norm = NormalizationConfig::default();
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let (mut tot_off, mut tot_cln) = (0u64, 0u64);
    for (words, off) in docs {
        let text: Vec<&str> = words.iter().map(|&i| VOCAB[i]).collect();
        for t in tokenize(&normalize(&text.join(" "), &norm)) {
            let e = counts.entry(t).or_default();
            if *off {
                e.0 += 1;
                tot_off += 1;
            } else {
                e.1 += 1;
                tot_cln += 1;
            }
        }
    }
    let big = |v: u64| BigInt::from(v);
    let threshold = BigRational::new(big(4), big(5));
    let mut out: Vec<(String, u64, u64, BigRational)> = counts
        .into_iter()
        .filter(|(_, (a, b))| a + b >= 5)
        .map(|(t, (a, b))| {
            let r_off = BigRational::new(big(a), big(tot_off));
            let r_cln = BigRational::new(big(b), big(tot_cln));
            let two = BigRational::from_integer(big(2));
            let v = two * &r_off / (&r_off + &r_cln) - BigRational::one();
            (t, a, b, v)
        })
        .filter(|(_, _, _, v)| *v >= threshold)
        .collect();
    out.sort_by(|x, y| y.3.cmp(&x.3).then((y.1 + y.2).cmp(&(x.1 + x.2))).then(x.0.cmp(&y.0)));
    out
}

fn corpora() -> impl Strategy<Value = Vec<(Vec<usize>, bool)>> {
    proptest::collection::vec((proptest::collection::vec(0usize..VOCAB.len(), 1..5), any::<bool>()), 2..50)
        .prop_filter("both classes", |d| d.iter().any(|x| x.1) && d.iter().any(|x| !x.1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mining_equals_brute_force(docs in corpora()) {
        let t0 = Utc.timestamp_opt(0, 0).unwrap();
        let corpus: Vec<Document> = docs
            .iter()
            .enumerate()
            .map(|(i, (w, _))| {
                let text: Vec<&str> = w.iter().map(|&k| VOCAB[k]).collect();
                Document::new(i.to_string(), text.join(" "), t0).unwrap()
            })
            .collect();
        let labels: Vec<LabelRecord> = docs
            .iter()
            .enumerate()
            .map(|(i, (_, off))| if *off { LabelRecord::offensive(i.to_string()) } else { LabelRecord::clean(i.to_string()) })
            .collect();
        let got = mine_lexicon(&corpus, &labels, &NormalizationConfig::default(), &LexiconConfig::default()).unwrap();
        let want = reference(&docs);
        prop_assert_eq!(got.len(), want.len());
        let tot_off: u64 = docs.iter().filter(|d| d.1).map(|d| d.0.len() as u64).sum();
        let tot_cln: u64 = docs.iter().filter(|d| !d.1).map(|d| d.0.len() as u64).sum();
        for (g, w) in got.iter().zip(&want) {
            prop_assert_eq!(&g.term, &w.0);
            prop_assert_eq!((g.n_pos, g.n_neg), (w.1, w.2));
            prop_assert_eq!(valence_exact(g.n_pos, g.n_neg, tot_off, tot_cln).unwrap(), w.3.clone());
            prop_assert!((g.valence - w.3.to_f64().unwrap()).abs() <= 1e-12);
        }
    }
}
