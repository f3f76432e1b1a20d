use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use offanchor::classifier::{explain, ExplainConfig, FeatureConfig, TextClassifier, TrainConfig};
use offanchor::emoji::SeedInventory;
use offanchor::synth::CLEAN_WORDS;

const MARKER: &str = "زفت";

#[test]
fn injected_token_ranks_first() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut texts = Vec::new();
    let mut labels = Vec::new();
    for i in 0..120 {
        let mut w: Vec<&str> = (0..6).map(|_| *CLEAN_WORDS.choose(&mut rng).unwrap()).collect();
        let positive = i % 2 == 0;
        if positive {
            w.insert(3, MARKER);
        }
        texts.push(w.join(" "));
        labels.push(positive);
    }
    let (clf, _) =
        TextClassifier::fit(&texts, &labels, &FeatureConfig::default(), &TrainConfig::default()).unwrap();
    let doc = format!("صباح الخير {MARKER} يا جميل رحلة ممتعة");
    let inv = SeedInventory::new();
    let mut first = 0;
    for seed in 0..100 {
        let cfg = ExplainConfig { seed, ..ExplainConfig::default() };
        let e = explain(&clf.model, &clf.space, &doc, &inv, &cfg).unwrap();
        if e.top[0].token == MARKER {
            first += 1;
        }
    }
    assert!(first >= 95, "marker ranked first in {first}/100 runs");
}
