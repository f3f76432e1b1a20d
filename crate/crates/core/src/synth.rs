//! Seeded synthetic corpora.
//!
//! Offensive documents draw from a small insult vocabulary, clean ones never
//! do, so labels are recoverable from text. Emoji anchors are planted with
//! controlled rates to exercise the collection step.

use std::collections::BTreeSet;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Document, HateTarget, LabelRecord};
use crate::violence::{expand, ClassSet, ExpansionTable};
use crate::{Error, Result};

pub const OFFENSIVE_WORDS: [&str; 15] = [
    "كلب", "حمار", "حقير", "وسخ", "خنزير", "قذر", "غبي", "تافه", "زبالة", "حيوان", "ثور", "نذل",
    "واطي", "منحط", "سافل",
];

pub const CLEAN_WORDS: [&str; 40] = [
    "جميل", "صباح", "الخير", "الجو", "مباراة", "فريق", "هدف", "قهوة", "كتاب", "مدرسة", "رحلة", "شكرا",
    "حبيبي", "يحفظك", "مبروك", "عيد", "سعيد", "عمل", "بيت", "اهل", "اصدقاء", "نادي", "ملعب", "لاعب",
    "رائع", "ممتع", "طريق", "سيارة", "مطر", "بحر", "شمس", "سماء", "قمر", "ليل", "نهار", "موسيقى",
    "اغنية", "فيلم", "حديقة", "ورد",
];

pub const FILLER_WORDS: [&str; 14] = [
    "انت", "هذا", "هذه", "في", "من", "مع", "يا", "والله", "كل", "بس", "لا", "ما", "هو", "هي",
];

/// Anchors from the bundled inventory (some with tone or presentation
/// variants) and emojis outside it.
pub const SEED_EMOJIS: [&str; 8] = ["🐷", "🐕", "👞", "🖕🏽", "🐖", "💩", "🔪", "🐍"];
pub const OTHER_EMOJIS: [&str; 6] = ["😀", "🌹", "⚽", "☕", "🎉", "❤️"];

const RELIGION_TERMS: [&str; 4] = ["اليهود", "النصارى", "الشيعة", "الملحدين"];

fn epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap()
}

/// Documents and their gold labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub docs: Vec<Document>,
    pub labels: Vec<LabelRecord>,
}

impl SynthCorpus {
    pub fn offensive_ratio(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.labels.iter().filter(|l| l.offensive).count() as f64 / self.labels.len() as f64
    }
}

fn words(rng: &mut ChaCha8Rng, pool: &[&str], n: usize) -> Vec<String> {
    (0..n).map(|_| (*pool.choose(rng).expect("pool")).to_owned()).collect()
}

/// One sentence: clean and filler words, plus insults when offensive.
fn sentence(rng: &mut ChaCha8Rng, offensive: bool) -> Vec<String> {
    let n = rng.random_range(4..8);
    let mut w = words(rng, &CLEAN_WORDS, n);
    let n = rng.random_range(2..5);
    w.extend(words(rng, &FILLER_WORDS, n));
    if offensive {
        let n = rng.random_range(2..4);
        w.extend(words(rng, &OFFENSIVE_WORDS, n));
    }
    w.shuffle(rng);
    w
}

/// Insults dominate offensive sentences; clean ones never contain any.
fn separable_sentence(rng: &mut ChaCha8Rng, offensive: bool) -> Vec<String> {
    let mut w = if offensive {
        let n = rng.random_range(3..6);
        let mut w = words(rng, &OFFENSIVE_WORDS, n);
        let n = rng.random_range(0..3);
        w.extend(words(rng, &CLEAN_WORDS, n));
        w
    } else {
        let n = rng.random_range(4..8);
        words(rng, &CLEAN_WORDS, n)
    };
    let n = rng.random_range(1..4);
    w.extend(words(rng, &FILLER_WORDS, n));
    w.shuffle(rng);
    w
}

fn push_emoji(rng: &mut ChaCha8Rng, w: &mut Vec<String>, pool: &[&str]) {
    let at = rng.random_range(0..=w.len());
    w.insert(at, (*pool.choose(rng).expect("pool")).to_owned());
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnrichmentConfig {
    pub n_docs: usize,
    /// Fraction of offensive documents in the whole collection.
    pub base_rate: f64,
    /// Fraction of documents carrying an anchor emoji.
    pub seed_fraction: f64,
    /// Fraction of anchored documents that are offensive.
    pub p_offensive_given_seed: f64,
}

impl Default for EnrichmentConfig {
    fn default() -> Self {
        EnrichmentConfig {
            n_docs: 10_000,
            base_rate: 0.02,
            seed_fraction: 0.02,
            p_offensive_given_seed: 0.6,
        }
    }
}

/// Counts of (anchored offensive, anchored, total offensive) implied by `cfg`.
pub fn enrichment_counts(cfg: &EnrichmentConfig) -> Result<(usize, usize, usize)> {
    let n = cfg.n_docs as f64;
    let anchored = (cfg.seed_fraction * n).round() as usize;
    let anchored_off = (cfg.p_offensive_given_seed * anchored as f64).round() as usize;
    let total_off = (cfg.base_rate * n).round() as usize;
    let rates_ok = [cfg.base_rate, cfg.seed_fraction, cfg.p_offensive_given_seed]
        .iter()
        .all(|r| (0.0..=1.0).contains(r));
    if !rates_ok || anchored > cfg.n_docs || total_off < anchored_off
        || total_off - anchored_off > cfg.n_docs - anchored
    {
        return Err(Error::invalid("enrichment rates are mutually inconsistent"));
    }
    Ok((anchored_off, anchored, total_off))
}

/// Collection where anchors are rare but concentrate offensive documents.
/// Class and anchor counts are fixed by the rates; placement is random.
pub fn enrichment_corpus(cfg: &EnrichmentConfig, seed: u64) -> Result<SynthCorpus> {
    let (anchored_off, anchored, total_off) = enrichment_counts(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (anchored, offensive) per document
    let mut kinds = Vec::with_capacity(cfg.n_docs);
    kinds.extend(std::iter::repeat_n((true, true), anchored_off));
    kinds.extend(std::iter::repeat_n((true, false), anchored - anchored_off));
    kinds.extend(std::iter::repeat_n((false, true), total_off - anchored_off));
    kinds.extend(std::iter::repeat_n((false, false), cfg.n_docs - anchored - (total_off - anchored_off)));
    kinds.shuffle(&mut rng);
    let mut docs = Vec::with_capacity(cfg.n_docs);
    let mut labels = Vec::with_capacity(cfg.n_docs);
    for (i, (anchor, off)) in kinds.into_iter().enumerate() {
        let mut w = sentence(&mut rng, off);
        if anchor {
            push_emoji(&mut rng, &mut w, &SEED_EMOJIS);
        }
        if rng.random_bool(0.3) {
            push_emoji(&mut rng, &mut w, &OTHER_EMOJIS);
        }
        let id = format!("e{i:05}");
        docs.push(Document::new(&id, w.join(" "), epoch() + Duration::minutes(i as i64))?);
        labels.push(if off { LabelRecord::offensive(id) } else { LabelRecord::clean(id) });
    }
    Ok(SynthCorpus { docs, labels })
}

/// Labeled corpus with separable classes: `n_docs` documents, half of them
/// offensive. Insult and clean vocabularies are disjoint.
pub fn separable_corpus(n_docs: usize, seed: u64) -> Result<SynthCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::with_capacity(n_docs);
    let mut labels = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let off = i % 2 == 0;
        let w = separable_sentence(&mut rng, off);
        let id = format!("s{i:04}");
        docs.push(Document::new(&id, w.join(" "), epoch() + Duration::minutes(i as i64))?);
        labels.push(if off { LabelRecord::offensive(id) } else { LabelRecord::clean(id) });
    }
    Ok(SynthCorpus { docs, labels })
}

/// Raw collection for the end-to-end pipeline: anchored documents are about
/// half offensive, the rest rarely; exact duplicates and very short posts are
/// mixed in. Offensive documents carry vulgar, hate and violence layers at
/// fixed rates.
pub fn pipeline_corpus(n_docs: usize, seed: u64) -> Result<SynthCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let violent = violence_sentences();
    let mut docs: Vec<Document> = Vec::with_capacity(n_docs);
    let mut labels: Vec<LabelRecord> = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let id = format!("p{i:05}");
        let at = epoch() + Duration::minutes(7 * i as i64);
        if i > 0 && i % 50 == 0 {
            // exact copy of an earlier post
            let j = rng.random_range(0..docs.len());
            docs.push(Document::new(&id, docs[j].text.clone(), at)?);
            let mut l = labels[j].clone();
            l.doc_id = id;
            labels.push(l);
            continue;
        }
        if i % 97 == 0 {
            let mut w = words(&mut rng, &CLEAN_WORDS, 1);
            push_emoji(&mut rng, &mut w, &SEED_EMOJIS);
            docs.push(Document::new(&id, w.join(" "), at)?);
            labels.push(LabelRecord::clean(id));
            continue;
        }
        let anchored = rng.random_bool(0.4);
        let off = rng.random_bool(if anchored { 0.5 } else { 0.05 });
        let mut w = sentence(&mut rng, off);
        let mut label = if off { LabelRecord::offensive(&id) } else { LabelRecord::clean(&id) };
        if off {
            label.vulgar = rng.random_bool(0.3);
            if rng.random_bool(0.2) {
                w.push((*RELIGION_TERMS.choose(&mut rng).expect("terms")).to_owned());
                label.hate_targets.insert(HateTarget::Religion);
            }
            if rng.random_bool(0.05) {
                let (text, _) = violent.choose(&mut rng).expect("sentences");
                w.extend(text.split(' ').map(str::to_owned));
                label.violence = true;
            }
        }
        if anchored {
            push_emoji(&mut rng, &mut w, &SEED_EMOJIS);
        }
        if rng.random_bool(0.2) {
            push_emoji(&mut rng, &mut w, &OTHER_EMOJIS);
        }
        docs.push(Document::new(&id, w.join(" "), at)?);
        labels.push(label);
    }
    Ok(SynthCorpus { docs, labels })
}

/// Sentences instantiating every verb, object class and hit noun of the
/// bundled violence rules, each with the rule expected to fire.
pub fn violence_sentences() -> Vec<(String, &'static str)> {
    [
        ("راح اقتلك يا كلب", "kill_human"),
        ("سأذبحك", "kill_human"),
        ("راح يدبحك", "kill_human"),
        ("سنقتلكم جميعا", "kill_human"),
        ("سأضرب رأسك", "hit_human_body"),
        ("اضربك على وجهك", "hit_human_body"),
        ("سأطعنه في بطنه", "hit_human_body"),
        ("ادوس على راسك", "hit_human_body"),
        ("ادعسك بالسيارة", "hit_human_body"),
        ("يجلدك بالسوط", "hit_human_body"),
        ("اكسر اسنانك", "hit_human_body"),
        ("ابي اطعن عينك", "hit_human_body"),
        ("سأقطع رقبتك", "cut_head"),
        ("سأقطع راسه", "cut_head"),
        ("افتح دماغك", "cut_head"),
        ("اطير راسك بالسيف", "cut_head"),
        ("كف على وجهك", "hitnoun_on_body"),
        ("جزمة على راسك", "hitnoun_on_body"),
        ("صفعة على خشمك", "hitnoun_on_body"),
        ("كف عالوجه", "hitnoun_on_body"),
    ]
    .into_iter()
    .map(|(s, r)| (s.to_owned(), r))
    .collect()
}

/// Clean sentences containing no surface form of any class member.
pub fn filler_sentences(n: usize, classes: &ClassSet, table: &ExpansionTable, seed: u64) -> Vec<String> {
    let forms: BTreeSet<String> = classes
        .iter()
        .flat_map(|c| c.members.iter().flat_map(move |m| expand(m, table, c.kind())))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = sentence(&mut rng, false);
        if w.iter().any(|t| forms.contains(&crate::normalize::normalize(t, &Default::default()))) {
            continue;
        }
        out.push(w.join(" "));
    }
    out
}
