//! Emoji sequence extraction, seed inventories and anchor-based filtering.
//!
//! Clusters follow extended grapheme segmentation, so ZWJ sequences,
//! modifier sequences, keycaps and flag pairs each come out as a single
//! [`EmojiCluster`]. Matching against a [`SeedInventory`] uses the cluster's
//! *base* form, which drops skin-tone modifiers and variation selectors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use icu_properties::props::{Emoji, RegionalIndicator};
use icu_properties::{CodePointSetData, CodePointSetDataBorrowed};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unicode_segmentation::UnicodeSegmentation;

use crate::corpus::{Document, LabelRecord};
use crate::tsv::{self, content_lines};
use crate::{Error, Result};

static EMOJI: LazyLock<CodePointSetDataBorrowed<'static>> =
    LazyLock::new(CodePointSetData::new::<Emoji>);
static REGIONAL: LazyLock<CodePointSetDataBorrowed<'static>> =
    LazyLock::new(CodePointSetData::new::<RegionalIndicator>);

const VS15: char = '\u{FE0E}';
const VS16: char = '\u{FE0F}';
const KEYCAP: char = '\u{20E3}';

pub fn is_skin_tone(c: char) -> bool {
    ('\u{1F3FB}'..='\u{1F3FF}').contains(&c)
}

fn is_variation_selector(c: char) -> bool {
    c == VS15 || c == VS16
}

/// Whether a grapheme cluster is an emoji sequence.
///
/// The first scalar must carry the Emoji property or be a regional
/// indicator. The ASCII keycap bases (`#`, `*`, `0`-`9`) have the Emoji
/// property too but only count when followed by U+FE0F or U+20E3.
pub fn is_emoji_cluster(cluster: &str) -> bool {
    let Some(first) = cluster.chars().next() else {
        return false;
    };
    if REGIONAL.contains(first) {
        return true;
    }
    if !EMOJI.contains(first) {
        return false;
    }
    if first.is_ascii() {
        return cluster.chars().skip(1).any(|c| c == VS16 || c == KEYCAP);
    }
    true
}

/// Strips skin-tone modifiers and variation selectors. A cluster made only
/// of such scalars keeps its original form.
pub fn base_form(cluster: &str) -> String {
    let base: String = cluster
        .chars()
        .filter(|&c| !is_skin_tone(c) && !is_variation_selector(c))
        .collect();
    if base.is_empty() {
        cluster.to_owned()
    } else {
        base
    }
}

/// One emoji sequence found in text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiCluster {
    pub codepoints: Vec<char>,
    pub display: String,
    pub base: String,
}

impl EmojiCluster {
    fn from_grapheme(g: &str) -> Self {
        EmojiCluster {
            codepoints: g.chars().collect(),
            display: g.to_owned(),
            base: base_form(g),
        }
    }
}

/// All emoji clusters of `text`, in text order.
pub fn extract_emojis(text: &str) -> Vec<EmojiCluster> {
    text.graphemes(true)
        .filter(|g| is_emoji_cluster(g))
        .map(EmojiCluster::from_grapheme)
        .collect()
}

/// Distinct base forms in `text`.
pub fn distinct_bases(text: &str) -> BTreeSet<String> {
    extract_emojis(text).into_iter().map(|c| c.base).collect()
}

/// Space-joined uppercase hex scalars, e.g. `1F595 1F3FD`.
pub fn to_hex(s: &str) -> String {
    s.chars()
        .map(|c| format!("{:X}", c as u32))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn from_hex(hex: &str) -> Result<String> {
    hex.split_whitespace()
        .map(|h| {
            u32::from_str_radix(h, 16)
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| Error::invalid(format!("bad code point {h:?}")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeedCategory {
    AnimalDehumanization,
    AngerDisgustFace,
    DisrespectSymbol,
    ViolenceSymbol,
    Adult,
    Other,
}

impl SeedCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            SeedCategory::AnimalDehumanization => "animal_dehumanization",
            SeedCategory::AngerDisgustFace => "anger_disgust_face",
            SeedCategory::DisrespectSymbol => "disrespect_symbol",
            SeedCategory::ViolenceSymbol => "violence_symbol",
            SeedCategory::Adult => "adult",
            SeedCategory::Other => "other",
        }
    }
}

impl fmt::Display for SeedCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeedCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "animal_dehumanization" => SeedCategory::AnimalDehumanization,
            "anger_disgust_face" => SeedCategory::AngerDisgustFace,
            "disrespect_symbol" => SeedCategory::DisrespectSymbol,
            "violence_symbol" => SeedCategory::ViolenceSymbol,
            "adult" => SeedCategory::Adult,
            "other" => SeedCategory::Other,
            other => return Err(Error::invalid(format!("unknown category {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedEntry {
    pub category: SeedCategory,
    pub comment: Option<String>,
}

/// Anchor emojis keyed by base form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedInventory {
    entries: BTreeMap<String, SeedEntry>,
}

/// Reconstructed default seed list shipped with the crate.
pub const DEFAULT_SEEDS_TSV: &str = include_str!("../data/seeds.tsv");

impl SeedInventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn default_seeds() -> Self {
        Self::parse(DEFAULT_SEEDS_TSV).expect("bundled seed file parses")
    }

    /// Adds an emoji; the key is its base form, so toned and untoned
    /// spellings land on the same entry.
    pub fn insert(&mut self, emoji: &str, category: SeedCategory, comment: Option<String>) {
        self.entries
            .insert(base_form(emoji), SeedEntry { category, comment });
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?)
    }

    /// Parses `codepoints<TAB>category[<TAB>comment]` rows; `#` lines are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut inv = SeedInventory::new();
        for (line, raw) in content_lines(text) {
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() < 2 {
                return Err(Error::parse(line, "expected codepoints and category columns"));
            }
            let emoji = from_hex(fields[0]).map_err(|e| Error::parse(line, e.to_string()))?;
            let category = fields[1]
                .parse()
                .map_err(|e: Error| Error::parse(line, e.to_string()))?;
            let comment = fields
                .get(2)
                .map(|c| c.trim().to_owned())
                .filter(|c| !c.is_empty());
            inv.insert(&emoji, category, comment);
        }
        Ok(inv)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# codepoints\tcategory\tcomment\n");
        for (base, e) in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                to_hex(base),
                e.category,
                e.comment.as_deref().unwrap_or("")
            ));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, base: &str) -> bool {
        self.entries.contains_key(base)
    }

    pub fn get(&self, base: &str) -> Option<&SeedEntry> {
        self.entries.get(base)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SeedEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Textual alias such as `:middle_finger:`, taken from the entry comment
    /// (text before any `;` or `(`). Unknown emojis get a hex alias.
    pub fn alias(&self, cluster: &str) -> String {
        let base = base_form(cluster);
        let named = self
            .entries
            .get(&base)
            .and_then(|e| e.comment.as_deref())
            .map(|c| c.split([';', '(']).next().unwrap_or("").trim().to_lowercase())
            .filter(|c| !c.is_empty());
        match named {
            Some(name) => format!(":{}:", name.replace([' ', '-'], "_")),
            None => format!(":u{}:", to_hex(&base).replace(' ', "_").to_lowercase()),
        }
    }
}

/// Documents containing at least one inventory emoji, in corpus order.
pub fn filter_by_seeds(corpus: &[Document], inventory: &SeedInventory) -> Result<Vec<Document>> {
    if inventory.is_empty() {
        return Err(Error::invalid("seed inventory is empty"));
    }
    Ok(corpus
        .iter()
        .filter(|d| extract_emojis(&d.text).iter().any(|c| inventory.contains(&c.base)))
        .cloned()
        .collect())
}

/// Label statistics for one base emoji.
#[derive(Debug, Clone, PartialEq)]
pub struct EmojiStat {
    pub base: String,
    pub n_total: usize,
    pub n_offensive: usize,
    pub n_hate: usize,
    pub offensive_pct: f64,
    pub hate_pct: f64,
}

/// Per-emoji document counts, sorted by offensive share descending then by
/// base form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmojiStats {
    pub rows: Vec<EmojiStat>,
}

impl EmojiStats {
    pub fn get(&self, base: &str) -> Option<&EmojiStat> {
        self.rows.iter().find(|r| r.base == base)
    }

    pub const HEADER: &'static str =
        "base\tcategory\tn_total\tn_offensive\toffensive_pct\tn_hate\thate_pct";

    pub fn to_tsv(&self, inventory: Option<&SeedInventory>) -> String {
        let mut out = format!("{}\n", Self::HEADER);
        for r in &self.rows {
            let category = inventory
                .and_then(|inv| inv.get(&r.base))
                .map_or("-", |e| e.category.as_str());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{:.6}\t{}\t{:.6}\n",
                r.base, category, r.n_total, r.n_offensive, r.offensive_pct, r.n_hate, r.hate_pct
            ));
        }
        out
    }
}

/// Counts each document once per distinct base emoji it contains.
pub fn emoji_stats(corpus: &[Document], labels: &[LabelRecord]) -> Result<EmojiStats> {
    let by_id: HashMap<&str, &LabelRecord> =
        labels.iter().map(|l| (l.doc_id.as_str(), l)).collect();
    let mut counts: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for doc in corpus {
        let label = by_id
            .get(doc.id.as_str())
            .ok_or_else(|| Error::MissingLabel(doc.id.clone()))?;
        for base in distinct_bases(&doc.text) {
            let c = counts.entry(base).or_default();
            c.0 += 1;
            c.1 += usize::from(label.offensive);
            c.2 += usize::from(label.is_hate());
        }
    }
    let mut rows: Vec<EmojiStat> = counts
        .into_iter()
        .map(|(base, (n_total, n_offensive, n_hate))| EmojiStat {
            base,
            n_total,
            n_offensive,
            n_hate,
            offensive_pct: n_offensive as f64 / n_total as f64,
            hate_pct: n_hate as f64 / n_total as f64,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.offensive_pct
            .total_cmp(&a.offensive_pct)
            .then_with(|| a.base.cmp(&b.base))
    });
    Ok(EmojiStats { rows })
}

/// FNV-1a, used to derive a stable per-emoji RNG stream.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Up to `k` distinct documents per inventory emoji, chosen uniformly with a
/// seeded generator. Selections are returned in corpus order.
pub fn sample_per_emoji(
    corpus: &[Document],
    inventory: &SeedInventory,
    k: usize,
    seed: u64,
) -> Result<BTreeMap<String, Vec<Document>>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let doc_bases: Vec<BTreeSet<String>> = corpus.iter().map(|d| distinct_bases(&d.text)).collect();
    let mut out = BTreeMap::new();
    for (base, _) in inventory.iter() {
        let candidates: Vec<usize> = (0..corpus.len())
            .filter(|&i| doc_bases[i].contains(base))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(base));
        let mut chosen: Vec<usize> = candidates.choose_multiple(&mut rng, k).copied().collect();
        chosen.sort_unstable();
        out.insert(
            base.to_owned(),
            chosen.into_iter().map(|i| corpus[i].clone()).collect(),
        );
    }
    Ok(out)
}
