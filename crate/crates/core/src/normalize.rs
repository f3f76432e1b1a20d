//! Text normalization, tokenization, n-grams and corpus deduplication.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use unicode_segmentation::UnicodeSegmentation;

use crate::corpus::Document;
use crate::emoji::is_emoji_cluster;
use crate::tsv::content_lines;
use crate::{Error, Result};

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").expect("url regex"));
static MENTION_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").expect("mention regex"));

/// Settings for [`normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationConfig {
    /// أ إ آ → ا
    pub map_alef: bool,
    /// ة → ه
    pub map_taa: bool,
    /// ى → ي
    pub map_yaa: bool,
    /// Drops harakat, Quranic annotation marks and tatweel.
    pub strip_diacritics: bool,
    /// Runs of one letter longer than this are cut down to this length.
    pub squash_repeats_over: usize,
    pub replace_mentions_with: String,
    pub replace_urls_with: String,
    pub newline_to_space: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            map_alef: true,
            map_taa: true,
            map_yaa: true,
            strip_diacritics: true,
            squash_repeats_over: 2,
            replace_mentions_with: "@USER".into(),
            replace_urls_with: "URL".into(),
            newline_to_space: true,
        }
    }
}

impl NormalizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.squash_repeats_over < 2 {
            return Err(Error::invalid("squash_repeats_over must be at least 2"));
        }
        Ok(())
    }

    /// Flat `key=value` rendering, one setting per line.
    pub fn to_kv_text(&self) -> String {
        format!(
            "map_alef={}\nmap_taa={}\nmap_yaa={}\nstrip_diacritics={}\nsquash_repeats_over={}\n\
             replace_mentions_with={}\nreplace_urls_with={}\nnewline_to_space={}\n",
            self.map_alef,
            self.map_taa,
            self.map_yaa,
            self.strip_diacritics,
            self.squash_repeats_over,
            self.replace_mentions_with,
            self.replace_urls_with,
            self.newline_to_space
        )
    }

    /// Parses `key=value` lines on top of the defaults. Unknown keys are errors.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = NormalizationConfig::default();
        for (line, raw) in content_lines(text) {
            cfg.set(raw, line)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key=value` assignment.
    pub fn set(&mut self, assignment: &str, line: usize) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, got {assignment:?}")))?;
        let key = key.trim();
        let value = value.trim();
        let flag = |v: &str| -> Result<bool> {
            v.parse::<bool>()
                .map_err(|_| Error::parse(line, format!("{key}: expected true or false")))
        };
        match key {
            "map_alef" => self.map_alef = flag(value)?,
            "map_taa" => self.map_taa = flag(value)?,
            "map_yaa" => self.map_yaa = flag(value)?,
            "strip_diacritics" => self.strip_diacritics = flag(value)?,
            "newline_to_space" => self.newline_to_space = flag(value)?,
            "squash_repeats_over" => {
                self.squash_repeats_over = value
                    .parse()
                    .map_err(|_| Error::parse(line, format!("{key}: expected an integer")))?
            }
            "replace_mentions_with" => self.replace_mentions_with = value.to_owned(),
            "replace_urls_with" => self.replace_urls_with = value.to_owned(),
            other => return Err(Error::parse(line, format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Tokens that stand in for removed mentions and links.
    pub fn placeholders(&self) -> [&str; 2] {
        [
            self.replace_mentions_with.as_str(),
            self.replace_urls_with.as_str(),
        ]
    }
}

pub(crate) fn is_arabic_diacritic(c: char) -> bool {
    matches!(c,
        '\u{0610}'..='\u{061A}'
        | '\u{064B}'..='\u{065F}'
        | '\u{0670}'
        | '\u{06D6}'..='\u{06DC}'
        | '\u{06DF}'..='\u{06E8}'
        | '\u{06EA}'..='\u{06ED}'
        | '\u{0640}')
}

/// Maps one character according to the letter settings; `None` drops it.
fn map_char(c: char, cfg: &NormalizationConfig) -> Option<char> {
    match c {
        'أ' | 'إ' | 'آ' if cfg.map_alef => Some('ا'),
        'ة' if cfg.map_taa => Some('ه'),
        'ى' if cfg.map_yaa => Some('ي'),
        '\n' | '\r' if cfg.newline_to_space => Some(' '),
        c if cfg.strip_diacritics && is_arabic_diacritic(c) => None,
        c => Some(c),
    }
}

/// Normalizes `text`. The result is a fixed point: normalizing it again
/// returns it unchanged.
pub fn normalize(text: &str, cfg: &NormalizationConfig) -> String {
    let mut s: String = if cfg.newline_to_space {
        text.replace(['\n', '\r'], " ")
    } else {
        text.to_owned()
    };
    s = URL_RE
        .replace_all(&s, regex::NoExpand(&cfg.replace_urls_with))
        .into_owned();
    s = MENTION_RE
        .replace_all(&s, regex::NoExpand(&cfg.replace_mentions_with))
        .into_owned();
    let mapped: String = s.chars().filter_map(|c| map_char(c, cfg)).collect();
    squash_repeats(&mapped, cfg.squash_repeats_over.max(1))
}

/// Cuts runs of the same letter longer than `max_run` down to `max_run`.
/// Non-letters (digits, emoji, punctuation) are left alone.
pub fn squash_repeats(text: &str, max_run: usize) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    for c in text.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= max_run || !c.is_alphabetic() {
            out.push(c);
        }
    }
    out
}

fn is_word_grapheme(g: &str) -> bool {
    g.chars().any(|c| c.is_alphanumeric() || c == '_')
}

/// Splits on whitespace and punctuation. Each emoji cluster becomes its own
/// token; a leading `@` or `#` stays attached to the word that follows it.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut graphemes = text.graphemes(true).peekable();
    while let Some(g) = graphemes.next() {
        if is_emoji_cluster(g) {
            flush(&mut current, &mut tokens);
            tokens.push(g.to_owned());
        } else if is_word_grapheme(g) {
            current.push_str(g);
        } else if (g == "@" || g == "#")
            && current.is_empty()
            && graphemes
                .peek()
                .is_some_and(|next| is_word_grapheme(next) && !is_emoji_cluster(next))
        {
            current.push_str(g);
        } else {
            flush(&mut current, &mut tokens);
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
}

fn check_range(n_min: usize, n_max: usize) -> Result<()> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::invalid(format!(
            "invalid n-gram range [{n_min}, {n_max}]"
        )));
    }
    Ok(())
}

/// Contiguous word n-grams joined by a single space, with multiplicity.
pub fn word_ngrams<S: AsRef<str>>(tokens: &[S], n_min: usize, n_max: usize) -> Result<Vec<String>> {
    check_range(n_min, n_max)?;
    let mut out = Vec::new();
    for n in n_min..=n_max {
        for window in tokens.windows(n) {
            let gram: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
            out.push(gram.join(" "));
        }
    }
    Ok(out)
}

/// Contiguous character n-grams over Unicode scalar values, spaces included.
pub fn char_ngrams(text: &str, n_min: usize, n_max: usize) -> Result<Vec<String>> {
    check_range(n_min, n_max)?;
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    for n in n_min..=n_max {
        for window in chars.windows(n) {
            out.push(window.iter().collect());
        }
    }
    Ok(out)
}

/// Thresholds for duplicate and short-text removal.
#[derive(Debug, Clone, PartialEq)]
pub struct NearDupPolicy {
    /// Words per shingle.
    pub shingle_size: usize,
    pub jaccard_threshold: f64,
    /// Documents with fewer content tokens are dropped as short.
    pub min_tokens: usize,
}

impl Default for NearDupPolicy {
    fn default() -> Self {
        NearDupPolicy {
            shingle_size: 2,
            jaccard_threshold: 0.8,
            min_tokens: 3,
        }
    }
}

impl NearDupPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.jaccard_threshold > 0.0 && self.jaccard_threshold <= 1.0) {
            return Err(Error::invalid("jaccard_threshold must be in (0, 1]"));
        }
        if self.shingle_size == 0 {
            return Err(Error::invalid("shingle_size must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    Exact,
    Near,
    Short,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::Exact => "exact",
            DropReason::Near => "near",
            DropReason::Short => "short",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default)]
pub struct DedupOutcome {
    pub kept: Vec<Document>,
    pub dropped: Vec<(String, DropReason)>,
}

/// Normalized tokens with mention and link placeholders removed.
pub fn content_tokens(text: &str, cfg: &NormalizationConfig) -> Vec<String> {
    let placeholders = cfg.placeholders();
    tokenize(&normalize(text, cfg))
        .into_iter()
        .filter(|t| !placeholders.contains(&t.as_str()))
        .collect()
}

/// Word shingles of a token sequence. Sequences shorter than `k` yield one
/// shingle holding the whole sequence; an empty sequence yields none.
pub fn shingles<S: AsRef<str>>(tokens: &[S], k: usize) -> HashSet<String> {
    if tokens.is_empty() {
        return HashSet::new();
    }
    if tokens.len() < k {
        let all: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        return HashSet::from([all.join(" ")]);
    }
    tokens
        .windows(k)
        .map(|w| w.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" "))
        .collect()
}

/// Jaccard similarity of two sets; 0 when both are empty.
pub fn jaccard<T: Eq + std::hash::Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Left-to-right first-wins deduplication.
///
/// Each document is checked in order: an exact duplicate (same normalized
/// text as any earlier document) is dropped as `exact`; one with fewer than
/// `min_tokens` content tokens as `short`; one whose shingle Jaccard with any
/// kept document reaches the threshold as `near`. The result equals the
/// pairwise brute-force scan; an inverted shingle index only prunes pairs
/// with no shared shingle.
pub fn dedup(
    corpus: &[Document],
    policy: &NearDupPolicy,
    cfg: &NormalizationConfig,
) -> Result<DedupOutcome> {
    policy.validate()?;
    let mut out = DedupOutcome::default();
    let mut seen_exact: HashSet<String> = HashSet::new();
    let mut shingle_ids: HashMap<String, u32> = HashMap::new();
    // shingle id -> kept document indices
    let mut index: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut kept_sizes: Vec<usize> = Vec::new();

    for doc in corpus {
        let normalized = normalize(&doc.text, cfg);
        let key = normalized.split_whitespace().collect::<Vec<_>>().join(" ");
        if !seen_exact.insert(key) {
            out.dropped.push((doc.id.clone(), DropReason::Exact));
            continue;
        }
        let placeholders = cfg.placeholders();
        let tokens: Vec<String> = tokenize(&normalized)
            .into_iter()
            .filter(|t| !placeholders.contains(&t.as_str()))
            .collect();
        if tokens.len() < policy.min_tokens {
            out.dropped.push((doc.id.clone(), DropReason::Short));
            continue;
        }
        let ids: Vec<u32> = shingles(&tokens, policy.shingle_size)
            .into_iter()
            .map(|s| {
                let next = shingle_ids.len() as u32;
                *shingle_ids.entry(s).or_insert(next)
            })
            .collect();

        let mut overlap: HashMap<u32, usize> = HashMap::new();
        for id in &ids {
            if let Some(docs) = index.get(id) {
                for &k in docs {
                    *overlap.entry(k).or_default() += 1;
                }
            }
        }
        let is_near = overlap.iter().any(|(&k, &inter)| {
            let union = ids.len() + kept_sizes[k as usize] - inter;
            union > 0 && inter as f64 / union as f64 >= policy.jaccard_threshold
        });
        if is_near {
            out.dropped.push((doc.id.clone(), DropReason::Near));
            continue;
        }
        let k = kept_sizes.len() as u32;
        kept_sizes.push(ids.len());
        for id in ids {
            index.entry(id).or_default().push(k);
        }
        out.kept.push(doc.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn doc(id: &str, text: &str) -> Document {
        Document::new(id, text, Utc.timestamp_opt(0, 0).unwrap()).unwrap()
    }

    #[test]
    fn letter_maps() {
        let cfg = NormalizationConfig::default();
        assert_eq!(normalize("أمة", &cfg), "امه");
        assert_eq!(normalize("إآى", &cfg), "ااي");
        assert_eq!(normalize("", &cfg), "");
    }

    #[test]
    fn squash_keeps_two() {
        let cfg = NormalizationConfig::default();
        assert_eq!(normalize("خلللاص", &cfg), "خللاص");
        assert_eq!(squash_repeats("1000", 2), "1000");
        let three = NormalizationConfig {
            squash_repeats_over: 3,
            ..Default::default()
        };
        assert_eq!(normalize("هههههه", &three), "ههه");
    }

    #[test]
    fn mentions_and_urls() {
        let cfg = NormalizationConfig::default();
        assert_eq!(normalize("@someone http://x.y hi", &cfg), "@USER URL hi");
        assert_eq!(normalize("a\nb", &cfg), "a b");
    }

    #[test]
    fn diacritics_and_tatweel_stripped() {
        let cfg = NormalizationConfig::default();
        assert_eq!(normalize("كَلْبٌ", &cfg), "كلب");
        assert_eq!(normalize("كـــلب", &cfg), "كلب");
    }

    #[test]
    fn kv_round_trip() {
        let cfg = NormalizationConfig {
            map_taa: false,
            squash_repeats_over: 4,
            ..Default::default()
        };
        assert_eq!(NormalizationConfig::from_kv_text(&cfg.to_kv_text()).unwrap(), cfg);
        assert!(NormalizationConfig::from_kv_text("bogus=1").is_err());
        assert!(NormalizationConfig::from_kv_text("squash_repeats_over=1").is_err());
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("يا كلب🐷"), vec!["يا", "كلب", "🐷"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("a,b"), vec!["a", "b"]);
        assert_eq!(tokenize("@USER URL hi!"), vec!["@USER", "URL", "hi"]);
        assert_eq!(tokenize("🖕🏽🐷"), vec!["🖕🏽", "🐷"]);
        assert_eq!(tokenize("@ # ،؟"), Vec::<String>::new());
    }

    #[test]
    fn ngram_examples() {
        let mut w = word_ngrams(&["a", "b"], 1, 2).unwrap();
        w.sort();
        assert_eq!(w, vec!["a", "a b", "b"]);
        assert_eq!(char_ngrams("ab", 2, 2).unwrap(), vec!["ab"]);
        let mut c = char_ngrams("abc", 2, 3).unwrap();
        c.sort();
        assert_eq!(c, vec!["ab", "abc", "bc"]);
        assert!(char_ngrams("abc", 3, 2).is_err());
        assert!(word_ngrams(&["a"], 0, 1).is_err());
    }

    #[test]
    fn dedup_exact_and_short() {
        let cfg = NormalizationConfig::default();
        let docs = vec![
            doc("1", "one two three four"),
            doc("2", "one two three four"),
            doc("3", "يا 🐷"),
        ];
        let out = dedup(&docs, &NearDupPolicy::default(), &cfg).unwrap();
        assert_eq!(out.kept.len(), 1);
        assert_eq!(
            out.dropped,
            vec![("2".into(), DropReason::Exact), ("3".into(), DropReason::Short)]
        );
    }

    #[test]
    fn dedup_near_matches_brute_force_jaccard() {
        let cfg = NormalizationConfig::default();
        let base: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        for changed in 0..10 {
            let mut other = base.clone();
            other[changed] = "zz".into();
            let a = base.join(" ");
            let b = other.join(" ");
            let sim = jaccard(&shingles(&base, 2), &shingles(&other, 2));
            let out = dedup(&[doc("a", &a), doc("b", &b)], &NearDupPolicy::default(), &cfg).unwrap();
            let dropped = out.dropped.iter().any(|(id, r)| id == "b" && *r == DropReason::Near);
            assert_eq!(dropped, sim >= 0.8, "changed={changed} sim={sim}");
        }
    }

    #[test]
    fn mention_only_tokens_do_not_count() {
        let cfg = NormalizationConfig::default();
        let out = dedup(
            &[doc("1", "@a @b http://x.com word")],
            &NearDupPolicy::default(),
            &cfg,
        )
        .unwrap();
        assert_eq!(out.dropped, vec![("1".into(), DropReason::Short)]);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "[ا-ي أإآةى\u{064B}-\u{0652}ـ@#:/.a-z0-9 \n🐷]{0,40}") {
            let cfg = NormalizationConfig::default();
            let once = normalize(&s, &cfg);
            prop_assert_eq!(normalize(&once, &cfg), once.clone());
        }

        #[test]
        fn squashing_never_lengthens(s in "[ا-ي أإآةى\u{064B}-\u{0652}ـa-z0-9 \n]{0,40}", k in 2usize..5) {
            let cfg = NormalizationConfig { squash_repeats_over: k, ..Default::default() };
            prop_assert!(normalize(&s, &cfg).chars().count() <= s.chars().count());
        }

        #[test]
        fn word_ngram_count(tokens in proptest::collection::vec("[a-c]{1,3}", 0..12), n in 1usize..5) {
            let grams = word_ngrams(&tokens, n, n).unwrap();
            prop_assert_eq!(grams.len(), tokens.len().saturating_sub(n - 1));
        }

        #[test]
        fn tokens_are_never_empty(s in "\\PC{0,30}") {
            prop_assert!(tokenize(&s).iter().all(|t| !t.is_empty()));
        }
    }
}
