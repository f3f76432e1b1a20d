//! Verb/object patterns for violent content over lexical classes.
//!
//! Class members are stems; before matching, each stem is expanded with a
//! closed affix table (conjunctions, tense and person prefixes for verbs,
//! article/preposition prefixes and attached pronouns for nouns). All forms
//! are normalized the same way as documents, so matching is plain set lookup
//! over normalized tokens.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::normalize::{normalize, tokenize, NormalizationConfig};
use crate::tsv::{self, content_lines};
use crate::{Error, Result};

pub const DEFAULT_CLASSES_TSV: &str = include_str!("../data/violence_classes.tsv");
pub const DEFAULT_RULES_TSV: &str = include_str!("../data/violence_rules.tsv");

/// Words standing for "on" between a hit noun and a body part.
const ON_WORDS: [&str; 3] = ["على", "ع", "فوق"];

fn norm_form(s: &str) -> String {
    normalize(s, &NormalizationConfig::default())
}

/// Named set of normalized stems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalClass {
    pub name: String,
    pub members: BTreeSet<String>,
}

impl LexicalClass {
    pub fn new<I, S>(name: impl Into<String>, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let members: BTreeSet<String> = members
            .into_iter()
            .map(|m| norm_form(m.as_ref().trim()))
            .filter(|m| !m.is_empty())
            .collect();
        if members.is_empty() {
            return Err(Error::invalid(format!("class {name:?} has no members")));
        }
        Ok(LexicalClass { name, members })
    }

    /// Verb classes are expanded with verb affixes, everything else as nouns.
    pub fn kind(&self) -> StemKind {
        if self.name.starts_with("verb_") {
            StemKind::Verb
        } else {
            StemKind::Noun
        }
    }
}

/// A class inventory keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassSet {
    classes: BTreeMap<String, LexicalClass>,
}

impl ClassSet {
    pub fn new(classes: impl IntoIterator<Item = LexicalClass>) -> Result<Self> {
        let mut out = ClassSet::default();
        for c in classes {
            if out.classes.contains_key(&c.name) {
                return Err(Error::invalid(format!("class {:?} defined twice", c.name)));
            }
            out.classes.insert(c.name.clone(), c);
        }
        out.check()?;
        Ok(out)
    }

    fn check(&self) -> Result<()> {
        if let (Some(head), Some(body)) = (self.classes.get("head"), self.classes.get("body")) {
            if !head.members.is_subset(&body.members) {
                return Err(Error::invalid("class body must include every head member"));
            }
        }
        Ok(())
    }

    /// Parses `class<TAB>member,member,...` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut classes = Vec::new();
        for (line, raw) in content_lines(text) {
            let (name, members) = raw
                .split_once('\t')
                .ok_or_else(|| Error::parse(line, "expected class<TAB>members"))?;
            classes.push(
                LexicalClass::new(name.trim(), members.split(','))
                    .map_err(|e| Error::parse(line, e.to_string()))?,
            );
        }
        Self::new(classes)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&tsv::read_to_string(path)?)
    }

    pub fn default_classes() -> Self {
        Self::parse(DEFAULT_CLASSES_TSV).expect("bundled classes parse")
    }

    pub fn get(&self, name: &str) -> Option<&LexicalClass> {
        self.classes.get(name)
    }

    /// Adds a stem to a class, creating the class if needed.
    pub fn add_member(&mut self, class: &str, stem: &str) -> Result<()> {
        let stem = norm_form(stem.trim());
        if stem.is_empty() {
            return Err(Error::invalid("empty stem"));
        }
        self.classes
            .entry(class.to_owned())
            .or_insert_with(|| LexicalClass {
                name: class.to_owned(),
                members: BTreeSet::new(),
            })
            .members
            .insert(stem.clone());
        if class == "head" {
            if let Some(body) = self.classes.get_mut("body") {
                body.members.insert(stem);
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &LexicalClass> {
        self.classes.values()
    }

    pub fn to_tsv(&self) -> String {
        self.classes
            .values()
            .map(|c| {
                let members: Vec<&str> = c.members.iter().map(String::as_str).collect();
                format!("{}\t{}\n", c.name, members.join(","))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StemKind {
    Verb,
    Noun,
}

/// Affix inventory used to generate surface forms from stems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTable {
    /// Imperfect person markers; a verb stem starting with one of them gets
    /// every other one swapped in.
    pub person_prefixes: BTreeSet<String>,
    /// Tense markers prepended to verbs (future / progressive).
    pub tense_prefixes: BTreeSet<String>,
    /// Conjunctions, prepended alone or before a tense marker.
    pub conjunctions: BTreeSet<String>,
    /// Object pronouns attached to verbs.
    pub verb_suffixes: BTreeSet<String>,
    pub noun_prefixes: BTreeSet<String>,
    /// Possessive pronouns attached to nouns.
    pub noun_suffixes: BTreeSet<String>,
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| norm_form(s)).collect()
}

impl Default for ExpansionTable {
    fn default() -> Self {
        ExpansionTable {
            person_prefixes: set(&["أ", "ن", "ت", "ي"]),
            tense_prefixes: set(&["س", "ب", "ح"]),
            conjunctions: set(&["و", "ف"]),
            verb_suffixes: set(&["ك", "كم", "كن", "كي", "ه", "ها", "هم", "ني", "نا"]),
            noun_prefixes: set(&["و", "ف", "ب", "ال", "بال", "عال", "وال", "فال"]),
            noun_suffixes: set(&["ك", "كم", "كن", "ه", "ها", "هم", "ي", "نا"]),
        }
    }
}

impl ExpansionTable {
    /// A table that generates nothing beyond the stem itself.
    pub fn identity() -> Self {
        ExpansionTable {
            person_prefixes: BTreeSet::new(),
            tense_prefixes: BTreeSet::new(),
            conjunctions: BTreeSet::new(),
            verb_suffixes: BTreeSet::new(),
            noun_prefixes: BTreeSet::new(),
            noun_suffixes: BTreeSet::new(),
        }
    }

    fn verb_prefix_chains(&self) -> Vec<String> {
        let mut out = vec![String::new()];
        out.extend(self.tense_prefixes.iter().cloned());
        for c in &self.conjunctions {
            out.push(c.clone());
            out.extend(self.tense_prefixes.iter().map(|t| format!("{c}{t}")));
        }
        out
    }
}

/// Surface forms of a stem. Always contains the normalized stem.
pub fn expand(stem: &str, table: &ExpansionTable, kind: StemKind) -> BTreeSet<String> {
    let stem = norm_form(stem);
    let mut out = BTreeSet::new();
    if stem.is_empty() {
        return out;
    }
    match kind {
        StemKind::Verb => {
            let mut bases = BTreeSet::from([stem.clone()]);
            if let Some(first) = stem.chars().next() {
                let first = first.to_string();
                if table.person_prefixes.contains(&first) {
                    let rest = &stem[first.len()..];
                    bases.extend(table.person_prefixes.iter().map(|p| format!("{p}{rest}")));
                }
            }
            for chain in table.verb_prefix_chains() {
                out.extend(bases.iter().map(|b| format!("{chain}{b}")));
            }
        }
        StemKind::Noun => {
            let mut suffixed = BTreeSet::from([stem.clone()]);
            for s in &table.noun_suffixes {
                suffixed.insert(format!("{stem}{s}"));
                // taa marbuta surfaces as ت once a pronoun is attached
                if let Some(body) = stem.strip_suffix('ه') {
                    suffixed.insert(format!("{body}ت{s}"));
                }
            }
            out.extend(suffixed.iter().cloned());
            for p in &table.noun_prefixes {
                out.extend(suffixed.iter().map(|f| format!("{p}{f}")));
            }
        }
    }
    out
}

/// Pattern shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// A verb followed within `max_gap` tokens by an object.
    VThenO,
    /// A hit noun, an "on" word, then a body part.
    HitnounOnBody,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::VThenO => "V_then_O",
            Shape::HitnounOnBody => "HITNOUN_ON_BODY",
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "V_then_O" => Ok(Shape::VThenO),
            "HITNOUN_ON_BODY" => Ok(Shape::HitnounOnBody),
            other => Err(Error::invalid(format!("unknown pattern shape {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRule {
    pub name: String,
    pub shape: Shape,
    pub verb_class: String,
    pub object_classes: BTreeSet<String>,
    pub max_gap: usize,
}

impl PatternRule {
    pub fn parse_all(text: &str) -> Result<Vec<PatternRule>> {
        let mut rules = Vec::new();
        for (line, raw) in content_lines(text) {
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 5 {
                return Err(Error::parse(
                    line,
                    "expected name<TAB>shape<TAB>verb_class<TAB>object_classes<TAB>max_gap",
                ));
            }
            let object_classes: BTreeSet<String> = cols[3]
                .split(',')
                .map(|c| c.trim().to_owned())
                .filter(|c| !c.is_empty())
                .collect();
            if object_classes.is_empty() {
                return Err(Error::parse(line, "rule needs at least one object class"));
            }
            rules.push(PatternRule {
                name: cols[0].trim().to_owned(),
                shape: cols[1].trim().parse().map_err(|e: Error| Error::parse(line, e.to_string()))?,
                verb_class: cols[2].trim().to_owned(),
                object_classes,
                max_gap: cols[4]
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad max_gap {:?}", cols[4])))?,
            });
        }
        Ok(rules)
    }

    pub fn load_all(path: &Path) -> Result<Vec<PatternRule>> {
        Self::parse_all(&tsv::read_to_string(path)?)
    }

    pub fn default_rules() -> Vec<PatternRule> {
        Self::parse_all(DEFAULT_RULES_TSV).expect("bundled rules parse")
    }
}

/// One rule firing on a token range `start..end`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ViolenceMatch {
    pub rule: String,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for ViolenceMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}..{}]", self.rule, self.start, self.end)
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    name: String,
    shape: Shape,
    max_gap: usize,
    anchors: HashSet<String>,
    /// Verb forms carrying an object pronoun; only for rules taking humans.
    anchors_with_object: HashSet<String>,
    objects: HashSet<String>,
}

/// Rules compiled against a class inventory and affix table.
#[derive(Debug, Clone)]
pub struct ViolenceMatcher {
    rules: Vec<CompiledRule>,
}

fn expand_class(class: &LexicalClass, table: &ExpansionTable) -> HashSet<String> {
    class
        .members
        .iter()
        .flat_map(|m| expand(m, table, class.kind()))
        .collect()
}

impl ViolenceMatcher {
    pub fn compile(rules: &[PatternRule], classes: &ClassSet, table: &ExpansionTable) -> Result<Self> {
        let lookup = |rule: &PatternRule, name: &str| {
            classes.get(name).ok_or_else(|| {
                Error::invalid(format!("rule {:?} references unknown class {name:?}", rule.name))
            })
        };
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in rules {
            let verb = lookup(rule, &rule.verb_class)?;
            let anchors = expand_class(verb, table);
            let mut objects = HashSet::new();
            for name in &rule.object_classes {
                objects.extend(expand_class(lookup(rule, name)?, table));
            }
            let anchors_with_object = if rule.shape == Shape::VThenO
                && rule.object_classes.contains("human")
            {
                anchors
                    .iter()
                    .flat_map(|a| table.verb_suffixes.iter().map(move |s| format!("{a}{s}")))
                    .collect()
            } else {
                HashSet::new()
            };
            compiled.push(CompiledRule {
                name: rule.name.clone(),
                shape: rule.shape,
                max_gap: rule.max_gap,
                anchors,
                anchors_with_object,
                objects,
            });
        }
        Ok(ViolenceMatcher { rules: compiled })
    }

    pub fn default_matcher() -> Self {
        Self::compile(
            &PatternRule::default_rules(),
            &ClassSet::default_classes(),
            &ExpansionTable::default(),
        )
        .expect("bundled rules compile")
    }

    /// Matches over normalized tokens. Results are sorted and contain each
    /// `(rule, span)` at most once.
    pub fn match_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<ViolenceMatch> {
        let tokens: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        let mut found = BTreeSet::new();
        for rule in &self.rules {
            for (i, tok) in tokens.iter().enumerate() {
                let window = (i + 1)..tokens.len().min(i + 2 + rule.max_gap);
                match rule.shape {
                    Shape::VThenO => {
                        if rule.anchors_with_object.contains(*tok) {
                            found.insert((rule.name.clone(), i, i + 1));
                        }
                        if !rule.anchors.contains(*tok) && !rule.anchors_with_object.contains(*tok) {
                            continue;
                        }
                        for j in window {
                            if rule.objects.contains(tokens[j]) {
                                found.insert((rule.name.clone(), i, j + 1));
                            }
                        }
                    }
                    Shape::HitnounOnBody => {
                        if !rule.anchors.contains(*tok) {
                            continue;
                        }
                        for j in window {
                            let on = ON_WORDS.iter().any(|w| norm_form(w) == tokens[j]);
                            if on && j + 1 < tokens.len() && rule.objects.contains(tokens[j + 1]) {
                                found.insert((rule.name.clone(), i, j + 2));
                            } else if tokens[j].starts_with("عال") && rule.objects.contains(tokens[j]) {
                                found.insert((rule.name.clone(), i, j + 1));
                            }
                        }
                    }
                }
            }
        }
        let mut out: Vec<ViolenceMatch> = found
            .into_iter()
            .map(|(rule, start, end)| ViolenceMatch { rule, start, end })
            .collect();
        out.sort_by(|a, b| (a.start, a.end, &a.rule).cmp(&(b.start, b.end, &b.rule)));
        out
    }

    /// Normalizes and tokenizes `text`, then matches.
    pub fn match_text(&self, text: &str, norm: &NormalizationConfig) -> Vec<ViolenceMatch> {
        self.match_tokens(&tokenize(&normalize(text, norm)))
    }
}

/// Convenience wrapper compiling `rules` for a single text.
pub fn match_violence(
    text: &str,
    rules: &[PatternRule],
    classes: &ClassSet,
    table: &ExpansionTable,
) -> Result<Vec<ViolenceMatch>> {
    let matcher = ViolenceMatcher::compile(rules, classes, table)?;
    Ok(matcher.match_text(text, &NormalizationConfig::default()))
}
