//! Emoji-anchored corpus engineering for offensive language and hate speech.
//!
//! The crate covers the whole collection-to-classifier path:
//!
//! * [`corpus`]: documents, layered labels and stratified splits.
//! * [`emoji`]: emoji sequence extraction, seed inventories, anchor filtering
//!   and per-emoji label statistics.
//! * [`normalize`]: Arabic-aware normalization, tokenization, n-grams and
//!   duplicate / near-duplicate / short-text filtering.
//! * [`lexicon`]: valence-score lexicon mining and hate-target distributions.
//! * [`violence`]: pattern matching over lexical classes with affix expansion.
//! * [`annotation`]: judgment aggregation, annotator gating and kappa.
//! * [`classifier`]: tf-idf n-gram features, a linear max-margin classifier,
//!   macro-averaged evaluation and perturbation-based explanations.
//! * [`synth`]: seeded synthetic corpora used by tests and demos.

pub mod annotation;
pub mod classifier;
pub mod corpus;
pub mod emoji;
mod error;
pub mod lexicon;
pub mod normalize;
pub mod synth;
pub mod tsv;
pub mod violence;

pub use error::{Error, Result};
