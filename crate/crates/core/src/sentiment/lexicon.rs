//! Emoji sentiment lexicon: JSON-backed mapping from emoji sequences to
//! cosine-similarity scores in `[-1, 1]`.
//!
//! Lookup tries the exact codepoint sequence first, then falls back to a
//! normalized key with VS16 and skin-tone modifiers stripped. The bundled
//! lexicon covers the emoji the scoring model was anchored on.

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUNDLED_LEXICON: &str = include_str!("../../data/lexicon.json");

const VS16: char = '\u{FE0F}';

/// One lexicon row: an emoji key and its sentiment score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub emoji: String,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid lexicon JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate lexicon key {0:?}")]
    DuplicateKey(String),
    #[error("score {score} for {emoji:?} outside [-1, 1]")]
    ScoreOutOfRange { emoji: String, score: f64 },
    #[error("cannot write {path}: {source}")]
    Unwritable {
        path: String,
        source: std::io::Error,
    },
}

/// Strip VS16 and skin-tone modifiers for fallback lookup.
pub fn normalize_key(emoji: &str) -> String {
    emoji
        .chars()
        .filter(|&c| c != VS16 && !('\u{1F3FB}'..='\u{1F3FF}').contains(&c))
        .collect()
}

/// Immutable lexicon with exact and normalized lookup maps.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    exact: HashMap<String, f64>,
    normalized: HashMap<String, f64>,
}

impl Lexicon {
    pub fn from_entries(entries: Vec<LexiconEntry>) -> Result<Lexicon, LexiconError> {
        let mut exact = HashMap::with_capacity(entries.len());
        let mut normalized = HashMap::with_capacity(entries.len());
        for e in &entries {
            if !(-1.0..=1.0).contains(&e.score) || !e.score.is_finite() {
                return Err(LexiconError::ScoreOutOfRange {
                    emoji: e.emoji.clone(),
                    score: e.score,
                });
            }
            if exact.insert(e.emoji.clone(), e.score).is_some() {
                return Err(LexiconError::DuplicateKey(e.emoji.clone()));
            }
            // First occurrence wins on normalized collisions (exact entries
            // already take precedence at lookup time).
            normalized.entry(normalize_key(&e.emoji)).or_insert(e.score);
        }
        Ok(Lexicon {
            entries,
            exact,
            normalized,
        })
    }

    pub fn from_json(json: &str) -> Result<Lexicon, LexiconError> {
        let entries: Vec<LexiconEntry> = serde_json::from_str(json)?;
        Lexicon::from_entries(entries)
    }

    pub fn load(path: &Path) -> Result<Lexicon, LexiconError> {
        let body = std::fs::read_to_string(path).map_err(|source| LexiconError::Unreadable {
            path: path.display().to_string(),
            source,
        })?;
        Lexicon::from_json(&body)
    }

    /// The lexicon shipped with the crate.
    pub fn bundled() -> &'static Lexicon {
        static LEX: OnceLock<Lexicon> = OnceLock::new();
        LEX.get_or_init(|| Lexicon::from_json(BUNDLED_LEXICON).expect("bundled lexicon parses"))
    }

    /// Score for an emoji lexeme: exact sequence first, then the
    /// normalized fallback.
    pub fn score(&self, lexeme: &str) -> Option<f64> {
        self.exact
            .get(lexeme)
            .or_else(|| self.normalized.get(&normalize_key(lexeme)))
            .copied()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Canonical serialized form: pretty JSON, entry order preserved,
    /// trailing newline. `export(load(f)) == f` for canonical files.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.entries).expect("lexicon serializes");
        s.push('\n');
        s
    }

    pub fn export(&self, path: &Path) -> Result<(), LexiconError> {
        std::fs::write(path, self.to_canonical_json()).map_err(|source| {
            LexiconError::Unwritable {
                path: path.display().to_string(),
                source,
            }
        })
    }
}
