//! Per-emoji sentiment scoring and per-tweet aggregation.
//!
//! Each emoji gets a score in `[-1, 1]`: the cosine similarity between its
//! embedding and the embedding of the anchor token ("positive" in a
//! financially-optimistic context phrase). Scores come from the bundled
//! lexicon, or live from an embedding provider for emoji the lexicon does
//! not know. A tweet's score is the arithmetic mean over its scorable
//! emojis; unknown emojis are skipped rather than imputed.

mod lexicon;
mod provider;

pub use lexicon::{normalize_key, Lexicon, LexiconEntry, LexiconError};
pub use provider::{
    AnchorSpec, EmbeddingProvider, EmbeddingVector, HttpEmbeddingProvider, ProviderConfig,
    ProviderError,
};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::corpus::Tweet;
use crate::emoji::{extract_emojis, EmojiToken};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zero-norm vector")]
    ZeroNorm,
}

/// Cosine similarity of two equal-length, non-zero vectors.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, SentimentError> {
    if a.len() != b.len() {
        return Err(SentimentError::LengthMismatch(a.len(), b.len()));
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(SentimentError::ZeroNorm);
    }
    Ok(dot / (na.sqrt() * nb.sqrt()))
}

/// A tweet with its per-emoji scores and their mean.
#[derive(Debug, Clone)]
pub struct ScoredTweet {
    pub tweet: Tweet,
    /// Scorable emojis only, in extraction order.
    pub emoji_scores: Vec<(EmojiToken, f64)>,
    /// Mean over the scorable emojis; absent when none could be scored.
    pub mean_score: Option<f64>,
    /// Total emoji tokens extracted (scored or not).
    pub emoji_count: usize,
}

/// Distinct emoji counts over a token stream: raw lexemes vs normalized
/// keys (VS16/skin-tone folded).
pub fn distinct_emoji_counts<'a>(
    tokens: impl IntoIterator<Item = &'a EmojiToken>,
) -> (usize, usize) {
    let mut raw = std::collections::HashSet::new();
    let mut norm = std::collections::HashSet::new();
    for t in tokens {
        raw.insert(t.lexeme.clone());
        norm.insert(normalize_key(&t.lexeme));
    }
    (raw.len(), norm.len())
}

type ScoreKey = (String, String); // (emoji lexeme, context)

struct ProviderScorer {
    provider: Box<dyn EmbeddingProvider>,
    anchor: AnchorSpec,
    anchor_embedding: OnceLock<Option<EmbeddingVector>>,
    // One cell per key so a score is computed exactly once per run and
    // concurrent lookups of distinct keys do not serialize.
    cache: Mutex<HashMap<ScoreKey, Arc<OnceLock<Option<f64>>>>>,
    warnings: Mutex<Vec<String>>,
}

impl ProviderScorer {
    fn anchor_embedding(&self) -> Option<&EmbeddingVector> {
        self.anchor_embedding
            .get_or_init(|| {
                match self
                    .provider
                    .embed(&self.anchor.context_phrase, &self.anchor.target_token)
                {
                    Ok(v) => Some(v),
                    Err(e) => {
                        self.warn(format!("anchor embedding unavailable: {e}"));
                        None
                    }
                }
            })
            .as_ref()
    }

    fn warn(&self, message: String) {
        self.warnings.lock().expect("warnings lock").push(message);
    }

    fn score(&self, lexeme: &str, context: &str) -> Option<f64> {
        let key = (lexeme.to_string(), context.to_string());
        let cell = {
            let mut cache = self.cache.lock().expect("cache lock");
            Arc::clone(cache.entry(key).or_default())
        };
        *cell.get_or_init(|| {
            let anchor = self.anchor_embedding()?;
            match self.provider.embed(context, lexeme) {
                Ok(v) => match cosine_similarity(v.values(), anchor.values()) {
                    Ok(s) => Some(s),
                    Err(e) => {
                        self.warn(format!("cosine failed for {lexeme:?}: {e}"));
                        None
                    }
                },
                Err(e) => {
                    self.warn(format!("provider failed for {lexeme:?}: {e}"));
                    None
                }
            }
        })
    }
}

/// Assigns emoji scores from a lexicon, a provider, or both (lexicon hits
/// first, provider for the rest).
pub struct Scorer {
    lexicon: Option<Lexicon>,
    provider: Option<ProviderScorer>,
}

impl Scorer {
    /// Score from a lexicon only; unknown emojis stay unscored.
    pub fn lexicon(lexicon: Lexicon) -> Scorer {
        Scorer {
            lexicon: Some(lexicon),
            provider: None,
        }
    }

    /// Score with the bundled lexicon.
    pub fn bundled() -> Scorer {
        Scorer::lexicon(Lexicon::bundled().clone())
    }

    /// Add a provider consulted for emojis the lexicon misses.
    pub fn with_provider(mut self, provider: Box<dyn EmbeddingProvider>, anchor: AnchorSpec) -> Scorer {
        self.provider = Some(ProviderScorer {
            provider,
            anchor,
            anchor_embedding: OnceLock::new(),
            cache: Mutex::new(HashMap::new()),
            warnings: Mutex::new(Vec::new()),
        });
        self
    }

    /// Provider-only scorer.
    pub fn provider_only(provider: Box<dyn EmbeddingProvider>, anchor: AnchorSpec) -> Scorer {
        Scorer {
            lexicon: None,
            provider: None,
        }
        .with_provider(provider, anchor)
    }

    /// Warnings accumulated from provider failures during this run.
    pub fn warnings(&self) -> Vec<String> {
        self.provider
            .as_ref()
            .map(|p| p.warnings.lock().expect("warnings lock").clone())
            .unwrap_or_default()
    }

    /// Score one emoji occurrence within its tweet context. Returns None
    /// for unknown emojis when no provider can answer.
    pub fn score_emoji(&self, token: &EmojiToken, context: &str) -> Option<f64> {
        if let Some(lex) = &self.lexicon {
            if let Some(s) = lex.score(&token.lexeme) {
                return Some(s);
            }
        }
        self.provider
            .as_ref()
            .and_then(|p| p.score(&token.lexeme, context))
    }

    /// Extract and score every emoji in the tweet; the mean is over the
    /// scorable ones and absent when there are none.
    pub fn score_tweet(&self, tweet: &Tweet) -> ScoredTweet {
        let tokens = extract_emojis(&tweet.text);
        let emoji_count = tokens.len();
        let emoji_scores: Vec<(EmojiToken, f64)> = tokens
            .into_iter()
            .filter_map(|t| self.score_emoji(&t, &tweet.text).map(|s| (t, s)))
            .collect();
        let mean_score = if emoji_scores.is_empty() {
            None
        } else {
            Some(emoji_scores.iter().map(|(_, s)| s).sum::<f64>() / emoji_scores.len() as f64)
        };
        ScoredTweet {
            tweet: tweet.clone(),
            emoji_scores,
            mean_score,
            emoji_count,
        }
    }

    /// Score a batch of tweets; output order matches input order and is
    /// identical with and without the `parallel` feature.
    pub fn score_tweets(&self, tweets: &[Tweet]) -> Vec<ScoredTweet> {
        #[cfg(feature = "parallel")]
        {
            tweets.par_iter().map(|t| self.score_tweet(t)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            tweets.iter().map(|t| self.score_tweet(t)).collect()
        }
    }
}

/// Convenience: score one tweet with the bundled lexicon.
pub fn score_tweet(tweet: &Tweet) -> ScoredTweet {
    Scorer::bundled().score_tweet(tweet)
}
