//! Emoji extraction from Unicode text.
//!
//! The tokenizer walks scalar values left to right and emits maximal emoji
//! sequences following the UTS #51 possible-emoji grammar: a regional
//! indicator pair (or a lone regional indicator), a full keycap sequence,
//! or an emoji base with at most one modification (VS16, skin tone, or tag
//! run) joined to further elements by ZWJ. Two deliberate restrictions on
//! the raw grammar:
//!
//! - keycap bases (`#`, `*`, digits) are only emoji as the full keycap
//!   sequence `base VS16 U+20E3`; bare or half-formed keycaps are text
//! - a base followed by VS15 (text presentation selector) is text
//!
//! Extraction is intentionally more permissive than RGI membership: any
//! grammar-valid sequence is tokenized (`🚀\u{200D}🚀` is one token), while
//! [`is_emoji_sequence`] answers strict membership in the bundled RGI
//! tables.

mod tables;

pub use tables::{EmojiDataError, EmojiTables};

use std::ops::Range;

const ZWJ: char = '\u{200D}';
const VS15: char = '\u{FE0E}';
const VS16: char = '\u{FE0F}';
const KEYCAP: char = '\u{20E3}';
const TAG_TERM: char = '\u{E007F}';

/// One extracted emoji occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiToken {
    /// The scalar values making up the sequence.
    pub codepoints: Vec<char>,
    /// The exact source substring.
    pub lexeme: String,
    /// Position as `[start, end)` scalar-value indices into the source.
    pub span: Range<usize>,
}

fn is_ri(c: char) -> bool {
    ('\u{1F1E6}'..='\u{1F1FF}').contains(&c)
}

fn is_keycap_base(c: char) -> bool {
    c == '#' || c == '*' || c.is_ascii_digit()
}

fn is_tag_char(c: char) -> bool {
    ('\u{E0020}'..='\u{E007E}').contains(&c)
}

/// Extract all emoji tokens from `text` using the bundled tables.
pub fn extract_emojis(text: &str) -> Vec<EmojiToken> {
    extract_emojis_with(EmojiTables::bundled(), text)
}

/// Extract all emoji tokens from `text` using the given tables.
pub fn extract_emojis_with(tables: &EmojiTables, text: &str) -> Vec<EmojiToken> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match match_at(tables, &chars, i) {
            Some(len) => {
                let codepoints = chars[i..i + len].to_vec();
                tokens.push(EmojiToken {
                    lexeme: codepoints.iter().collect(),
                    codepoints,
                    span: i..i + len,
                });
                i += len;
            }
            None => i += 1,
        }
    }
    tokens
}

/// True iff `codepoints` form a well-formed emoji per the bundled RGI
/// sequence tables.
pub fn is_emoji_sequence(codepoints: &[char]) -> bool {
    is_emoji_sequence_with(EmojiTables::bundled(), codepoints)
}

/// [`is_emoji_sequence`] against caller-supplied tables.
pub fn is_emoji_sequence_with(tables: &EmojiTables, codepoints: &[char]) -> bool {
    !codepoints.is_empty() && tables.is_rgi_sequence(codepoints)
}

/// Length of the maximal emoji sequence starting at `i`, if any.
fn match_at(tables: &EmojiTables, chars: &[char], i: usize) -> Option<usize> {
    let c = chars[i];

    if is_ri(c) {
        // Regional indicators pair up greedily into flags; a lone indicator
        // is still an emoji-presentation symbol.
        if chars.get(i + 1).copied().is_some_and(is_ri) {
            return Some(2);
        }
        return Some(1);
    }

    if is_keycap_base(c) {
        if chars.get(i + 1) == Some(&VS16) && chars.get(i + 2) == Some(&KEYCAP) {
            return Some(3);
        }
        return None;
    }

    if !tables.is_emoji(c) {
        return None;
    }

    let mut end = element_end(tables, chars, i)?;
    while chars.get(end) == Some(&ZWJ) {
        match element_after_zwj(tables, chars, end + 1) {
            Some(next_end) => end = next_end,
            None => break,
        }
    }
    Some(end - i)
}

/// Consume one emoji element starting at the base `i`: the base plus at
/// most one modification (skin tone, VS16 with optional keycap, or a tag
/// run). Returns the exclusive end index, or None when VS15 forces text
/// presentation.
fn element_end(tables: &EmojiTables, chars: &[char], i: usize) -> Option<usize> {
    let mut j = i + 1;
    match chars.get(j) {
        Some(&VS15) => return None,
        Some(&VS16) => {
            j += 1;
            if chars.get(j) == Some(&KEYCAP) {
                j += 1;
            }
        }
        Some(&m) if tables.is_modifier(m) => j += 1,
        Some(&t) if is_tag_char(t) => {
            let mut k = j;
            while chars.get(k).copied().is_some_and(is_tag_char) {
                k += 1;
            }
            if chars.get(k) == Some(&TAG_TERM) {
                j = k + 1;
            }
            // Unterminated tag run: the base alone stays a token and the
            // tag characters are skipped as non-emoji text.
        }
        _ => {}
    }
    Some(j)
}

/// Validate and consume the element following a ZWJ. Keycap bases and
/// regional indicators never continue a ZWJ sequence.
fn element_after_zwj(tables: &EmojiTables, chars: &[char], p: usize) -> Option<usize> {
    let c = *chars.get(p)?;
    if is_ri(c) || is_keycap_base(c) || !tables.is_emoji(c) {
        return None;
    }
    element_end(tables, chars, p)
}
