//! Vendored Unicode emoji tables.
//!
//! Emoji recognition is table-driven from a snapshot of the Unicode emoji
//! data files (Unicode Emoji 16.0), bundled with the crate in their
//! published plain-text format:
//!
//! - `emoji-data.txt` - per-scalar properties (Emoji, Emoji_Presentation,
//!   Emoji_Modifier, Emoji_Modifier_Base, Emoji_Component)
//! - `emoji-sequences.txt` - Basic_Emoji, keycaps, flags, tag and modifier
//!   sequences
//! - `emoji-zwj-sequences.txt` - RGI ZWJ sequences
//!
//! Tables are immutable after load and shareable across threads; the
//! bundled snapshot is parsed once into a process-wide static.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

const BUNDLED_DATA: &str = include_str!("../../data/unicode/emoji-data.txt");
const BUNDLED_SEQUENCES: &str = include_str!("../../data/unicode/emoji-sequences.txt");
const BUNDLED_ZWJ: &str = include_str!("../../data/unicode/emoji-zwj-sequences.txt");

#[derive(Debug, Error)]
pub enum EmojiDataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
}

/// Sorted, disjoint scalar-value ranges with binary-search membership.
#[derive(Debug, Default, Clone)]
struct CharSet {
    ranges: Vec<(u32, u32)>,
}

impl CharSet {
    fn insert_range(&mut self, lo: u32, hi: u32) {
        self.ranges.push((lo, hi));
    }

    fn finish(&mut self) {
        self.ranges.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(self.ranges.len());
        for &(lo, hi) in &self.ranges {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        self.ranges = merged;
    }

    fn contains(&self, c: char) -> bool {
        let v = c as u32;
        self.ranges
            .binary_search_by(|&(lo, hi)| {
                if v < lo {
                    std::cmp::Ordering::Greater
                } else if v > hi {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    fn len(&self) -> usize {
        self.ranges.iter().map(|&(lo, hi)| (hi - lo + 1) as usize).sum()
    }
}

/// Parsed emoji tables: per-scalar properties plus the full RGI sequence set.
#[derive(Debug)]
pub struct EmojiTables {
    emoji: CharSet,
    presentation: CharSet,
    modifier: CharSet,
    modifier_base: CharSet,
    component: CharSet,
    sequences: HashSet<Vec<char>>,
}

impl EmojiTables {
    /// Tables parsed from the bundled snapshot (panics only if the bundled
    /// files are corrupt, which the test suite rules out).
    pub fn bundled() -> &'static EmojiTables {
        static TABLES: OnceLock<EmojiTables> = OnceLock::new();
        TABLES.get_or_init(|| {
            EmojiTables::parse(BUNDLED_DATA, BUNDLED_SEQUENCES, BUNDLED_ZWJ, "<bundled>")
                .expect("bundled emoji tables parse")
        })
    }

    /// Load the three data files from `dir` (same filenames as the
    /// published Unicode set).
    pub fn from_dir(dir: &Path) -> Result<EmojiTables, EmojiDataError> {
        let read = |name: &str| -> Result<String, EmojiDataError> {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| EmojiDataError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        let data = read("emoji-data.txt")?;
        let seq = read("emoji-sequences.txt")?;
        let zwj = read("emoji-zwj-sequences.txt")?;
        EmojiTables::parse(&data, &seq, &zwj, &dir.display().to_string())
    }

    fn parse(
        data: &str,
        sequences: &str,
        zwj: &str,
        origin: &str,
    ) -> Result<EmojiTables, EmojiDataError> {
        let mut tables = EmojiTables {
            emoji: CharSet::default(),
            presentation: CharSet::default(),
            modifier: CharSet::default(),
            modifier_base: CharSet::default(),
            component: CharSet::default(),
            sequences: HashSet::new(),
        };

        for (lineno, line) in data.lines().enumerate() {
            let Some((field, prop)) = split_fields(line) else {
                continue;
            };
            let (lo, hi) = parse_range(field).ok_or_else(|| EmojiDataError::Parse {
                file: format!("{origin}/emoji-data.txt"),
                line: lineno + 1,
                msg: format!("bad code point field {field:?}"),
            })?;
            let set = match prop {
                "Emoji" => &mut tables.emoji,
                "Emoji_Presentation" => &mut tables.presentation,
                "Emoji_Modifier" => &mut tables.modifier,
                "Emoji_Modifier_Base" => &mut tables.modifier_base,
                "Emoji_Component" => &mut tables.component,
                other => {
                    return Err(EmojiDataError::Parse {
                        file: format!("{origin}/emoji-data.txt"),
                        line: lineno + 1,
                        msg: format!("unknown property {other:?}"),
                    })
                }
            };
            set.insert_range(lo, hi);
        }
        tables.emoji.finish();
        tables.presentation.finish();
        tables.modifier.finish();
        tables.modifier_base.finish();
        tables.component.finish();

        for (name, body) in [("emoji-sequences.txt", sequences), ("emoji-zwj-sequences.txt", zwj)] {
            for (lineno, line) in body.lines().enumerate() {
                let Some((field, _ty)) = split_fields(line) else {
                    continue;
                };
                if field.contains("..") {
                    // Range of single-scalar Basic_Emoji entries.
                    let (lo, hi) = parse_range(field).ok_or_else(|| EmojiDataError::Parse {
                        file: format!("{origin}/{name}"),
                        line: lineno + 1,
                        msg: format!("bad range {field:?}"),
                    })?;
                    for v in lo..=hi {
                        if let Some(c) = char::from_u32(v) {
                            tables.sequences.insert(vec![c]);
                        }
                    }
                } else {
                    let mut seq = Vec::new();
                    for tok in field.split_whitespace() {
                        let v = u32::from_str_radix(tok, 16).ok();
                        let c = v.and_then(char::from_u32).ok_or_else(|| {
                            EmojiDataError::Parse {
                                file: format!("{origin}/{name}"),
                                line: lineno + 1,
                                msg: format!("bad code point {tok:?}"),
                            }
                        })?;
                        seq.push(c);
                    }
                    tables.sequences.insert(seq);
                }
            }
        }

        Ok(tables)
    }

    pub fn is_emoji(&self, c: char) -> bool {
        self.emoji.contains(c)
    }

    pub fn is_presentation(&self, c: char) -> bool {
        self.presentation.contains(c)
    }

    pub fn is_modifier(&self, c: char) -> bool {
        self.modifier.contains(c)
    }

    pub fn is_modifier_base(&self, c: char) -> bool {
        self.modifier_base.contains(c)
    }

    pub fn is_component(&self, c: char) -> bool {
        self.component.contains(c)
    }

    /// Membership in the bundled RGI sequence set (singletons included).
    pub fn is_rgi_sequence(&self, codepoints: &[char]) -> bool {
        self.sequences.contains(codepoints)
    }

    /// Number of RGI sequence entries (useful as a load sanity check).
    pub fn sequence_count(&self) -> usize {
        self.sequences.len()
    }

    /// Number of scalars carrying the Emoji property.
    pub fn emoji_scalar_count(&self) -> usize {
        self.emoji.len()
    }
}

/// Split a data line into (code point field, first semicolon field),
/// dropping comments. Returns None for blank/comment lines.
fn split_fields(line: &str) -> Option<(&str, &str)> {
    let line = line.split('#').next().unwrap_or("");
    let mut parts = line.split(';');
    let field = parts.next()?.trim();
    let prop = parts.next()?.trim();
    if field.is_empty() || prop.is_empty() {
        return None;
    }
    Some((field, prop))
}

fn parse_range(field: &str) -> Option<(u32, u32)> {
    if let Some((a, b)) = field.split_once("..") {
        let lo = u32::from_str_radix(a.trim(), 16).ok()?;
        let hi = u32::from_str_radix(b.trim(), 16).ok()?;
        (lo <= hi).then_some((lo, hi))
    } else {
        let v = u32::from_str_radix(field.trim(), 16).ok()?;
        Some((v, v))
    }
}
