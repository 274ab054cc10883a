//! Byte-pair encoding over characters.
//!
//! Learning works on space-free words without an end-of-word symbol, so a
//! merge never distinguishes word-final position. On output every subword but
//! the last of its word carries the continuation marker (`@@` by default):
//!
//! ```text
//! nice to meet  ->  ni@@ ce to me@@ et
//! ```

mod learn;
mod table;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::tokenize::{rule_segment, Scheme, TokenizedSentence};

pub use learn::{learn_bpe, learn_bpe_detailed, Learned};
pub use table::{MergeTable, MergeTableError};

use table::{merge_greedy, Symbol};

pub const DEFAULT_CONTINUATION_MARKER: &str = "@@";
pub const DEFAULT_NUM_MERGES: usize = 32_000;
pub const DEFAULT_MIN_PAIR_FREQUENCY: u64 = 2;

/// Tokens that attach to the preceding word when detokenizing pretokenized
/// output.
const CLOSING_PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', ')', ']', '}'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeConfig {
    pub num_merges: usize,
    pub continuation_marker: String,
    /// Split words at letter/punctuation boundaries before learning and
    /// applying. Detokenization is lossy in this mode.
    pub pretokenize: bool,
    pub min_pair_frequency: u64,
}

impl Default for BpeConfig {
    fn default() -> Self {
        Self {
            num_merges: DEFAULT_NUM_MERGES,
            continuation_marker: String::from(DEFAULT_CONTINUATION_MARKER),
            pretokenize: false,
            min_pair_frequency: DEFAULT_MIN_PAIR_FREQUENCY,
        }
    }
}

impl BpeConfig {
    pub fn validate(&self) -> Result<(), BpeError> {
        if self.continuation_marker.is_empty() {
            return Err(BpeError::Config("continuation marker is empty"));
        }
        if self.continuation_marker.chars().any(char::is_whitespace) {
            return Err(BpeError::Config("continuation marker contains whitespace"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BpeError {
    #[error("invalid BPE configuration: {0}")]
    Config(&'static str),
    #[error("word {word:?} already ends with the continuation marker {marker:?}")]
    MarkerCollision { word: String, marker: String },
    #[error("input contains a line break at character {position}")]
    LineBreak { position: usize },
}

/// Occurrence counts of space-free words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordFrequencyMap(BTreeMap<String, u64>);

impl WordFrequencyMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` occurrences of `word`; empty words and zero counts are
    /// ignored.
    pub fn add(&mut self, word: &str, count: u64) {
        if word.is_empty() || count == 0 {
            return;
        }
        match self.0.get_mut(word) {
            Some(c) => *c += count,
            None => {
                self.0.insert(String::from(word), count);
            }
        }
    }

    pub fn get(&self, word: &str) -> Option<u64> {
        self.0.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Words in byte order with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(w, &c)| (w.as_str(), c))
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

impl FromIterator<(String, u64)> for WordFrequencyMap {
    fn from_iter<T: IntoIterator<Item = (String, u64)>>(iter: T) -> Self {
        let mut map = Self::new();
        for (word, count) in iter {
            map.add(&word, count);
        }
        map
    }
}

/// Counts whitespace-separated words, optionally splitting each with
/// [`rule_segment`] first.
pub fn count_words<I, S>(lines: I, pretokenize: bool) -> WordFrequencyMap
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut map = WordFrequencyMap::new();
    for line in lines {
        for word in line.as_ref().split_whitespace() {
            if pretokenize {
                for piece in rule_segment(word) {
                    map.add(piece, 1);
                }
            } else {
                map.add(word, 1);
            }
        }
    }
    map
}

/// Adjacent character-pair counts weighted by word frequency.
pub fn count_pairs(words: &WordFrequencyMap) -> BTreeMap<(String, String), u64> {
    let mut counts = BTreeMap::new();
    for (word, freq) in words.iter() {
        let chars: Vec<char> = word.chars().collect();
        for w in chars.windows(2) {
            *counts
                .entry((String::from(w[0]), String::from(w[1])))
                .or_insert(0) += freq;
        }
    }
    counts
}

/// A run of the word being merged: symbol id and byte end offset.
#[derive(Debug, Clone, Copy)]
struct Span {
    id: u32,
    end: u32,
}

impl Symbol for Span {
    fn id(self) -> u32 {
        self.id
    }

    fn join(self, right: Self, merged: u32) -> Self {
        Span {
            id: merged,
            end: right.end,
        }
    }
}

/// Characters never seen by the table; no rule refers to this id.
const UNKNOWN: u32 = u32::MAX;

/// Splits a word into subwords by rank-greedy merging.
///
/// The subwords concatenate back to `word`.
pub fn apply_bpe_word<'a>(word: &'a str, table: &MergeTable) -> Vec<&'a str> {
    let mut buf = [0u8; 4];
    let mut spans: Vec<Span> = word
        .char_indices()
        .map(|(i, c)| Span {
            id: table.symbol_id(c.encode_utf8(&mut buf)).unwrap_or(UNKNOWN),
            end: (i + c.len_utf8()) as u32,
        })
        .collect();
    merge_greedy(&mut spans, |l, r| table.rule(l, r));
    let mut start = 0;
    spans
        .into_iter()
        .map(|span| {
            let piece = &word[start..span.end as usize];
            start = span.end as usize;
            piece
        })
        .collect()
}

/// Splits `sentence` into words and subwords, marking every subword but the
/// last of each word with the continuation marker.
pub fn tokenize_bpe(
    sentence: &str,
    table: &MergeTable,
    cfg: &BpeConfig,
) -> Result<TokenizedSentence, BpeError> {
    cfg.validate()?;
    if let Some(position) = sentence.chars().position(|c| c == '\n' || c == '\r') {
        return Err(BpeError::LineBreak { position });
    }
    let marker = cfg.continuation_marker.as_str();
    let mut tokens = Vec::new();
    let mut push_word = |word: &str| -> Result<(), BpeError> {
        if word.ends_with(marker) {
            return Err(BpeError::MarkerCollision {
                word: String::from(word),
                marker: String::from(marker),
            });
        }
        let subwords = apply_bpe_word(word, table);
        let last = subwords.len() - 1;
        for (i, subword) in subwords.into_iter().enumerate() {
            let mut token = String::with_capacity(subword.len() + marker.len());
            token.push_str(subword);
            if i < last {
                token.push_str(marker);
            }
            tokens.push(token);
        }
        Ok(())
    };
    for word in sentence.split(' ').filter(|w| !w.is_empty()) {
        if cfg.pretokenize {
            for piece in rule_segment(word) {
                push_word(piece)?;
            }
        } else {
            push_word(word)?;
        }
    }
    Ok(TokenizedSentence::new_unchecked(Scheme::Bpe, tokens))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeDetokenized {
    pub text: String,
    /// The final token ended with the continuation marker, which was dropped.
    pub dangling_marker: bool,
}

/// Joins continued subwords and separates words with single spaces.
///
/// With `cfg.pretokenize`, closing punctuation attaches to the preceding
/// token.
pub fn detokenize_bpe<S: AsRef<str>>(tokens: &[S], cfg: &BpeConfig) -> BpeDetokenized {
    let marker = cfg.continuation_marker.as_str();
    let mut text = String::new();
    let mut dangling_marker = false;
    for (i, token) in tokens.iter().enumerate() {
        let token = token.as_ref();
        let next = tokens.get(i + 1).map(AsRef::as_ref);
        if let Some(stem) = token.strip_suffix(marker).filter(|_| !marker.is_empty()) {
            text.push_str(stem);
            dangling_marker = next.is_none();
            continue;
        }
        text.push_str(token);
        if let Some(next) = next {
            let attaches = cfg.pretokenize && next.starts_with(CLOSING_PUNCTUATION);
            if !attaches {
                text.push(' ');
            }
        }
    }
    BpeDetokenized {
        text,
        dangling_marker,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(pairs: &[(&str, &str)]) -> MergeTable {
        MergeTable::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn table_one() -> MergeTable {
        table(&[("m", "e"), ("e", "t"), ("n", "i"), ("c", "e")])
    }

    #[test]
    fn count_words_examples() {
        let wf = count_words(["a b", "a"], false);
        assert_eq!(wf.iter().collect::<Vec<_>>(), [("a", 2), ("b", 1)]);
        let wf = count_words(["you."], true);
        assert_eq!(wf.iter().collect::<Vec<_>>(), [(".", 1), ("you", 1)]);
        let wf = count_words(["aaab aaab ab"], false);
        assert_eq!(wf.iter().collect::<Vec<_>>(), [("aaab", 2), ("ab", 1)]);
    }

    #[test]
    fn count_pairs_examples() {
        let wf: WordFrequencyMap = [("aaab".into(), 2), ("ab".into(), 1)].into_iter().collect();
        let pairs = count_pairs(&wf);
        assert_eq!(
            pairs.into_iter().collect::<Vec<_>>(),
            [(("a".into(), "a".into()), 4), (("a".into(), "b".into()), 3)]
        );
        let wf: WordFrequencyMap = [("ab".into(), 1)].into_iter().collect();
        assert_eq!(count_pairs(&wf).len(), 1);
        let wf: WordFrequencyMap = [("a".into(), 5)].into_iter().collect();
        assert!(count_pairs(&wf).is_empty());
    }

    #[test]
    fn apply_examples() {
        assert_eq!(
            apply_bpe_word("meet", &table(&[("m", "e"), ("e", "t")])),
            ["me", "et"]
        );
        assert_eq!(
            apply_bpe_word("nice", &table(&[("n", "i"), ("c", "e")])),
            ["ni", "ce"]
        );
        assert_eq!(apply_bpe_word("x", &table_one()), ["x"]);
        assert_eq!(apply_bpe_word("aaa", &table(&[("a", "a")])), ["aa", "a"]);
        assert_eq!(
            apply_bpe_word("aaaa", &table(&[("a", "a"), ("aa", "aa")])),
            ["aaaa"]
        );
    }

    #[test]
    fn apply_follows_rank_not_position() {
        // (b,c) outranks (a,b), so "abc" never forms "ab".
        let t = table(&[("b", "c"), ("a", "b")]);
        assert_eq!(apply_bpe_word("abc", &t), ["a", "bc"]);
    }

    #[test]
    fn table_one_english() {
        let cfg = BpeConfig {
            pretokenize: true,
            ..BpeConfig::default()
        };
        // Words without a listed pair stay split into characters.
        let ts = tokenize_bpe("nice to meet you.", &table_one(), &cfg).unwrap();
        assert_eq!(ts.to_string(), "ni@@ ce t@@ o me@@ et y@@ o@@ u .");

        let mut full = table_one();
        for (l, r) in [("t", "o"), ("y", "o"), ("yo", "u")] {
            full.push(l.into(), r.into()).unwrap();
        }
        let ts = tokenize_bpe("nice to meet you.", &full, &cfg).unwrap();
        assert_eq!(ts.to_string(), "ni@@ ce to me@@ et you .");
        assert_eq!(detokenize_bpe(ts.tokens(), &cfg).text, "nice to meet you.");
    }

    #[test]
    fn korean_raw_mode() {
        let t = table(&[("안", "녕")]);
        let ts = tokenize_bpe("안녕하세요.", &t, &BpeConfig::default()).unwrap();
        assert_eq!(ts.tokens(), ["안녕@@", "하@@", "세@@", "요@@", "."]);
        assert_eq!(
            detokenize_bpe(ts.tokens(), &BpeConfig::default()).text,
            "안녕하세요."
        );
    }

    #[test]
    fn empty_table() {
        let ts = tokenize_bpe("a b", &MergeTable::new(), &BpeConfig::default()).unwrap();
        assert_eq!(ts.tokens(), ["a", "b"]);
    }

    #[test]
    fn detokenize_examples() {
        let cfg = BpeConfig::default();
        let out = detokenize_bpe(&["ni@@", "ce", "to", "me@@", "et", "you"], &cfg);
        assert_eq!(
            out,
            BpeDetokenized {
                text: "nice to meet you".into(),
                dangling_marker: false
            }
        );
        assert_eq!(detokenize_bpe(&["a"], &cfg).text, "a");
        assert_eq!(
            detokenize_bpe(&["a@@"], &cfg),
            BpeDetokenized {
                text: "a".into(),
                dangling_marker: true
            }
        );
        assert_eq!(detokenize_bpe::<&str>(&[], &cfg).text, "");
    }

    #[test]
    fn raw_mode_keeps_punctuation_spacing() {
        let cfg = BpeConfig::default();
        let ts = tokenize_bpe("a . b", &MergeTable::new(), &cfg).unwrap();
        assert_eq!(detokenize_bpe(ts.tokens(), &cfg).text, "a . b");
    }

    #[test]
    fn marker_collision() {
        let cfg = BpeConfig::default();
        let err = tokenize_bpe("mail x@@", &MergeTable::new(), &cfg).unwrap_err();
        assert_eq!(
            err,
            BpeError::MarkerCollision {
                word: "x@@".into(),
                marker: "@@".into()
            }
        );
        // An interior marker survives the round trip.
        let ts = tokenize_bpe("a@@b c@", &MergeTable::new(), &cfg).unwrap();
        assert_eq!(detokenize_bpe(ts.tokens(), &cfg).text, "a@@b c@");
    }

    #[test]
    fn config_validation() {
        let bad = BpeConfig {
            continuation_marker: String::new(),
            ..BpeConfig::default()
        };
        assert!(tokenize_bpe("a", &MergeTable::new(), &bad).is_err());
        let bad = BpeConfig {
            continuation_marker: "@ @".into(),
            ..BpeConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(BpeConfig::default().num_merges, 32_000);
        assert_eq!(BpeConfig::default().min_pair_frequency, 2);
    }
}
