//! Alphabet and morpheme tokenization with an explicit space marker.
//!
//! Before splitting, every space (`U+0020`) of a sentence is represented by a
//! standalone marker token (default `▁`, `U+2581`) so that detokenization can
//! restore the spacing exactly. The alphabet scheme emits one token per
//! character, expanding Hangul syllables into compatibility jamo. The
//! morpheme scheme splits each space-delimited word with a [`Segmenter`].

use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::hangul;

pub const DEFAULT_SPACE_MARKER: char = '\u{2581}';

/// What to do when the input already contains the space marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Fail with [`TokenizeError::MarkerCollision`].
    #[default]
    Reject,
    /// Double every literal marker inside its token, so that `▁` alone is
    /// always a space and `▁▁` inside a token is one literal marker.
    Escape,
}

impl FromStr for Strictness {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reject" => Ok(Self::Reject),
            "escape" => Ok(Self::Escape),
            other => Err(ParseEnumError {
                kind: "strictness",
                value: other.to_owned(),
            }),
        }
    }
}

impl fmt::Display for Strictness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Reject => "reject",
            Self::Escape => "escape",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarkerConfig {
    pub space_marker: char,
    pub strictness: Strictness,
}

impl Default for MarkerConfig {
    fn default() -> Self {
        Self {
            space_marker: DEFAULT_SPACE_MARKER,
            strictness: Strictness::Reject,
        }
    }
}

impl MarkerConfig {
    pub fn with_marker(space_marker: char) -> Self {
        Self {
            space_marker,
            ..Self::default()
        }
    }

    fn marker_str(&self) -> String {
        self.space_marker.to_string()
    }

    fn is_marker_token(&self, token: &str) -> bool {
        let mut chars = token.chars();
        chars.next() == Some(self.space_marker) && chars.next().is_none()
    }

    fn escape_into(&self, piece: &str, out: &mut String) {
        for ch in piece.chars() {
            out.push(ch);
            if ch == self.space_marker {
                out.push(ch);
            }
        }
    }

    fn unescape_into(&self, token: &str, out: &mut String) {
        let mut chars = token.chars().peekable();
        while let Some(ch) = chars.next() {
            out.push(ch);
            if ch == self.space_marker && chars.peek() == Some(&self.space_marker) {
                chars.next();
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Alphabet,
    Morpheme,
    Bpe,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Alphabet, Scheme::Morpheme, Scheme::Bpe];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Alphabet => "alphabet",
            Self::Morpheme => "morpheme",
            Self::Bpe => "bpe",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|scheme| scheme.as_str() == s)
            .ok_or_else(|| ParseEnumError {
                kind: "scheme",
                value: s.to_owned(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} {value:?}")]
pub struct ParseEnumError {
    kind: &'static str,
    value: String,
}

/// A tokenized sentence tagged with the scheme that produced it.
///
/// Tokens are never empty and never contain a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSentence {
    scheme: Scheme,
    tokens: Vec<String>,
}

impl TokenizedSentence {
    /// Wraps tokens read back from a token file, dropping empty ones.
    pub fn from_tokens<I, S>(scheme: Scheme, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens = tokens
            .into_iter()
            .map(Into::into)
            .filter(|t: &String| !t.is_empty())
            .collect();
        Self { scheme, tokens }
    }

    /// Parses one line of a token file (tokens separated by single spaces).
    pub fn from_line(scheme: Scheme, line: &str) -> Self {
        Self::from_tokens(scheme, line.split(' '))
    }

    pub(crate) fn new_unchecked(scheme: Scheme, tokens: Vec<String>) -> Self {
        debug_assert!(tokens.iter().all(|t| !t.is_empty() && !t.contains(' ')));
        Self { scheme, tokens }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Tokens joined by single spaces, the token-file line format.
impl fmt::Display for TokenizedSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(token)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmenterFailure {
    #[error("segmenter `{name}` returned no morphemes for {word:?}")]
    NoMorphemes { name: String, word: String },
    #[error("segmenter `{name}` returned an empty morpheme for {word:?}")]
    EmptyMorpheme { name: String, word: String },
    #[error("segmenter `{name}` returned a morpheme with a space for {word:?}")]
    SpaceInMorpheme { name: String, word: String },
    #[error("segmenter `{name}`: {message}")]
    Protocol { name: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error("input already contains the marker {marker:?} at character {position}")]
    MarkerCollision { marker: String, position: usize },
    #[error("input contains a line break at character {position}")]
    LineBreak { position: usize },
    #[error(transparent)]
    Segmenter(#[from] SegmenterFailure),
}

/// Splits a single space-free word into morphemes.
pub trait Segmenter {
    fn name(&self) -> &str;

    /// Whether the morphemes of every word so far concatenated back to the
    /// word. Detokenization is exact only while this holds.
    fn surface_preserving(&self) -> bool;

    fn segment(&mut self, word: &str) -> Result<Vec<String>, SegmenterFailure>;
}

impl<S: Segmenter + ?Sized> Segmenter for &mut S {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn surface_preserving(&self) -> bool {
        (**self).surface_preserving()
    }

    fn segment(&mut self, word: &str) -> Result<Vec<String>, SegmenterFailure> {
        (**self).segment(word)
    }
}

impl<S: Segmenter + ?Sized> Segmenter for alloc::boxed::Box<S> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn surface_preserving(&self) -> bool {
        (**self).surface_preserving()
    }

    fn segment(&mut self, word: &str) -> Result<Vec<String>, SegmenterFailure> {
        (**self).segment(word)
    }
}

/// Built-in segmenter splitting at letter/digit vs. punctuation boundaries.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleSegmenter;

impl Segmenter for RuleSegmenter {
    fn name(&self) -> &str {
        "rule"
    }

    fn surface_preserving(&self) -> bool {
        true
    }

    fn segment(&mut self, word: &str) -> Result<Vec<String>, SegmenterFailure> {
        Ok(rule_segment(word)
            .into_iter()
            .map(ToOwned::to_owned)
            .collect())
    }
}

/// Returns every word as a single morpheme.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentitySegmenter;

impl Segmenter for IdentitySegmenter {
    fn name(&self) -> &str {
        "identity"
    }

    fn surface_preserving(&self) -> bool {
        true
    }

    fn segment(&mut self, word: &str) -> Result<Vec<String>, SegmenterFailure> {
        Ok(alloc::vec![word.to_owned()])
    }
}

/// Splits `word` into maximal runs of alphanumeric and of other characters.
///
/// The pieces always concatenate back to `word`.
pub fn rule_segment(word: &str) -> Vec<&str> {
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut current: Option<bool> = None;
    for (i, ch) in word.char_indices() {
        let class = ch.is_alphanumeric();
        if current.is_some_and(|c| c != class) {
            pieces.push(&word[start..i]);
            start = i;
        }
        current = Some(class);
    }
    if start < word.len() {
        pieces.push(&word[start..]);
    }
    pieces
}

fn check_input(sentence: &str, cfg: &MarkerConfig) -> Result<(), TokenizeError> {
    for (position, ch) in sentence.chars().enumerate() {
        if ch == '\n' || ch == '\r' {
            return Err(TokenizeError::LineBreak { position });
        }
        if ch == cfg.space_marker && cfg.strictness == Strictness::Reject {
            return Err(TokenizeError::MarkerCollision {
                marker: cfg.marker_str(),
                position,
            });
        }
    }
    Ok(())
}

/// Replaces every space with the marker.
pub fn mark_spaces(sentence: &str, cfg: &MarkerConfig) -> Result<String, TokenizeError> {
    check_input(sentence, cfg)?;
    let mut out = String::with_capacity(sentence.len());
    for ch in sentence.chars() {
        match ch {
            ' ' => out.push(cfg.space_marker),
            c if c == cfg.space_marker => {
                out.push(c);
                out.push(c);
            }
            c => out.push(c),
        }
    }
    Ok(out)
}

pub fn tokenize_alphabet(
    sentence: &str,
    cfg: &MarkerConfig,
) -> Result<TokenizedSentence, TokenizeError> {
    check_input(sentence, cfg)?;
    let marker = cfg.marker_str();
    let mut tokens = Vec::with_capacity(sentence.len());
    for ch in sentence.chars() {
        if ch == ' ' {
            tokens.push(marker.clone());
        } else if let Ok(triple) = hangul::decompose_syllable(ch) {
            tokens.extend(triple.jamo().map(String::from));
        } else if ch == cfg.space_marker {
            tokens.push(marker.repeat(2));
        } else {
            tokens.push(String::from(ch));
        }
    }
    Ok(TokenizedSentence::new_unchecked(Scheme::Alphabet, tokens))
}

/// Inverse of [`tokenize_alphabet`]: markers become spaces and jamo runs are
/// recomposed into syllables.
pub fn detokenize_alphabet<S: AsRef<str>>(tokens: &[S], cfg: &MarkerConfig) -> String {
    let mut flat = String::new();
    for token in tokens {
        let token = token.as_ref();
        if cfg.is_marker_token(token) {
            flat.push(' ');
        } else {
            cfg.unescape_into(token, &mut flat);
        }
    }
    hangul::compose_jamo(flat.chars())
}

/// Segments each space-delimited word, separating words with marker tokens.
///
/// Every space of the input yields exactly one marker token, independent of
/// the segmenter.
pub fn tokenize_morpheme<S: Segmenter + ?Sized>(
    sentence: &str,
    segmenter: &mut S,
    cfg: &MarkerConfig,
) -> Result<TokenizedSentence, TokenizeError> {
    check_input(sentence, cfg)?;
    let marker = cfg.marker_str();
    let mut tokens = Vec::new();
    for (i, word) in sentence.split(' ').enumerate() {
        if i > 0 {
            tokens.push(marker.clone());
        }
        if word.is_empty() {
            continue;
        }
        let morphemes = segmenter.segment(word)?;
        let failure = |make: fn(String, String) -> SegmenterFailure| {
            make(segmenter.name().to_owned(), word.to_owned())
        };
        if morphemes.is_empty() {
            return Err(failure(|name, word| SegmenterFailure::NoMorphemes { name, word }).into());
        }
        for morpheme in morphemes {
            if morpheme.is_empty() {
                return Err(
                    failure(|name, word| SegmenterFailure::EmptyMorpheme { name, word }).into(),
                );
            }
            if morpheme.contains(' ') {
                return Err(
                    failure(|name, word| SegmenterFailure::SpaceInMorpheme { name, word }).into(),
                );
            }
            if morpheme.contains(cfg.space_marker) {
                if cfg.strictness == Strictness::Reject {
                    // A lemmatizing segmenter may invent text the input never had.
                    return Err(TokenizeError::MarkerCollision {
                        marker: marker.clone(),
                        position: 0,
                    });
                }
                let mut escaped = String::with_capacity(morpheme.len() + marker.len());
                cfg.escape_into(&morpheme, &mut escaped);
                tokens.push(escaped);
            } else {
                tokens.push(morpheme);
            }
        }
    }
    Ok(TokenizedSentence::new_unchecked(Scheme::Morpheme, tokens))
}

/// Inverse of [`tokenize_morpheme`] for surface-preserving segmenters.
pub fn detokenize_morpheme<S: AsRef<str>>(tokens: &[S], cfg: &MarkerConfig) -> String {
    let mut out = String::new();
    for token in tokens {
        let token = token.as_ref();
        if cfg.is_marker_token(token) {
            out.push(' ');
        } else {
            cfg.unescape_into(token, &mut out);
        }
    }
    out
}
