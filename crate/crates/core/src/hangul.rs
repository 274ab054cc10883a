//! Conversion between precomposed Hangul syllables and compatibility jamo.
//!
//! A precomposed syllable in `U+AC00..=U+D7A3` encodes a (lead, vowel, tail)
//! triple arithmetically:
//!
//! ```text
//! codepoint = 0xAC00 + (lead * 21 + vowel) * 28 + tail
//! ```
//!
//! Decomposition renders each slot as a *compatibility* jamo (`U+3131..`),
//! where an initial and a final consonant of the same shape share one
//! codepoint and compound tails such as `ㄳ` are a single character.
//! [`compose_jamo`] inverts the per-character decomposition of any text that
//! does not itself contain standalone compatibility jamo.

use alloc::string::String;

use thiserror::Error;

/// First precomposed syllable, `가`.
pub const SYLLABLE_BASE: u32 = 0xAC00;
/// Last precomposed syllable, `힣`.
pub const SYLLABLE_LAST: u32 = 0xD7A3;
/// Number of precomposed syllables.
pub const SYLLABLE_COUNT: u32 = LEAD_COUNT * VOWEL_COUNT * TAIL_COUNT;

pub const LEAD_COUNT: u32 = 19;
pub const VOWEL_COUNT: u32 = 21;
/// Tail slots including the empty tail at index 0.
pub const TAIL_COUNT: u32 = 28;

/// Compatibility jamo for each lead index.
pub const LEAD_CHARS: [char; 19] = [
    'ㄱ', 'ㄲ', 'ㄴ', 'ㄷ', 'ㄸ', 'ㄹ', 'ㅁ', 'ㅂ', 'ㅃ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅉ', 'ㅊ', 'ㅋ',
    'ㅌ', 'ㅍ', 'ㅎ',
];

/// Compatibility jamo for each vowel index.
pub const VOWEL_CHARS: [char; 21] = [
    'ㅏ', 'ㅐ', 'ㅑ', 'ㅒ', 'ㅓ', 'ㅔ', 'ㅕ', 'ㅖ', 'ㅗ', 'ㅘ', 'ㅙ', 'ㅚ', 'ㅛ', 'ㅜ', 'ㅝ', 'ㅞ',
    'ㅟ', 'ㅠ', 'ㅡ', 'ㅢ', 'ㅣ',
];

/// Compatibility jamo for tail indices `1..28` (entry `i` is tail `i + 1`).
pub const TAIL_CHARS: [char; 27] = [
    'ㄱ', 'ㄲ', 'ㄳ', 'ㄴ', 'ㄵ', 'ㄶ', 'ㄷ', 'ㄹ', 'ㄺ', 'ㄻ', 'ㄼ', 'ㄽ', 'ㄾ', 'ㄿ', 'ㅀ', 'ㅁ',
    'ㅂ', 'ㅄ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅊ', 'ㅋ', 'ㅌ', 'ㅍ', 'ㅎ',
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{0:?} (U+{code:04X}) is not a precomposed Hangul syllable", code = *.0 as u32)]
pub struct NotHangulSyllable(pub char);

/// Slot indices of one precomposed syllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JamoTriple {
    lead: u8,
    vowel: u8,
    tail: u8,
}

impl JamoTriple {
    /// Builds a triple from raw indices, or `None` if any is out of range.
    pub fn new(lead: u32, vowel: u32, tail: u32) -> Option<Self> {
        if lead < LEAD_COUNT && vowel < VOWEL_COUNT && tail < TAIL_COUNT {
            Some(Self {
                lead: lead as u8,
                vowel: vowel as u8,
                tail: tail as u8,
            })
        } else {
            None
        }
    }

    pub fn lead_index(self) -> u32 {
        u32::from(self.lead)
    }

    pub fn vowel_index(self) -> u32 {
        u32::from(self.vowel)
    }

    /// Tail index; 0 means the syllable has no tail.
    pub fn tail_index(self) -> u32 {
        u32::from(self.tail)
    }

    pub fn lead(self) -> char {
        LEAD_CHARS[usize::from(self.lead)]
    }

    pub fn vowel(self) -> char {
        VOWEL_CHARS[usize::from(self.vowel)]
    }

    pub fn tail(self) -> Option<char> {
        match self.tail {
            0 => None,
            t => Some(TAIL_CHARS[usize::from(t) - 1]),
        }
    }

    /// The precomposed syllable.
    pub fn to_char(self) -> char {
        let code = SYLLABLE_BASE
            + (self.lead_index() * VOWEL_COUNT + self.vowel_index()) * TAIL_COUNT
            + self.tail_index();
        // Every in-range triple lands inside the syllable block.
        char::from_u32(code).unwrap_or(char::REPLACEMENT_CHARACTER)
    }

    /// The two or three compatibility jamo of the syllable, in order.
    pub fn jamo(self) -> impl Iterator<Item = char> {
        [Some(self.lead()), Some(self.vowel()), self.tail()]
            .into_iter()
            .flatten()
    }
}

pub fn is_syllable(ch: char) -> bool {
    (SYLLABLE_BASE..=SYLLABLE_LAST).contains(&(ch as u32))
}

pub fn decompose_syllable(ch: char) -> Result<JamoTriple, NotHangulSyllable> {
    if !is_syllable(ch) {
        return Err(NotHangulSyllable(ch));
    }
    let index = ch as u32 - SYLLABLE_BASE;
    let lead = index / (VOWEL_COUNT * TAIL_COUNT);
    let vowel = (index % (VOWEL_COUNT * TAIL_COUNT)) / TAIL_COUNT;
    let tail = index % TAIL_COUNT;
    Ok(JamoTriple {
        lead: lead as u8,
        vowel: vowel as u8,
        tail: tail as u8,
    })
}

/// Decomposes every syllable of `text` into jamo, passing other characters
/// through unchanged.
pub fn decompose_str(text: &str) -> impl Iterator<Item = char> + '_ {
    text.chars().flat_map(|ch| {
        let mut out = [None; 3];
        match decompose_syllable(ch) {
            Ok(triple) => {
                for (slot, j) in out.iter_mut().zip(triple.jamo()) {
                    *slot = Some(j);
                }
            }
            Err(_) => out[0] = Some(ch),
        }
        out.into_iter().flatten()
    })
}

pub fn lead_index(ch: char) -> Option<u32> {
    LEAD_CHARS.iter().position(|&c| c == ch).map(|i| i as u32)
}

pub fn vowel_index(ch: char) -> Option<u32> {
    // The vowels are contiguous: U+314F..=U+3163.
    let code = ch as u32;
    (0x314F..=0x3163).contains(&code).then(|| code - 0x314F)
}

/// Tail index in `1..28`, or `None` if `ch` cannot close a syllable.
pub fn tail_index(ch: char) -> Option<u32> {
    TAIL_CHARS
        .iter()
        .position(|&c| c == ch)
        .map(|i| i as u32 + 1)
}

/// Recomposes jamo runs into precomposed syllables.
///
/// Greedy L → LV → LVT automaton with one character of lookahead: a
/// consonant that could close the current syllable is instead held back as
/// the next lead when a vowel follows it and it is a valid lead. Characters
/// that fit no slot are emitted verbatim.
pub fn compose_jamo<I>(jamo: I) -> String
where
    I: IntoIterator<Item = char>,
{
    let mut input = jamo.into_iter().peekable();
    let mut out = String::new();
    let mut pending: Option<(u32, Option<u32>)> = None;

    while let Some(ch) = input.next() {
        match pending {
            None => match lead_index(ch) {
                Some(l) => pending = Some((l, None)),
                None => out.push(ch),
            },
            Some((l, None)) => match vowel_index(ch) {
                Some(v) => pending = Some((l, Some(v))),
                None => {
                    out.push(LEAD_CHARS[l as usize]);
                    pending = lead_index(ch).map(|l| (l, None));
                    if pending.is_none() {
                        out.push(ch);
                    }
                }
            },
            Some((l, Some(v))) => {
                let next_is_vowel = input.peek().is_some_and(|&n| vowel_index(n).is_some());
                let demote = next_is_vowel && lead_index(ch).is_some();
                match tail_index(ch) {
                    Some(t) if !demote => {
                        out.push(syllable(l, v, t));
                        pending = None;
                    }
                    _ => {
                        out.push(syllable(l, v, 0));
                        pending = lead_index(ch).map(|l| (l, None));
                        if pending.is_none() {
                            out.push(ch);
                        }
                    }
                }
            }
        }
    }
    match pending {
        Some((l, None)) => out.push(LEAD_CHARS[l as usize]),
        Some((l, Some(v))) => out.push(syllable(l, v, 0)),
        None => {}
    }
    out
}

fn syllable(lead: u32, vowel: u32, tail: u32) -> char {
    JamoTriple::new(lead, vowel, tail).map_or(char::REPLACEMENT_CHARACTER, JamoTriple::to_char)
}
