//! Tokenization schemes for Korean↔English translation preprocessing.
//!
//! * [`hangul`]: syllable ↔ compatibility-jamo conversion.
//! * [`tokenize`]: alphabet and morpheme tokenization with a space marker.
//! * [`bpe`]: deterministic BPE learning and application with `@@`
//!   continuation markers.
//! * [`metrics`]: corpus-level BLEU.
//! * [`corpus`]: line normalization, seeded splits and vocabulary counts.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, subprocess
//! segmenters and the command line live in the `subtok` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bpe;
pub mod corpus;
pub mod hangul;
pub mod metrics;
pub mod tokenize;

pub use bpe::{BpeConfig, MergeTable, WordFrequencyMap};
pub use metrics::{BleuReport, Smoothing};
pub use tokenize::{MarkerConfig, Scheme, Segmenter, TokenizedSentence};
