//! One tokenizer/detokenizer value per scheme, so the command line and the
//! pipeline drive all three the same way.

use subtok_core::bpe::{detokenize_bpe, tokenize_bpe, BpeError};
use subtok_core::tokenize::{
    detokenize_alphabet, detokenize_morpheme, tokenize_alphabet, tokenize_morpheme, TokenizeError,
};
use subtok_core::{BpeConfig, MarkerConfig, MergeTable, Scheme, Segmenter, TokenizedSentence};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LineError {
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
    #[error(transparent)]
    Bpe(#[from] BpeError),
}

pub enum LineTokenizer {
    Alphabet(MarkerConfig),
    Morpheme(MarkerConfig, Box<dyn Segmenter + Send>),
    Bpe(MergeTable, BpeConfig),
}

impl LineTokenizer {
    pub fn scheme(&self) -> Scheme {
        match self {
            Self::Alphabet(_) => Scheme::Alphabet,
            Self::Morpheme(..) => Scheme::Morpheme,
            Self::Bpe(..) => Scheme::Bpe,
        }
    }

    pub fn tokenize(&mut self, line: &str) -> Result<TokenizedSentence, LineError> {
        Ok(match self {
            Self::Alphabet(cfg) => tokenize_alphabet(line, cfg)?,
            Self::Morpheme(cfg, seg) => tokenize_morpheme(line, seg, cfg)?,
            Self::Bpe(table, cfg) => tokenize_bpe(line, table, cfg)?,
        })
    }

    /// False once a segmenter has returned morphemes that do not spell the
    /// word; such output no longer detokenizes to the input.
    pub fn surface_preserving(&self) -> bool {
        match self {
            Self::Morpheme(_, seg) => seg.surface_preserving(),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detokenized {
    pub text: String,
    pub dangling_marker: bool,
}

pub fn detokenize_line(
    scheme: Scheme,
    line: &str,
    marker: &MarkerConfig,
    bpe: &BpeConfig,
) -> Detokenized {
    let tokens: Vec<&str> = line.split(' ').filter(|t| !t.is_empty()).collect();
    match scheme {
        Scheme::Alphabet => Detokenized {
            text: detokenize_alphabet(&tokens, marker),
            dangling_marker: false,
        },
        Scheme::Morpheme => Detokenized {
            text: detokenize_morpheme(&tokens, marker),
            dangling_marker: false,
        },
        Scheme::Bpe => {
            let out = detokenize_bpe(&tokens, bpe);
            Detokenized {
                text: out.text,
                dangling_marker: out.dangling_marker,
            }
        }
    }
}
