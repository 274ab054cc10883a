use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use subtok_core::hangul::decompose_str;
use subtok_core::tokenize::{
    detokenize_alphabet, detokenize_morpheme, tokenize_alphabet, tokenize_morpheme,
    IdentitySegmenter, MarkerConfig, RuleSegmenter, Segmenter, SegmenterFailure, Strictness,
};

/// Splits every word into single characters.
struct CharSegmenter;

impl Segmenter for CharSegmenter {
    fn name(&self) -> &str {
        "chars"
    }
    fn surface_preserving(&self) -> bool {
        true
    }
    fn segment(&mut self, word: &str) -> Result<Vec<String>, SegmenterFailure> {
        Ok(word.chars().map(String::from).collect())
    }
}

fn sentence() -> impl Strategy<Value = String> {
    any::<u64>().prop_map(|seed| subtok_testkit::random_sentence(&mut StdRng::seed_from_u64(seed)))
}

fn word_groups(tokens: &[String], marker: &str) -> Vec<String> {
    tokens.split(|t| t == marker).map(|g| g.concat()).collect()
}

proptest! {
    #[test]
    fn alphabet_round_trip(s in sentence()) {
        let cfg = MarkerConfig::default();
        let ts = tokenize_alphabet(&s, &cfg).unwrap();
        prop_assert!(ts.tokens().iter().all(|t| !t.is_empty() && !t.contains(' ')));
        prop_assert_eq!(detokenize_alphabet(ts.tokens(), &cfg), s.clone());
        let markers = ts.tokens().iter().filter(|t| *t == "▁").count();
        prop_assert_eq!(markers, s.matches(' ').count());
        // Each token is one character of the jamo-expanded sentence.
        let expanded: String = decompose_str(&s).map(|c| if c == ' ' { '▁' } else { c }).collect();
        prop_assert_eq!(ts.tokens().concat(), expanded);
    }

    #[test]
    fn morpheme_round_trip(s in sentence()) {
        let cfg = MarkerConfig::default();
        for seg in [&mut RuleSegmenter as &mut dyn Segmenter, &mut IdentitySegmenter, &mut CharSegmenter] {
            let ts = tokenize_morpheme(&s, seg, &cfg).unwrap();
            prop_assert_eq!(detokenize_morpheme(ts.tokens(), &cfg), s.clone());
            let markers = ts.tokens().iter().filter(|t| *t == "▁").count();
            prop_assert_eq!(markers, s.matches(' ').count());
            prop_assert!(ts.tokens().first().is_none_or(|t| t != "▁"));
            prop_assert!(ts.tokens().last().is_none_or(|t| t != "▁"));
            prop_assert!(ts.tokens().windows(2).all(|w| !(w[0] == "▁" && w[1] == "▁")));
        }
    }

    #[test]
    fn marker_positions_ignore_the_segmenter(s in sentence()) {
        let cfg = MarkerConfig::default();
        let rule = tokenize_morpheme(&s, &mut RuleSegmenter, &cfg).unwrap();
        let chars = tokenize_morpheme(&s, &mut CharSegmenter, &cfg).unwrap();
        let words: Vec<String> = s.split(' ').map(String::from).collect();
        prop_assert_eq!(word_groups(rule.tokens(), "▁"), words.clone());
        prop_assert_eq!(word_groups(chars.tokens(), "▁"), words);
    }

    #[test]
    fn arbitrary_spacing_is_deterministic(s in "[a-c ▁]{0,12}") {
        let cfg = MarkerConfig { strictness: Strictness::Escape, ..MarkerConfig::default() };
        let a = tokenize_alphabet(&s, &cfg).unwrap();
        prop_assert_eq!(detokenize_alphabet(a.tokens(), &cfg), s.clone());
        let m = tokenize_morpheme(&s, &mut RuleSegmenter, &cfg).unwrap();
        prop_assert_eq!(detokenize_morpheme(m.tokens(), &cfg), s.clone());
        prop_assert_eq!(m.tokens().iter().filter(|t| *t == "▁").count(), s.matches(' ').count());
    }
}
