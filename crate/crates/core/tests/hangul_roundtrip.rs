use proptest::prelude::*;
use subtok_core::hangul::{
    compose_jamo, decompose_str, decompose_syllable, JamoTriple, LEAD_COUNT, SYLLABLE_BASE,
    SYLLABLE_COUNT, SYLLABLE_LAST, TAIL_COUNT, VOWEL_COUNT,
};

fn syllables() -> impl Iterator<Item = char> {
    (SYLLABLE_BASE..=SYLLABLE_LAST).map(|c| char::from_u32(c).unwrap())
}

#[test]
fn every_syllable_round_trips() {
    assert_eq!(syllables().count() as u32, SYLLABLE_COUNT);
    for s in syllables() {
        let triple = decompose_syllable(s).unwrap();
        let code = SYLLABLE_BASE
            + (triple.lead_index() * VOWEL_COUNT + triple.vowel_index()) * TAIL_COUNT
            + triple.tail_index();
        assert_eq!(code, s as u32);
        assert_eq!(triple.to_char(), s);
        let mut buf = String::new();
        buf.push(s);
        assert_eq!(compose_jamo(triple.jamo()), buf, "{s}");
    }
}

#[test]
fn triples_cover_the_block_once() {
    let mut seen = vec![false; SYLLABLE_COUNT as usize];
    for l in 0..LEAD_COUNT {
        for v in 0..VOWEL_COUNT {
            for t in 0..TAIL_COUNT {
                let ch = JamoTriple::new(l, v, t).unwrap().to_char();
                let i = (ch as u32 - SYLLABLE_BASE) as usize;
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
    }
    assert!(seen.iter().all(|&s| s));
    assert!(JamoTriple::new(LEAD_COUNT, 0, 0).is_none());
}

/// Every syllable followed by a spread of second syllables: the boundary
/// between the first tail and the second lead is where recomposition can go
/// wrong.
#[test]
fn two_syllable_words_round_trip() {
    let mut seconds = Vec::new();
    for l in 0..LEAD_COUNT {
        for (v, t) in [(0, 0), (20, 0), (8, 4), (13, 27)] {
            seconds.push(JamoTriple::new(l, v, t).unwrap().to_char());
        }
    }
    for first in syllables() {
        for &second in &seconds {
            let word: String = [first, second].into_iter().collect();
            let jamo: Vec<char> = decompose_str(&word).collect();
            assert_eq!(compose_jamo(jamo), word);
        }
    }
}

fn text_char() -> impl Strategy<Value = char> {
    prop_oneof![
        4 => (SYLLABLE_BASE..=SYLLABLE_LAST).prop_map(|c| char::from_u32(c).unwrap()),
        2 => proptest::char::range('a', 'z'),
        1 => proptest::sample::select(vec![' ', '.', ',', '!', '?', '0', '7', 'Z', '\u{1100}', 'é']),
    ]
}

proptest! {
    #[test]
    fn stream_inverse(chars in proptest::collection::vec(text_char(), 0..40)) {
        let text: String = chars.into_iter().collect();
        prop_assert_eq!(compose_jamo(decompose_str(&text)), text);
    }

    #[test]
    fn distinct_syllable_strings_decompose_differently(
        a in proptest::collection::vec(SYLLABLE_BASE..=SYLLABLE_LAST, 1..5),
        b in proptest::collection::vec(SYLLABLE_BASE..=SYLLABLE_LAST, 1..5),
    ) {
        let a: String = a.into_iter().map(|c| char::from_u32(c).unwrap()).collect();
        let b: String = b.into_iter().map(|c| char::from_u32(c).unwrap()).collect();
        let ja: Vec<char> = decompose_str(&a).collect();
        let jb: Vec<char> = decompose_str(&b).collect();
        prop_assert_eq!(ja == jb, a == b);
    }
}
