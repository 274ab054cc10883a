use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use subtok::merges;
use subtok_core::bpe::learn_bpe;
use subtok_core::{BpeConfig, WordFrequencyMap};
use subtok_testkit::random_word_counts;

proptest! {
    #[test]
    fn save_then_load_is_identity(seed in any::<u64>(), merges_wanted in 0usize..40) {
        let mut rng = StdRng::seed_from_u64(seed);
        let words: WordFrequencyMap = random_word_counts(&mut rng, 40, 6).into_iter().collect();
        let cfg = BpeConfig { num_merges: merges_wanted, min_pair_frequency: 0, ..BpeConfig::default() };
        let table = learn_bpe(&words, &cfg);
        let text = merges::to_text(&table);
        prop_assert_eq!(text.lines().count(), table.len() + 1);
        let back = merges::parse(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &table);
        prop_assert_eq!(merges::to_text(&back), text);
    }
}

#[test]
fn file_round_trip_with_hangul_symbols() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ko.merges");
    let words: WordFrequencyMap = [("안녕하세요", 3), ("안녕", 2), ("하세요.", 2)]
        .into_iter()
        .map(|(w, c)| (w.to_owned(), c))
        .collect();
    let table = learn_bpe(
        &words,
        &BpeConfig {
            num_merges: 10,
            ..BpeConfig::default()
        },
    );
    assert!(!table.is_empty());
    merges::save(&path, &table).unwrap();
    assert_eq!(merges::load(&path).unwrap(), table);
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"#merges v1\n") && bytes.ends_with(b"\n"));
    assert!(!bytes.contains(&b'\r'));
}
