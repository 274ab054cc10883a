//! Slow, obviously-correct reference implementations used as test oracles,
//! plus random input generators. Nothing here depends on `subtok-core`.

use std::collections::BTreeMap;

use rand::Rng;

/// Rank-greedy BPE application over strings: take the lowest-ranked listed
/// pair present, replace its non-overlapping occurrences left to right,
/// repeat.
pub fn naive_apply(word: &str, merges: &[(String, String)]) -> Vec<String> {
    let mut symbols: Vec<String> = word.chars().map(String::from).collect();
    loop {
        let mut best: Option<usize> = None;
        for i in 0..symbols.len().saturating_sub(1) {
            let rank = merges
                .iter()
                .position(|(l, r)| *l == symbols[i] && *r == symbols[i + 1]);
            if let Some(rank) = rank {
                best = Some(best.map_or(rank, |b| b.min(rank)));
            }
        }
        let Some(rank) = best else { return symbols };
        let (left, right) = &merges[rank];
        let mut next = Vec::with_capacity(symbols.len());
        let mut i = 0;
        while i < symbols.len() {
            if i + 1 < symbols.len() && symbols[i] == *left && symbols[i + 1] == *right {
                next.push(format!("{left}{right}"));
                i += 2;
            } else {
                next.push(symbols[i].clone());
                i += 1;
            }
        }
        symbols = next;
    }
}

/// Reference BPE learner: every iteration re-segments all words from their
/// characters with the merges so far and recounts every pair.
pub fn naive_learn(
    words: &[(String, u64)],
    num_merges: usize,
    min_pair_frequency: u64,
) -> Vec<(String, String)> {
    let mut merges: Vec<(String, String)> = Vec::new();
    while merges.len() < num_merges {
        let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (word, freq) in words {
            let symbols = naive_apply(word, &merges);
            for w in symbols.windows(2) {
                *counts.entry((w[0].clone(), w[1].clone())).or_insert(0) += freq;
            }
        }
        // BTreeMap iterates in (left, right) order, so the first maximum is
        // the lexicographically smallest one.
        let mut best: Option<(&(String, String), u64)> = None;
        for (pair, &count) in &counts {
            if best.is_none_or(|(_, c)| count > c) {
                best = Some((pair, count));
            }
        }
        match best {
            Some((pair, count)) if count >= min_pair_frequency => merges.push(pair.clone()),
            _ => break,
        }
    }
    merges
}

/// Number of times `gram` occurs in `tokens` as a contiguous window.
pub fn count_occurrences(tokens: &[String], gram: &[String]) -> u64 {
    if gram.is_empty() || tokens.len() < gram.len() {
        return 0;
    }
    (0..=tokens.len() - gram.len())
        .filter(|&i| tokens[i..i + gram.len()] == *gram)
        .count() as u64
}

/// Clipped n-gram matches and total by exhaustive enumeration.
pub fn brute_force_precision(
    hyps: &[Vec<String>],
    refs: &[Vec<Vec<String>>],
    n: usize,
) -> (u64, u64) {
    let mut matched = 0;
    let mut total = 0;
    for (hyp, sentence_refs) in hyps.iter().zip(refs) {
        if hyp.len() < n {
            continue;
        }
        let mut seen: Vec<&[String]> = Vec::new();
        for i in 0..=hyp.len() - n {
            let gram = &hyp[i..i + n];
            total += 1;
            if seen.contains(&gram) {
                continue;
            }
            seen.push(gram);
            let in_hyp = count_occurrences(hyp, gram);
            let in_refs = sentence_refs
                .iter()
                .map(|r| count_occurrences(r, gram))
                .max()
                .unwrap_or(0);
            matched += in_hyp.min(in_refs);
        }
    }
    (matched, total)
}

/// Sizes (a, b, c), each >= 1, summing to `n` that minimize the L1 distance
/// to the exact quotas; ties prefer larger earlier parts.
pub fn brute_force_apportion(n: usize, weights: [u64; 3]) -> [usize; 3] {
    let total: i128 = weights.iter().map(|&w| w as i128).sum();
    let scaled = weights.map(|w| n as i128 * w as i128);
    let mut best: Option<(i128, [usize; 3])> = None;
    for a in (1..n).rev() {
        for b in (1..n - a).rev() {
            let c = n - a - b;
            if c == 0 {
                continue;
            }
            let sizes = [a, b, c];
            let distance: i128 = (0..3)
                .map(|i| (sizes[i] as i128 * total - scaled[i]).abs())
                .sum();
            if best.is_none_or(|(d, _)| distance < d) {
                best = Some((distance, sizes));
            }
        }
    }
    best.expect("n >= 3").1
}

const PUNCTUATION: &[char] = &[
    '.', ',', '!', '?', '\'', '"', '-', '(', ')', ':', ';', '@', '#',
];

fn korean_word(rng: &mut impl Rng) -> String {
    let len = rng.gen_range(1..=4);
    (0..len)
        .map(|_| char::from_u32(rng.gen_range(0xAC00..=0xD7A3)).unwrap())
        .collect()
}

fn english_word(rng: &mut impl Rng) -> String {
    let len = rng.gen_range(1..=9);
    (0..len)
        .map(|_| {
            let c = rng.gen_range(b'a'..=b'z') as char;
            if rng.gen_bool(0.15) {
                c.to_ascii_uppercase()
            } else {
                c
            }
        })
        .collect()
}

/// A random word mixing Hangul syllables, Latin letters, digits and
/// punctuation. Never contains a space and never ends with `@@`.
pub fn random_word(rng: &mut impl Rng) -> String {
    let mut word = match rng.gen_range(0..10) {
        0..=3 => korean_word(rng),
        4..=7 => english_word(rng),
        8 => rng.gen_range(0..10_000).to_string(),
        _ => (0..rng.gen_range(1..=3))
            .map(|_| PUNCTUATION[rng.gen_range(0..PUNCTUATION.len())])
            .collect(),
    };
    if rng.gen_bool(0.25) {
        word.push(PUNCTUATION[rng.gen_range(0..PUNCTUATION.len())]);
    }
    if rng.gen_bool(0.05) {
        word.push_str(&korean_word(rng));
    }
    if word.ends_with("@@") {
        word.push('x');
    }
    word
}

/// A single-spaced sentence of 1 to 12 random words.
pub fn random_sentence(rng: &mut impl Rng) -> String {
    let words: Vec<String> = (0..rng.gen_range(1..=12))
        .map(|_| random_word(rng))
        .collect();
    words.join(" ")
}

/// Up to `max_words` distinct words over the first `alphabet` letters of
/// `abcdefgh`, with frequencies in 1..=5.
pub fn random_word_counts(
    rng: &mut impl Rng,
    max_words: usize,
    alphabet: usize,
) -> Vec<(String, u64)> {
    let letters: Vec<char> = "abcdefgh".chars().take(alphabet.max(1)).collect();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..rng.gen_range(1..=max_words) {
        let len = rng.gen_range(1..=8);
        let word: String = (0..len)
            .map(|_| letters[rng.gen_range(0..letters.len())])
            .collect();
        *counts.entry(word).or_insert(0) += rng.gen_range(1..=5);
    }
    counts.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn naive_learner_hand_case() {
        let words = vec![("aaab".to_string(), 2), ("ab".to_string(), 1)];
        assert_eq!(
            naive_learn(&words, 2, 0),
            [
                ("a".to_string(), "a".to_string()),
                ("a".to_string(), "b".to_string())
            ]
        );
    }

    #[test]
    fn brute_force_clipping() {
        let hyp = vec![s(&["the"; 7])];
        let refs = vec![vec![s(&["the", "cat", "is", "on", "the", "mat"])]];
        assert_eq!(brute_force_precision(&hyp, &refs, 1), (2, 7));
    }

    #[test]
    fn apportion_small() {
        assert_eq!(brute_force_apportion(5, [98, 1, 1]), [3, 1, 1]);
        assert_eq!(brute_force_apportion(100, [98, 1, 1]), [98, 1, 1]);
    }
}
