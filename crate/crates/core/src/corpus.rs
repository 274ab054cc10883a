//! Corpus normalization, seeded three-way splits and vocabulary statistics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Names the permutation used by [`split_corpus`]; recorded in run manifests.
pub const SHUFFLE_ALGORITHM: &str =
    "fisher-yates(rand 0.8 SliceRandom::shuffle) over chacha8(seed_from_u64)";

/// Trims the line and collapses internal whitespace runs to one space.
pub fn normalize_line(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    for word in line.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("ratio parts must be positive, got {0}:{1}:{2}")]
    ZeroRatioPart(u64, u64, u64),
    #[error("a three-way ratio split needs at least 3 lines, got {0}")]
    TooSmall(usize),
    #[error("split counts sum to {sum} but the corpus has {n} lines")]
    CountMismatch { sum: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    Ratio(u64, u64, u64),
    Counts(usize, usize, usize),
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Ratio(a, b, c) => write!(f, "ratio {a}:{b}:{c}"),
            Self::Counts(a, b, c) => write!(f, "counts {a},{b},{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub mode: SplitMode,
    pub seed: u64,
}

impl SplitSpec {
    pub fn ratio(train: u64, valid: u64, test: u64, seed: u64) -> Self {
        Self {
            mode: SplitMode::Ratio(train, valid, test),
            seed,
        }
    }

    pub fn counts(train: usize, valid: usize, test: usize, seed: u64) -> Self {
        Self {
            mode: SplitMode::Counts(train, valid, test),
            seed,
        }
    }

    /// Part sizes for a corpus of `n` lines.
    pub fn sizes(&self, n: usize) -> Result<[usize; 3], SplitError> {
        match self.mode {
            SplitMode::Ratio(a, b, c) => apportion(n, [a, b, c]),
            SplitMode::Counts(a, b, c) => {
                let sum = a + b + c;
                if sum == n {
                    Ok([a, b, c])
                } else {
                    Err(SplitError::CountMismatch { sum, n })
                }
            }
        }
    }
}

/// Line indices of the three parts, each in shuffled order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
}

impl CorpusSplit {
    pub fn parts(&self) -> [(&'static str, &[usize]); 3] {
        [
            ("train", &self.train),
            ("valid", &self.valid),
            ("test", &self.test),
        ]
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.train.len(), self.valid.len(), self.test.len()]
    }
}

/// Sizes three parts proportionally to `weights` by largest remainder,
/// then moves single lines from the most over-allocated part into any part
/// left empty.
pub fn apportion(n: usize, weights: [u64; 3]) -> Result<[usize; 3], SplitError> {
    let [a, b, c] = weights;
    if weights.contains(&0) {
        return Err(SplitError::ZeroRatioPart(a, b, c));
    }
    if n < 3 {
        return Err(SplitError::TooSmall(n));
    }
    let total: u128 = weights.iter().map(|&w| u128::from(w)).sum();
    let scaled = weights.map(|w| n as u128 * u128::from(w));
    let mut sizes = scaled.map(|s| (s / total) as usize);
    let remainders = scaled.map(|s| s % total);

    let mut order = [0usize, 1, 2];
    // Largest remainder first; earlier parts win ties.
    order.sort_by(|&x, &y| remainders[y].cmp(&remainders[x]).then(x.cmp(&y)));
    let leftover = n - sizes.iter().sum::<usize>();
    for &i in order.iter().take(leftover) {
        sizes[i] += 1;
    }

    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        // Over-allocation in units of 1/total lines.
        let excess = |i: usize| sizes[i] as i128 * total as i128 - scaled[i] as i128;
        let donor = (0..3)
            .filter(|&i| sizes[i] >= 2)
            .max_by(|&x, &y| excess(x).cmp(&excess(y)).then(y.cmp(&x)))
            .expect("n >= 3 leaves a part with at least two lines");
        sizes[donor] -= 1;
        sizes[empty] += 1;
    }
    Ok(sizes)
}

/// The seeded permutation of `0..n` underlying every split.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    indices
}

/// Partitions `0..n` into train/valid/test by a seeded shuffle.
pub fn split_corpus(n: usize, spec: &SplitSpec) -> Result<CorpusSplit, SplitError> {
    let [train, valid, _] = spec.sizes(n)?;
    let mut indices = shuffled_indices(n, spec.seed);
    let test = indices.split_off(train + valid);
    let valid = indices.split_off(train);
    Ok(CorpusSplit {
        train: indices,
        valid,
        test,
    })
}

/// Token frequency table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VocabReport {
    pub total_tokens: u64,
    /// Sorted by descending count, then by token.
    pub frequencies: Vec<(String, u64)>,
}

impl VocabReport {
    pub fn unique_token_count(&self) -> usize {
        self.frequencies.len()
    }
}

/// Counts space-separated tokens over all lines.
pub fn vocab_stats<I, S>(lines: I) -> VocabReport
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total_tokens = 0;
    for line in lines {
        for token in line.as_ref().split(' ').filter(|t| !t.is_empty()) {
            total_tokens += 1;
            match counts.get_mut(token) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(String::from(token), 1);
                }
            }
        }
    }
    let mut frequencies: Vec<(String, u64)> = counts.into_iter().collect();
    frequencies.sort_by(|(ta, ca), (tb, cb)| cb.cmp(ca).then_with(|| ta.cmp(tb)));
    VocabReport {
        total_tokens,
        frequencies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize() {
        assert_eq!(normalize_line("  a \t b  c "), "a b c");
        assert_eq!(normalize_line(""), "");
        assert_eq!(normalize_line("   "), "");
    }

    #[test]
    fn ratio_sizes() {
        assert_eq!(apportion(1000, [98, 1, 1]).unwrap(), [980, 10, 10]);
        assert_eq!(
            apportion(800_000, [98, 1, 1]).unwrap(),
            [784_000, 8_000, 8_000]
        );
        assert_eq!(apportion(5, [98, 1, 1]).unwrap(), [3, 1, 1]);
        assert_eq!(apportion(3, [98, 1, 1]).unwrap(), [1, 1, 1]);
        assert_eq!(apportion(4, [1, 1, 1]).unwrap(), [2, 1, 1]);
    }

    #[test]
    fn bad_specs() {
        assert_eq!(apportion(2, [98, 1, 1]), Err(SplitError::TooSmall(2)));
        assert_eq!(
            apportion(100, [98, 2, 0]),
            Err(SplitError::ZeroRatioPart(98, 2, 0))
        );
        let spec = SplitSpec::counts(5, 1, 1, 0);
        assert_eq!(
            split_corpus(8, &spec),
            Err(SplitError::CountMismatch { sum: 7, n: 8 })
        );
    }

    #[test]
    fn counts_mode_allows_empty_parts() {
        let split = split_corpus(4, &SplitSpec::counts(4, 0, 0, 1)).unwrap();
        assert_eq!(split.sizes(), [4, 0, 0]);
    }

    #[test]
    fn split_is_a_seeded_partition() {
        let spec = SplitSpec::ratio(8, 1, 1, 42);
        let a = split_corpus(100, &spec).unwrap();
        assert_eq!(a, split_corpus(100, &spec).unwrap());
        assert_eq!(a.sizes(), [80, 10, 10]);
        let mut all: Vec<usize> = a
            .parts()
            .iter()
            .flat_map(|(_, p)| p.iter().copied())
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        let b = split_corpus(100, &SplitSpec::ratio(8, 1, 1, 43)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn vocab_examples() {
        let report = vocab_stats(["a b", "a"]);
        assert_eq!(report.unique_token_count(), 2);
        assert_eq!(report.total_tokens, 3);
        assert_eq!(report.frequencies, [("a".into(), 2), ("b".into(), 1)]);
        assert_eq!(vocab_stats::<_, &str>([]).unique_token_count(), 0);
    }

    #[test]
    fn vocab_ties_sort_by_token() {
        let report = vocab_stats(["z y x", "y"]);
        assert_eq!(
            report.frequencies,
            [("y".into(), 2), ("x".into(), 1), ("z".into(), 1)]
        );
    }
}
