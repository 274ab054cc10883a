//! Corpus-level BLEU.
//!
//! Modified n-gram precisions for n = 1..=4 are kept as exact integer
//! ratios; the score is `100 * BP * exp(sum(ln p_n) / 4)`, and 0 whenever a
//! precision has no matches (unless smoothing is requested).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use core::hash::Hash;
use core::str::FromStr;

use hashbrown::HashMap;
use thiserror::Error;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("{hypotheses} hypotheses but {references} reference sets")]
    LengthMismatch {
        hypotheses: usize,
        references: usize,
    },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("sentence {index} has no reference")]
    NoReference { index: usize },
    #[error("invalid smoothing {0:?}, expected `none` or `eps:<value>`")]
    BadSmoothing(String),
}

/// Clipped matches over total hypothesis n-grams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NgramPrecision {
    pub matched: u64,
    pub total: u64,
}

impl NgramPrecision {
    pub fn ratio(self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.matched as f64 / self.total as f64
        }
    }
}

impl fmt::Display for NgramPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.matched, self.total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Smoothing {
    #[default]
    None,
    /// Replaces a zero match count by `epsilon`.
    AddEpsilon(f64),
}

impl FromStr for Smoothing {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(Self::None);
        }
        s.strip_prefix("eps:")
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|e| e.is_finite() && *e > 0.0)
            .map(Self::AddEpsilon)
            .ok_or_else(|| MetricsError::BadSmoothing(String::from(s)))
    }
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::AddEpsilon(e) => write!(f, "eps:{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BleuReport {
    pub precisions: [NgramPrecision; MAX_ORDER],
    pub candidate_length: u64,
    pub reference_length: u64,
    pub brevity_penalty: f64,
    pub score: f64,
}

impl BleuReport {
    /// Multi-line human-readable form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "BLEU      {:.2}", self.score);
        for (n, p) in self.precisions.iter().enumerate() {
            let _ = writeln!(out, "p{}        {} ({:.4})", n + 1, p, p.ratio());
        }
        let _ = writeln!(out, "BP        {:.4}", self.brevity_penalty);
        let _ = writeln!(out, "hyp len   {}", self.candidate_length);
        let _ = writeln!(out, "ref len   {}", self.reference_length);
        out
    }
}

/// The single-line machine-readable report.
impl fmt::Display for BleuReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BLEU={:.2}", self.score)?;
        for (n, p) in self.precisions.iter().enumerate() {
            write!(f, " p{}={}", n + 1, p)?;
        }
        write!(
            f,
            " BP={:.4} c={} r={}",
            self.brevity_penalty, self.candidate_length, self.reference_length
        )
    }
}

/// Sliding-window n-gram counts.
pub fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], u64> {
    let mut counts = HashMap::new();
    if n == 0 {
        return counts;
    }
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn check_aligned<H, R>(hyps: &[H], refs: &[Vec<R>]) -> Result<(), MetricsError> {
    if hyps.len() != refs.len() {
        return Err(MetricsError::LengthMismatch {
            hypotheses: hyps.len(),
            references: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    if let Some(index) = refs.iter().position(Vec::is_empty) {
        return Err(MetricsError::NoReference { index });
    }
    Ok(())
}

fn sentence_precision<T: Eq + Hash>(hyp: &[T], refs: &[Vec<T>], n: usize) -> NgramPrecision {
    let hyp_counts = ngram_counts(hyp, n);
    let mut max_ref: HashMap<&[T], u64> = HashMap::new();
    for reference in refs {
        for (gram, count) in ngram_counts(reference, n) {
            let slot = max_ref.entry(gram).or_insert(0);
            *slot = (*slot).max(count);
        }
    }
    let mut precision = NgramPrecision::default();
    for (gram, count) in hyp_counts {
        precision.total += count;
        precision.matched += count.min(max_ref.get(gram).copied().unwrap_or(0));
    }
    precision
}

/// Corpus-level clipped n-gram matches and totals.
pub fn modified_precision<T: Eq + Hash>(
    hyps: &[Vec<T>],
    refs: &[Vec<Vec<T>>],
    n: usize,
) -> Result<NgramPrecision, MetricsError> {
    check_aligned(hyps, refs)?;
    let mut total = NgramPrecision::default();
    for (hyp, sentence_refs) in hyps.iter().zip(refs) {
        let p = sentence_precision(hyp, sentence_refs, n);
        total.matched += p.matched;
        total.total += p.total;
    }
    Ok(total)
}

/// `exp(1 - r/c)` for a candidate no longer than the reference, else 1.
pub fn brevity_penalty(candidate_length: u64, reference_length: u64) -> f64 {
    if candidate_length == 0 {
        0.0
    } else if candidate_length > reference_length {
        1.0
    } else {
        libm::exp(1.0 - reference_length as f64 / candidate_length as f64)
    }
}

/// Reference length closest to the hypothesis length, preferring the shorter
/// on ties.
fn effective_reference_length<T>(hyp_len: usize, refs: &[Vec<T>]) -> usize {
    refs.iter()
        .map(Vec::len)
        .min_by_key(|&r| (r.abs_diff(hyp_len), r))
        .unwrap_or(0)
}

pub fn bleu_corpus<T: Eq + Hash>(
    hyps: &[Vec<T>],
    refs: &[Vec<Vec<T>>],
    smoothing: Smoothing,
) -> Result<BleuReport, MetricsError> {
    check_aligned(hyps, refs)?;
    let mut precisions = [NgramPrecision::default(); MAX_ORDER];
    let mut candidate_length = 0u64;
    let mut reference_length = 0u64;
    for (hyp, sentence_refs) in hyps.iter().zip(refs) {
        candidate_length += hyp.len() as u64;
        reference_length += effective_reference_length(hyp.len(), sentence_refs) as u64;
        for (n, slot) in precisions.iter_mut().enumerate() {
            let p = sentence_precision(hyp, sentence_refs, n + 1);
            slot.matched += p.matched;
            slot.total += p.total;
        }
    }
    let brevity_penalty = brevity_penalty(candidate_length, reference_length);
    let score = score(&precisions, brevity_penalty, smoothing);
    Ok(BleuReport {
        precisions,
        candidate_length,
        reference_length,
        brevity_penalty,
        score,
    })
}

/// Whitespace-tokenizes aligned hypothesis and reference lines and scores
/// them. `refs[k][i]` is the `k`-th reference for sentence `i`.
pub fn bleu_lines<S: AsRef<str>>(
    hyps: &[S],
    refs: &[Vec<S>],
    smoothing: Smoothing,
) -> Result<BleuReport, MetricsError> {
    for stream in refs {
        if stream.len() != hyps.len() {
            return Err(MetricsError::LengthMismatch {
                hypotheses: hyps.len(),
                references: stream.len(),
            });
        }
    }
    if refs.is_empty() && !hyps.is_empty() {
        return Err(MetricsError::NoReference { index: 0 });
    }
    fn split<S: AsRef<str>>(s: &S) -> Vec<&str> {
        s.as_ref().split_whitespace().collect()
    }
    let hyp_tokens: Vec<Vec<&str>> = hyps.iter().map(split).collect();
    let ref_tokens: Vec<Vec<Vec<&str>>> = (0..hyps.len())
        .map(|i| refs.iter().map(|stream| split(&stream[i])).collect())
        .collect();
    bleu_corpus(&hyp_tokens, &ref_tokens, smoothing)
}

fn score(precisions: &[NgramPrecision; MAX_ORDER], bp: f64, smoothing: Smoothing) -> f64 {
    let mut log_sum = 0.0;
    for p in precisions {
        if p.total == 0 {
            return 0.0;
        }
        let matched = match (p.matched, smoothing) {
            (0, Smoothing::None) => return 0.0,
            (0, Smoothing::AddEpsilon(eps)) => eps,
            (m, _) => m as f64,
        };
        log_sum += libm::log(matched / p.total as f64);
    }
    100.0 * bp * libm::exp(log_sum / MAX_ORDER as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn ngram_counts_examples() {
        let toks = ["a", "b", "a"];
        let uni = ngram_counts(&toks, 1);
        assert_eq!(uni.len(), 2);
        assert_eq!(uni[&["a"][..]], 2);
        assert_eq!(uni[&["b"][..]], 1);
        let bi = ngram_counts(&toks, 2);
        assert_eq!(bi.len(), 2);
        assert_eq!(bi[&["a", "b"][..]], 1);
        assert_eq!(bi[&["b", "a"][..]], 1);
        assert!(ngram_counts(&["a"], 2).is_empty());
    }

    #[test]
    fn clipping() {
        let hyp = vec![vec!["the"; 7]];
        let refs = vec![vec![words("the cat is on the mat")]];
        assert_eq!(
            modified_precision(&hyp, &refs, 1).unwrap(),
            NgramPrecision {
                matched: 2,
                total: 7
            }
        );
        let hyp = vec![words("a b")];
        let refs = vec![vec![words("c d")]];
        assert_eq!(
            modified_precision(&hyp, &refs, 1).unwrap(),
            NgramPrecision {
                matched: 0,
                total: 2
            }
        );
    }

    #[test]
    fn clipping_uses_max_over_references() {
        let hyp = vec![words("a a a")];
        let refs = vec![vec![words("a b"), words("a a c")]];
        assert_eq!(modified_precision(&hyp, &refs, 1).unwrap().matched, 2);
    }

    #[test]
    fn brevity_penalty_examples() {
        assert_eq!(brevity_penalty(7, 6), 1.0);
        assert_eq!(brevity_penalty(6, 6), 1.0);
        assert!((brevity_penalty(3, 6) - 0.367_879_441_171_442_3).abs() < 1e-12);
        assert_eq!(brevity_penalty(0, 6), 0.0);
    }

    #[test]
    fn identity_is_100() {
        let corpus = vec![words("the cat is on the mat"), words("a b c d e")];
        let refs: Vec<Vec<Vec<&str>>> = corpus.iter().map(|s| vec![s.clone()]).collect();
        let report = bleu_corpus(&corpus, &refs, Smoothing::None).unwrap();
        assert_eq!(report.score, 100.0);
        assert_eq!(report.brevity_penalty, 1.0);
    }

    #[test]
    fn missing_four_gram_scores_zero() {
        let hyp = vec![words("the cat sat on the mat")];
        let refs = vec![vec![words("the cat is on the mat")]];
        let report = bleu_corpus(&hyp, &refs, Smoothing::None).unwrap();
        let got: Vec<(u64, u64)> = report
            .precisions
            .iter()
            .map(|p| (p.matched, p.total))
            .collect();
        assert_eq!(got, [(5, 6), (3, 5), (1, 4), (0, 3)]);
        assert_eq!(report.score, 0.0);
        let smoothed = bleu_corpus(&hyp, &refs, Smoothing::AddEpsilon(0.1)).unwrap();
        assert!(smoothed.score > 0.0 && smoothed.score < 100.0);
    }

    #[test]
    fn longer_hypothesis() {
        let hyp = vec![words("the cat is on the mat tonight")];
        let refs = vec![vec![words("the cat is on the mat")]];
        let report = bleu_corpus(&hyp, &refs, Smoothing::None).unwrap();
        let got: Vec<(u64, u64)> = report
            .precisions
            .iter()
            .map(|p| (p.matched, p.total))
            .collect();
        assert_eq!(got, [(6, 7), (5, 6), (4, 5), (3, 4)]);
        assert_eq!(report.brevity_penalty, 1.0);
        let expected = 100.0 * libm::pow(3.0 / 7.0, 0.25);
        assert!((report.score - expected).abs() < 1e-9);
        assert!((report.score - 80.91).abs() < 0.01);
    }

    #[test]
    fn effective_reference_prefers_closest_then_shorter() {
        let refs = vec![vec!["x"; 4], vec!["x"; 6]];
        assert_eq!(effective_reference_length(5, &refs), 4);
        assert_eq!(effective_reference_length(6, &refs), 6);
    }

    #[test]
    fn errors() {
        let hyp = vec![words("a")];
        assert_eq!(
            bleu_corpus::<&str>(&hyp, &[], Smoothing::None).unwrap_err(),
            MetricsError::LengthMismatch {
                hypotheses: 1,
                references: 0
            }
        );
        assert_eq!(
            bleu_corpus::<&str>(&[], &[], Smoothing::None).unwrap_err(),
            MetricsError::EmptyCorpus
        );
        assert_eq!(
            bleu_corpus(&hyp, &[vec![]], Smoothing::None).unwrap_err(),
            MetricsError::NoReference { index: 0 }
        );
    }

    #[test]
    fn report_line() {
        let hyp = vec![words("the cat is on the mat tonight")];
        let refs = vec![vec![words("the cat is on the mat")]];
        let report = bleu_corpus(&hyp, &refs, Smoothing::None).unwrap();
        assert_eq!(
            report.to_string(),
            "BLEU=80.91 p1=6/7 p2=5/6 p3=4/5 p4=3/4 BP=1.0000 c=7 r=6"
        );
        assert!(report.to_text().starts_with("BLEU      80.91\n"));
    }

    #[test]
    fn lines_with_multiple_references() {
        let hyps = ["a b c d", "x y"];
        let refs = vec![vec!["a b c d", "x y"], vec!["a b c e", "x z"]];
        let report = bleu_lines(&hyps, &refs, Smoothing::None).unwrap();
        assert_eq!(report.score, 100.0);
    }

    #[test]
    fn smoothing_parse() {
        assert_eq!("none".parse::<Smoothing>().unwrap(), Smoothing::None);
        assert_eq!(
            "eps:0.1".parse::<Smoothing>().unwrap(),
            Smoothing::AddEpsilon(0.1)
        );
        assert!("eps:-1".parse::<Smoothing>().is_err());
        assert!("floor".parse::<Smoothing>().is_err());
    }
}
