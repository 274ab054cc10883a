use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeTableError {
    #[error("merge {rank}: empty symbol")]
    EmptySymbol { rank: usize },
    #[error("merge {rank}: symbol {symbol:?} contains whitespace")]
    Whitespace { rank: usize, symbol: String },
    #[error("merge {rank}: symbol {symbol:?} is neither a character nor an earlier merge")]
    UnknownSymbol { rank: usize, symbol: String },
    #[error("merge {rank}: pair ({left:?}, {right:?}) already learned at rank {first}")]
    Duplicate {
        rank: usize,
        first: usize,
        left: String,
        right: String,
    },
}

impl MergeTableError {
    /// Zero-based position of the offending merge.
    pub fn rank(&self) -> usize {
        match *self {
            Self::EmptySymbol { rank }
            | Self::Whitespace { rank, .. }
            | Self::UnknownSymbol { rank, .. }
            | Self::Duplicate { rank, .. } => rank,
        }
    }
}

/// Rank and result of one merge, keyed by the interned ids of its pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct MergeRule {
    pub rank: u32,
    pub merged: u32,
}

/// Ordered list of learned symbol-pair merges. Rank 0 was learned first and
/// is applied first.
#[derive(Debug, Clone, Default)]
pub struct MergeTable {
    merges: Vec<(String, String)>,
    ids: HashMap<String, u32>,
    names: Vec<String>,
    rules: HashMap<(u32, u32), MergeRule>,
}

impl PartialEq for MergeTable {
    fn eq(&self, other: &Self) -> bool {
        self.merges == other.merges
    }
}

impl Eq for MergeTable {}

impl MergeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, L, R>(pairs: I) -> Result<Self, MergeTableError>
    where
        I: IntoIterator<Item = (L, R)>,
        L: Into<String>,
        R: Into<String>,
    {
        let mut table = Self::new();
        for (left, right) in pairs {
            table.push(left.into(), right.into())?;
        }
        Ok(table)
    }

    /// Appends a merge at the next rank after validating it.
    pub fn push(&mut self, left: String, right: String) -> Result<(), MergeTableError> {
        let rank = self.merges.len();
        let l = self.resolve(rank, &left)?;
        let r = self.resolve(rank, &right)?;
        if let Some(rule) = self.rules.get(&(l, r)) {
            return Err(MergeTableError::Duplicate {
                rank,
                first: rule.rank as usize,
                left,
                right,
            });
        }
        let mut merged = String::with_capacity(left.len() + right.len());
        merged.push_str(&left);
        merged.push_str(&right);
        let merged = self.intern(merged);
        self.rules.insert(
            (l, r),
            MergeRule {
                rank: rank as u32,
                merged,
            },
        );
        self.merges.push((left, right));
        Ok(())
    }

    fn resolve(&mut self, rank: usize, symbol: &str) -> Result<u32, MergeTableError> {
        if symbol.is_empty() {
            return Err(MergeTableError::EmptySymbol { rank });
        }
        if symbol.chars().any(char::is_whitespace) {
            return Err(MergeTableError::Whitespace {
                rank,
                symbol: symbol.into(),
            });
        }
        if let Some(&id) = self.ids.get(symbol) {
            return Ok(id);
        }
        let mut chars = symbol.chars();
        chars.next();
        if chars.next().is_some() {
            return Err(MergeTableError::UnknownSymbol {
                rank,
                symbol: symbol.into(),
            });
        }
        Ok(self.intern(symbol.into()))
    }

    fn intern(&mut self, symbol: String) -> u32 {
        if let Some(&id) = self.ids.get(&symbol) {
            return id;
        }
        let id = self.names.len() as u32;
        self.ids.insert(symbol.clone(), id);
        self.names.push(symbol);
        id
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// Merges in rank order.
    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.merges.iter().map(|(l, r)| (l.as_str(), r.as_str()))
    }

    /// Rank of the pair, if it was learned.
    pub fn rank(&self, left: &str, right: &str) -> Option<usize> {
        let l = self.ids.get(left)?;
        let r = self.ids.get(right)?;
        self.rules.get(&(*l, *r)).map(|rule| rule.rank as usize)
    }

    pub(crate) fn symbol_id(&self, symbol: &str) -> Option<u32> {
        self.ids.get(symbol).copied()
    }

    pub(crate) fn rule(&self, left: u32, right: u32) -> Option<MergeRule> {
        self.rules.get(&(left, right)).copied()
    }
}

/// A symbol inside a word being merged.
pub(crate) trait Symbol: Copy {
    fn id(self) -> u32;
    fn join(self, right: Self, merged: u32) -> Self;
}

impl Symbol for u32 {
    fn id(self) -> u32 {
        self
    }

    fn join(self, _right: Self, merged: u32) -> Self {
        merged
    }
}

/// Rank-greedy merging: repeatedly take the lowest-ranked pair present in
/// `seq` and replace all of its non-overlapping occurrences, left to right,
/// until no known pair remains.
pub(crate) fn merge_greedy<S, F>(seq: &mut Vec<S>, rule: F)
where
    S: Symbol,
    F: Fn(u32, u32) -> Option<MergeRule>,
{
    while seq.len() > 1 {
        let best = seq
            .windows(2)
            .filter_map(|w| rule(w[0].id(), w[1].id()).map(|r| (r, w[0].id(), w[1].id())))
            .min_by_key(|(r, _, _)| r.rank);
        let Some((best, left, right)) = best else {
            break;
        };

        let mut write = 0;
        let mut read = 0;
        while read < seq.len() {
            if read + 1 < seq.len() && seq[read].id() == left && seq[read + 1].id() == right {
                seq[write] = seq[read].join(seq[read + 1], best.merged);
                read += 2;
            } else {
                seq[write] = seq[read];
                read += 1;
            }
            write += 1;
        }
        seq.truncate(write);
    }
}
