//! Incremental BPE learner.
//!
//! Pair counts are maintained across iterations instead of being recounted:
//! each merge only revisits the words that contain the merged pair, found
//! through a pair → word index, and the best pair is taken from a lazily
//! invalidated max-heap.

use alloc::collections::BinaryHeap;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;

use super::table::{merge_greedy, MergeRule, MergeTable};
use super::{BpeConfig, WordFrequencyMap};

/// Result of a learning run: the merge table plus the segmentation the learner
/// held for each training word when it stopped.
#[derive(Debug, Clone)]
pub struct Learned {
    pub table: MergeTable,
    /// `(word, symbols, frequency)` in word order.
    pub segmentations: Vec<(String, Vec<String>, u64)>,
}

/// Learns a merge table from word frequencies.
///
/// Each iteration takes the most frequent adjacent pair (ties go to the
/// lexicographically smallest `(left, right)`), records it and rewrites the
/// words that contain it. Learning stops after `cfg.num_merges` merges, or
/// earlier once the best count drops below `cfg.min_pair_frequency`.
pub fn learn_bpe(words: &WordFrequencyMap, cfg: &BpeConfig) -> MergeTable {
    learn_bpe_detailed(words, cfg).table
}

pub fn learn_bpe_detailed(words: &WordFrequencyMap, cfg: &BpeConfig) -> Learned {
    let mut learner = Learner::new(words);
    let mut table = MergeTable::new();
    while table.len() < cfg.num_merges {
        let Some(best) = learner.pop_best() else {
            break;
        };
        if best.count < cfg.min_pair_frequency {
            break;
        }
        table
            .push(String::from(&*best.left), String::from(&*best.right))
            .expect("learned merges are built from known symbols and never repeat");
        learner.apply(best.pair, table.len() as u32 - 1);
    }
    let segmentations = words
        .iter()
        .zip(&learner.words)
        .map(|((word, freq), symbols)| {
            let symbols = symbols
                .iter()
                .map(|&id| String::from(&*learner.names[id as usize]));
            (String::from(word), symbols.collect(), freq)
        })
        .collect();
    Learned {
        table,
        segmentations,
    }
}

type Pair = (u32, u32);

#[derive(Debug, Clone)]
struct Candidate {
    count: u64,
    pair: Pair,
    left: Rc<str>,
    right: Rc<str>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Max-heap order: higher count first, then the smaller (left, right).
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| (&*other.left, &*other.right).cmp(&(&*self.left, &*self.right)))
    }
}

struct Learner {
    names: Vec<Rc<str>>,
    ids: HashMap<Rc<str>, u32>,
    words: Vec<Vec<u32>>,
    freqs: Vec<u64>,
    counts: HashMap<Pair, u64>,
    occurrences: HashMap<Pair, Vec<u32>>,
    rules: HashMap<Pair, MergeRule>,
    heap: BinaryHeap<Candidate>,
    visited: Vec<u32>,
    delta: HashMap<Pair, i64>,
}

impl Learner {
    fn new(words: &WordFrequencyMap) -> Self {
        let mut learner = Self {
            names: Vec::new(),
            ids: HashMap::new(),
            words: Vec::with_capacity(words.len()),
            freqs: Vec::with_capacity(words.len()),
            counts: HashMap::new(),
            occurrences: HashMap::new(),
            rules: HashMap::new(),
            heap: BinaryHeap::new(),
            visited: alloc::vec![0; words.len()],
            delta: HashMap::new(),
        };
        let mut buf = [0u8; 4];
        for (index, (word, freq)) in words.iter().enumerate() {
            let symbols: Vec<u32> = word
                .chars()
                .map(|c| learner.intern(c.encode_utf8(&mut buf)))
                .collect();
            for w in symbols.windows(2) {
                let pair = (w[0], w[1]);
                *learner.counts.entry(pair).or_insert(0) += freq;
                let list = learner.occurrences.entry(pair).or_default();
                if list.last() != Some(&(index as u32)) {
                    list.push(index as u32);
                }
            }
            learner.words.push(symbols);
            learner.freqs.push(freq);
        }
        let initial: Vec<(Pair, u64)> = learner.counts.iter().map(|(&p, &c)| (p, c)).collect();
        for (pair, count) in initial {
            learner.push_candidate(pair, count);
        }
        learner
    }

    fn intern(&mut self, symbol: &str) -> u32 {
        if let Some(&id) = self.ids.get(symbol) {
            return id;
        }
        let id = self.names.len() as u32;
        let name: Rc<str> = Rc::from(symbol);
        self.ids.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    fn push_candidate(&mut self, pair: Pair, count: u64) {
        self.heap.push(Candidate {
            count,
            pair,
            left: self.names[pair.0 as usize].clone(),
            right: self.names[pair.1 as usize].clone(),
        });
    }

    /// Pops heap entries until one matches the live count of its pair.
    fn pop_best(&mut self) -> Option<Candidate> {
        while let Some(candidate) = self.heap.pop() {
            if self.counts.get(&candidate.pair) == Some(&candidate.count) {
                return Some(candidate);
            }
        }
        None
    }

    fn apply(&mut self, pair: Pair, rank: u32) {
        let mut merged = String::from(&*self.names[pair.0 as usize]);
        merged.push_str(&self.names[pair.1 as usize]);
        let merged = self.intern(&merged);
        self.rules.insert(pair, MergeRule { rank, merged });

        let stamp = rank + 1;
        let affected = self.occurrences.remove(&pair).unwrap_or_default();
        let rules = &self.rules;
        for index in affected {
            let i = index as usize;
            if self.visited[i] == stamp {
                continue;
            }
            self.visited[i] = stamp;
            let word = &mut self.words[i];
            if !word.windows(2).any(|w| (w[0], w[1]) == pair) {
                continue;
            }
            let before = word.clone();
            // Merging can recreate an earlier-ranked pair when two merges
            // spell the same symbol; rank-greedy merging keeps the word in
            // the state the applier would produce.
            merge_greedy(word, |l, r| rules.get(&(l, r)).copied());

            let freq = self.freqs[i] as i64;
            for w in before.windows(2) {
                *self.delta.entry((w[0], w[1])).or_insert(0) -= freq;
            }
            for w in word.windows(2) {
                let p = (w[0], w[1]);
                *self.delta.entry(p).or_insert(0) += freq;
                if !before.windows(2).any(|b| (b[0], b[1]) == p) {
                    let list = self.occurrences.entry(p).or_default();
                    if list.last() != Some(&index) {
                        list.push(index);
                    }
                }
            }
        }

        let mut changed = Vec::new();
        for (p, d) in self.delta.drain() {
            if d == 0 {
                continue;
            }
            let count = self.counts.entry(p).or_insert(0);
            *count = (*count as i64 + d) as u64;
            if *count == 0 {
                self.counts.remove(&p);
            } else {
                changed.push((p, *count));
            }
        }
        for (p, count) in changed {
            self.push_candidate(p, count);
        }
    }
}
