//! Fixed-width bit sets over hypothesis indices.
//!
//! Indices are zero-based: position `i` refers to the `i`-th row of the
//! [`HypothesisFamily`](crate::HypothesisFamily) the set belongs to.

use std::cmp::Ordering;
use std::fmt;

const WORD: usize = 64;

/// A subset of `{0, .., n-1}` stored as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    n: usize,
    words: Vec<u64>,
}

impl IndexSet {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(WORD)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut set = Self::empty(n);
        for w in 0..set.words.len() {
            set.words[w] = u64::MAX;
        }
        set.trim();
        set
    }

    /// Builds a set from indices. Panics if an index is `>= n`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Self {
        let mut set = Self::empty(n);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Builds a set from the low `n` bits of `mask` (`n <= 64`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= WORD, "mask width {n} exceeds 64");
        let mut set = Self::empty(n);
        if n > 0 {
            set.words[0] = mask;
            set.trim();
        }
        set
    }

    /// The low 64 bits, for families that fit in one word.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        let tail = self.n % WORD;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    /// Width of the family this set indexes into.
    pub fn width(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.n, "index {i} out of range for width {}", self.n);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.n, "index {i} out of range for width {}", self.n);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    /// Cardinality.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &IndexSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        debug_assert_eq!(self.n, other.n);
        IndexSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        debug_assert_eq!(self.n, other.n);
        IndexSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Indices not in the set.
    pub fn complement(&self) -> IndexSet {
        let mut out = IndexSet {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.trim();
        out
    }

    /// Ascending iterator over member indices.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * WORD + tz)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Canonical order: cardinality first, then lexicographic on the
    /// ascending index lists.
    pub fn cmp_canonical(&self, other: &IndexSet) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops_across_word_boundary() {
        let n = 130;
        let a = IndexSet::from_indices(n, [0, 63, 64, 129]);
        let b = IndexSet::from_indices(n, [63, 129]);
        assert_eq!(a.len(), 4);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert!(a.intersects(&b));
        assert_eq!(a.to_vec(), vec![0, 63, 64, 129]);
        assert_eq!(a.complement().len(), n - 4);
        assert_eq!(IndexSet::full(n).len(), n);
        assert!(!a.contains(200));
    }

    #[test]
    fn canonical_order() {
        let n = 4;
        let mut sets = [
            IndexSet::from_indices(n, [1, 2]),
            IndexSet::from_indices(n, [3]),
            IndexSet::from_indices(n, [0, 3]),
            IndexSet::from_indices(n, [0]),
        ];
        sets.sort_by(|a, b| a.cmp_canonical(b));
        let lists: Vec<_> = sets.iter().map(IndexSet::to_vec).collect();
        assert_eq!(lists, vec![vec![0], vec![3], vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn mask_round_trip() {
        let s = IndexSet::from_mask(5, 0b1_0110);
        assert_eq!(s.to_vec(), vec![1, 2, 4]);
        assert_eq!(s.to_mask(), Some(0b1_0110));
        assert_eq!(IndexSet::from_mask(3, 0xff).to_mask(), Some(0b111));
    }
}
