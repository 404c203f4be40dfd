//! Bit-set over the inputs `t_0, …, t_{m-1}` of an And-Or path.

use std::fmt;

/// Maximum number of inputs representable by [`InputSubset`].
pub const MAX_INPUTS: usize = 64;

/// A set of input indices stored as one machine word.
///
/// Every sub-path of an And-Or path is identified with the set of its
/// (essential) inputs, so this is also the memo key of the solver.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct InputSubset(u64);

impl InputSubset {
    pub const EMPTY: InputSubset = InputSubset(0);

    pub const fn from_mask(mask: u64) -> Self {
        InputSubset(mask)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    /// `{t_0, …, t_{m-1}}`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_INPUTS);
        if m >= 64 {
            InputSubset(u64::MAX)
        } else {
            InputSubset((1u64 << m) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        InputSubset(1u64 << i)
    }

    /// Inputs with index in `lo..hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        if lo >= hi {
            return Self::EMPTY;
        }
        InputSubset(Self::full(hi).0 & !Self::full(lo).0)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        InputSubset(indices.into_iter().fold(0u64, |acc, i| acc | (1u64 << i)))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && (self.0 >> i) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    pub fn with(self, i: usize) -> Self {
        InputSubset(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Self {
        InputSubset(self.0 & !(1u64 << i))
    }

    pub fn min_index(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Members with index strictly below `i`.
    pub fn below(self, i: usize) -> Self {
        InputSubset(self.0 & Self::full(i).0)
    }

    /// Members with index strictly above `i`.
    pub fn above(self, i: usize) -> Self {
        if i >= 63 {
            return Self::EMPTY;
        }
        InputSubset(self.0 & !Self::full(i + 1).0)
    }

    pub fn union(self, other: Self) -> Self {
        InputSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        InputSubset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        InputSubset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Ascending iteration over member indices.
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Indicator vector `(x_0, …, x_{m-1})`.
    pub fn indicator(self, m: usize) -> Vec<bool> {
        (0..m).map(|i| self.contains(i)).collect()
    }
}

impl IntoIterator for InputSubset {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl FromIterator<usize> for InputSubset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_indices(iter)
    }
}

#[derive(Clone)]
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

impl DoubleEndedIterator for Iter {
    fn next_back(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = 63 - self.0.leading_zeros() as usize;
        self.0 &= !(1u64 << i);
        Some(i)
    }
}

impl fmt::Debug for InputSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "t{i}")?;
        }
        f.write_str("}")
    }
}
