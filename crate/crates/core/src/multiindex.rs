//! Multi-indices in `N_0^d` under the graded ordering used everywhere else.
//!
//! Indices are compared first by total degree; ties are broken
//! lexicographically so that within a level the index with the larger leading
//! entry comes first. For `d = 2` the order starts
//! `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), (3,0), ...` and the last index
//! of level `n` is `n * e_d`. Ranks are 0-based positions in this order; they
//! are what the kernel, polynomial and defect tables are indexed by.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial `z^a = z_1^{a_1} ... z_d^{a_d}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex {
    entries: Vec<u32>,
}

impl MultiIndex {
    /// Builds an index from its exponents. `entries` must be nonempty.
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs at least one entry");
        MultiIndex { entries }
    }

    /// The zero index of dimension `d`.
    pub fn zero(d: usize) -> Self {
        MultiIndex::new(vec![0; d])
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Total degree `|a| = a_1 + ... + a_d`.
    pub fn degree(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// Exponent of variable `j` (0-based).
    pub fn entry(&self, j: usize) -> u32 {
        self.entries[j]
    }

    /// All exponents.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// The index with `e_j` added, as used by the moment shift identity.
    pub fn add_unit(&self, j: usize) -> Self {
        let mut e = self.entries.clone();
        e[j] += 1;
        MultiIndex { entries: e }
    }

    /// Graded comparison: total degree first, then larger leading entry first.
    pub fn cmp_shortlex(&self, other: &Self) -> Ordering {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match b.cmp(a) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// 0-based position in the graded order.
    pub fn rank(&self) -> usize {
        let d = self.dim();
        let l = self.degree() as usize;
        first_rank_of_level(d, l) + same_level_offset(&self.entries, l)
    }

    /// Index at position `r` of the graded order on `N_0^d`.
    ///
    /// ```
    /// use ballszego::MultiIndex;
    /// assert_eq!(MultiIndex::unrank(2, 4).entries(), &[1, 1]);
    /// assert_eq!(MultiIndex::unrank(2, 4).rank(), 4);
    /// ```
    pub fn unrank(d: usize, r: usize) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        let mut level = 0usize;
        let mut base = 0usize;
        loop {
            let c = level_count(d, level);
            if base + c > r {
                break;
            }
            base += c;
            level += 1;
        }
        let mut entries = Vec::with_capacity(d);
        let mut offset = r - base;
        let mut rem_level = level;
        for pos in 0..d {
            let rem_dim = d - pos;
            if rem_dim == 1 {
                entries.push(rem_level as u32);
                break;
            }
            for c in (0..=rem_level).rev() {
                let block = level_count(rem_dim - 1, rem_level - c);
                if offset < block {
                    entries.push(c as u32);
                    rem_level -= c;
                    break;
                }
                offset -= block;
            }
        }
        MultiIndex { entries }
    }

    /// Immediate successor in the graded order.
    pub fn succ(&self) -> Self {
        MultiIndex::unrank(self.dim(), self.rank() + 1)
    }

    /// Immediate predecessor, `None` for the zero index.
    pub fn prec(&self) -> Option<Self> {
        let r = self.rank();
        if r == 0 {
            None
        } else {
            Some(MultiIndex::unrank(self.dim(), r - 1))
        }
    }

    /// Compact `a1:a2:...:ad` form for tabular output.
    pub fn compact(&self) -> String {
        self.entries
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(":")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_shortlex(other)
    }
}

/// Number of indices of total degree `level` in `d` variables,
/// `C(level + d - 1, d - 1)`.
pub fn level_count(d: usize, level: usize) -> usize {
    binomial(level + d - 1, d - 1)
}

/// Rank of the first index of the given level.
pub fn first_rank_of_level(d: usize, level: usize) -> usize {
    (0..level).map(|l| level_count(d, l)).sum()
}

/// The first `count` indices of the graded order on `N_0^d`.
pub fn shortlex_range(d: usize, count: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let mut cur = MultiIndex::zero(d);
    for _ in 0..count - 1 {
        let next = cur.succ();
        out.push(cur);
        cur = next;
    }
    out.push(cur);
    out
}

fn same_level_offset(entries: &[u32], level: usize) -> usize {
    if entries.len() == 1 {
        return 0;
    }
    let head = entries[0] as usize;
    let rem_dim = entries.len() - 1;
    let mut off = 0usize;
    for c in head + 1..=level {
        off += level_count(rem_dim, level - c);
    }
    off + same_level_offset(&entries[1..], level - head)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}
