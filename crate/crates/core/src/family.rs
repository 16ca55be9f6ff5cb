//! Ground-set arithmetic, colex ranking of r-sets, and the `SetFamily`
//! container everything else builds on.
//!
//! Ground elements are 0-based: the usual `[n] = {1..n}` maps to
//! `{0..n-1}`. An r-uniform family over `[n]` is stored as a dense
//! membership bitmap of length `binomial(n, r)` indexed by colex rank.

use crate::bitmap::Bitmap;
use crate::error::{Error, Result};

/// Largest supported ground size. Binomials are precomputed up to here;
/// anything larger is a hard error rather than silent wraparound.
pub const MAX_GROUND: usize = 64;

/// Dense family bitmaps are capped at this many positions (desk scale).
pub const MAX_FAMILY_BITS: u64 = 10_000_000;

static TABLE: [[u64; MAX_GROUND + 1]; MAX_GROUND + 1] = build_table();

const fn build_table() -> [[u64; MAX_GROUND + 1]; MAX_GROUND + 1] {
    let mut t = [[0u64; MAX_GROUND + 1]; MAX_GROUND + 1];
    let mut n = 0;
    while n <= MAX_GROUND {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    t
}

/// binomial(n, k) from the precomputed table; n > 64 panics.
#[inline]
pub fn binomial(n: usize, k: usize) -> u64 {
    assert!(
        n <= MAX_GROUND,
        "binomial({n}, {k}) exceeds the n <= {MAX_GROUND} table"
    );
    if k > n {
        0
    } else {
        TABLE[n][k]
    }
}

/// An r-subset of [0, n): strictly increasing elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RSet {
    elements: Vec<usize>,
    n: usize,
}

impl RSet {
    pub fn new(elements: Vec<usize>, n: usize) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::refusal(format!(
                "ground size {n} exceeds the supported maximum {MAX_GROUND}"
            )));
        }
        if !elements.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!(
                "set elements must be strictly increasing, got {elements:?}"
            )));
        }
        if elements.last().is_some_and(|&e| e >= n) {
            return Err(Error::invalid(format!(
                "set elements must lie in [0, {n}), got {elements:?}"
            )));
        }
        Ok(RSet { elements, n })
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn ground(&self) -> usize {
        self.n
    }

    pub fn cardinality(&self) -> usize {
        self.elements.len()
    }
}

/// Colex rank of an r-set: rank(s) = sum of binomial(s_i, i+1) over
/// positions i. A bijection from r-subsets of [n] onto [0, binomial(n,r)).
pub fn colex_rank(s: &RSet) -> u64 {
    rank_slice(s.elements())
}

pub(crate) fn rank_slice(elements: &[usize]) -> u64 {
    elements
        .iter()
        .enumerate()
        .map(|(i, &e)| binomial(e, i + 1))
        .sum()
}

/// Inverse of `colex_rank`.
pub fn colex_unrank(rank: u64, n: usize, r: usize) -> Result<RSet> {
    if n > MAX_GROUND {
        return Err(Error::refusal(format!(
            "ground size {n} exceeds the supported maximum {MAX_GROUND}"
        )));
    }
    if r > n || rank >= binomial(n, r) {
        return Err(Error::OutOfRange(format!(
            "rank {rank} out of range for binomial({n}, {r}) = {}",
            binomial(n, r)
        )));
    }
    let mut elements = vec![0usize; r];
    let mut remaining = rank;
    let mut upper = n;
    for i in (0..r).rev() {
        // Largest c with binomial(c, i+1) <= remaining; c >= i always works
        // since binomial(i, i+1) = 0.
        let mut c = i;
        for candidate in (i..upper).rev() {
            if binomial(candidate, i + 1) <= remaining {
                c = candidate;
                break;
            }
        }
        remaining -= binomial(c, i + 1);
        elements[i] = c;
        upper = c;
    }
    debug_assert_eq!(remaining, 0);
    RSet::new(elements, n)
}

/// r-uniform family over [n], stored as a membership bitmap indexed by
/// colex rank. Immutable once constructed; safe to share between threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    r: usize,
    members: Bitmap,
}

impl SetFamily {
    pub fn empty(n: usize, r: usize) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::refusal(format!(
                "ground size {n} exceeds the supported maximum {MAX_GROUND}"
            )));
        }
        if r > n {
            return Err(Error::invalid(format!(
                "uniformity {r} exceeds ground size {n}"
            )));
        }
        let bits = binomial(n, r);
        if bits > MAX_FAMILY_BITS {
            return Err(Error::refusal(format!(
                "binomial({n}, {r}) = {bits} exceeds the family cap {MAX_FAMILY_BITS}"
            )));
        }
        Ok(SetFamily {
            n,
            r,
            members: Bitmap::zeros(bits),
        })
    }

    pub fn complete(n: usize, r: usize) -> Result<Self> {
        let mut f = SetFamily::empty(n, r)?;
        f.members = Bitmap::ones(f.members.len());
        Ok(f)
    }

    pub fn from_sets<I>(n: usize, r: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut f = SetFamily::empty(n, r)?;
        for elements in sets {
            if elements.len() != r {
                return Err(Error::invalid(format!(
                    "expected {r}-sets, got {elements:?}"
                )));
            }
            let s = RSet::new(elements, n)?;
            let rank = colex_rank(&s);
            if f.members.get(rank) {
                return Err(Error::invalid(format!(
                    "duplicate member {:?}",
                    s.elements()
                )));
            }
            f.members.set(rank, true);
        }
        Ok(f)
    }

    pub(crate) fn insert_rank(&mut self, rank: u64) {
        self.members.set(rank, true);
    }

    /// Family from member colex ranks; duplicates are rejected.
    pub fn from_ranks<I>(n: usize, r: usize, ranks: I) -> Result<Self>
    where
        I: IntoIterator<Item = u64>,
    {
        let mut f = SetFamily::empty(n, r)?;
        for rank in ranks {
            if rank >= f.capacity() {
                return Err(Error::OutOfRange(format!(
                    "rank {rank} out of range for binomial({n}, {r})"
                )));
            }
            if f.members.get(rank) {
                return Err(Error::invalid(format!("duplicate member rank {rank}")));
            }
            f.members.set(rank, true);
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn capacity(&self) -> u64 {
        self.members.len()
    }

    pub fn len(&self) -> u64 {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn contains_rank(&self, rank: u64) -> bool {
        self.members.get(rank)
    }

    pub fn contains(&self, s: &RSet) -> Result<bool> {
        if s.ground() != self.n || s.cardinality() != self.r {
            return Err(Error::invalid(format!(
                "set over ground {} with {} elements queried against a ({}, {}) family",
                s.ground(),
                s.cardinality(),
                self.n,
                self.r
            )));
        }
        Ok(self.contains_rank(colex_rank(s)))
    }

    /// Member ranks in increasing colex order.
    pub fn ranks(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter_ones()
    }

    /// Members as element vectors, in colex order.
    pub fn members(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.ranks().map(|rank| {
            colex_unrank(rank, self.n, self.r)
                .expect("stored rank is valid")
                .elements()
                .to_vec()
        })
    }

    /// True when every member of `self` is a member of `other`.
    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.n == other.n && self.r == other.r && self.members.is_subset_of(&other.members)
    }

    /// All r-sets not in the family.
    pub fn complement(&self) -> SetFamily {
        SetFamily {
            n: self.n,
            r: self.r,
            members: self.members.complement(),
        }
    }

    /// Image family under a permutation of the ground set.
    pub fn relabel(&self, perm: &[usize]) -> Result<SetFamily> {
        if perm.len() != self.n {
            return Err(Error::invalid(format!(
                "permutation length {} does not match ground size {}",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(Error::invalid(format!(
                    "not a bijection on [0, {}): {perm:?}",
                    self.n
                )));
            }
            seen[p] = true;
        }
        let mut out = SetFamily {
            n: self.n,
            r: self.r,
            members: Bitmap::zeros(self.members.len()),
        };
        let mut image = vec![0usize; self.r];
        for rank in self.ranks() {
            let s = colex_unrank(rank, self.n, self.r).expect("stored rank is valid");
            for (slot, &e) in image.iter_mut().zip(s.elements()) {
                *slot = perm[e];
            }
            image.sort_unstable();
            out.members.set(rank_slice(&image), true);
        }
        Ok(out)
    }
}

/// Iterator over all r-subsets of [n] in colex order, yielded as element
/// buffers. Used by enumeration loops that want sets rather than ranks.
pub fn colex_subsets(n: usize, r: usize) -> ColexSubsets {
    let first: Vec<usize> = (0..r).collect();
    ColexSubsets {
        n,
        current: first,
        done: r > n,
    }
}

pub struct ColexSubsets {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // Colex successor: bump the first position that can move without
        // colliding with the next one; reset everything below it.
        let r = self.current.len();
        let mut i = 0;
        loop {
            if i == r {
                self.done = true;
                break;
            }
            let cap = if i + 1 < r {
                self.current[i + 1]
            } else {
                self.n
            };
            if self.current[i] + 1 < cap {
                self.current[i] += 1;
                for j in 0..i {
                    self.current[j] = j;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}
