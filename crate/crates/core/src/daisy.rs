//! Daisy patterns D_r(s,t), instance enumeration, and daisy-freeness
//! checking.
//!
//! A daisy instance is determined by a stem P (an (r-t)-set) and a free
//! set Q (an s-set disjoint from P); its petals are the r-sets P u T for
//! every t-subset T of Q. The plain daisy is (s,t) = (4,2): six petals.

use crate::error::{Error, Result};
use crate::family::{binomial, colex_subsets, rank_slice, SetFamily};

/// Parameters (r, s, t) of a daisy family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DaisyPattern {
    r: usize,
    s: usize,
    t: usize,
}

impl DaisyPattern {
    /// Requires 1 <= t <= min(s, r). t = 0 is rejected rather than treated
    /// as a degenerate single-petal pattern; t = s (one petal) is allowed.
    pub fn new(r: usize, s: usize, t: usize) -> Result<Self> {
        if t == 0 || t > s || t > r {
            return Err(Error::invalid(format!(
                "daisy pattern needs 1 <= t <= min(s, r), got (r, s, t) = ({r}, {s}, {t})"
            )));
        }
        Ok(DaisyPattern { r, s, t })
    }

    /// The plain r-daisy: (s, t) = (4, 2).
    pub fn plain(r: usize) -> Result<Self> {
        DaisyPattern::new(r, 4, 2)
    }

    /// Parse the CLI syntax "r,s,t".
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!(
                "pattern must be \"r,s,t\", got {text:?}"
            )));
        }
        let nums: Vec<usize> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("pattern component {p:?} is not a number")))
            })
            .collect::<Result<_>>()?;
        DaisyPattern::new(nums[0], nums[1], nums[2])
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn stem_size(&self) -> usize {
        self.r - self.t
    }

    pub fn petal_count(&self) -> u64 {
        binomial(self.s, self.t)
    }

    /// Smallest ground size on which the pattern instantiates.
    pub fn min_ground(&self) -> usize {
        self.r - self.t + self.s
    }

    /// Number of instances on [n]: binomial(n, r-t) * binomial(n-r+t, s).
    pub fn instance_count(&self, n: usize) -> u64 {
        if n < self.stem_size() {
            return 0;
        }
        binomial(n, self.stem_size()) * binomial(n - self.stem_size(), self.s)
    }
}

impl std::fmt::Display for DaisyPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "D_{}({},{})", self.r, self.s, self.t)
    }
}

/// A concrete daisy: stem P, free set Q, and the petal r-sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DaisyInstance {
    stem: Vec<usize>,
    free: Vec<usize>,
    petals: Vec<Vec<usize>>,
}

impl DaisyInstance {
    pub fn stem(&self) -> &[usize] {
        &self.stem
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn petals(&self) -> &[Vec<usize>] {
        &self.petals
    }

    /// Colex ranks of the petals (for membership tests against a family
    /// bitmap over a ground containing all elements).
    pub fn petal_ranks(&self) -> Vec<u64> {
        self.petals.iter().map(|p| rank_slice(p)).collect()
    }
}

fn check_sorted(name: &str, xs: &[usize]) -> Result<()> {
    if !xs.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid(format!(
            "{name} must be strictly increasing, got {xs:?}"
        )));
    }
    Ok(())
}

/// Sorted union of a sorted stem and a sorted petal-tip, into `out`.
fn merge_into(stem: &[usize], tip: &[usize], out: &mut Vec<usize>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < stem.len() || j < tip.len() {
        if j == tip.len() || (i < stem.len() && stem[i] < tip[j]) {
            out.push(stem[i]);
            i += 1;
        } else {
            out.push(tip[j]);
            j += 1;
        }
    }
}

/// Build the instance on (P, Q): petals are P u T for t-subsets T of Q,
/// in colex order of T.
pub fn instantiate(
    pattern: &DaisyPattern,
    stem: &[usize],
    free: &[usize],
) -> Result<DaisyInstance> {
    if stem.len() != pattern.stem_size() {
        return Err(Error::invalid(format!(
            "stem must have {} elements for {pattern}, got {stem:?}",
            pattern.stem_size()
        )));
    }
    if free.len() != pattern.s() {
        return Err(Error::invalid(format!(
            "free set must have {} elements for {pattern}, got {free:?}",
            pattern.s()
        )));
    }
    check_sorted("stem", stem)?;
    check_sorted("free set", free)?;
    if stem.iter().any(|e| free.binary_search(e).is_ok()) {
        return Err(Error::invalid(format!(
            "stem {stem:?} and free set {free:?} must be disjoint"
        )));
    }
    let mut petals = Vec::with_capacity(pattern.petal_count() as usize);
    let mut tip = vec![0usize; pattern.t()];
    for idx in colex_subsets(pattern.s(), pattern.t()) {
        for (slot, &i) in tip.iter_mut().zip(&idx) {
            *slot = free[i];
        }
        let mut petal = Vec::with_capacity(pattern.r());
        merge_into(stem, &tip, &mut petal);
        petals.push(petal);
    }
    Ok(DaisyInstance {
        stem: stem.to_vec(),
        free: free.to_vec(),
        petals,
    })
}

/// Visit every instance on [n] in deterministic order (stem colex-major,
/// free set colex-minor), passing stem, free set, and petal ranks. The
/// visitor returns false to stop early.
pub(crate) fn for_each_instance<F>(n: usize, pattern: &DaisyPattern, mut visit: F)
where
    F: FnMut(&[usize], &[usize], &[u64]) -> bool,
{
    let p_size = pattern.stem_size();
    if n < p_size || n - p_size < pattern.s() {
        return;
    }
    let tip_indices: Vec<Vec<usize>> = colex_subsets(pattern.s(), pattern.t()).collect();
    let mut complement = Vec::with_capacity(n - p_size);
    let mut free = vec![0usize; pattern.s()];
    let mut tip = vec![0usize; pattern.t()];
    let mut petal = Vec::with_capacity(pattern.r());
    let mut ranks = vec![0u64; tip_indices.len()];
    for stem in colex_subsets(n, p_size) {
        complement.clear();
        let mut si = 0;
        for e in 0..n {
            if si < stem.len() && stem[si] == e {
                si += 1;
            } else {
                complement.push(e);
            }
        }
        for q_idx in colex_subsets(complement.len(), pattern.s()) {
            for (slot, &i) in free.iter_mut().zip(&q_idx) {
                *slot = complement[i];
            }
            for (slot, idx) in ranks.iter_mut().zip(&tip_indices) {
                for (t_slot, &i) in tip.iter_mut().zip(idx) {
                    *t_slot = free[i];
                }
                merge_into(&stem, &tip, &mut petal);
                *slot = rank_slice(&petal);
            }
            if !visit(&stem, &free, &ranks) {
                return;
            }
        }
    }
}

/// All instances on [n], in deterministic order. Too-small n yields an
/// empty list, not an error.
pub fn enumerate_daisies(n: usize, pattern: &DaisyPattern) -> Vec<DaisyInstance> {
    let mut out = Vec::new();
    for_each_instance(n, pattern, |stem, free, _| {
        out.push(instantiate(pattern, stem, free).expect("enumerated (P, Q) is valid"));
        true
    });
    out
}

fn check_uniformity(family: &SetFamily, pattern: &DaisyPattern) -> Result<()> {
    if family.r() != pattern.r() {
        return Err(Error::invalid(format!(
            "family is {}-uniform but pattern is {pattern}",
            family.r()
        )));
    }
    Ok(())
}

/// First instance (in enumeration order) whose petals all lie in the
/// family, or None — None iff the family is daisy-free for the pattern.
pub fn find_daisy(family: &SetFamily, pattern: &DaisyPattern) -> Result<Option<DaisyInstance>> {
    check_uniformity(family, pattern)?;
    let mut found: Option<DaisyInstance> = None;
    for_each_instance(family.n(), pattern, |stem, free, ranks| {
        if ranks.iter().all(|&rank| family.contains_rank(rank)) {
            found = Some(instantiate(pattern, stem, free).expect("enumerated (P, Q) is valid"));
            false
        } else {
            true
        }
    });
    Ok(found)
}

pub fn is_daisy_free(family: &SetFamily, pattern: &DaisyPattern) -> Result<bool> {
    Ok(find_daisy(family, pattern)?.is_none())
}

/// Number of instances fully contained in the family.
pub fn daisy_count(family: &SetFamily, pattern: &DaisyPattern) -> Result<u64> {
    check_uniformity(family, pattern)?;
    let mut count = 0u64;
    for_each_instance(family.n(), pattern, |_, _, ranks| {
        if ranks.iter().all(|&rank| family.contains_rank(rank)) {
            count += 1;
        }
        true
    });
    Ok(count)
}

/// Witnesses that D_r(s,t) embeds into the two next-larger patterns.
#[derive(Debug, Clone)]
pub struct ContainmentReport {
    /// The base instance whose petal family was embedded.
    pub base: DaisyInstance,
    /// Instance of D_r(s+1, t) whose petals contain the base petals.
    pub in_wider: Option<DaisyInstance>,
    /// Instance of D_r(s+1, t+1) whose petals contain the base petals;
    /// None when t + 1 > r and that pattern does not exist.
    pub in_deeper: Option<DaisyInstance>,
}

/// Verify, by explicit search on a small ground set, that an instance of
/// the pattern sits inside instances of D_r(s+1, t) and D_r(s+1, t+1).
pub fn containment_check(pattern: &DaisyPattern) -> Result<ContainmentReport> {
    let n = pattern.min_ground() + 1;
    let stem: Vec<usize> = (0..pattern.stem_size()).collect();
    let free: Vec<usize> = (pattern.stem_size()..pattern.stem_size() + pattern.s()).collect();
    let base = instantiate(pattern, &stem, &free)?;
    let base_petals: std::collections::BTreeSet<Vec<usize>> =
        base.petals().iter().cloned().collect();

    let embed = |target: &DaisyPattern| -> Option<DaisyInstance> {
        enumerate_daisies(n, target).into_iter().find(|inst| {
            let petals: std::collections::BTreeSet<Vec<usize>> =
                inst.petals().iter().cloned().collect();
            base_petals.is_subset(&petals)
        })
    };

    let in_wider = embed(&DaisyPattern::new(
        pattern.r(),
        pattern.s() + 1,
        pattern.t(),
    )?);
    let in_deeper = match DaisyPattern::new(pattern.r(), pattern.s() + 1, pattern.t() + 1) {
        Ok(deeper) => embed(&deeper),
        Err(_) => None,
    };
    Ok(ContainmentReport {
        base,
        in_wider,
        in_deeper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::colex_unrank;

    #[test]
    fn pattern_validation() {
        assert!(DaisyPattern::new(3, 4, 2).is_ok());
        assert!(DaisyPattern::new(3, 4, 0).is_err());
        assert!(DaisyPattern::new(2, 4, 3).is_err());
        assert!(DaisyPattern::new(3, 2, 3).is_err());
        // t = s: single petal, degenerate but well-defined.
        let p = DaisyPattern::new(3, 3, 3).unwrap();
        assert_eq!(p.petal_count(), 1);
        assert_eq!(
            DaisyPattern::parse("3,4,2").unwrap(),
            DaisyPattern::plain(3).unwrap()
        );
        assert!(DaisyPattern::parse("3,4").is_err());
        assert!(DaisyPattern::parse("3,x,2").is_err());
    }

    #[test]
    fn instantiate_r2_is_k4() {
        let pattern = DaisyPattern::new(2, 4, 2).unwrap();
        let inst = instantiate(&pattern, &[], &[0, 1, 2, 3]).unwrap();
        let expected: Vec<Vec<usize>> = vec![
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![0, 3],
            vec![1, 3],
            vec![2, 3],
        ];
        assert_eq!(inst.petals(), expected.as_slice());
    }

    #[test]
    fn instantiate_with_stem() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        let inst = instantiate(&pattern, &[6], &[0, 1, 2, 3]).unwrap();
        assert_eq!(inst.petals().len(), 6);
        for petal in inst.petals() {
            assert_eq!(petal.len(), 3);
            assert!(petal.contains(&6));
        }
        assert_eq!(inst.petals()[0], vec![0, 1, 6]);
    }

    #[test]
    fn instantiate_single_petal() {
        let pattern = DaisyPattern::new(2, 2, 2).unwrap();
        let inst = instantiate(&pattern, &[], &[3, 5]).unwrap();
        assert_eq!(inst.petals(), &[vec![3, 5]]);
    }

    #[test]
    fn instantiate_rejects_bad_inputs() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        assert!(instantiate(&pattern, &[0], &[0, 1, 2, 3]).is_err());
        assert!(instantiate(&pattern, &[0, 1], &[2, 3, 4, 5]).is_err());
        assert!(instantiate(&pattern, &[9], &[1, 2, 3]).is_err());
    }

    #[test]
    fn enumerate_counts() {
        let d3 = DaisyPattern::new(3, 4, 2).unwrap();
        assert_eq!(enumerate_daisies(7, &d3).len() as u64, 105);
        assert_eq!(d3.instance_count(7), 105);
        let d2 = DaisyPattern::new(2, 4, 2).unwrap();
        assert_eq!(enumerate_daisies(6, &d2).len() as u64, 15);
        // Exactly-fitting ground: one free-set choice per stem.
        let n = d3.min_ground();
        assert_eq!(
            enumerate_daisies(n, &d3).len() as u64,
            binomial(n, d3.stem_size())
        );
        // Too small: empty, not an error.
        assert!(enumerate_daisies(d3.min_ground() - 1, &d3).is_empty());
    }

    #[test]
    fn enumerate_count_formula_sweep() {
        for n in 0..=12usize {
            for r in 1..=5usize.min(n) {
                for s in 1..=5usize {
                    for t in 1..=s.min(r) {
                        let pattern = DaisyPattern::new(r, s, t).unwrap();
                        let got = enumerate_daisies(n, &pattern).len() as u64;
                        assert_eq!(got, pattern.instance_count(n), "n={n} {pattern}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumerated_instances_are_valid() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        for inst in enumerate_daisies(7, &pattern) {
            assert_eq!(inst.petals().len() as u64, pattern.petal_count());
            let mut seen = std::collections::BTreeSet::new();
            for petal in inst.petals() {
                assert!(seen.insert(petal.clone()), "petals must be distinct");
                for e in inst.stem() {
                    assert!(petal.contains(e));
                }
                for e in petal {
                    assert!(inst.stem().contains(e) || inst.free().contains(e));
                }
            }
        }
    }

    #[test]
    fn find_daisy_in_complete_family() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        let f = SetFamily::complete(5, 3).unwrap();
        let inst = find_daisy(&f, &pattern).unwrap().unwrap();
        assert_eq!(inst.stem(), &[0]);
        assert_eq!(inst.free(), &[1, 2, 3, 4]);
    }

    #[test]
    fn daisy_count_complete_family() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        let f = SetFamily::complete(6, 3).unwrap();
        assert_eq!(daisy_count(&f, &pattern).unwrap(), 30);
        let empty = SetFamily::empty(6, 3).unwrap();
        assert_eq!(daisy_count(&empty, &pattern).unwrap(), 0);
    }

    #[test]
    fn uniformity_mismatch_rejected() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        let f = SetFamily::complete(6, 2).unwrap();
        assert!(find_daisy(&f, &pattern).is_err());
        assert!(daisy_count(&f, &pattern).is_err());
    }

    #[test]
    fn find_none_iff_count_zero() {
        let pattern = DaisyPattern::new(2, 4, 2).unwrap();
        for seed_rank in 0..32u64 {
            // Small deterministic families over [5].
            let mut f = SetFamily::empty(5, 2).unwrap();
            for rank in 0..binomial(5, 2) {
                if (seed_rank.wrapping_mul(2654435761) >> (rank % 31)) & 1 == 1 {
                    f.insert_rank(rank);
                }
            }
            let found = find_daisy(&f, &pattern).unwrap().is_some();
            let count = daisy_count(&f, &pattern).unwrap();
            assert_eq!(found, count > 0);
        }
    }

    #[test]
    fn containment_witnesses() {
        let report = containment_check(&DaisyPattern::new(3, 4, 2).unwrap()).unwrap();
        let wider = report.in_wider.expect("(3,4,2) embeds in (3,5,2)");
        let deeper = report.in_deeper.expect("(3,4,2) embeds in (3,5,3)");
        let base: std::collections::BTreeSet<_> = report.base.petals().iter().cloned().collect();
        for inst in [&wider, &deeper] {
            let petals: std::collections::BTreeSet<_> = inst.petals().iter().cloned().collect();
            assert!(base.is_subset(&petals));
        }

        // K_4's edges inside the K_5 pattern.
        let report = containment_check(&DaisyPattern::new(2, 4, 2).unwrap()).unwrap();
        assert!(report.in_wider.is_some());
        assert!(report.in_deeper.is_none(), "(2,5,3) needs t <= r");
    }

    #[test]
    fn petal_ranks_match_family_indexing() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        let inst = instantiate(&pattern, &[6], &[0, 2, 4, 5]).unwrap();
        for (petal, rank) in inst.petals().iter().zip(inst.petal_ranks()) {
            assert_eq!(
                colex_unrank(rank, 7, 3).unwrap().elements(),
                petal.as_slice()
            );
        }
    }
}
