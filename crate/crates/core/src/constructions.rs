//! Explicit extremal families: complete multipartite graphs, the Fano
//! plane and its complement, blow-ups and the iterated 7^k construction,
//! the parity-constrained family, and layered hypercube transversals.

use crate::cube::CubeVertexSet;
use crate::error::{Error, Result};
use crate::family::{binomial, colex_subsets, rank_slice, SetFamily, MAX_GROUND};

/// Partition of [n] into k classes by the even-split rule: the first
/// (n mod k) classes get ceil(n/k) elements, the rest floor(n/k), assigned
/// in contiguous blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    pub fn even_split(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::invalid(format!(
                "cannot split {n} elements into {k} classes"
            )));
        }
        let base = n / k;
        let extra = n % k;
        let mut class_of = Vec::with_capacity(n);
        let mut sizes = Vec::with_capacity(k);
        for class in 0..k {
            let size = base + usize::from(class < extra);
            sizes.push(size);
            class_of.extend(std::iter::repeat_n(class, size));
        }
        Ok(Partition { class_of, sizes })
    }

    /// Contiguous blocks of equal size `block`; requires block * k = n.
    pub fn blocks(block: usize, k: usize) -> Result<Self> {
        Partition::even_split(block * k, k)
    }

    pub fn ground_size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Elements of one class, in increasing order.
    pub fn class_elements(&self, class: usize) -> Vec<usize> {
        (0..self.ground_size())
            .filter(|&e| self.class_of[e] == class)
            .collect()
    }
}

/// All r-sets meeting each of r near-equal classes exactly once. Such a
/// family contains no daisy: two petals of any instance would differ in
/// two elements inside one class.
pub fn complete_multipartite(n: usize, r: usize) -> Result<SetFamily> {
    let partition = Partition::even_split(n, r)?;
    let mut family = SetFamily::empty(n, r)?;
    let mut member = vec![0usize; r];
    transversal_rec(&partition, 0, &mut member, &mut family);
    Ok(family)
}

fn transversal_rec(
    partition: &Partition,
    class: usize,
    member: &mut Vec<usize>,
    family: &mut SetFamily,
) {
    if class == partition.class_count() {
        // Classes are contiguous blocks, so the member is already sorted.
        family.insert_rank(rank_slice(member));
        return;
    }
    for e in partition.class_elements(class) {
        member[class] = e;
        transversal_rec(partition, class + 1, member, family);
    }
}

/// Number of members of `complete_multipartite(n, r)`: the product of the
/// even-split class sizes.
pub fn multipartite_member_count(n: usize, r: usize) -> Result<u64> {
    let partition = Partition::even_split(n, r)?;
    Ok(partition.sizes().iter().map(|&s| s as u64).product())
}

/// The Fano plane as triples {a, a+1, a+3} over the integers mod 7.
pub fn fano_lines() -> SetFamily {
    let mut lines = Vec::with_capacity(7);
    for a in 0usize..7 {
        let mut line = vec![a, (a + 1) % 7, (a + 3) % 7];
        line.sort_unstable();
        lines.push(line);
    }
    SetFamily::from_sets(7, 3, lines).expect("Fano lines are valid 3-sets")
}

/// The 28 non-line triples on 7 points: a daisy-free family attaining
/// density 4/5 of binomial(7, 3).
pub fn fano_complement() -> SetFamily {
    fano_lines().complement()
}

/// A blow-up: a 3-uniform base family of allowed class-triples plus a
/// partition with one class per base point.
#[derive(Debug, Clone)]
pub struct BlowupSpec {
    base: SetFamily,
    partition: Partition,
}

impl BlowupSpec {
    pub fn new(base: SetFamily, partition: Partition) -> Result<Self> {
        if base.r() != 3 {
            return Err(Error::invalid(format!(
                "blow-up base must be 3-uniform, got r = {}",
                base.r()
            )));
        }
        if partition.class_count() != base.n() {
            return Err(Error::invalid(format!(
                "partition has {} classes but base has {} points",
                partition.class_count(),
                base.n()
            )));
        }
        Ok(BlowupSpec { base, partition })
    }

    pub fn base(&self) -> &SetFamily {
        &self.base
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }
}

/// All 3-sets whose three classes are distinct and form a member of the
/// base: sets touching a class twice are excluded (the family is
/// k-partite).
pub fn blowup(spec: &BlowupSpec) -> Result<SetFamily> {
    let n = spec.partition.ground_size();
    let mut family = SetFamily::empty(n, 3)?;
    for triple in spec.base.members() {
        let classes: Vec<Vec<usize>> = triple
            .iter()
            .map(|&c| spec.partition.class_elements(c))
            .collect();
        for &x in &classes[0] {
            for &y in &classes[1] {
                for &z in &classes[2] {
                    let mut member = [x, y, z];
                    member.sort_unstable();
                    family.insert_rank(rank_slice(&member));
                }
            }
        }
    }
    Ok(family)
}

/// Class-triple profile of a member whose three elements lie in distinct
/// classes; None when a class is touched twice.
pub fn class_profile(partition: &Partition, member: &[usize]) -> Option<Vec<usize>> {
    let mut classes: Vec<usize> = member.iter().map(|&e| partition.class_of(e)).collect();
    classes.sort_unstable();
    if classes.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(classes)
    }
}

/// The iterated Fano construction on 7^k points: a blow-up of the 28
/// non-line class-triples over 7 contiguous blocks of 7^(k-1), plus a
/// recursively built copy inside each block. Member count is exactly
/// (1 - 49^-k) * 7^(3k) / 12.
pub fn iterated_fano(k: usize) -> Result<SetFamily> {
    if k == 0 {
        return Err(Error::invalid(
            "iterated construction needs k >= 1".to_string(),
        ));
    }
    let n = 7usize
        .checked_pow(k as u32)
        .filter(|&n| n <= MAX_GROUND)
        .ok_or_else(|| {
            Error::refusal(format!(
                "7^{k} points exceeds the supported ground {MAX_GROUND}"
            ))
        })?;
    // SetFamily::empty re-checks the bitmap cap binomial(n, 3).
    let block = n / 7;
    let spec = BlowupSpec::new(fano_complement(), Partition::blocks(block, 7)?)?;
    let mut family = blowup(&spec)?;
    if k > 1 {
        let inner = iterated_fano(k - 1)?;
        let mut shifted = vec![0usize; 3];
        for class in 0..7 {
            let offset = class * block;
            for member in inner.members() {
                for (slot, &e) in shifted.iter_mut().zip(&member) {
                    *slot = e + offset;
                }
                family.insert_rank(rank_slice(&shifted));
            }
        }
    }
    Ok(family)
}

/// Member count formula for `iterated_fano(k)`.
pub fn iterated_fano_count(k: usize) -> u64 {
    // (1 - 49^-k) * 7^(3k) / 12 over the integers.
    let n = 7u64.pow(k as u32);
    let n3 = n * n * n;
    (n3 - n3 / 49u64.pow(k as u32)) / 12
}

/// All r-sets with class intersection sizes in [r/k - delta, r/k + delta]
/// that are even in every class, except that for odd r the last class is
/// odd. An infeasible parity yields an empty family, not an error.
pub fn parity_family(n: usize, k: usize, r: usize, delta: usize) -> Result<SetFamily> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "parity family needs k >= 2, got {k}"
        )));
    }
    if r > n {
        return Err(Error::invalid(format!("r = {r} exceeds n = {n}")));
    }
    if delta == 0 {
        return Err(Error::invalid("parity family needs delta >= 1".to_string()));
    }
    let partition = Partition::even_split(n, k)?;
    let mut family = SetFamily::empty(n, r)?;
    let mut profile = vec![0usize; k];
    let mut member: Vec<usize> = Vec::with_capacity(r);
    parity_profiles(&partition, r, delta, 0, r, &mut profile, &mut |profile| {
        emit_profile_members(&partition, profile, 0, &mut member, &mut family);
    });
    Ok(family)
}

/// True when `size` is admissible for class `class`: within the window
/// [r/k - delta, r/k + delta] (compared exactly as k*size vs r +- k*delta)
/// and of the parity the construction demands.
pub fn class_size_admissible(size: usize, class: usize, r: usize, k: usize, delta: usize) -> bool {
    let ks = k * size;
    let lower_ok = ks + k * delta >= r;
    let upper_ok = ks <= r + k * delta;
    let want_odd = r % 2 == 1 && class == k - 1;
    lower_ok && upper_ok && (size % 2 == usize::from(want_odd))
}

fn parity_profiles(
    partition: &Partition,
    r: usize,
    delta: usize,
    class: usize,
    remaining: usize,
    profile: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    let k = partition.class_count();
    if class == k {
        if remaining == 0 {
            emit(profile);
        }
        return;
    }
    let cap = partition.sizes()[class].min(remaining);
    for size in 0..=cap {
        if class_size_admissible(size, class, r, k, delta) {
            profile[class] = size;
            parity_profiles(
                partition,
                r,
                delta,
                class + 1,
                remaining - size,
                profile,
                emit,
            );
        }
    }
    profile[class] = 0;
}

fn emit_profile_members(
    partition: &Partition,
    profile: &[usize],
    class: usize,
    member: &mut Vec<usize>,
    family: &mut SetFamily,
) {
    if class == partition.class_count() {
        family.insert_rank(rank_slice(member));
        return;
    }
    // Classes are contiguous ascending blocks, so appending class picks in
    // class order keeps the member globally sorted.
    let elements = partition.class_elements(class);
    for idx in colex_subsets(elements.len(), profile[class]) {
        let before = member.len();
        member.extend(idx.iter().map(|&i| elements[i]));
        emit_profile_members(partition, profile, class + 1, member, family);
        member.truncate(before);
    }
}

/// Maximum number of family members inside any w-element window, with the
/// first maximizing window in colex order.
pub fn max_members_in_window(family: &SetFamily, w: usize) -> Result<(u64, Vec<usize>)> {
    if w < family.r() {
        return Err(Error::invalid(format!(
            "window size {w} below uniformity {}",
            family.r()
        )));
    }
    if w > family.n() {
        return Err(Error::invalid(format!(
            "window size {w} exceeds ground size {}",
            family.n()
        )));
    }
    if binomial(family.n(), w) > crate::family::MAX_FAMILY_BITS {
        return Err(Error::refusal(format!(
            "binomial({}, {w}) windows exceed the scan cap",
            family.n()
        )));
    }
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut subset = Vec::with_capacity(family.r());
    for window in colex_subsets(family.n(), w) {
        let mut count = 0u64;
        for idx in colex_subsets(w, family.r()) {
            subset.clear();
            subset.extend(idx.iter().map(|&i| window[i]));
            if family.contains_rank(rank_slice(&subset)) {
                count += 1;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| count > *b) {
            best = Some((count, window));
        }
    }
    Ok(best.expect("at least one window exists"))
}

/// Vertices of Q_n whose layer is congruent to `offset` mod (d+1). Every
/// d-subcube spans d+1 consecutive layers, so it contains a full slice of
/// this set: the family is a transversal of all d-subcubes.
pub fn layered_transversal(n: usize, d: usize, offset: usize) -> Result<CubeVertexSet> {
    if offset > d {
        return Err(Error::invalid(format!(
            "offset must lie in [0, {d}], got {offset}"
        )));
    }
    let mut vs = CubeVertexSet::empty(n)?;
    for v in 0u64..(1u64 << n) {
        if (v.count_ones() as usize) % (d + 1) == offset {
            vs.insert(v);
        }
    }
    Ok(vs)
}
