//! Q_n machinery: subcubes, middle 2d-cubes, transversal checking and
//! minimization, the link operation, and the correspondence between
//! middle-cube transversals and daisy-free families.
//!
//! Vertices of Q_n are integers 0..2^n with bit i standing for element i.
//! A subcube is a pair (P, Q) of disjoint masks: its vertices are P u S
//! for S a submask of Q; coordinates outside P u Q are fixed to 0.

use crate::bitmap::Bitmap;
use crate::daisy::{for_each_instance, DaisyPattern};
use crate::error::{Error, Result};
use crate::family::{binomial, colex_subsets, colex_unrank, rank_slice, RSet, SetFamily};
use crate::report::{BoundKind, DensityRecord, NamedBound, Rat};
use crate::solver::{
    solve_max_avoiding, solve_min_transversal, ConstraintSystem, SearchResult, SolverConfig,
};

/// Largest cube dimension for vertex-set bitmaps (2^24 bits).
pub const MAX_CUBE_DIM: usize = 24;

/// Desk caps for exact transversal solves, per instance kind.
pub const MAX_UNRESTRICTED_N: usize = 6;
pub const MAX_RESTRICTED_N: usize = 8;

/// A d-dimensional subcube of Q_n: fixed-ones mask P, free mask Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subcube {
    n: usize,
    fixed_ones: u64,
    free: u64,
}

impl Subcube {
    pub fn new(n: usize, fixed_ones: u64, free: u64) -> Result<Self> {
        if n > MAX_CUBE_DIM {
            return Err(Error::refusal(format!(
                "cube dimension {n} exceeds the supported maximum {MAX_CUBE_DIM}"
            )));
        }
        let universe = if n == 64 { !0 } else { (1u64 << n) - 1 };
        if fixed_ones & !universe != 0 || free & !universe != 0 {
            return Err(Error::invalid(
                "subcube masks exceed the ground set".to_string(),
            ));
        }
        if fixed_ones & free != 0 {
            return Err(Error::invalid(
                "fixed and free coordinate sets must be disjoint".to_string(),
            ));
        }
        Ok(Subcube {
            n,
            fixed_ones,
            free,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fixed_ones(&self) -> u64 {
        self.fixed_ones
    }

    pub fn free(&self) -> u64 {
        self.free
    }

    pub fn dimension(&self) -> usize {
        self.free.count_ones() as usize
    }

    /// Lowest layer the subcube touches.
    pub fn base_layer(&self) -> usize {
        self.fixed_ones.count_ones() as usize
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        v & !(self.fixed_ones | self.free) == 0 && v & self.fixed_ones == self.fixed_ones
    }

    /// The 2^d vertices, in increasing submask order of the free set.
    pub fn vertices(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(1 << self.dimension());
        let mut s = 0u64;
        loop {
            out.push(self.fixed_ones | s);
            s = s.wrapping_sub(self.free) & self.free;
            if s == 0 {
                break;
            }
        }
        out
    }

    /// Vertices at one layer, as supports (used for middle-layer slices).
    pub fn layer_slice(&self, layer: usize) -> Vec<u64> {
        self.vertices()
            .into_iter()
            .filter(|v| v.count_ones() as usize == layer)
            .collect()
    }
}

impl std::fmt::Display for Subcube {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(P={:?}, Q={:?})",
            mask_elements(self.fixed_ones),
            mask_elements(self.free)
        )
    }
}

/// Elements of a mask, increasing.
pub fn mask_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Mask of a sorted element list.
pub fn elements_mask(elements: &[usize]) -> u64 {
    elements.iter().fold(0u64, |acc, &e| acc | (1 << e))
}

/// A vertex subset of Q_n as a 2^n-bit map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeVertexSet {
    n: usize,
    bits: Bitmap,
}

impl CubeVertexSet {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_CUBE_DIM {
            return Err(Error::refusal(format!(
                "cube dimension {n} exceeds the supported maximum {MAX_CUBE_DIM}"
            )));
        }
        Ok(CubeVertexSet {
            n,
            bits: Bitmap::zeros(1u64 << n),
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        let mut vs = CubeVertexSet::empty(n)?;
        vs.bits = Bitmap::ones(1u64 << n);
        Ok(vs)
    }

    pub fn from_vertices<I: IntoIterator<Item = u64>>(n: usize, vertices: I) -> Result<Self> {
        let mut vs = CubeVertexSet::empty(n)?;
        for v in vertices {
            if v >= 1u64 << n {
                return Err(Error::invalid(format!("vertex {v:#b} outside Q_{n}")));
            }
            if vs.bits.get(v) {
                return Err(Error::invalid(format!("duplicate vertex {v:#b}")));
            }
            vs.bits.set(v, true);
        }
        Ok(vs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: u64) {
        self.bits.set(v, true);
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        self.bits.get(v)
    }

    pub fn len(&self) -> u64 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Vertices in increasing integer order.
    pub fn vertices(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones()
    }
}

/// All d-subcubes of Q_n: the free set ranges over d-subsets of [n] and
/// the fixed pattern over all subsets of the remaining coordinates, so the
/// count is binomial(n, d) * 2^(n-d).
pub fn enumerate_subcubes(n: usize, d: usize) -> Result<Vec<Subcube>> {
    if d > n {
        return Err(Error::invalid(format!(
            "subcube dimension {d} exceeds n = {n}"
        )));
    }
    if n > MAX_CUBE_DIM {
        return Err(Error::refusal(format!(
            "cube dimension {n} exceeds the supported maximum {MAX_CUBE_DIM}"
        )));
    }
    let mut out = Vec::new();
    for free_elements in colex_subsets(n, d) {
        let free = elements_mask(&free_elements);
        let rest: Vec<usize> = (0..n).filter(|e| free >> e & 1 == 0).collect();
        for pick in 0u64..(1u64 << rest.len()) {
            let fixed = rest
                .iter()
                .enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1)
                .fold(0u64, |acc, (_, &e)| acc | (1 << e));
            out.push(Subcube {
                n,
                fixed_ones: fixed,
                free,
            });
        }
    }
    Ok(out)
}

/// Middle 2d-cubes of Q_n (n even): subcubes spanning layers n/2 - d
/// through n/2 + d, i.e. |P| = n/2 - d and |Q| = 2d. Count is
/// binomial(n, n/2 - d) * binomial(n/2 + d, 2d).
pub fn enumerate_middle_subcubes(n: usize, dim: usize) -> Result<Vec<Subcube>> {
    if !n.is_multiple_of(2) || !dim.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "middle subcubes need n and dim even, got n = {n}, dim = {dim}"
        )));
    }
    if dim > n {
        return Err(Error::invalid(format!("dimension {dim} exceeds n = {n}")));
    }
    if n > MAX_CUBE_DIM {
        return Err(Error::refusal(format!(
            "cube dimension {n} exceeds the supported maximum {MAX_CUBE_DIM}"
        )));
    }
    let stem = n / 2 - dim / 2;
    let mut out = Vec::new();
    let mut complement = Vec::with_capacity(n - stem);
    for fixed_elements in colex_subsets(n, stem) {
        let fixed = elements_mask(&fixed_elements);
        complement.clear();
        complement.extend((0..n).filter(|e| fixed >> e & 1 == 0));
        for free_idx in colex_subsets(complement.len(), dim) {
            let free = free_idx
                .iter()
                .fold(0u64, |acc, &i| acc | (1 << complement[i]));
            out.push(Subcube {
                n,
                fixed_ones: fixed,
                free,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct TransversalCheck {
    pub is_transversal: bool,
    /// First subcube (in list order) containing no vertex of the set.
    pub first_missed: Option<Subcube>,
}

/// Does the vertex set meet every listed subcube?
pub fn is_transversal(vs: &CubeVertexSet, cubes: &[Subcube]) -> Result<TransversalCheck> {
    for cube in cubes {
        if cube.n() != vs.n() {
            return Err(Error::invalid(format!(
                "subcube over Q_{} checked against a Q_{} vertex set",
                cube.n(),
                vs.n()
            )));
        }
        let mut hit = false;
        let mut s = 0u64;
        loop {
            if vs.contains(cube.fixed_ones | s) {
                hit = true;
                break;
            }
            s = s.wrapping_sub(cube.free) & cube.free;
            if s == 0 {
                break;
            }
        }
        if !hit {
            return Ok(TransversalCheck {
                is_transversal: false,
                first_missed: Some(*cube),
            });
        }
    }
    Ok(TransversalCheck {
        is_transversal: true,
        first_missed: None,
    })
}

/// Result of an exact minimum-transversal solve on a cube instance.
#[derive(Debug, Clone)]
pub struct CubeSolveReport {
    pub n: usize,
    pub dim: usize,
    pub middle_only: bool,
    pub restricted_to_middle_layer: bool,
    pub cube_count: usize,
    pub item_count: usize,
    pub search: SearchResult,
    /// Transversal witness as vertex masks.
    pub vertices: Vec<u64>,
}

/// Exact minimum number of (allowed) vertices meeting every d-subcube
/// (or every middle d-cube). With `restrict_to_middle_layer`, only
/// middle-layer vertices may be used, which is the daisy-side quantity.
pub fn min_subcube_transversal(
    n: usize,
    dim: usize,
    middle_only: bool,
    restrict_to_middle_layer: bool,
    cfg: &SolverConfig,
) -> Result<CubeSolveReport> {
    if restrict_to_middle_layer && !middle_only {
        return Err(Error::invalid(
            "restricting to the middle layer requires middle cubes".to_string(),
        ));
    }
    let cap = if restrict_to_middle_layer {
        MAX_RESTRICTED_N
    } else {
        MAX_UNRESTRICTED_N
    };
    if n > cap {
        return Err(Error::refusal(format!(
            "transversal instance Q_{n} exceeds the desk cap n <= {cap}"
        )));
    }
    let cubes = if middle_only {
        enumerate_middle_subcubes(n, dim)?
    } else {
        enumerate_subcubes(n, dim)?
    };
    let (item_count, item_of_vertex, vertex_of_item): (usize, _, Vec<u64>) =
        if restrict_to_middle_layer {
            let r = n / 2;
            let count = binomial(n, r) as usize;
            let vertex_of_item: Vec<u64> = (0..count as u64)
                .map(|rank| {
                    elements_mask(colex_unrank(rank, n, r).expect("rank in range").elements())
                })
                .collect();
            let to_item = move |v: u64| -> Option<u32> {
                if v.count_ones() as usize != r {
                    return None;
                }
                Some(rank_slice(&mask_elements(v)) as u32)
            };
            (
                count,
                Box::new(to_item) as Box<dyn Fn(u64) -> Option<u32>>,
                vertex_of_item,
            )
        } else {
            let count = 1usize << n;
            let to_item = |v: u64| -> Option<u32> { Some(v as u32) };
            (
                count,
                Box::new(to_item) as Box<dyn Fn(u64) -> Option<u32>>,
                (0..count as u64).collect(),
            )
        };
    let mut constraints: Vec<Vec<u32>> = Vec::with_capacity(cubes.len());
    for cube in &cubes {
        let allowed: Vec<u32> = cube
            .vertices()
            .into_iter()
            .filter_map(&item_of_vertex)
            .collect();
        if allowed.is_empty() {
            return Err(Error::Infeasible(format!(
                "subcube {cube} has no allowed vertex under the restriction"
            )));
        }
        constraints.push(allowed);
    }
    let cs = ConstraintSystem::new(item_count, constraints)?;
    let search = solve_min_transversal(&cs, cfg)?;
    let vertices: Vec<u64> = search
        .witness
        .iter()
        .map(|&item| vertex_of_item[item as usize])
        .collect();
    Ok(CubeSolveReport {
        n,
        dim,
        middle_only,
        restricted_to_middle_layer: restrict_to_middle_layer,
        cube_count: cubes.len(),
        item_count,
        search,
        vertices,
    })
}

/// Link of a fixed set R in a family: members {A \ R : R inside A}, on the
/// remaining ground elements relabeled order-preservingly.
pub fn link(family: &SetFamily, fixed: &[usize]) -> Result<SetFamily> {
    if !fixed.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid(format!(
            "link set must be strictly increasing, got {fixed:?}"
        )));
    }
    if fixed.last().is_some_and(|&e| e >= family.n()) {
        return Err(Error::invalid(format!(
            "link set {fixed:?} outside ground [0, {})",
            family.n()
        )));
    }
    if fixed.len() > family.r() {
        return Err(Error::invalid(format!(
            "link set has {} elements but the family is {}-uniform",
            fixed.len(),
            family.r()
        )));
    }
    let new_n = family.n() - fixed.len();
    let new_r = family.r() - fixed.len();
    // Order-preserving relabel of [n] \ fixed onto [0, new_n).
    let mut new_label = vec![usize::MAX; family.n()];
    let mut next = 0usize;
    for (e, label) in new_label.iter_mut().enumerate() {
        if fixed.binary_search(&e).is_err() {
            *label = next;
            next += 1;
        }
    }
    let mut out = SetFamily::empty(new_n, new_r)?;
    let mut reduced = Vec::with_capacity(new_r);
    for member in family.members() {
        if fixed.iter().all(|e| member.binary_search(e).is_ok()) {
            reduced.clear();
            reduced.extend(
                member
                    .iter()
                    .filter(|e| fixed.binary_search(e).is_err())
                    .map(|&e| new_label[e]),
            );
            out.insert_rank(rank_slice(&reduced));
        }
    }
    Ok(out)
}

/// Maximum number of set vertices inside any single d-subcube, with the
/// first maximizing subcube in enumeration order.
pub fn max_points_in_some_dcube(vs: &CubeVertexSet, d: usize) -> Result<(u64, Subcube)> {
    let cubes = enumerate_subcubes(vs.n(), d)?;
    let mut best: Option<(u64, Subcube)> = None;
    for cube in cubes {
        let count = cube
            .vertices()
            .into_iter()
            .filter(|&v| vs.contains(v))
            .count() as u64;
        if best.is_none_or(|(b, _)| count > b) {
            best = Some((count, cube));
        }
    }
    best.ok_or_else(|| Error::invalid(format!("no {d}-subcubes in Q_{}", vs.n())))
}

/// Verification report for the middle-cube <-> daisy correspondence at one
/// (n, dim): middle-layer sets meeting every middle dim-cube correspond to
/// complements of D_{n/2}(dim, dim/2)-free families.
#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    pub n: usize,
    pub dim: usize,
    pub pattern: DaisyPattern,
    /// Number of (middle cube, daisy instance) pairs compared.
    pub pairs: usize,
    /// Every middle cube's middle-layer slice equals the matching daisy's
    /// petal set.
    pub slices_match: bool,
    /// Sets scanned in the exhaustive bijection check (when feasible).
    pub scanned_sets: Option<u64>,
    /// Exhaustive check outcome: meets-every-cube iff complement daisy-free.
    pub scan_holds: Option<bool>,
    pub min_transversal: u64,
    pub ex_value: u64,
    pub layer_size: u64,
    /// min_transversal + ex_value == binomial(n, n/2).
    pub sum_matches: bool,
}

/// Exhaustive-scan cap: full bijection check when the middle layer has at
/// most this many sets (2^20 subsets at n = 6).
const SCAN_CAP_ITEMS: u64 = 20;

pub fn transversal_daisy_correspondence(
    n: usize,
    dim: usize,
    cfg: &SolverConfig,
) -> Result<CorrespondenceReport> {
    if !n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "correspondence needs n even, got {n}"
        )));
    }
    if n > MAX_RESTRICTED_N {
        return Err(Error::refusal(format!(
            "correspondence instance Q_{n} exceeds the desk cap n <= {MAX_RESTRICTED_N}"
        )));
    }
    if !dim.is_multiple_of(2) || dim == 0 || dim > n {
        return Err(Error::invalid(format!(
            "correspondence needs an even dimension in [2, {n}], got {dim}"
        )));
    }
    let pattern = DaisyPattern::new(n / 2, dim, dim / 2)?;
    let cubes = enumerate_middle_subcubes(n, dim)?;

    // Daisy instances enumerate stems colex-major exactly like the cube
    // enumeration fixes P, so the two lists pair up positionally.
    let mut petal_rank_sets: Vec<Vec<u64>> = Vec::with_capacity(cubes.len());
    for_each_instance(n, &pattern, |_, _, ranks| {
        let mut sorted = ranks.to_vec();
        sorted.sort_unstable();
        petal_rank_sets.push(sorted);
        true
    });
    if petal_rank_sets.len() != cubes.len() {
        return Err(Error::invalid(format!(
            "{} middle cubes vs {} daisy instances",
            cubes.len(),
            petal_rank_sets.len()
        )));
    }
    let mut slices_match = true;
    let mut slice_rank_sets: Vec<Vec<u64>> = Vec::with_capacity(cubes.len());
    for (cube, petal_ranks) in cubes.iter().zip(&petal_rank_sets) {
        let mut slice_ranks: Vec<u64> = cube
            .layer_slice(n / 2)
            .into_iter()
            .map(|v| rank_slice(&mask_elements(v)))
            .collect();
        slice_ranks.sort_unstable();
        slices_match &= slice_ranks == *petal_ranks;
        slice_rank_sets.push(slice_ranks);
    }

    let layer_size = binomial(n, n / 2);
    let (scanned_sets, scan_holds) = if layer_size <= SCAN_CAP_ITEMS {
        let slice_masks: Vec<u64> = slice_rank_sets
            .iter()
            .map(|ranks| ranks.iter().fold(0u64, |acc, &r| acc | (1 << r)))
            .collect();
        let petal_masks: Vec<u64> = petal_rank_sets
            .iter()
            .map(|ranks| ranks.iter().fold(0u64, |acc, &r| acc | (1 << r)))
            .collect();
        let total = 1u64 << layer_size;
        let mut holds = true;
        for set in 0..total {
            let meets_all = slice_masks.iter().all(|&s| set & s != 0);
            let complement_daisy_free = petal_masks.iter().all(|&p| set & p != 0);
            if meets_all != complement_daisy_free {
                holds = false;
                break;
            }
        }
        (Some(total), Some(holds))
    } else {
        (None, None)
    };

    let transversal = min_subcube_transversal(n, dim, true, true, cfg)?;
    let ex_system = crate::solver::build_daisy_constraints(n, &pattern)?;
    let ex = solve_max_avoiding(&ex_system, cfg)?;
    let sum_matches = transversal.search.objective + ex.objective == layer_size;
    Ok(CorrespondenceReport {
        n,
        dim,
        pattern,
        pairs: cubes.len(),
        slices_match,
        scanned_sets,
        scan_holds,
        min_transversal: transversal.search.objective,
        ex_value: ex.objective,
        layer_size,
        sum_matches,
    })
}

/// Evidence table for t_d: exact minimum d-subcube transversal densities
/// of Q_n over a range of n, plus the Q_{d+2} row checked against the
/// ceil(log2 d) local bound.
#[derive(Debug, Clone)]
pub struct TdTable {
    pub d: usize,
    pub records: Vec<DensityRecord>,
    pub skipped: Vec<(usize, String)>,
    /// Exact minimum for d-subcubes of Q_{d+2}, when solvable.
    pub acs_minimum: Option<u64>,
    /// ceil(log2 d) for d >= 2, else 0.
    pub acs_threshold: u64,
    pub acs_ok: Option<bool>,
}

pub fn td_evidence_table(
    d: usize,
    n_from: usize,
    n_to: usize,
    cfg: &SolverConfig,
) -> Result<TdTable> {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for n in n_from..=n_to {
        if n < d {
            skipped.push((n, format!("no {d}-subcubes in Q_{n}")));
            continue;
        }
        if n > MAX_UNRESTRICTED_N {
            skipped.push((
                n,
                format!("Q_{n} exceeds the desk cap n <= {MAX_UNRESTRICTED_N}"),
            ));
            continue;
        }
        let report = min_subcube_transversal(n, d, false, false, cfg)?;
        let mut bounds = vec![NamedBound {
            name: "upper_layered".to_string(),
            kind: BoundKind::UpperRatio(Rat::new(1, d as u64 + 1)),
        }];
        // The local bound averages up to every n >= d + 2; exact rational
        // only when log2(d) is an integer.
        if d >= 2 && n >= d + 2 && d.is_power_of_two() {
            bounds.push(NamedBound {
                name: "lower_acs".to_string(),
                kind: BoundKind::LowerRatio(Rat::new(d.ilog2() as u64, 1u64 << (d + 2))),
            });
        }
        records.push(DensityRecord {
            problem: format!("td:d={d}"),
            n,
            value: report.search.objective,
            is_exact: report.search.status == crate::solver::SolveStatus::Exact,
            ratio: Rat::new(report.search.objective, 1u64 << n),
            bounds,
        });
    }
    let acs_threshold = if d >= 2 {
        d.next_power_of_two().ilog2() as u64
    } else {
        0
    };
    let (acs_minimum, acs_ok) = if d >= 2 && d + 2 <= MAX_UNRESTRICTED_N {
        let report = min_subcube_transversal(d + 2, d, false, false, cfg)?;
        let ok = report.search.objective >= acs_threshold;
        (Some(report.search.objective), Some(ok))
    } else {
        (None, None)
    };
    Ok(TdTable {
        d,
        records,
        skipped,
        acs_minimum,
        acs_threshold,
        acs_ok,
    })
}

/// Convert a vertex of Q_n at layer r to its support r-set.
pub fn vertex_to_rset(v: u64, n: usize) -> Result<RSet> {
    RSet::new(mask_elements(v), n)
}
