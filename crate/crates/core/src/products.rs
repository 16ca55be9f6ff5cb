//! The * product of uniform hypergraphs, powers F^d, and generic
//! forbidden-copy constraint generation for small patterns.

use crate::error::{Error, Result};
use crate::family::{binomial, rank_slice, SetFamily};
use crate::solver::{ConstraintSystem, MAX_ITEMS};
use std::collections::BTreeSet;

/// A uniform hypergraph: a ground size plus its edges as a SetFamily.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformHypergraph {
    edges: SetFamily,
}

impl UniformHypergraph {
    pub fn new(edges: SetFamily) -> Self {
        UniformHypergraph { edges }
    }

    pub fn ground_size(&self) -> usize {
        self.edges.n()
    }

    pub fn uniformity(&self) -> usize {
        self.edges.r()
    }

    pub fn edge_count(&self) -> u64 {
        self.edges.len()
    }

    pub fn edges(&self) -> &SetFamily {
        &self.edges
    }
}

/// F * G: the hypergraph on the disjoint union of the ground sets (G's
/// elements shifted past F's) whose edges are all unions A u B of an
/// F-edge and a G-edge. Uniformities add; edge count multiplies.
pub fn star_product(f: &UniformHypergraph, g: &UniformHypergraph) -> Result<UniformHypergraph> {
    let n = f.ground_size() + g.ground_size();
    let r = f.uniformity() + g.uniformity();
    let shift = f.ground_size();
    let mut edges = SetFamily::empty(n, r)?;
    let mut union = Vec::with_capacity(r);
    for a in f.edges().members() {
        for b in g.edges().members() {
            union.clear();
            union.extend_from_slice(&a);
            union.extend(b.iter().map(|&e| e + shift));
            edges.insert_rank(rank_slice(&union));
        }
    }
    Ok(UniformHypergraph::new(edges))
}

/// The d-fold left-associated product F * ... * F.
pub fn power(f: &UniformHypergraph, d: usize) -> Result<UniformHypergraph> {
    if d == 0 {
        return Err(Error::invalid("power needs d >= 1".to_string()));
    }
    let mut out = f.clone();
    for _ in 1..d {
        out = star_product(&out, f)?;
    }
    Ok(out)
}

/// Largest pattern ground for copy enumeration.
pub const MAX_PATTERN_POINTS: usize = 8;

/// Cap on injections scanned by `enumerate_copies`.
const MAX_INJECTIONS: u64 = 10_000_000;

fn falling_factorial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64))
}

/// Forbidden-copy constraint system: items are all u-sets of [n]; one
/// constraint per distinct copy of H, where a copy is the edge image of an
/// injection of H's points into [n], deduplicated by the resulting edge
/// set so that automorphisms collapse.
pub fn enumerate_copies(h: &UniformHypergraph, n: usize) -> Result<ConstraintSystem> {
    let m = h.ground_size();
    if m > MAX_PATTERN_POINTS {
        return Err(Error::refusal(format!(
            "pattern has {m} points, copy enumeration is capped at {MAX_PATTERN_POINTS}"
        )));
    }
    if n < m {
        return ConstraintSystem::new(binomial(n, h.uniformity()) as usize, Vec::new());
    }
    let injections = falling_factorial(n, m);
    if injections > MAX_INJECTIONS {
        return Err(Error::refusal(format!(
            "{injections} injections of {m} points into [{n}] exceed the cap {MAX_INJECTIONS}"
        )));
    }
    let item_count = binomial(n, h.uniformity());
    if item_count > MAX_ITEMS as u64 {
        return Err(Error::refusal(format!(
            "binomial({n}, {}) = {item_count} items exceeds the solver cap {MAX_ITEMS}",
            h.uniformity()
        )));
    }
    let edges: Vec<Vec<usize>> = h.edges().members().collect();
    // Pattern points ordered by decreasing edge-degree for earlier pruning
    // of image collisions; ties by point index.
    let mut degree = vec![0usize; m];
    for edge in &edges {
        for &p in edge {
            degree[p] += 1;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&p| (std::cmp::Reverse(degree[p]), p));

    let mut copies: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut image = vec![usize::MAX; m];
    let mut used = vec![false; n];
    inject(&order, &edges, n, 0, &mut image, &mut used, &mut copies);
    let constraints: Vec<Vec<u32>> = copies.into_iter().collect();
    let labels: Vec<crate::family::RSet> = (0..item_count)
        .map(|rank| crate::family::colex_unrank(rank, n, h.uniformity()))
        .collect::<Result<_>>()?;
    ConstraintSystem::new(item_count as usize, constraints)?.with_labels(labels)
}

fn inject(
    order: &[usize],
    edges: &[Vec<usize>],
    n: usize,
    depth: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    copies: &mut BTreeSet<Vec<u32>>,
) {
    if depth == order.len() {
        let mut ranks: Vec<u32> = edges
            .iter()
            .map(|edge| {
                let mut img: Vec<usize> = edge.iter().map(|&p| image[p]).collect();
                img.sort_unstable();
                rank_slice(&img) as u32
            })
            .collect();
        ranks.sort_unstable();
        ranks.dedup();
        copies.insert(ranks);
        return;
    }
    let point = order[depth];
    for target in 0..n {
        if used[target] {
            continue;
        }
        image[point] = target;
        used[target] = true;
        inject(order, edges, n, depth + 1, image, used, copies);
        used[target] = false;
        image[point] = usize::MAX;
    }
}
