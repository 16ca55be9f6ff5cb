//! Exact solver for "maximum subfamily avoiding all forbidden
//! configurations" and its dual "minimum transversal", plus a brute-force
//! oracle used by the test suites.
//!
//! The search is branch-and-bound over item inclusion/exclusion. A
//! constraint is *live* while none of its items is excluded; including the
//! last undecided item of a live constraint violates it, so a live
//! constraint with exactly one undecided item forces that item out (unit
//! propagation). The admissible bound packs live constraints with pairwise
//! disjoint undecided parts: each packed constraint costs at least one
//! future exclusion.
//!
//! Determinism contract: identical results (objective and witness) across
//! runs and across worker counts, for runs that finish within the node
//! limit. The search always splits into subtree tasks at a fixed shallow
//! depth, seeds every task with the same greedy incumbent value, and folds
//! task results in task order, so the outcome does not depend on how tasks
//! are scheduled.

use crate::daisy::{for_each_instance, DaisyPattern};
use crate::error::{Error, Result};
use crate::family::{binomial, colex_unrank, RSet};
use rayon::prelude::*;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

/// Ground items plus forbidden-configuration constraints. A feasible
/// "avoiding" set contains no constraint entirely; a transversal meets
/// every constraint.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    item_count: usize,
    constraints: Vec<Vec<u32>>,
    item_to_constraints: Vec<Vec<u32>>,
    labels: Option<Vec<RSet>>,
}

/// Desk-scale caps: refuse systems that could not be searched anyway.
pub const MAX_ITEMS: usize = 100_000;
pub const MAX_CONSTRAINTS: usize = 5_000_000;

impl ConstraintSystem {
    pub fn new(item_count: usize, constraints: Vec<Vec<u32>>) -> Result<Self> {
        if item_count > MAX_ITEMS {
            return Err(Error::refusal(format!(
                "{item_count} items exceeds the solver cap {MAX_ITEMS}"
            )));
        }
        if constraints.len() > MAX_CONSTRAINTS {
            return Err(Error::refusal(format!(
                "{} constraints exceeds the solver cap {MAX_CONSTRAINTS}",
                constraints.len()
            )));
        }
        let mut canon: Vec<Vec<u32>> = Vec::with_capacity(constraints.len());
        for mut c in constraints {
            if c.is_empty() {
                return Err(Error::invalid("empty constraint".to_string()));
            }
            c.sort_unstable();
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("constraint {c:?} repeats an item")));
            }
            if *c.last().unwrap() as usize >= item_count {
                return Err(Error::invalid(format!(
                    "constraint {c:?} references an item >= {item_count}"
                )));
            }
            canon.push(c);
        }
        canon.sort();
        canon.dedup();
        let mut item_to_constraints = vec![Vec::new(); item_count];
        for (ci, c) in canon.iter().enumerate() {
            for &x in c {
                item_to_constraints[x as usize].push(ci as u32);
            }
        }
        Ok(ConstraintSystem {
            item_count,
            constraints: canon,
            item_to_constraints,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<RSet>) -> Result<Self> {
        if labels.len() != self.item_count {
            return Err(Error::invalid(format!(
                "{} labels for {} items",
                labels.len(),
                self.item_count
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn item_count(&self) -> usize {
        self.item_count
    }

    pub fn constraints(&self) -> &[Vec<u32>] {
        &self.constraints
    }

    pub fn labels(&self) -> Option<&[RSet]> {
        self.labels.as_deref()
    }

    /// The one-orbit partition: the full symmetric relabeling action is
    /// transitive on r-sets, as is the hyperoctahedral action on cube
    /// vertices, so for those systems every item sits in a single orbit.
    pub fn single_orbit(&self) -> Vec<Vec<u32>> {
        vec![(0..self.item_count as u32).collect()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Exact,
    /// Node limit hit: the objective is the best incumbent, a valid bound
    /// (lower for max-avoiding, upper for min-transversal).
    LowerBoundOnly,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub objective: u64,
    /// Sorted item indices attaining the objective.
    pub witness: Vec<u32>,
    pub nodes_explored: u64,
    pub status: SolveStatus,
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub node_limit: u64,
    pub workers: usize,
    pub symmetry: bool,
    /// Orbit partition of the items under an automorphism group of the
    /// system, used for root branching when `symmetry` is on.
    pub orbits: Option<Vec<Vec<u32>>>,
}

pub const DEFAULT_NODE_LIMIT: u64 = 1_000_000_000;

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_limit: DEFAULT_NODE_LIMIT,
            workers: 1,
            symmetry: false,
            orbits: None,
        }
    }
}

const UNDECIDED: u8 = 0;
const INCLUDED: u8 = 1;
const EXCLUDED: u8 = 2;

/// Depth (in branch decisions) at which the search splits into tasks.
/// Fixed, not worker-dependent, so results cannot depend on worker count.
const SPLIT_DEPTH: usize = 6;

struct State<'a> {
    cs: &'a ConstraintSystem,
    item_state: Vec<u8>,
    undecided_in: Vec<u32>,
    excluded_in: Vec<u32>,
    undecided_items: usize,
    included_items: usize,
    trail: Vec<(u32, u8)>,
    pack_mark: Vec<u32>,
    pack_epoch: u32,
}

impl<'a> State<'a> {
    fn new(cs: &'a ConstraintSystem) -> Self {
        State {
            cs,
            item_state: vec![UNDECIDED; cs.item_count],
            undecided_in: cs.constraints.iter().map(|c| c.len() as u32).collect(),
            excluded_in: vec![0; cs.constraints.len()],
            undecided_items: cs.item_count,
            included_items: 0,
            trail: Vec::new(),
            pack_mark: vec![0; cs.item_count],
            pack_epoch: 0,
        }
    }

    #[inline]
    fn live(&self, c: usize) -> bool {
        self.excluded_in[c] == 0
    }

    fn apply(&mut self, item: u32, state: u8) {
        debug_assert_eq!(self.item_state[item as usize], UNDECIDED);
        self.item_state[item as usize] = state;
        self.undecided_items -= 1;
        if state == INCLUDED {
            self.included_items += 1;
        }
        for &c in &self.cs.item_to_constraints[item as usize] {
            self.undecided_in[c as usize] -= 1;
            if state == EXCLUDED {
                self.excluded_in[c as usize] += 1;
            }
        }
        self.trail.push((item, state));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (item, state) = self.trail.pop().unwrap();
            self.item_state[item as usize] = UNDECIDED;
            self.undecided_items += 1;
            if state == INCLUDED {
                self.included_items -= 1;
            }
            for &c in &self.cs.item_to_constraints[item as usize] {
                self.undecided_in[c as usize] += 1;
                if state == EXCLUDED {
                    self.excluded_in[c as usize] -= 1;
                }
            }
        }
    }

    /// Assign `item` and run unit propagation. Returns false on conflict
    /// (some live constraint became fully included).
    fn assign_and_propagate(&mut self, item: u32, state: u8) -> bool {
        let mut queue: Vec<u32> = Vec::new();
        self.apply(item, state);
        if state == INCLUDED && !self.collect_forced(item, &mut queue) {
            return false;
        }
        while let Some(forced) = queue.pop() {
            if self.item_state[forced as usize] == EXCLUDED {
                continue;
            }
            debug_assert_eq!(self.item_state[forced as usize], UNDECIDED);
            self.apply(forced, EXCLUDED);
        }
        // Exclusions cannot complete a constraint; re-scan constraints of
        // included items happens eagerly in collect_forced, and forced
        // moves are exclusions only, so one pass suffices.
        true
    }

    /// After including `item`: detect conflicts and queue forced
    /// exclusions in the constraints it touches.
    fn collect_forced(&mut self, item: u32, queue: &mut Vec<u32>) -> bool {
        // Iterate by index since forced exclusions are applied eagerly here.
        let mut pending: Vec<u32> = Vec::new();
        for ci in 0..self.cs.item_to_constraints[item as usize].len() {
            let c = self.cs.item_to_constraints[item as usize][ci] as usize;
            if !self.live(c) {
                continue;
            }
            match self.undecided_in[c] {
                0 => return false,
                1 => {
                    let forced = self.cs.constraints[c]
                        .iter()
                        .copied()
                        .find(|&x| self.item_state[x as usize] == UNDECIDED)
                        .expect("one undecided item remains");
                    pending.push(forced);
                }
                _ => {}
            }
        }
        // Forced exclusions cascade only through dying constraints, which
        // never force anything further, so a flat queue is enough.
        queue.append(&mut pending);
        true
    }

    /// Undecided item of maximum live-constraint degree; ties break to the
    /// lowest item index. None when no live constraint remains.
    fn branch_item(&self) -> Option<u32> {
        let mut best: Option<(usize, u32)> = None;
        for x in 0..self.cs.item_count {
            if self.item_state[x] != UNDECIDED {
                continue;
            }
            let deg = self.cs.item_to_constraints[x]
                .iter()
                .filter(|&&c| self.live(c as usize))
                .count();
            if deg > 0 && best.is_none_or(|(bd, _)| deg > bd) {
                best = Some((deg, x as u32));
            }
        }
        best.map(|(_, x)| x)
    }

    fn has_live_constraint(&self) -> bool {
        self.excluded_in.contains(&0)
    }

    /// included + undecided - (greedy packing of live constraints with
    /// pairwise disjoint undecided parts). Admissible: each packed
    /// constraint forces at least one distinct exclusion among the
    /// undecided items.
    fn upper_bound(&mut self) -> u64 {
        self.pack_epoch += 1;
        let epoch = self.pack_epoch;
        let mut packed = 0u64;
        for (c, items) in self.cs.constraints.iter().enumerate() {
            if !self.live(c) {
                continue;
            }
            let disjoint = items.iter().all(|&x| {
                self.item_state[x as usize] != UNDECIDED || self.pack_mark[x as usize] != epoch
            });
            if disjoint {
                for &x in items {
                    if self.item_state[x as usize] == UNDECIDED {
                        self.pack_mark[x as usize] = epoch;
                    }
                }
                packed += 1;
            }
        }
        ((self.included_items + self.undecided_items) as u64).saturating_sub(packed)
    }

    /// Witness for the current node when no live constraint remains: all
    /// included plus all undecided items.
    fn open_witness(&self) -> Vec<u32> {
        (0..self.cs.item_count as u32)
            .filter(|&x| self.item_state[x as usize] != EXCLUDED)
            .collect()
    }

    fn snapshot(&self) -> Vec<(u32, u8)> {
        self.trail.clone()
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    value: u64,
    witness: Vec<u32>,
}

enum Unit {
    Solved(Candidate),
    Task(Vec<(u32, u8)>),
}

struct Budget {
    remaining: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget {
            remaining: AtomicU64::new(limit),
            exhausted: AtomicBool::new(false),
        }
    }

    /// Charge one node; returns false once the budget is gone.
    #[inline]
    fn spend(&self) -> bool {
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        let prev = self.remaining.fetch_sub(1, Ordering::Relaxed);
        if prev == 0 {
            // A request arrived with nothing left; a run that uses its
            // budget exactly still counts as complete.
            self.exhausted.store(true, Ordering::Relaxed);
            self.remaining.store(0, Ordering::Relaxed);
            return false;
        }
        true
    }
}

/// Greedy incumbent: repeatedly exclude the item hitting the most live
/// constraints (ties to the lowest index) until every constraint is hit;
/// the witness is the complement of the exclusions.
fn greedy_incumbent(cs: &ConstraintSystem) -> Candidate {
    let mut live: Vec<bool> = vec![true; cs.constraints.len()];
    let mut live_count = cs.constraints.len();
    let mut excluded = vec![false; cs.item_count];
    let mut degree: Vec<u32> = vec![0; cs.item_count];
    for c in &cs.constraints {
        for &x in c {
            degree[x as usize] += 1;
        }
    }
    while live_count > 0 {
        let (mut best_x, mut best_deg) = (0usize, 0u32);
        for (x, &d) in degree.iter().enumerate() {
            if !excluded[x] && d > best_deg {
                best_deg = d;
                best_x = x;
            }
        }
        debug_assert!(best_deg > 0);
        excluded[best_x] = true;
        for &c in &cs.item_to_constraints[best_x] {
            if live[c as usize] {
                live[c as usize] = false;
                live_count -= 1;
                for &y in &cs.constraints[c as usize] {
                    degree[y as usize] -= 1;
                }
            }
        }
    }
    let witness: Vec<u32> = (0..cs.item_count as u32)
        .filter(|&x| !excluded[x as usize])
        .collect();
    Candidate {
        value: witness.len() as u64,
        witness,
    }
}

/// Expand the search tree to SPLIT_DEPTH branch decisions, collecting
/// solved leaves and unsolved subtree tasks in DFS order.
fn generate_units(
    state: &mut State,
    cfg: &SolverConfig,
    floor: u64,
    depth: usize,
    budget: &Budget,
    nodes: &mut u64,
    units: &mut Vec<Unit>,
) -> bool {
    *nodes += 1;
    if !budget.spend() {
        return false;
    }
    if state.upper_bound() <= floor {
        return true;
    }
    if !state.has_live_constraint() {
        units.push(Unit::Solved(Candidate {
            value: (state.included_items + state.undecided_items) as u64,
            witness: state.open_witness(),
        }));
        return true;
    }
    if depth >= SPLIT_DEPTH {
        units.push(Unit::Task(state.snapshot()));
        return true;
    }
    let x = state
        .branch_item()
        .expect("live constraint implies a branch item");
    let mark = state.trail.len();
    if state.assign_and_propagate(x, INCLUDED)
        && !generate_units(state, cfg, floor, depth + 1, budget, nodes, units)
    {
        return false;
    }
    state.undo_to(mark);
    // Root orbital branching: excluding x excludes its whole orbit, since
    // any avoiding set hitting the orbit maps onto one containing x.
    let orbit: Vec<u32> = if depth == 0 && cfg.symmetry {
        cfg.orbits
            .as_ref()
            .and_then(|orbits| orbits.iter().find(|o| o.contains(&x)))
            .cloned()
            .unwrap_or_else(|| vec![x])
    } else {
        vec![x]
    };
    let mut ok = true;
    for y in orbit {
        if state.item_state[y as usize] == UNDECIDED && !state.assign_and_propagate(y, EXCLUDED) {
            ok = false;
            break;
        }
    }
    if ok && !generate_units(state, cfg, floor, depth + 1, budget, nodes, units) {
        return false;
    }
    state.undo_to(mark);
    true
}

/// Solve one subtree exactly. Returns the subtree's best candidate with
/// value strictly above `floor` (the greedy value), if any.
fn solve_task(
    cs: &ConstraintSystem,
    trail: &[(u32, u8)],
    floor: u64,
    budget: &Budget,
) -> (Option<Candidate>, u64, bool) {
    let mut state = State::new(cs);
    for &(item, st) in trail {
        state.apply(item, st);
    }
    let mut best: Option<Candidate> = None;
    let mut nodes = 0u64;
    let complete = dfs(&mut state, floor, &mut best, budget, &mut nodes);
    (best, nodes, complete)
}

fn dfs(
    state: &mut State,
    floor: u64,
    best: &mut Option<Candidate>,
    budget: &Budget,
    nodes: &mut u64,
) -> bool {
    *nodes += 1;
    if !budget.spend() {
        return false;
    }
    let cutoff = best.as_ref().map_or(floor, |c| c.value.max(floor));
    if state.upper_bound() <= cutoff {
        return true;
    }
    if !state.has_live_constraint() {
        let value = (state.included_items + state.undecided_items) as u64;
        if value > cutoff {
            *best = Some(Candidate {
                value,
                witness: state.open_witness(),
            });
        }
        return true;
    }
    let x = state
        .branch_item()
        .expect("live constraint implies a branch item");
    let mark = state.trail.len();
    if state.assign_and_propagate(x, INCLUDED) && !dfs(state, floor, best, budget, nodes) {
        return false;
    }
    state.undo_to(mark);
    if state.assign_and_propagate(x, EXCLUDED) && !dfs(state, floor, best, budget, nodes) {
        return false;
    }
    state.undo_to(mark);
    true
}

/// Maximum-size item set containing no constraint entirely. Exact unless
/// the node limit is hit, in which case the best incumbent is returned
/// with status LowerBoundOnly.
pub fn solve_max_avoiding(cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<SearchResult> {
    let start = Instant::now();
    if cfg.symmetry {
        if let Some(orbits) = &cfg.orbits {
            let mut seen = vec![false; cs.item_count];
            for &x in orbits.iter().flatten() {
                if x as usize >= cs.item_count || seen[x as usize] {
                    return Err(Error::invalid(
                        "orbits must partition the item set".to_string(),
                    ));
                }
                seen[x as usize] = true;
            }
            if seen.iter().any(|&s| !s) {
                return Err(Error::invalid("orbits must cover every item".to_string()));
            }
        }
    }
    let budget = Budget::new(cfg.node_limit);
    let greedy = greedy_incumbent(cs);
    let floor = greedy.value;

    let mut state = State::new(cs);
    let mut units: Vec<Unit> = Vec::new();
    let mut nodes = 0u64;
    generate_units(&mut state, cfg, floor, 0, &budget, &mut nodes, &mut units);

    let tasks: Vec<&Vec<(u32, u8)>> = units
        .iter()
        .filter_map(|u| match u {
            Unit::Task(t) => Some(t),
            Unit::Solved(_) => None,
        })
        .collect();
    let workers = cfg.workers.max(1);
    let outcomes: Vec<(Option<Candidate>, u64, bool)> = if workers == 1 || tasks.len() <= 1 {
        tasks
            .iter()
            .map(|t| solve_task(cs, t, floor, &budget))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        pool.install(|| {
            tasks
                .par_iter()
                .map(|t| solve_task(cs, t, floor, &budget))
                .collect()
        })
    };

    let mut complete = !budget.exhausted.load(Ordering::Relaxed);
    let mut best = greedy;
    let mut outcome_iter = outcomes.into_iter();
    for unit in &units {
        let candidate = match unit {
            Unit::Solved(c) => Some(c.clone()),
            Unit::Task(_) => {
                let (cand, task_nodes, task_complete) =
                    outcome_iter.next().expect("one outcome per task");
                nodes += task_nodes;
                complete &= task_complete;
                cand
            }
        };
        if let Some(c) = candidate {
            if c.value > best.value {
                best = c;
            }
        }
    }

    let mut witness = best.witness;
    witness.sort_unstable();
    // Post-hoc soundness: the witness never fully contains a constraint.
    for c in &cs.constraints {
        assert!(
            !c.iter().all(|x| witness.binary_search(x).is_ok()),
            "solver bug: witness contains constraint {c:?}"
        );
    }
    assert_eq!(witness.len() as u64, best.value);
    Ok(SearchResult {
        objective: best.value,
        witness,
        nodes_explored: nodes,
        status: if complete {
            SolveStatus::Exact
        } else {
            SolveStatus::LowerBoundOnly
        },
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Minimum item set meeting every constraint. Complementation bijection:
/// the complement of a maximum avoiding set is a minimum transversal, so
/// min_transversal = item_count - max_avoiding on the same system.
pub fn solve_min_transversal(cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<SearchResult> {
    let avoiding = solve_max_avoiding(cs, cfg)?;
    let in_witness: std::collections::HashSet<u32> = avoiding.witness.iter().copied().collect();
    let witness: Vec<u32> = (0..cs.item_count() as u32)
        .filter(|x| !in_witness.contains(x))
        .collect();
    for c in cs.constraints() {
        assert!(
            c.iter().any(|x| witness.binary_search(x).is_ok()),
            "solver bug: transversal misses constraint {c:?}"
        );
    }
    Ok(SearchResult {
        objective: cs.item_count() as u64 - avoiding.objective,
        witness,
        nodes_explored: avoiding.nodes_explored,
        status: avoiding.status,
        wall_time: avoiding.wall_time,
    })
}

/// Exact optimum by full 2^m enumeration; test-suite oracle only.
pub fn brute_force_oracle(cs: &ConstraintSystem) -> Result<SearchResult> {
    let m = cs.item_count();
    if m > 24 {
        return Err(Error::refusal(format!(
            "brute-force oracle is capped at 24 items, got {m}"
        )));
    }
    let start = Instant::now();
    let total: u64 = 1 << m;
    // covers[s] = s contains some constraint, by subset-sum closure.
    let mut covers = vec![false; total as usize];
    for c in cs.constraints() {
        let mask: u64 = c.iter().fold(0u64, |acc, &x| acc | (1 << x));
        covers[mask as usize] = true;
    }
    for b in 0..m {
        let bit = 1u64 << b;
        for s in 0..total {
            if s & bit != 0 && covers[(s ^ bit) as usize] {
                covers[s as usize] = true;
            }
        }
    }
    let mut best_value = 0u64;
    let mut best_mask = 0u64;
    for s in 0..total {
        if !covers[s as usize] && s.count_ones() as u64 > best_value {
            best_value = s.count_ones() as u64;
            best_mask = s;
        }
    }
    let witness: Vec<u32> = (0..m as u32).filter(|&x| best_mask >> x & 1 == 1).collect();
    Ok(SearchResult {
        objective: best_value,
        witness,
        nodes_explored: total,
        status: SolveStatus::Exact,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Constraint system whose items are all r-sets of [n] (colex-indexed)
/// and whose constraints are the petal rank sets of every daisy instance.
/// Solving max-avoiding on it computes ex(n, D_r(s,t)).
pub fn build_daisy_constraints(n: usize, pattern: &DaisyPattern) -> Result<ConstraintSystem> {
    let item_count = binomial(n, pattern.r());
    if item_count > MAX_ITEMS as u64 {
        return Err(Error::refusal(format!(
            "binomial({n}, {}) = {item_count} items exceeds the solver cap {MAX_ITEMS}",
            pattern.r()
        )));
    }
    let mut constraints: Vec<Vec<u32>> = Vec::new();
    for_each_instance(n, pattern, |_, _, ranks| {
        constraints.push(ranks.iter().map(|&rank| rank as u32).collect());
        true
    });
    let labels: Vec<RSet> = (0..item_count)
        .map(|rank| colex_unrank(rank, n, pattern.r()))
        .collect::<Result<_>>()?;
    ConstraintSystem::new(item_count as usize, constraints)?.with_labels(labels)
}

/// Admissible bound for the partial state that includes `included`,
/// excludes `excluded`, and leaves everything else undecided: never below
/// the best completion of that subtree.
pub fn packing_upper_bound(
    cs: &ConstraintSystem,
    included: &[u32],
    excluded: &[u32],
) -> Result<u64> {
    let mut state = State::new(cs);
    for &x in included {
        if x as usize >= cs.item_count() || state.item_state[x as usize] != UNDECIDED {
            return Err(Error::invalid(format!("bad partial state at item {x}")));
        }
        state.apply(x, INCLUDED);
    }
    for &x in excluded {
        if x as usize >= cs.item_count() || state.item_state[x as usize] != UNDECIDED {
            return Err(Error::invalid(format!("bad partial state at item {x}")));
        }
        state.apply(x, EXCLUDED);
    }
    Ok(state.upper_bound())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(m: usize, constraints: &[&[u32]]) -> ConstraintSystem {
        ConstraintSystem::new(m, constraints.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(ConstraintSystem::new(3, vec![vec![]]).is_err());
        assert!(ConstraintSystem::new(3, vec![vec![0, 3]]).is_err());
        assert!(ConstraintSystem::new(3, vec![vec![1, 1]]).is_err());
        let cs = ConstraintSystem::new(3, vec![vec![2, 0], vec![0, 2], vec![1]]).unwrap();
        assert_eq!(cs.constraints(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn no_constraints_takes_everything() {
        let cs = system(10, &[]);
        let res = solve_max_avoiding(&cs, &SolverConfig::default()).unwrap();
        assert_eq!(res.objective, 10);
        assert_eq!(res.witness, (0..10).collect::<Vec<u32>>());
        assert_eq!(res.status, SolveStatus::Exact);
    }

    #[test]
    fn single_constraint_drops_one() {
        let cs = system(6, &[&[0, 1, 2, 3, 4, 5]]);
        let max = solve_max_avoiding(&cs, &SolverConfig::default()).unwrap();
        assert_eq!(max.objective, 5);
        let min = solve_min_transversal(&cs, &SolverConfig::default()).unwrap();
        assert_eq!(min.objective, 1);
    }

    #[test]
    fn unit_constraints_force_empty() {
        let cs = system(4, &[&[0], &[1], &[2], &[3]]);
        let res = solve_max_avoiding(&cs, &SolverConfig::default()).unwrap();
        assert_eq!(res.objective, 0);
        assert!(res.witness.is_empty());
    }

    #[test]
    fn q3_vertex_cover() {
        // Edges of the 3-cube: 12 constraints of size 2 over 8 vertices.
        let mut edges: Vec<Vec<u32>> = Vec::new();
        for v in 0u32..8 {
            for b in 0..3 {
                let w = v ^ (1 << b);
                if v < w {
                    edges.push(vec![v, w]);
                }
            }
        }
        assert_eq!(edges.len(), 12);
        let cs = ConstraintSystem::new(8, edges).unwrap();
        let res = solve_min_transversal(&cs, &SolverConfig::default()).unwrap();
        assert_eq!(res.objective, 4);
    }

    #[test]
    fn oracle_empty_and_cap() {
        let cs = system(10, &[]);
        assert_eq!(brute_force_oracle(&cs).unwrap().objective, 10);
        let big = system(25, &[]);
        assert!(brute_force_oracle(&big).is_err());
    }

    #[test]
    fn oracle_matches_solver_on_seeded_systems() {
        // Deterministic pseudo-random small systems.
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _case in 0..60 {
            let m = 6 + (next() % 9) as usize; // 6..14 items
            let k = 2 + (next() % 12) as usize;
            let mut constraints = Vec::new();
            for _ in 0..k {
                let size = 1 + (next() % 4) as usize;
                let mut c: Vec<u32> = (0..size).map(|_| (next() % m as u64) as u32).collect();
                c.sort_unstable();
                c.dedup();
                constraints.push(c);
            }
            let cs = ConstraintSystem::new(m, constraints).unwrap();
            let oracle = brute_force_oracle(&cs).unwrap();
            let solver = solve_max_avoiding(&cs, &SolverConfig::default()).unwrap();
            assert_eq!(solver.objective, oracle.objective);
            assert_eq!(solver.status, SolveStatus::Exact);
        }
    }

    #[test]
    fn duality_on_seeded_systems() {
        let mut seed = 42u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            seed >> 11
        };
        for _ in 0..20 {
            let m = 5 + (next() % 10) as usize;
            let k = 1 + (next() % 8) as usize;
            let mut constraints = Vec::new();
            for _ in 0..k {
                let size = 1 + (next() % 3) as usize;
                let mut c: Vec<u32> = (0..size).map(|_| (next() % m as u64) as u32).collect();
                c.sort_unstable();
                c.dedup();
                constraints.push(c);
            }
            let cs = ConstraintSystem::new(m, constraints).unwrap();
            let cfg = SolverConfig::default();
            let max = solve_max_avoiding(&cs, &cfg).unwrap();
            let min = solve_min_transversal(&cs, &cfg).unwrap();
            assert_eq!(max.objective + min.objective, m as u64);
        }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let mut constraints = Vec::new();
        // All 4-subsets of [8] as constraints over their pair-ranks would
        // be a daisy system; here a direct medium instance suffices.
        for a in 0u32..8 {
            for b in (a + 1)..8 {
                for c in (b + 1)..8 {
                    constraints.push(vec![a, b, c]);
                }
            }
        }
        let cs = ConstraintSystem::new(8, constraints).unwrap();
        let base = solve_max_avoiding(&cs, &SolverConfig::default()).unwrap();
        for workers in [2usize, 4] {
            let cfg = SolverConfig {
                workers,
                ..SolverConfig::default()
            };
            let res = solve_max_avoiding(&cs, &cfg).unwrap();
            assert_eq!(res.objective, base.objective);
            assert_eq!(res.witness, base.witness);
            assert_eq!(res.nodes_explored, base.nodes_explored);
        }
    }

    #[test]
    fn node_limit_reports_lower_bound() {
        let mut constraints = Vec::new();
        for a in 0u32..12 {
            for b in (a + 1)..12 {
                constraints.push(vec![a, b]);
            }
        }
        let cs = ConstraintSystem::new(12, constraints).unwrap();
        let cfg = SolverConfig {
            node_limit: 3,
            ..SolverConfig::default()
        };
        let res = solve_max_avoiding(&cs, &cfg).unwrap();
        assert_eq!(res.status, SolveStatus::LowerBoundOnly);
        // The incumbent is still feasible: at most one item.
        assert!(res.objective <= 1);
    }

    #[test]
    fn symmetry_pruning_preserves_objective() {
        let mut constraints = Vec::new();
        for a in 0u32..10 {
            for b in (a + 1)..10 {
                for c in (b + 1)..10 {
                    constraints.push(vec![a, b, c]);
                }
            }
        }
        let cs = ConstraintSystem::new(10, constraints).unwrap();
        let plain = solve_max_avoiding(&cs, &SolverConfig::default()).unwrap();
        let cfg = SolverConfig {
            symmetry: true,
            orbits: Some(cs.single_orbit()),
            ..SolverConfig::default()
        };
        let pruned = solve_max_avoiding(&cs, &cfg).unwrap();
        assert_eq!(plain.objective, pruned.objective);
        assert!(pruned.nodes_explored <= plain.nodes_explored);
    }

    #[test]
    fn daisy_constraint_shapes() {
        let d2 = DaisyPattern::new(2, 4, 2).unwrap();
        let cs = build_daisy_constraints(4, &d2).unwrap();
        assert_eq!(cs.item_count(), 6);
        assert_eq!(cs.constraints().len(), 1);
        assert_eq!(cs.constraints()[0].len(), 6);

        let d3 = DaisyPattern::new(3, 4, 2).unwrap();
        let cs = build_daisy_constraints(7, &d3).unwrap();
        assert_eq!(cs.item_count(), 35);
        assert_eq!(cs.constraints().len(), 105);
        assert!(cs.constraints().iter().all(|c| c.len() == 6));

        let cs = build_daisy_constraints(5, &d3).unwrap();
        assert_eq!(cs.item_count(), 10);
        assert_eq!(cs.constraints().len(), 5);
    }

    #[test]
    fn daisy_constraints_label_items_by_colex_rank() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        let cs = build_daisy_constraints(6, &pattern).unwrap();
        let labels = cs.labels().expect("daisy systems carry labels");
        assert_eq!(labels.len(), cs.item_count());
        for (rank, label) in labels.iter().enumerate() {
            assert_eq!(
                label,
                &colex_unrank(rank as u64, 6, 3).unwrap(),
                "item {rank}"
            );
        }
    }

    #[test]
    fn daisy_constraints_dedup_single_petal_pattern() {
        // D_3(2,2): one petal P u Q; every 3-set arises from three (P, Q)
        // splits, so instances collapse to one constraint per 3-set.
        let pattern = DaisyPattern::new(3, 2, 2).unwrap();
        let cs = build_daisy_constraints(5, &pattern).unwrap();
        assert_eq!(cs.constraints().len(), 10);
        assert!(cs.constraints().iter().all(|c| c.len() == 1));
    }

    #[test]
    fn ex_small_turan_values() {
        // ex(n, D_2(4,2)) is the K_4-free Turan number.
        let d2 = DaisyPattern::new(2, 4, 2).unwrap();
        let cfg = SolverConfig::default();
        let cs4 = build_daisy_constraints(4, &d2).unwrap();
        assert_eq!(solve_max_avoiding(&cs4, &cfg).unwrap().objective, 5);
        let oracle4 = brute_force_oracle(&cs4).unwrap();
        assert_eq!(oracle4.objective, 5);
        let cs6 = build_daisy_constraints(6, &d2).unwrap();
        assert_eq!(solve_max_avoiding(&cs6, &cfg).unwrap().objective, 12);
    }

    #[test]
    fn objective_invariant_under_relabeling() {
        let pattern = DaisyPattern::new(3, 4, 2).unwrap();
        let cs = build_daisy_constraints(6, &pattern).unwrap();
        // Rank permutation induced by a ground permutation.
        let perm = [3usize, 5, 0, 2, 4, 1];
        let rank_map: Vec<u32> = (0..cs.item_count() as u64)
            .map(|rank| {
                let s = colex_unrank(rank, 6, 3).unwrap();
                let mut image: Vec<usize> = s.elements().iter().map(|&e| perm[e]).collect();
                image.sort_unstable();
                crate::family::colex_rank(&RSet::new(image, 6).unwrap()) as u32
            })
            .collect();
        let relabeled: Vec<Vec<u32>> = cs
            .constraints()
            .iter()
            .map(|c| c.iter().map(|&x| rank_map[x as usize]).collect())
            .collect();
        let cs2 = ConstraintSystem::new(cs.item_count(), relabeled).unwrap();
        let cfg = SolverConfig::default();
        assert_eq!(
            solve_max_avoiding(&cs, &cfg).unwrap().objective,
            solve_max_avoiding(&cs2, &cfg).unwrap().objective
        );
    }

    #[test]
    fn packing_bound_base_cases() {
        let cs = system(6, &[&[0, 1, 2]]);
        // No live constraints after excluding item 0.
        assert_eq!(packing_upper_bound(&cs, &[], &[0]).unwrap(), 5);
        // One live, fully undecided constraint: drop at least one item.
        assert_eq!(packing_upper_bound(&cs, &[], &[]).unwrap(), 5);
        let free = system(6, &[]);
        assert_eq!(packing_upper_bound(&free, &[1, 2], &[]).unwrap(), 6);
        assert!(packing_upper_bound(&cs, &[0], &[0]).is_err());
    }

    #[test]
    fn packing_bound_admissible_on_seeded_systems() {
        let mut seed = 7u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _case in 0..1000 {
            let m = 4 + (next() % 7) as usize; // 4..10
            let k = 1 + (next() % 6) as usize;
            let mut constraints = Vec::new();
            for _ in 0..k {
                let size = 1 + (next() % 3) as usize;
                let mut c: Vec<u32> = (0..size).map(|_| (next() % m as u64) as u32).collect();
                c.sort_unstable();
                c.dedup();
                constraints.push(c);
            }
            let cs = ConstraintSystem::new(m, constraints).unwrap();
            // Random consistent partial state.
            let mut included = Vec::new();
            let mut excluded = Vec::new();
            for x in 0..m as u32 {
                match next() % 3 {
                    0 => included.push(x),
                    1 => excluded.push(x),
                    _ => {}
                }
            }
            // Skip partial states that already contain a constraint.
            let violated = cs
                .constraints()
                .iter()
                .any(|c| c.iter().all(|x| included.contains(x)));
            if violated {
                continue;
            }
            let bound = packing_upper_bound(&cs, &included, &excluded).unwrap();
            // Oracle: best completion that keeps `included` and avoids
            // `excluded`, by enumerating subsets of the undecided items.
            let undecided: Vec<u32> = (0..m as u32)
                .filter(|x| !included.contains(x) && !excluded.contains(x))
                .collect();
            let mut best: Option<u64> = None;
            for pick in 0u64..(1 << undecided.len()) {
                let mut set: Vec<u32> = included.clone();
                for (i, &x) in undecided.iter().enumerate() {
                    if pick >> i & 1 == 1 {
                        set.push(x);
                    }
                }
                let ok = !cs
                    .constraints()
                    .iter()
                    .any(|c| c.iter().all(|x| set.contains(x)));
                if ok {
                    best = Some(best.map_or(set.len() as u64, |b: u64| b.max(set.len() as u64)));
                }
            }
            if let Some(optimum) = best {
                assert!(
                    bound >= optimum,
                    "bound {bound} below optimum {optimum} (m={m})"
                );
            }
        }
    }
}
