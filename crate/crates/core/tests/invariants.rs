//! Cross-module invariants: property tests over random families and
//! systems, plus the finite-n laws for cube transversal densities.

use daisies::constructions::{complete_multipartite, layered_transversal};
use daisies::cube::{
    enumerate_middle_subcubes, enumerate_subcubes, is_transversal, min_subcube_transversal,
};
use daisies::daisy::{daisy_count, enumerate_daisies, find_daisy, DaisyPattern};
use daisies::family::{binomial, colex_rank, colex_unrank, RSet, SetFamily};
use daisies::products::{enumerate_copies, star_product, UniformHypergraph};
use daisies::report::{ex_table, ratios_nonincreasing, ExProblem, Rat};
use daisies::solver::{
    brute_force_oracle, build_daisy_constraints, packing_upper_bound, solve_max_avoiding,
    solve_min_transversal, ConstraintSystem, SolveStatus, SolverConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn family_from_mask(n: usize, r: usize, mask: u64) -> SetFamily {
    let sets = (0..binomial(n, r))
        .filter(|rank| mask >> (rank % 64) & 1 == 1)
        .map(|rank| colex_unrank(rank, n, r).unwrap().elements().to_vec());
    SetFamily::from_sets(n, r, sets).unwrap()
}

fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    perm
}

proptest! {
    #[test]
    fn colex_round_trip(n in 1usize..=16, seed in any::<u64>()) {
        for r in 1..=n.min(6) {
            let rank = seed % binomial(n, r);
            let set = colex_unrank(rank, n, r).unwrap();
            prop_assert_eq!(colex_rank(&set), rank);
        }
    }

    #[test]
    fn relabel_preserves_size_and_acts(mask in any::<u64>(), seed in any::<u64>()) {
        let f = family_from_mask(7, 3, mask);
        let p = random_permutation(7, seed);
        let q = random_permutation(7, seed.wrapping_add(1));
        let relabeled = f.relabel(&p).unwrap();
        prop_assert_eq!(relabeled.len(), f.len());
        let qp: Vec<usize> = (0..7).map(|i| q[p[i]]).collect();
        prop_assert_eq!(relabeled.relabel(&q).unwrap(), f.relabel(&qp).unwrap());
    }

    #[test]
    fn complement_involution(mask in any::<u64>()) {
        let f = family_from_mask(6, 3, mask);
        let c = f.complement();
        prop_assert_eq!(f.len() + c.len(), binomial(6, 3));
        prop_assert_eq!(c.complement(), f);
    }

    #[test]
    fn find_daisy_none_iff_count_zero(mask in any::<u64>()) {
        let pattern = DaisyPattern::plain(3).unwrap();
        let f = family_from_mask(7, 3, mask);
        let found = find_daisy(&f, &pattern).unwrap();
        let count = daisy_count(&f, &pattern).unwrap();
        prop_assert_eq!(found.is_some(), count > 0);
    }

    #[test]
    fn find_daisy_relabel_equivariant(mask in any::<u64>(), seed in any::<u64>()) {
        let pattern = DaisyPattern::plain(3).unwrap();
        let f = family_from_mask(7, 3, mask);
        let g = f.relabel(&random_permutation(7, seed)).unwrap();
        prop_assert_eq!(
            find_daisy(&f, &pattern).unwrap().is_none(),
            find_daisy(&g, &pattern).unwrap().is_none()
        );
    }

    #[test]
    fn find_daisy_monotone_in_members(mask in any::<u64>(), extra in any::<u64>()) {
        let pattern = DaisyPattern::plain(3).unwrap();
        let f = family_from_mask(7, 3, mask);
        let g = family_from_mask(7, 3, mask | extra);
        prop_assert!(f.is_subfamily_of(&g));
        if find_daisy(&f, &pattern).unwrap().is_some() {
            prop_assert!(find_daisy(&g, &pattern).unwrap().is_some());
        }
    }

    #[test]
    fn solver_oracle_duality_and_witness(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(4usize..=12);
        let mut constraints = Vec::new();
        for _ in 0..rng.gen_range(1usize..=10) {
            let size = rng.gen_range(1usize..=3);
            let mut c: Vec<u32> = (0..size).map(|_| rng.gen_range(0..m as u32)).collect();
            c.sort_unstable();
            c.dedup();
            constraints.push(c);
        }
        let cs = ConstraintSystem::new(m, constraints).unwrap();
        let cfg = SolverConfig::default();
        let max = solve_max_avoiding(&cs, &cfg).unwrap();
        let min = solve_min_transversal(&cs, &cfg).unwrap();
        let oracle = brute_force_oracle(&cs).unwrap();
        prop_assert_eq!(max.objective, oracle.objective);
        prop_assert_eq!(max.objective + min.objective, m as u64);
        // Soundness of the witness, rechecked here from outside.
        for c in cs.constraints() {
            prop_assert!(!c.iter().all(|x| max.witness.binary_search(x).is_ok()));
            prop_assert!(c.iter().any(|x| min.witness.binary_search(x).is_ok()));
        }
    }

    #[test]
    fn packing_bound_admissible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(4usize..=10);
        let mut constraints = Vec::new();
        for _ in 0..rng.gen_range(1usize..=6) {
            let size = rng.gen_range(1usize..=3);
            let mut c: Vec<u32> = (0..size).map(|_| rng.gen_range(0..m as u32)).collect();
            c.sort_unstable();
            c.dedup();
            constraints.push(c);
        }
        let cs = ConstraintSystem::new(m, constraints).unwrap();
        let mut included = Vec::new();
        let mut excluded = Vec::new();
        for x in 0..m as u32 {
            match rng.gen_range(0..3) {
                0 => included.push(x),
                1 => excluded.push(x),
                _ => {}
            }
        }
        let consistent = !cs
            .constraints()
            .iter()
            .any(|c| c.iter().all(|x| included.contains(x)));
        prop_assume!(consistent);
        let bound = packing_upper_bound(&cs, &included, &excluded).unwrap();
        // Brute-force best completion.
        let undecided: Vec<u32> = (0..m as u32)
            .filter(|x| !included.contains(x) && !excluded.contains(x))
            .collect();
        let mut best = 0u64;
        for pick in 0u64..(1 << undecided.len()) {
            let mut set = included.clone();
            for (i, &x) in undecided.iter().enumerate() {
                if pick >> i & 1 == 1 {
                    set.push(x);
                }
            }
            let feasible = !cs
                .constraints()
                .iter()
                .any(|c| c.iter().all(|x| set.contains(x)));
            if feasible {
                best = best.max(set.len() as u64);
            }
        }
        prop_assert!(bound >= best);
    }

    #[test]
    fn star_product_is_multiplicative(fm in any::<u64>(), gm in any::<u64>()) {
        let f = UniformHypergraph::new(family_from_mask(5, 2, fm | 1));
        let g = UniformHypergraph::new(family_from_mask(4, 2, gm | 1));
        let p = star_product(&f, &g).unwrap();
        prop_assert_eq!(p.edge_count(), f.edge_count() * g.edge_count());
        prop_assert_eq!(p.ground_size(), 9);
        prop_assert_eq!(p.uniformity(), 4);
    }

    #[test]
    fn link_carries_daisies_through_the_stem(mask in any::<u64>(), e in 0usize..6) {
        // A middle-layer family on [6] has a daisy with stem {e} exactly
        // when its link at {e} (a 2-graph on 5 points) has a daisy.
        let family = family_from_mask(6, 3, mask);
        let linked = daisies::cube::link(&family, &[e]).unwrap();
        prop_assert_eq!(linked.n(), 5);
        prop_assert_eq!(linked.r(), 2);
        let link_has = find_daisy(&linked, &DaisyPattern::plain(2).unwrap())
            .unwrap()
            .is_some();
        let direct_has = enumerate_daisies(6, &DaisyPattern::plain(3).unwrap())
            .iter()
            .filter(|inst| inst.stem() == [e])
            .any(|inst| {
                inst.petal_ranks()
                    .into_iter()
                    .all(|rank| family.contains_rank(rank))
            });
        prop_assert_eq!(link_has, direct_has);
    }
}

#[test]
fn concurrent_solves_share_one_system() {
    let cs = build_daisy_constraints(6, &DaisyPattern::plain(3).unwrap()).unwrap();
    let cfg = SolverConfig::default();
    let (a, b) = std::thread::scope(|scope| {
        let first = scope.spawn(|| solve_max_avoiding(&cs, &cfg).unwrap());
        let second = scope.spawn(|| solve_min_transversal(&cs, &cfg).unwrap());
        (first.join().unwrap(), second.join().unwrap())
    });
    assert_eq!(a.objective + b.objective, cs.item_count() as u64);
}

#[test]
fn solver_deterministic_across_runs_and_workers() {
    let cs = build_daisy_constraints(6, &DaisyPattern::plain(3).unwrap()).unwrap();
    let runs: Vec<_> = [1usize, 1, 2, 4, 8]
        .iter()
        .map(|&workers| {
            let cfg = SolverConfig {
                workers,
                ..SolverConfig::default()
            };
            let res = solve_max_avoiding(&cs, &cfg).unwrap();
            (res.objective, res.witness, res.nodes_explored)
        })
        .collect();
    for run in &runs[1..] {
        assert_eq!(run, &runs[0]);
    }
}

#[test]
fn ex_density_monotone_for_daisy_tables() {
    let cfg = SolverConfig::default();
    // Ranges stay at desk scale: the t = 1 patterns blow up past n = 7
    // (weak packing bounds on many small overlapping constraints).
    for (pattern, n_to) in [
        (DaisyPattern::plain(2).unwrap(), 9),
        (DaisyPattern::plain(3).unwrap(), 8),
        (DaisyPattern::new(3, 4, 3).unwrap(), 7),
        (DaisyPattern::new(3, 4, 1).unwrap(), 7),
        (DaisyPattern::new(4, 4, 2).unwrap(), 8),
    ] {
        let table = ex_table(&ExProblem::Daisy(pattern), pattern.r().max(4), n_to, &cfg).unwrap();
        assert!(
            ratios_nonincreasing(&table.records),
            "{pattern} ratios must decrease"
        );
    }
}

/// Minimum-transversal densities grow toward the limit: restricting a
/// transversal of Q_n to a half and averaging over the 2n halves gives
/// density(n-1) <= density(n). They stay inside the bracket
/// (log2 d)/2^(d+2) <= density <= 1/(d+1) at every solvable n.
#[test]
fn transversal_density_nondecreasing_and_bracketed() {
    let cfg = SolverConfig::default();
    for d in 1..=2usize {
        let mut previous: Option<Rat> = None;
        for n in d..=6 {
            let report = min_subcube_transversal(n, d, false, false, &cfg).unwrap();
            assert_eq!(report.search.status, SolveStatus::Exact);
            let density = Rat::new(report.search.objective, 1 << n);
            if let Some(prev) = previous {
                assert!(
                    prev <= density,
                    "d={d}: density fell from {prev} to {density} at n={n}"
                );
            }
            assert!(density <= Rat::new(1, d as u64 + 1), "d={d} n={n}");
            if d >= 2 && n >= d + 2 {
                assert!(
                    density >= Rat::new(d.ilog2() as u64, 1 << (d + 2)),
                    "d={d} n={n}"
                );
            }
            previous = Some(density);
        }
    }
}

#[test]
fn layered_transversal_and_middle_slices_for_larger_n() {
    // Count formulas up to n = 10.
    for n in 0..=10usize {
        for d in 0..=n.min(4) {
            assert_eq!(
                enumerate_subcubes(n, d).unwrap().len() as u64,
                binomial(n, d) * (1u64 << (n - d))
            );
        }
    }
    for n in [4usize, 6, 8, 10] {
        for dim in [2usize, 4] {
            let stem = n / 2 - dim / 2;
            assert_eq!(
                enumerate_middle_subcubes(n, dim).unwrap().len() as u64,
                binomial(n, stem) * binomial(n / 2 + dim / 2, dim)
            );
        }
    }
    // A multipartite family is daisy-free while the layered family covers:
    // two unrelated sanity anchors at the same sizes.
    assert!(find_daisy(
        &complete_multipartite(10, 3).unwrap(),
        &DaisyPattern::plain(3).unwrap()
    )
    .unwrap()
    .is_none());
    let cubes = enumerate_subcubes(10, 3).unwrap();
    let vs = layered_transversal(10, 3, 2).unwrap();
    assert!(is_transversal(&vs, &cubes).unwrap().is_transversal);
}

/// Random middle-layer subsets at n = 6: meets-every-middle-4-cube iff the
/// complement (inside the middle layer) carries no daisy. The two sides
/// are computed from the two independent generators.
#[test]
fn correspondence_spot_check_random_sets() {
    let n = 6usize;
    let pattern = DaisyPattern::new(3, 4, 2).unwrap();
    let layer = binomial(n, n / 2) as usize;
    let cubes = enumerate_middle_subcubes(n, 4).unwrap();
    let slice_masks: Vec<u64> = cubes
        .iter()
        .map(|cube| {
            cube.layer_slice(n / 2)
                .into_iter()
                .map(|v| {
                    let elements: Vec<usize> = (0..n).filter(|i| v >> i & 1 == 1).collect();
                    colex_rank(&RSet::new(elements, n).unwrap())
                })
                .fold(0u64, |acc, rank| acc | (1 << rank))
        })
        .collect();
    let petal_masks: Vec<u64> = enumerate_daisies(n, &pattern)
        .iter()
        .map(|inst| {
            inst.petal_ranks()
                .into_iter()
                .fold(0u64, |acc, rank| acc | (1 << rank))
        })
        .collect();
    assert_eq!(slice_masks.len(), 30);
    assert_eq!(petal_masks.len(), 30);
    let mut rng = ChaCha8Rng::seed_from_u64(0xda15);
    for _ in 0..10_000 {
        let set: u64 = rng.gen_range(0..(1u64 << layer));
        let meets_all = slice_masks.iter().all(|&s| set & s != 0);
        let complement_daisy_free = petal_masks.iter().all(|&p| set & p != 0);
        assert_eq!(meets_all, complement_daisy_free, "set {set:#x}");
    }
}

/// The largest supported correspondence instance: Q_8 middle 4-cubes
/// against D_4(4,2) on the 70-set middle layer.
#[test]
fn correspondence_holds_at_n_eight() {
    let report =
        daisies::cube::transversal_daisy_correspondence(8, 4, &SolverConfig::default()).unwrap();
    assert_eq!(report.pairs, 420);
    assert!(report.slices_match);
    assert_eq!(report.min_transversal, 14);
    assert_eq!(report.ex_value, 56);
    assert!(report.sum_matches);
}

/// The generalized correspondence at (n, dim) = (6, 2): middle 2-cubes
/// against D_3(2,1).
#[test]
fn correspondence_generalizes_to_dim_two() {
    let report =
        daisies::cube::transversal_daisy_correspondence(6, 2, &SolverConfig::default()).unwrap();
    assert!(report.slices_match);
    assert_eq!(report.scan_holds, Some(true));
    assert!(report.sum_matches);
}

/// The generic-copy route gives the same ex values as the daisy fast
/// path, and its densities decrease in n.
#[test]
fn forbidden_route_ex_matches_daisy_route_and_decreases() {
    let cfg = SolverConfig::default();
    let k4 = UniformHypergraph::new(SetFamily::complete(4, 2).unwrap());
    let table = ex_table(&ExProblem::forbidden(k4), 4, 8, &cfg).unwrap();
    let values: Vec<u64> = table.records.iter().map(|r| r.value).collect();
    assert_eq!(values, vec![5, 8, 12, 16, 21]);
    assert!(table.exact_ratios_nonincreasing);
}

/// Copies are deduplicated by edge-set image, so relabeling the pattern
/// ground cannot change the constraint system.
#[test]
fn copy_enumeration_invariant_under_pattern_relabeling() {
    let pattern = DaisyPattern::plain(3).unwrap();
    let petals = daisies::daisy::instantiate(&pattern, &[4], &[0, 1, 2, 3])
        .unwrap()
        .petals()
        .to_vec();
    let h = UniformHypergraph::new(SetFamily::from_sets(5, 3, petals).unwrap());
    for seed in 0..10u64 {
        let perm = random_permutation(5, seed);
        let relabeled = UniformHypergraph::new(h.edges().relabel(&perm).unwrap());
        let a = enumerate_copies(&h, 6).unwrap();
        let b = enumerate_copies(&relabeled, 6).unwrap();
        assert_eq!(a.constraints(), b.constraints());
    }
}

/// Generic-copy constraints agree with the direct daisy generator on
/// every pattern whose abstract ground fits 8 points.
#[test]
fn copy_enumeration_matches_daisy_generator_for_small_patterns() {
    for r in 2..=4usize {
        for s in 2..=4usize {
            for t in 1..=s.min(r) {
                let pattern = DaisyPattern::new(r, s, t).unwrap();
                let points = pattern.stem_size() + s;
                if points > 8 {
                    continue;
                }
                let n = points + 1;
                if binomial(n, r) > 60 {
                    continue;
                }
                let stem: Vec<usize> = (s..s + pattern.stem_size()).collect();
                let free: Vec<usize> = (0..s).collect();
                let petals = daisies::daisy::instantiate(&pattern, &stem, &free)
                    .unwrap()
                    .petals()
                    .to_vec();
                let h = UniformHypergraph::new(SetFamily::from_sets(points, r, petals).unwrap());
                let generic = enumerate_copies(&h, n).unwrap();
                let direct = build_daisy_constraints(n, &pattern).unwrap();
                let a: std::collections::BTreeSet<_> =
                    generic.constraints().iter().cloned().collect();
                let b: std::collections::BTreeSet<_> =
                    direct.constraints().iter().cloned().collect();
                assert_eq!(a, b, "{pattern} at n={n}");
            }
        }
    }
}
