//! Independent oracles shared by the integration suites.
//!
//! Everything here recomputes expected values through routes disjoint from
//! the code paths under test: costs come from materialized circuits rather
//! than the closed-form block weights, optima from an exhaustive shortest-
//! path sweep of the parity-state graph rather than the branch-and-bound,
//! and families from a coset test over raw vertex subsets rather than the
//! structure enumerator.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use sshr_core::{build_block, BoolFn, CostPair, FamilyKind, Objective, Parallelotope, PtopeFamily};

/// Cost of selecting one parallelotope, measured by building its block and
/// counting decomposed gates.
pub fn measured_cost(p: &Parallelotope, objective: Objective) -> CostPair {
    let stats = build_block(p, p.n()).expect("block builds").stats();
    match objective {
        Objective::Cnot => CostPair { primary: stats.cnot_total, secondary: stats.t },
        Objective::TCount => CostPair { primary: stats.t, secondary: stats.cnot_total },
        Objective::Weighted { alpha, beta } => CostPair {
            primary: alpha * stats.cnot_total + beta * stats.t,
            secondary: 0,
        },
    }
}

/// Exact parity-cover optimum for every truth table at once: one Dijkstra
/// pass over all `2^(2^n)` parity states with one move per family member.
/// Feasible only for small `n`; the suites use it at `n = 3`.
pub struct StateSpaceOracle {
    dist: Vec<CostPair>,
}

impl StateSpaceOracle {
    pub fn build(family: &PtopeFamily, objective: Objective) -> Self {
        let n = family.n;
        assert!(n <= 4, "state space is 2^(2^n)");
        let states: usize = 1 << (1 << n);
        let moves: Vec<(usize, CostPair)> = family
            .members
            .iter()
            .map(|p| {
                let mask = p
                    .vertices()
                    .iter()
                    .fold(0usize, |acc, v| acc | 1 << v);
                (mask, measured_cost(p, objective))
            })
            .collect();

        let unreachable = CostPair { primary: u64::MAX, secondary: u64::MAX };
        let mut dist = vec![unreachable; states];
        dist[0] = CostPair::default();
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((CostPair::default(), 0usize)));
        while let Some(Reverse((d, state))) = heap.pop() {
            if d > dist[state] {
                continue;
            }
            for &(mask, cost) in &moves {
                let next = state ^ mask;
                let nd = d + cost;
                if nd < dist[next] {
                    dist[next] = nd;
                    heap.push(Reverse((nd, next)));
                }
            }
        }
        StateSpaceOracle { dist }
    }

    pub fn optimum(&self, f: &BoolFn) -> CostPair {
        let target = f.on_set().iter().fold(0usize, |acc, v| acc | 1 << v);
        self.dist[target]
    }
}

/// Every subset of the `n`-cube that is a parallelotope, found by testing the
/// coset property directly: closed under XOR relative to a base point, with
/// the subgroup generated by its block classes recovering the whole set.
pub fn brute_force_vertex_sets(n: u8) -> Vec<Vec<u16>> {
    assert!(n <= 4, "vertex subsets grow doubly exponentially");
    let points = 1u32 << n;
    let mut found = Vec::new();
    for mask in 1u64..(1 << points) {
        let set: Vec<u16> = (0..points as u16).filter(|&p| mask >> p & 1 == 1).collect();
        if is_parallelotope_set(n, &set) {
            found.push(set);
        }
    }
    found
}

fn is_parallelotope_set(n: u8, set: &[u16]) -> bool {
    if !set.len().is_power_of_two() {
        return false;
    }
    let base = set[0];
    let diffs: Vec<u16> = set.iter().map(|&x| x ^ base).collect();

    // Subgroup test: closed under pairwise XOR.
    for &a in &diffs {
        for &b in &diffs {
            if !diffs.contains(&(a ^ b)) {
                return false;
            }
        }
    }
    // Disjoint-support basis test: coordinates that ever differ within the
    // subgroup split into classes that always move together; the subgroup
    // must be exactly the span of those class masks.
    let support = diffs.iter().fold(0u16, |acc, &d| acc | d);
    let mut classes: Vec<u16> = Vec::new();
    let mut seen = 0u16;
    for c in 0..n {
        let bit = 1u16 << c;
        if support & bit == 0 || seen & bit != 0 {
            continue;
        }
        let mut class = 0u16;
        for c2 in c..n {
            let bit2 = 1u16 << c2;
            if support & bit2 != 0 && diffs.iter().all(|&d| (d & bit != 0) == (d & bit2 != 0)) {
                class |= bit2;
            }
        }
        seen |= class;
        classes.push(class);
    }
    if seen != support {
        return false;
    }
    set.len() == 1 << classes.len()
}

/// The subcube count written as the explicit sum over cube dimensions.
pub fn subcube_count_sum(n: u8) -> u64 {
    (0..=u64::from(n))
        .map(|k| {
            let choose = (0..k).fold(1u64, |acc, i| acc * (u64::from(n) - i) / (i + 1));
            choose << (u64::from(n) - k)
        })
        .sum()
}

/// Convenience: all `2^(2^n)` functions of `n` variables (sane for n <= 4).
pub fn all_functions(n: u8) -> impl Iterator<Item = BoolFn> {
    let total: u64 = 1 << (1u64 << n);
    (0..total).map(move |id| BoolFn::from_hex_id(&format!("{id:#x}"), n).unwrap())
}

#[allow(dead_code)]
pub fn family(n: u8, kind: FamilyKind) -> PtopeFamily {
    sshr_core::enumerate_all(n, kind).unwrap()
}
