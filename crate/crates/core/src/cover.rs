//! Weighted parity set covering.
//!
//! Synthesis reduces to: select candidate vertex sets so that every on-set
//! point is covered an odd number of times and every off-set point an even
//! number of times, minimizing total block weight. This module builds the
//! instance over a parallelotope family, solves it exactly by depth-first
//! branch-and-bound with an anytime time limit, verifies solutions, and
//! renders the model in LP format for external solvers.

use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bits::Bits256;
use crate::boolfn::BoolFn;
use crate::circuit::{build_block, Circuit, GateStats};
use crate::cost::{block_weight, BlockWeight, CostPair, Objective};
use crate::greedy::{GreedyConfig, SynthStatus, SynthesisResult};
use crate::ptope::{enumerate_all, FamilyKind, Parallelotope, PtopeFamily};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("variable counts differ: function has {0}, family has {1}")]
    VarMismatch(u8, u8),
    #[error("time limit must be positive")]
    ZeroTimeLimit,
    #[error("incumbent solution does not verify against the instance")]
    BadIncumbent,
    #[error("candidate index {0} out of range ({1} candidates)")]
    IndexRange(usize, usize),
    #[error("bad selection entry {0:?}")]
    BadSelection(String),
    #[error("internal solver error: {0}")]
    Internal(String),
}

/// One selectable set: an incidence row over the `2^n` points plus its
/// CNOT/T weights.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub row: Bits256,
    pub weight: BlockWeight,
}

/// A parity-covering instance: targets are the function's truth bits (odd
/// coverage required exactly on the on-set).
#[derive(Clone, Debug)]
pub struct CoverInstance {
    pub n: u8,
    pub targets: Bits256,
    pub candidates: Vec<Candidate>,
    pub objective: Objective,
}

impl CoverInstance {
    pub fn points(&self) -> usize {
        1 << self.n
    }

    pub fn candidate_cost(&self, index: usize) -> CostPair {
        self.objective.cost(self.candidates[index].weight)
    }

    /// Total cost of a selection (indices must be in range).
    pub fn selection_cost(&self, selected: &[usize]) -> Result<CostPair, CoverError> {
        let mut cost = CostPair::default();
        for &i in selected {
            if i >= self.candidates.len() {
                return Err(CoverError::IndexRange(i, self.candidates.len()));
            }
            cost += self.candidate_cost(i);
        }
        Ok(cost)
    }
}

pub fn build_instance(
    f: &BoolFn,
    family: &PtopeFamily,
    objective: Objective,
) -> Result<CoverInstance, CoverError> {
    if f.n() != family.n {
        return Err(CoverError::VarMismatch(f.n(), family.n));
    }
    let candidates = family
        .members
        .iter()
        .map(|p| Candidate { row: *p.vertices().bits(), weight: block_weight(p) })
        .collect();
    Ok(CoverInstance { n: f.n(), targets: *f.bits(), candidates, objective })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Search space exhausted; the solution is a proven optimum.
    Optimal,
    /// Time limit hit; the solution is the best incumbent found.
    FeasibleTimeout,
    /// Search space exhausted without a feasible selection.
    Infeasible,
}

pub use crate::greedy::Improvement;

#[derive(Clone, Debug)]
pub struct CoverSolution {
    /// Selected candidate indices, ascending.
    pub selected: Vec<usize>,
    pub cost: CostPair,
    pub status: SolveStatus,
    pub wall: Duration,
    pub nodes: u64,
    pub improvements: Vec<Improvement>,
}

impl CoverSolution {
    /// Wraps an externally produced selection, computing its cost.
    pub fn from_selection(
        inst: &CoverInstance,
        mut selected: Vec<usize>,
        status: SolveStatus,
    ) -> Result<Self, CoverError> {
        let cost = inst.selection_cost(&selected)?;
        selected.sort_unstable();
        Ok(CoverSolution {
            selected,
            cost,
            status,
            wall: Duration::ZERO,
            nodes: 0,
            improvements: Vec::new(),
        })
    }
}

/// True iff the selection meets every parity target and the recorded cost
/// recomputes. Out-of-range indices simply fail the check.
pub fn verify_solution(inst: &CoverInstance, sol: &CoverSolution) -> bool {
    let mut acc = Bits256::EMPTY;
    for &i in &sol.selected {
        match inst.candidates.get(i) {
            Some(c) => acc ^= c.row,
            None => return false,
        }
    }
    acc == inst.targets && inst.selection_cost(&sol.selected).is_ok_and(|c| c == sol.cost)
}

/// Parses a selection file: whitespace/newline-separated candidate indices.
pub fn parse_selection(text: &str) -> Result<Vec<usize>, CoverError> {
    text.split_whitespace()
        .map(|tok| tok.parse().map_err(|_| CoverError::BadSelection(tok.to_string())))
        .collect()
}

struct Searcher<'a> {
    inst: &'a CoverInstance,
    costs: Vec<CostPair>,
    /// Candidate indices containing each point.
    containers: Vec<Vec<u32>>,
    /// Undecided candidates containing each point.
    remaining: Vec<u32>,
    decided: Vec<bool>,
    residual: Bits256,
    path_cost: CostPair,
    included: Vec<u32>,
    trail: Vec<(u32, bool)>, // (candidate, was_included)
    best: Option<(CostPair, Vec<u32>)>,
    window: Arc<WindowBounds>,
    nodes: u64,
    start: Instant,
    deadline: Instant,
    stopped: bool,
    improvements: Vec<Improvement>,
}

/// Precomputed parity-distance tables giving an O(1) admissible lower bound
/// per search node, in units of `primary cost * 2^n`.
///
/// Two relaxation families feed the bound, each a table of shortest parity
/// distances over at most 2^16 projected states:
///
/// Partition tables: the `2^n` points are split into subcube windows of at
/// most 16 points, and each candidate's cost is shared across the windows of
/// a partition in exact proportion to its row (`cost * |row ^ W| * 2^(n-m)`
/// in scaled units, which sums to `cost * 2^n` over the partition). Shares
/// sum to true cost and every feasible completion fixes every window, so the
/// per-window tables add within a partition. The cube is halved along
/// different axes, so every candidate whose support misses some split
/// coordinate is priced at full cost in at least one partition.
///
/// Fold tables: XOR-folding the cube along a coordinate set is GF(2)-linear,
/// so any feasible completion also fixes the folded image of the residual --
/// a parity cover over at most 16 fold classes with candidates at their full
/// cost. Folds price structure that straddles the partition cuts.
///
/// All relaxations also allow already-decided candidates and multiset reuse,
/// which only lower the tables, so each is admissible at every node and the
/// bound takes their max. For n <= 4 there is a single whole-cube window and
/// the table is the exact parity-cover distance.
struct WindowBounds {
    scale: u64,
    partitions: Vec<Vec<Window>>,
    folds: Vec<Window>,
}

/// Shortest-parity-distance table over the states of up to 16 bit classes;
/// state bit `b` is the XOR of a residual over `bit_classes[b]`.
struct Window {
    bit_classes: Vec<Vec<usize>>,
    dist: Vec<u64>,
}

/// Coordinate masks to split the cube on; each partition's windows fix the
/// masked coordinates and keep at most four free.
fn split_masks(n: u8) -> Vec<u16> {
    match n {
        0..=4 => vec![0],
        5 => (0..5).map(|c| 1 << c).collect(),
        6 => vec![0b11_0000, 0b00_1100, 0b00_0011],
        7 => vec![0b111_0000, 0b000_0111],
        _ => vec![0b1111_0000, 0b0000_1111],
    }
}

/// Subgroup bases to fold the cube along; a fold's classes are the cosets of
/// the subgroup spanned by the basis. Different directions blind the table to
/// different candidates (those whose block span contains a basis element), so
/// many directions are kept. Folds price the whole candidate list at full
/// cost and are built only where exact solves within a time limit are
/// realistic and the family is not huge.
fn fold_bases(n: u8) -> Vec<Vec<u16>> {
    match n {
        5 => (1u16..32).map(|v| vec![v]).collect(),
        6 => vec![vec![0b10_0000, 0b01_0000], vec![0b00_1000, 0b00_0100], vec![0b00_0010, 0b00_0001]],
        _ => Vec::new(),
    }
}

impl Window {
    /// Shortest scaled cost to reach every parity state, where candidate `i`
    /// moves by the XOR-image of its row at cost `share(i, image_size)`.
    fn build(
        bit_classes: Vec<Vec<usize>>,
        inst: &CoverInstance,
        share: impl Fn(usize, u64) -> u64,
    ) -> Self {
        let k = bit_classes.len();
        debug_assert!(k <= 16);
        let mut move_cost = vec![u64::MAX; 1 << k];
        for (i, cand) in inst.candidates.iter().enumerate() {
            let mut mask = 0usize;
            for (b, class) in bit_classes.iter().enumerate() {
                let ones = class.iter().filter(|&&p| cand.row.get(p)).count();
                if ones % 2 == 1 {
                    mask |= 1 << b;
                }
            }
            if mask != 0 {
                let cost = share(i, mask.count_ones() as u64);
                move_cost[mask] = move_cost[mask].min(cost);
            }
        }
        let moves: Vec<(usize, u64)> = move_cost
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != u64::MAX)
            .map(|(m, &c)| (m, c))
            .collect();

        // Distances are small integers; a bucket queue beats a heap here.
        let mut dist = vec![u64::MAX; 1 << k];
        dist[0] = 0;
        let mut buckets: Vec<Vec<u32>> = vec![vec![0]];
        let mut d = 0usize;
        while d < buckets.len() {
            while let Some(state) = buckets[d].pop() {
                let state = state as usize;
                if dist[state] != d as u64 {
                    continue;
                }
                for &(mask, cost) in &moves {
                    let next = state ^ mask;
                    let nd = d as u64 + cost;
                    if nd < dist[next] {
                        dist[next] = nd;
                        let slot = nd as usize;
                        if slot >= buckets.len() {
                            buckets.resize(slot + 1, Vec::new());
                        }
                        buckets[slot].push(next as u32);
                    }
                }
            }
            d += 1;
        }
        Window { bit_classes, dist }
    }

    fn lookup(&self, residual: &Bits256) -> u64 {
        let mut state = 0usize;
        for (b, class) in self.bit_classes.iter().enumerate() {
            let ones = class.iter().filter(|&&p| residual.get(p)).count();
            if ones % 2 == 1 {
                state |= 1 << b;
            }
        }
        self.dist[state]
    }
}

/// Window tables depend only on the candidate rows and their primary costs,
/// not on the target function, so repeated solves over one family and
/// objective (corpus runs, exhaustive sweeps) share them.
fn cached_windows(inst: &CoverInstance, costs: &[CostPair]) -> Arc<WindowBounds> {
    static CACHE: OnceLock<Mutex<Vec<(u128, Arc<WindowBounds>)>>> = OnceLock::new();
    let key = fingerprint(inst, costs);
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    {
        let held = cache.lock().unwrap();
        if let Some((_, tables)) = held.iter().find(|(k, _)| *k == key) {
            return Arc::clone(tables);
        }
    }
    let built = Arc::new(WindowBounds::build(inst, costs));
    let mut held = cache.lock().unwrap();
    if held.iter().all(|(k, _)| *k != key) {
        if held.len() >= 32 {
            held.remove(0);
        }
        held.push((key, Arc::clone(&built)));
    }
    built
}

fn fingerprint(inst: &CoverInstance, costs: &[CostPair]) -> u128 {
    let mut a: u64 = 0xcbf2_9ce4_8422_2325;
    let mut b: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut mix = |v: u64| {
        a = (a ^ v).wrapping_mul(0x0000_0100_0000_01b3);
        b = (b ^ v.rotate_left(29)).wrapping_mul(0xd6e8_feb8_6659_fd93);
    };
    mix(u64::from(inst.n));
    mix(inst.candidates.len() as u64);
    for (cand, cost) in inst.candidates.iter().zip(costs) {
        for w in cand.row.words() {
            mix(w);
        }
        mix(cost.primary);
    }
    (u128::from(a) << 64) | u128::from(b)
}

impl WindowBounds {
    fn build(inst: &CoverInstance, costs: &[CostPair]) -> Self {
        let points = inst.points();
        let scale = points as u64;
        let per_vertex: Vec<u64> = inst
            .candidates
            .iter()
            .enumerate()
            .map(|(i, c)| costs[i].primary * (scale / u64::from(c.row.count())))
            .collect();

        let mut partitions = Vec::new();
        for split in split_masks(inst.n) {
            let mut windows = Vec::new();
            let mut assignment = split;
            loop {
                let classes: Vec<Vec<usize>> = (0..points)
                    .filter(|&p| p as u16 & split == assignment)
                    .map(|p| vec![p])
                    .collect();
                windows.push(Window::build(classes, inst, |i, overlap| per_vertex[i] * overlap));
                if assignment == 0 {
                    break;
                }
                assignment = (assignment - 1) & split;
            }
            partitions.push(windows);
        }

        let mut folds = Vec::new();
        for basis in fold_bases(inst.n) {
            let subgroup: Vec<usize> = (0..1usize << basis.len())
                .map(|t| {
                    basis
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| t >> j & 1 == 1)
                        .fold(0usize, |acc, (_, &v)| acc ^ v as usize)
                })
                .collect();
            let classes: Vec<Vec<usize>> = (0..points)
                .filter(|&p| subgroup.iter().all(|&g| p <= p ^ g))
                .map(|rep| subgroup.iter().map(|&g| rep ^ g).collect())
                .collect();
            folds.push(Window::build(classes, inst, |i, _| costs[i].primary * scale));
        }

        WindowBounds { scale, partitions, folds }
    }

    /// True as soon as any table proves the bound reaches `needed`.
    fn bound_reaches(&self, residual: &Bits256, needed: u64) -> bool {
        if needed == 0 {
            return true;
        }
        for fold in &self.folds {
            if fold.lookup(residual) >= needed {
                return true;
            }
        }
        for windows in &self.partitions {
            if windows.iter().map(|w| w.lookup(residual)).sum::<u64>() >= needed {
                return true;
            }
        }
        false
    }
}

enum Step {
    Infeasible,
    Forced(u32, bool),
    Branch(u32),
}

impl<'a> Searcher<'a> {
    fn new(inst: &'a CoverInstance, time_limit: Duration) -> Self {
        let points = inst.points();
        let mut containers = vec![Vec::new(); points];
        for (i, cand) in inst.candidates.iter().enumerate() {
            for p in cand.row.iter() {
                containers[p].push(i as u32);
            }
        }
        let remaining = containers.iter().map(|c| c.len() as u32).collect();
        let costs: Vec<CostPair> = (0..inst.candidates.len()).map(|i| inst.candidate_cost(i)).collect();
        let window = cached_windows(inst, &costs);
        let start = Instant::now();
        Searcher {
            costs,
            containers,
            remaining,
            decided: vec![false; inst.candidates.len()],
            residual: inst.targets,
            path_cost: CostPair::default(),
            included: Vec::new(),
            trail: Vec::new(),
            best: None,
            window,
            nodes: 0,
            start,
            deadline: start + time_limit,
            stopped: false,
            improvements: Vec::new(),
            inst,
        }
    }

    fn decide(&mut self, cand: u32, include: bool) {
        debug_assert!(!self.decided[cand as usize]);
        self.decided[cand as usize] = true;
        for p in self.inst.candidates[cand as usize].row.iter() {
            self.remaining[p] -= 1;
        }
        if include {
            self.residual ^= self.inst.candidates[cand as usize].row;
            self.path_cost += self.costs[cand as usize];
            self.included.push(cand);
        }
        self.trail.push((cand, include));
    }

    fn undo_one(&mut self) {
        let (cand, included) = self.trail.pop().expect("trail entry to undo");
        self.decided[cand as usize] = false;
        for p in self.inst.candidates[cand as usize].row.iter() {
            self.remaining[p] += 1;
        }
        if included {
            self.residual ^= self.inst.candidates[cand as usize].row;
            let c = self.costs[cand as usize];
            self.path_cost.primary -= c.primary;
            self.path_cost.secondary -= c.secondary;
            self.included.pop();
        }
    }

    fn unwind_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            self.undo_one();
        }
    }

    fn first_undecided_container(&self, point: usize) -> u32 {
        *self.containers[point]
            .iter()
            .find(|&&c| !self.decided[c as usize])
            .expect("remaining count said one exists")
    }

    /// Parity propagation and branch selection in one sweep over the points.
    ///
    /// A point with no undecided container is stuck if its parity is still
    /// off. A point with exactly one is decided for us: the candidate must go
    /// in when the parity is off and must stay out when it is met. Otherwise
    /// branch on the cheapest candidate covering the most constrained point.
    fn next_step(&self) -> Step {
        let mut branch_point: Option<(u32, usize)> = None;
        for p in 0..self.inst.points() {
            let needs_flip = self.residual.get(p);
            match self.remaining[p] {
                0 => {
                    if needs_flip {
                        return Step::Infeasible;
                    }
                }
                1 => return Step::Forced(self.first_undecided_container(p), needs_flip),
                r => {
                    if needs_flip && branch_point.is_none_or(|(best, _)| r < best) {
                        branch_point = Some((r, p));
                    }
                }
            }
        }
        let (_, point) = branch_point.expect("caller handles the empty residual");
        // Cheapest candidate covering the most constrained point; among equal
        // costs, prefer the one clearing more of the residual.
        let cand = self.containers[point]
            .iter()
            .copied()
            .filter(|&c| !self.decided[c as usize])
            .min_by_key(|&c| {
                let overlap = (self.inst.candidates[c as usize].row & self.residual).count();
                (self.costs[c as usize], std::cmp::Reverse(overlap), c)
            })
            .expect("point has undecided containers");
        Step::Branch(cand)
    }

    /// Admissible lower bound by independent-point packing: greedily pick
    /// residual points no two of which share any undecided candidate; each
    /// must be covered by its own candidate, so the minima add up.
    fn packing_bound(&self) -> u64 {
        let mut blocked = Bits256::EMPTY;
        let mut bound = 0u64;
        for p in self.residual.iter() {
            if blocked.get(p) {
                continue;
            }
            let mut cheapest = u64::MAX;
            for &c in &self.containers[p] {
                if self.decided[c as usize] {
                    continue;
                }
                cheapest = cheapest.min(self.costs[c as usize].primary);
                blocked |= self.inst.candidates[c as usize].row;
            }
            debug_assert_ne!(cheapest, u64::MAX, "infeasible points are pruned before bounding");
            bound += cheapest;
        }
        bound
    }

    fn record_incumbent(&mut self) {
        let mut selection = self.included.clone();
        selection.sort_unstable();
        self.improvements.push(Improvement {
            t_ms: self.start.elapsed().as_millis() as u64,
            tc: self.path_cost.primary,
            nodes: self.nodes,
        });
        self.best = Some((self.path_cost, selection));
    }

    fn beats_incumbent(&self, cost: CostPair) -> bool {
        match &self.best {
            Some((best, _)) => cost < *best,
            None => true,
        }
    }

    /// True when no completion of the current node can beat the incumbent.
    ///
    /// A completion's cost pair is at least `(path.primary + LB,
    /// path.secondary)` lexicographically, so with `gap = best.primary -
    /// path.primary` it is pruned once the scaled primary lower bound reaches
    /// `gap` (tie loses) or `gap + 1` (tie would still win on the
    /// tie-break). The search only calls this while `path_cost < best`.
    fn prunable(&self) -> bool {
        let Some((best, _)) = &self.best else { return false };
        debug_assert!(self.path_cost < *best);
        let scale = self.window.scale;
        let gap = (best.primary - self.path_cost.primary) * scale;
        let needed = if self.path_cost.secondary >= best.secondary { gap } else { gap + 1 };
        if self.window.bound_reaches(&self.residual, needed) {
            return true;
        }
        self.packing_bound() * scale >= needed
    }

    /// Explores the subproblem rooted at the current partial assignment.
    /// Exclusion branches loop in place, so recursion depth tracks only the
    /// number of inclusions on the path.
    fn search(&mut self) {
        let mark = self.trail.len();
        loop {
            self.nodes += 1;
            if self.nodes % 256 == 0 && Instant::now() >= self.deadline {
                self.stopped = true;
            }
            if self.stopped {
                break;
            }
            if self.residual.is_empty() {
                if self.beats_incumbent(self.path_cost) {
                    self.record_incumbent();
                }
                break;
            }
            if !self.beats_incumbent(self.path_cost) {
                break;
            }
            match self.next_step() {
                Step::Infeasible => break,
                Step::Forced(cand, include) => {
                    self.decide(cand, include);
                    continue;
                }
                Step::Branch(cand) => {
                    if self.prunable() {
                        break;
                    }
                    self.decide(cand, true);
                    self.search();
                    self.undo_one();
                    if self.stopped {
                        break;
                    }
                    self.decide(cand, false);
                }
            }
        }
        self.unwind_to(mark);
    }
}

/// Exact branch-and-bound solve with an anytime time limit.
///
/// The search is warm-started from the best of the supplied incumbent, a
/// minterm-only selection (when the instance carries singleton rows for every
/// target point), and an internal ratio-greedy pass over the rows, so any
/// positive limit returns a verifying solution for the standard families.
pub fn solve(
    inst: &CoverInstance,
    time_limit: Duration,
    incumbent: Option<&CoverSolution>,
) -> Result<CoverSolution, CoverError> {
    if time_limit.is_zero() {
        return Err(CoverError::ZeroTimeLimit);
    }
    if let Some(given) = incumbent {
        if !verify_solution(inst, given) {
            return Err(CoverError::BadIncumbent);
        }
    }

    let mut searcher = Searcher::new(inst, time_limit);

    let mut seed: Option<(CostPair, Vec<u32>)> = incumbent
        .map(|s| (s.cost, s.selected.iter().map(|&i| i as u32).collect()));
    for candidate_seed in [minterm_selection(inst), greedy_selection(inst)].into_iter().flatten() {
        let cost =
            inst.selection_cost(&candidate_seed.iter().map(|&i| i as usize).collect::<Vec<_>>())?;
        if seed.as_ref().is_none_or(|(c, _)| cost < *c) {
            seed = Some((cost, candidate_seed));
        }
    }
    if let Some((cost, selection)) = seed {
        searcher.improvements.push(Improvement { t_ms: 0, tc: cost.primary, nodes: 0 });
        searcher.best = Some((cost, selection));
    }

    searcher.search();

    let status = if searcher.stopped {
        SolveStatus::FeasibleTimeout
    } else if searcher.best.is_some() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Infeasible
    };
    let (cost, selected) = match searcher.best.take() {
        Some((cost, sel)) => (cost, sel.iter().map(|&i| i as usize).collect::<Vec<_>>()),
        None => {
            if status == SolveStatus::FeasibleTimeout {
                return Err(CoverError::Internal(
                    "time limit hit before any feasible selection was found".into(),
                ));
            }
            (CostPair { primary: u64::MAX, secondary: u64::MAX }, Vec::new())
        }
    };
    let solution = CoverSolution {
        selected,
        cost,
        status,
        wall: searcher.start.elapsed(),
        nodes: searcher.nodes,
        improvements: searcher.improvements,
    };
    if status != SolveStatus::Infeasible && !verify_solution(inst, &solution) {
        return Err(CoverError::Internal("solver produced a non-verifying selection".into()));
    }
    Ok(solution)
}

/// Ratio-greedy selection over the instance rows: scan candidates widest
/// first (cost ascending within a width) and take any whose live overlap
/// with the residual reaches 3/4, falling back to the residual's lowest
/// point's singleton. XOR-cancels duplicate picks before returning.
fn greedy_selection(inst: &CoverInstance) -> Option<Vec<u32>> {
    let mut singleton_at = vec![u32::MAX; inst.points()];
    for (i, cand) in inst.candidates.iter().enumerate() {
        if cand.row.count() == 1 {
            singleton_at[cand.row.first().unwrap()] = i as u32;
        }
    }
    let mut order: Vec<u32> = (0..inst.candidates.len() as u32).collect();
    order.sort_by_key(|&i| {
        let c = &inst.candidates[i as usize];
        (std::cmp::Reverse(c.row.count()), inst.candidate_cost(i as usize), i)
    });

    let mut residual = inst.targets;
    let mut chosen = vec![false; inst.candidates.len()];
    let mut guard = 4 * inst.points() as u32;
    while !residual.is_empty() {
        guard = guard.checked_sub(1)?;
        let pick = order
            .iter()
            .copied()
            .find(|&i| {
                let row = &inst.candidates[i as usize].row;
                let overlap = u64::from((*row & residual).count());
                overlap > 0 && 4 * overlap >= 3 * u64::from(row.count())
            })
            .or_else(|| {
                let p = residual.first().expect("residual is nonempty");
                (singleton_at[p] != u32::MAX).then(|| singleton_at[p])
            })?;
        residual ^= inst.candidates[pick as usize].row;
        chosen[pick as usize] ^= true;
    }
    Some(chosen.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| i as u32).collect())
}

/// The singleton-per-target selection, when the instance has one.
fn minterm_selection(inst: &CoverInstance) -> Option<Vec<u32>> {
    let mut singleton_at = vec![u32::MAX; inst.points()];
    for (i, cand) in inst.candidates.iter().enumerate() {
        if cand.row.count() == 1 {
            singleton_at[cand.row.first().unwrap()] = i as u32;
        }
    }
    let mut selection = Vec::new();
    for p in inst.targets.iter() {
        if singleton_at[p] == u32::MAX {
            return None;
        }
        selection.push(singleton_at[p]);
    }
    Some(selection)
}

/// Renders the instance in LP format. With `with_integer_helpers` the cover
/// count of each point gets its own integer variable `v{j}` tied to parity
/// helpers `y{k}` (on-set, odd) and `z{l}` (off-set, even); without, the
/// substituted parity rows `sum x_i - 2 y_j = f_j` are emitted directly.
pub fn export_lp(inst: &CoverInstance, with_integer_helpers: bool) -> String {
    let (alpha, beta) = inst.objective.alpha_beta();
    let mut out = String::new();
    out.push_str("Minimize\n");
    let terms: Vec<String> = inst
        .candidates
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let w = alpha * c.weight.cnot + beta * c.weight.t;
            (w != 0).then(|| format!("{w} x{i}"))
        })
        .collect();
    push_wrapped(&mut out, " obj:", &terms, " + ");

    out.push_str("Subject To\n");
    let mut generals: Vec<String> = Vec::new();
    for j in 0..inst.points() {
        let on = inst.targets.get(j);
        let xs: Vec<String> = inst
            .candidates
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.row.get(j).then(|| format!("x{i}")))
            .collect();
        if with_integer_helpers {
            let mut row = vec![format!("v{j}")];
            row.extend(xs.iter().map(|x| format!("- {x}")));
            push_wrapped(&mut out, &format!(" cnt{j}:"), &row, " ");
            out.push_str(" = 0\n");
            if on {
                out.push_str(&format!(" odd{j}: v{j} - 2 y{j} = 1\n"));
                generals.push(format!("y{j}"));
            } else {
                out.push_str(&format!(" evn{j}: v{j} - 2 z{j} = 0\n"));
                generals.push(format!("z{j}"));
            }
            generals.push(format!("v{j}"));
        } else {
            let mut row: Vec<String> = Vec::with_capacity(xs.len() + 1);
            row.extend(xs.iter().enumerate().map(|(k, x)| {
                if k == 0 {
                    x.clone()
                } else {
                    format!("+ {x}")
                }
            }));
            row.push(format!("- 2 y{j}"));
            push_wrapped(&mut out, &format!(" p{j}:"), &row, " ");
            out.push_str(&format!(" = {}\n", u8::from(on)));
            generals.push(format!("y{j}"));
        }
    }

    out.push_str("Binary\n");
    let xs: Vec<String> = (0..inst.candidates.len()).map(|i| format!("x{i}")).collect();
    push_wrapped(&mut out, "", &xs, " ");
    out.push_str("General\n");
    push_wrapped(&mut out, "", &generals, " ");
    out.push_str("End\n");
    out
}

fn push_wrapped(out: &mut String, head: &str, terms: &[String], sep: &str) {
    out.push_str(head);
    let mut width = head.len();
    for (i, term) in terms.iter().enumerate() {
        let lead = if i == 0 { " " } else { sep };
        if width + lead.len() + term.len() > 255 {
            out.push_str("\n ");
            width = 1;
            if i > 0 {
                out.push_str(sep.trim_start());
                width += sep.trim_start().len();
            }
        } else {
            out.push_str(lead);
            width += lead.len();
        }
        out.push_str(term);
        width += term.len();
    }
    if terms.is_empty() {
        out.push_str(" 0");
    }
    out.push('\n');
}

/// Exact synthesis: solve the cover, then stitch one block per selected set.
/// The greedy result over the same family seeds the incumbent, so the exact
/// cost never exceeds the greedy cost.
pub fn synth_exact(
    f: &BoolFn,
    kind: FamilyKind,
    objective: Objective,
    time_limit: Duration,
) -> Result<SynthesisResult, CoverError> {
    let start = Instant::now();
    let family = enumerate_all(f.n(), kind)
        .map_err(|e| CoverError::Internal(format!("family enumeration failed: {e}")))?;
    let inst = build_instance(f, &family, objective)?;

    let cfg = GreedyConfig { kind, objective, ..GreedyConfig::default() };
    let greedy = crate::greedy::synth_greedy_with_family(f, &cfg, &family);
    let mut seed = CoverSolution::from_selection(
        &inst,
        xor_dedupe(&greedy.selected_indices),
        SolveStatus::FeasibleTimeout,
    )?;
    debug_assert!(verify_solution(&inst, &seed));

    // Over the full family, first solve the subcube restriction: it is far
    // smaller, and any of its solutions maps index-for-index into the full
    // family, giving an incumbent no worse than a pure subcube synthesis.
    if kind == FamilyKind::Full {
        if let Some(sub_seed) = subcube_seed(f, &family, &inst, objective, time_limit / 4) {
            if sub_seed.cost < seed.cost {
                seed = sub_seed;
            }
        }
    }

    let solution = solve(&inst, time_limit, Some(&seed))?;

    let n = f.n();
    let mut circuit = Circuit::new(n + 1);
    let mut per_block = Vec::new();
    let mut selected = Vec::new();
    for &i in &solution.selected {
        let p = &family.members[i];
        circuit.mark_block();
        let block = build_block(p, n)
            .map_err(|e| CoverError::Internal(format!("block construction failed: {e}")))?;
        per_block.push(block.stats());
        circuit
            .append(&block)
            .map_err(|e| CoverError::Internal(format!("block append failed: {e}")))?;
        selected.push(p.clone());
    }
    if !circuit.verify_oracle(f) {
        return Err(CoverError::Internal("synthesized circuit failed oracle verification".into()));
    }
    let mut total = GateStats::default();
    for s in &per_block {
        total.merge(s);
    }
    Ok(SynthesisResult {
        circuit,
        selected,
        selected_indices: solution.selected.clone(),
        per_block,
        total,
        cost: solution.cost,
        iterations: solution.nodes,
        wall: start.elapsed(),
        improvements: solution.improvements.clone(),
        status: match solution.status {
            SolveStatus::Optimal => SynthStatus::Optimal,
            SolveStatus::FeasibleTimeout => SynthStatus::FeasibleTimeout,
            SolveStatus::Infeasible => {
                return Err(CoverError::Internal(
                    "standard families always contain singletons; cover cannot be infeasible".into(),
                ))
            }
        },
    })
}

/// Solves the subcube restriction and lifts the selection into full-family
/// indices. Returns `None` when anything goes sideways; the seed is an
/// optimization, never a requirement.
fn subcube_seed(
    f: &BoolFn,
    full_family: &PtopeFamily,
    full_inst: &CoverInstance,
    objective: Objective,
    time_limit: Duration,
) -> Option<CoverSolution> {
    let sub_family = enumerate_all(f.n(), FamilyKind::Subcube).ok()?;
    let sub_inst = build_instance(f, &sub_family, objective).ok()?;
    let cfg = GreedyConfig { kind: FamilyKind::Subcube, objective, ..GreedyConfig::default() };
    let sub_greedy = crate::greedy::synth_greedy_with_family(f, &cfg, &sub_family);
    let sub_seed = CoverSolution::from_selection(
        &sub_inst,
        xor_dedupe(&sub_greedy.selected_indices),
        SolveStatus::FeasibleTimeout,
    )
    .ok()?;
    let sub_solution = solve(&sub_inst, time_limit.max(Duration::from_millis(10)), Some(&sub_seed)).ok()?;

    let index_of: std::collections::HashMap<&Parallelotope, usize> =
        full_family.members.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let lifted: Option<Vec<usize>> = sub_solution
        .selected
        .iter()
        .map(|&i| index_of.get(&sub_family.members[i]).copied())
        .collect();
    CoverSolution::from_selection(full_inst, lifted?, SolveStatus::FeasibleTimeout).ok()
}

/// Collapses a multiset of indices to the indices appearing an odd number of
/// times (selecting a set twice cancels under XOR).
fn xor_dedupe(indices: &[usize]) -> Vec<usize> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut run = 0usize;
    for (i, &v) in sorted.iter().enumerate() {
        run += 1;
        if i + 1 == sorted.len() || sorted[i + 1] != v {
            if run % 2 == 1 {
                out.push(v);
            }
            run = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptope::Parallelotope;

    fn full4() -> PtopeFamily {
        enumerate_all(4, FamilyKind::Full).unwrap()
    }

    fn index_of(family: &PtopeFamily, p: &Parallelotope) -> usize {
        family.members.iter().position(|m| m == p).expect("member present")
    }

    fn worked_example() -> (BoolFn, PtopeFamily, CoverInstance, Vec<usize>) {
        let f = BoolFn::from_hex_id("0x46b9", 4).unwrap();
        let family = full4();
        let inst = build_instance(&f, &family, Objective::Cnot).unwrap();
        let s1 = Parallelotope::new(4, 0, &[0b100, 0b010, 0b001]).unwrap();
        let s2 = Parallelotope::new(4, 0b0110, &[0b1000]).unwrap();
        let s3 = Parallelotope::new(4, 0b0001, &[0b0011, 0b1000]).unwrap();
        let picks = vec![index_of(&family, &s1), index_of(&family, &s2), index_of(&family, &s3)];
        (f, family, inst, picks)
    }

    #[test]
    fn instance_shape() {
        let (f, _, inst, _) = worked_example();
        assert_eq!(inst.candidates.len(), 257);
        assert_eq!(inst.points(), 16);
        assert_eq!(inst.targets.count(), 8);
        assert_eq!(inst.targets, *f.bits());

        let zero = BoolFn::from_hex_id("0x0", 3).unwrap();
        let fam3 = enumerate_all(3, FamilyKind::Full).unwrap();
        let inst0 = build_instance(&zero, &fam3, Objective::Cnot).unwrap();
        assert!(inst0.targets.is_empty());
        assert_eq!(build_instance(&zero, &full4(), Objective::Cnot).unwrap_err(), CoverError::VarMismatch(3, 4));
    }

    #[test]
    fn worked_example_selection_verifies_at_23() {
        let (_, _, inst, picks) = worked_example();
        let sol = CoverSolution::from_selection(&inst, picks, SolveStatus::Optimal).unwrap();
        assert!(verify_solution(&inst, &sol));
        assert_eq!(sol.cost, CostPair { primary: 23, secondary: 23 });

        // Dropping the third set leaves point 9 uncovered.
        let partial = CoverSolution::from_selection(&inst, sol.selected[..2].to_vec(), SolveStatus::Optimal).unwrap();
        assert!(!verify_solution(&inst, &partial));
    }

    #[test]
    fn empty_selection_on_constant_false() {
        let zero = BoolFn::from_hex_id("0x0", 3).unwrap();
        let fam = enumerate_all(3, FamilyKind::Full).unwrap();
        let inst = build_instance(&zero, &fam, Objective::Cnot).unwrap();
        let sol = CoverSolution::from_selection(&inst, vec![], SolveStatus::Optimal).unwrap();
        assert!(verify_solution(&inst, &sol));

        let solved = solve(&inst, Duration::from_secs(5), None).unwrap();
        assert_eq!(solved.status, SolveStatus::Optimal);
        assert!(solved.selected.is_empty());
        assert_eq!(solved.cost, CostPair::default());
    }

    #[test]
    fn solve_beats_or_matches_the_worked_example() {
        let (_, _, inst, picks) = worked_example();
        let seed = CoverSolution::from_selection(&inst, picks, SolveStatus::FeasibleTimeout).unwrap();
        let sol = solve(&inst, Duration::from_secs(60), Some(&seed)).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(verify_solution(&inst, &sol));
        assert!(sol.cost.primary <= 23, "optimum must not exceed the known selection");
        assert!(!sol.improvements.is_empty());
    }

    #[test]
    fn solve_argument_validation() {
        let (_, _, inst, _) = worked_example();
        assert_eq!(solve(&inst, Duration::ZERO, None).unwrap_err(), CoverError::ZeroTimeLimit);
        let bogus = CoverSolution {
            selected: vec![0],
            cost: CostPair::default(),
            status: SolveStatus::Optimal,
            wall: Duration::ZERO,
            nodes: 0,
            improvements: vec![],
        };
        assert_eq!(
            solve(&inst, Duration::from_secs(1), Some(&bogus)).unwrap_err(),
            CoverError::BadIncumbent
        );
    }

    #[test]
    fn synth_exact_worked_example() {
        let f = BoolFn::from_hex_id("0x46b9", 4).unwrap();
        let result = synth_exact(&f, FamilyKind::Full, Objective::Cnot, Duration::from_secs(60)).unwrap();
        assert_eq!(result.status, SynthStatus::Optimal);
        assert!(result.circuit.verify_oracle(&f));
        assert!(result.cost.primary <= 23);
        assert_eq!(result.total.cnot_total, result.cost.primary, "CNOT objective totals agree");
    }

    #[test]
    fn synth_exact_trivial_cases() {
        let t4 = BoolFn::from_hex_id("0xffff", 4).unwrap();
        let result = synth_exact(&t4, FamilyKind::Full, Objective::Cnot, Duration::from_secs(10)).unwrap();
        assert_eq!(result.cost, CostPair::default());
        assert_eq!(result.circuit.gates().len(), 1, "constant-true is a single X");

        let zero = BoolFn::from_hex_id("0x0", 3).unwrap();
        let result = synth_exact(&zero, FamilyKind::Full, Objective::Cnot, Duration::from_secs(10)).unwrap();
        assert!(result.circuit.is_empty());
    }

    #[test]
    fn selection_parsing() {
        assert_eq!(parse_selection("0 5\n12\n").unwrap(), vec![0, 5, 12]);
        assert!(parse_selection("0 x").is_err());
        assert_eq!(parse_selection("").unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn xor_dedupe_keeps_odd_occurrences() {
        assert_eq!(xor_dedupe(&[3, 1, 3, 2, 3]), vec![1, 2, 3]);
        assert_eq!(xor_dedupe(&[4, 4]), Vec::<usize>::new());
        assert_eq!(xor_dedupe(&[]), Vec::<usize>::new());
    }

    #[test]
    fn lp_export_shapes() {
        let (_, _, inst, _) = worked_example();
        let plain = export_lp(&inst, false);
        assert!(plain.starts_with("Minimize\n"));
        assert!(plain.contains("Subject To\n"));
        assert!(plain.ends_with("End\n"));
        for j in 0..16 {
            assert!(plain.contains(&format!(" p{j}:")), "parity row {j}");
        }
        // On-set rows equal 1, off-set rows equal 0.
        assert!(plain.contains("= 1\n"));
        assert!(plain.contains("= 0\n"));
        // All 257 columns are declared binary.
        let binary = plain.split("Binary\n").nth(1).unwrap().split("General\n").next().unwrap();
        assert_eq!(binary.split_whitespace().count(), 257);

        let helpers = export_lp(&inst, true);
        for j in 0..16 {
            assert!(helpers.contains(&format!(" cnt{j}:")));
        }
        assert!(helpers.contains(" odd0: v0 - 2 y0 = 1\n"), "0 is a minterm of 0x46b9");
        assert!(helpers.contains(" evn1: v1 - 2 z1 = 0\n"), "1 is off-set");

        // The full cube has zero CNOT weight and must be absent from the objective.
        let obj = plain.split("Subject To").next().unwrap();
        assert!(!obj.contains(" x0 "), "zero-weight column omitted from the objective");
    }
}

