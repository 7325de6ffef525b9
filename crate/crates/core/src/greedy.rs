//! Ratio-threshold greedy synthesis.
//!
//! Scans the candidate family in a fixed order -- dimension descending (high
//! dimension means few controls and cheap blocks), cost ascending within a
//! dimension, then canonical order -- and selects the first parallelotope
//! whose overlap with the residual set reaches the configured ratio. Each
//! selection appends one circuit block and XORs the block's vertices into the
//! residual; singletons always qualify, so the loop terminates.

use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bits::Bits256;
use crate::boolfn::{BoolFn, MintermSet};
use crate::circuit::{build_block, Circuit, GateStats};
use crate::cost::{block_cost, CostPair, Objective};
use crate::ptope::{enumerate_all, FamilyKind, Parallelotope, PtopeFamily};

/// Overlap threshold as an exact rational in (0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    num: u32,
    den: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("ratio must satisfy 0 < r <= 1, got {0:?}")]
pub struct RatioError(String);

impl Ratio {
    pub fn new(num: u32, den: u32) -> Result<Self, RatioError> {
        if num == 0 || den == 0 || num > den {
            return Err(RatioError(format!("{num}/{den}")));
        }
        Ok(Ratio { num, den })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// `true` when `part / whole >= self`.
    pub fn holds(&self, part: u64, whole: u64) -> bool {
        part * u64::from(self.den) >= whole * u64::from(self.num)
    }
}

impl Default for Ratio {
    fn default() -> Self {
        Ratio { num: 3, den: 4 }
    }
}

impl FromStr for Ratio {
    type Err = RatioError;

    /// Accepts `"3/4"`, `"1"`, or an exact decimal like `"0.75"`.
    fn from_str(s: &str) -> Result<Self, RatioError> {
        let err = || RatioError(s.to_string());
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse().map_err(|_| err())?;
            let den = b.trim().parse().map_err(|_| err())?;
            return Ratio::new(num, den).map_err(|_| err());
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 6 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let int: u32 = if int.is_empty() { 0 } else { int.parse().map_err(|_| err())? };
            let den = 10u32.pow(frac.len() as u32);
            let num = int * den + frac.parse::<u32>().map_err(|_| err())?;
            return Ratio::new(num, den).map_err(|_| err());
        }
        let int: u32 = s.trim().parse().map_err(|_| err())?;
        Ratio::new(int, 1).map_err(|_| err())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreedyConfig {
    pub ratio: Ratio,
    pub kind: FamilyKind,
    /// Orders same-dimension candidates during the scan.
    pub objective: Objective,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig { ratio: Ratio::default(), kind: FamilyKind::Full, objective: Objective::Cnot }
    }
}

/// How a synthesis result was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthStatus {
    /// Greedy construction; no optimality claim.
    Heuristic,
    /// Exact solver finished its search.
    Optimal,
    /// Exact solver hit its time limit; best incumbent returned.
    FeasibleTimeout,
}

/// One incumbent improvement of an exact solve, for the solver log.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Improvement {
    pub t_ms: u64,
    pub tc: u64,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub circuit: Circuit,
    /// Selected parallelotopes in selection order; no repeats (a repeat
    /// would cancel its own block).
    pub selected: Vec<Parallelotope>,
    /// Family indices aligned with `selected`.
    pub selected_indices: Vec<usize>,
    pub per_block: Vec<GateStats>,
    pub total: GateStats,
    /// Objective value of the selection.
    pub cost: CostPair,
    /// Greedy selections or exact-solver nodes.
    pub iterations: u64,
    pub wall: Duration,
    pub status: SynthStatus,
    /// Incumbent history of the exact solver; empty for greedy runs.
    pub improvements: Vec<Improvement>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("result circuit width {0} does not match function with {1} variables")]
    WidthMismatch(u8, u8),
    #[error("selection does not cover the function's on-set")]
    NotCovering,
}

/// Candidate scan order: dimension descending, block cost ascending, then
/// family (canonical) order.
pub(crate) fn scan_order(family: &PtopeFamily, objective: Objective) -> Vec<usize> {
    let mut order: Vec<usize> = (0..family.members.len()).collect();
    order.sort_by_key(|&i| {
        let p = &family.members[i];
        (std::cmp::Reverse(p.dim()), block_cost(p, objective), i)
    });
    order
}

pub fn synth_greedy(f: &BoolFn, cfg: &GreedyConfig) -> SynthesisResult {
    let family = enumerate_all(f.n(), cfg.kind).expect("function carries a valid variable count");
    synth_greedy_with_family(f, cfg, &family)
}

/// Greedy synthesis against a pre-enumerated family (for corpus runs).
pub fn synth_greedy_with_family(f: &BoolFn, cfg: &GreedyConfig, family: &PtopeFamily) -> SynthesisResult {
    assert_eq!(family.n, f.n(), "family and function dimensions must agree");
    assert_eq!(family.kind, cfg.kind, "family kind must match the configuration");
    let start = Instant::now();
    let n = f.n();
    let rows = family.incidence_rows();
    let order = scan_order(family, cfg.objective);

    // Family index of the single-vertex parallelotope at each point.
    let mut singleton_at = vec![usize::MAX; 1 << n];
    for (i, p) in family.members.iter().enumerate() {
        if p.dim() == 0 {
            singleton_at[p.anchor() as usize] = i;
        }
    }

    let mut residual: Bits256 = *f.bits();
    let mut circuit = Circuit::new(n + 1);
    let mut selected = Vec::new();
    let mut selected_indices = Vec::new();
    let mut per_block = Vec::new();
    let mut chosen = vec![false; family.members.len()];
    let mut cost = CostPair::default();
    let mut iterations: u64 = 0;
    let guard = ((1u64 << n) * 4).max(family.members.len() as u64);

    while !residual.is_empty() {
        iterations += 1;
        assert!(iterations <= guard, "greedy scan failed to make progress");
        let mut pick = None;
        for &i in &order {
            // Re-selecting a parallelotope would only cancel its own block;
            // skipping it also guarantees termination for thresholds <= 1/2,
            // where the residual may otherwise oscillate.
            if chosen[i] {
                continue;
            }
            let overlap = u64::from((rows[i] & residual).count());
            if overlap == 0 {
                continue;
            }
            if cfg.ratio.holds(overlap, family.members[i].vertex_count() as u64) {
                pick = Some(i);
                break;
            }
        }
        // Fallback: unreachable for r <= 1 while the lowest residual point's
        // singleton is fresh (its ratio is 1); kept as a progress guarantee.
        let i = pick.unwrap_or_else(|| {
            let single = singleton_at[residual.first().expect("residual is nonempty")];
            if !chosen[single] {
                single
            } else {
                order
                    .iter()
                    .copied()
                    .find(|&i| !chosen[i] && rows[i].intersects(&residual))
                    .expect("candidate family exhausted before the residual emptied")
            }
        });
        chosen[i] = true;
        let p = &family.members[i];
        circuit.mark_block();
        let block = build_block(p, n).expect("family member matches the function dimension");
        circuit.append(&block).expect("block width matches");
        per_block.push(block.stats());
        cost += block_cost(p, cfg.objective);
        residual ^= rows[i];
        selected.push(p.clone());
        selected_indices.push(i);
    }

    let mut total = GateStats::default();
    for s in &per_block {
        total.merge(s);
    }
    debug_assert_eq!(total, circuit.stats());
    SynthesisResult {
        circuit,
        selected,
        selected_indices,
        per_block,
        total,
        cost,
        iterations,
        wall: start.elapsed(),
        status: SynthStatus::Heuristic,
        improvements: Vec::new(),
    }
}

/// Residual sets of a synthesis run: the on-set, then one entry per selected
/// block, ending at the empty set.
pub fn residual_trace(result: &SynthesisResult, f: &BoolFn) -> Result<Vec<MintermSet>, TraceError> {
    if result.circuit.width() != f.n() + 1 {
        return Err(TraceError::WidthMismatch(result.circuit.width(), f.n()));
    }
    let mut steps = Vec::with_capacity(result.selected.len() + 1);
    let mut acc = *f.bits();
    steps.push(MintermSet::from_bits(f.n(), acc));
    for p in &result.selected {
        acc ^= *p.vertices().bits();
        steps.push(MintermSet::from_bits(f.n(), acc));
    }
    if !acc.is_empty() {
        return Err(TraceError::NotCovering);
    }
    Ok(steps)
}
