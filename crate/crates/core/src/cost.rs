//! Gate-cost model and synthesis objectives.
//!
//! A `k`-control Toffoli decomposes into Clifford+T with the costs below;
//! `k = 0` is a plain X and `k = 1` a plain CNOT, which are native and cost
//! nothing extra. Block weights follow: one parallelotope block of dimension
//! `m` over support size `s` costs `2(s-m)` compute/uncompute CNOTs plus one
//! `(n-m)`-control Toffoli.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::ptope::Parallelotope;

/// Decomposition cost of a single `k`-control Toffoli.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MctCost {
    pub t: u64,
    pub h: u64,
    pub cnot: u64,
    pub ancilla: u64,
}

pub fn mct_cost(k: u32) -> MctCost {
    match k {
        0 => MctCost { t: 0, h: 0, cnot: 0, ancilla: 0 },
        1 => MctCost { t: 0, h: 0, cnot: 1, ancilla: 0 },
        2 => MctCost { t: 7, h: 2, cnot: 6, ancilla: 0 },
        3 => MctCost { t: 16, h: 6, cnot: 14, ancilla: 1 },
        k => {
            let k = u64::from(k);
            MctCost {
                t: 8 * k - 8,
                h: 8 * k - 12,
                cnot: 4 * k - 6,
                ancilla: (k - 2).div_ceil(2),
            }
        }
    }
}

/// CNOT and T weight of one block, computed without building its circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockWeight {
    pub cnot: u64,
    pub t: u64,
}

pub fn block_weight(p: &Parallelotope) -> BlockWeight {
    let m = p.dim() as u64;
    let s = u64::from(p.support_size());
    let mct = mct_cost(u32::from(p.n()) - m as u32);
    BlockWeight { cnot: 2 * (s - m) + mct.cnot, t: mct.t }
}

/// What the synthesizers minimize. The presets order costs lexicographically
/// -- CNOT weight with T as tie-break, or the reverse -- keeping all
/// arithmetic in integers; `Weighted` collapses both into one scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Cnot,
    TCount,
    Weighted { alpha: u64, beta: u64 },
}

impl Objective {
    /// The `(alpha, beta)` weights applied to (CNOT, T) in the scalar cost.
    pub fn alpha_beta(&self) -> (u64, u64) {
        match self {
            Objective::Cnot => (1, 0),
            Objective::TCount => (0, 1),
            Objective::Weighted { alpha, beta } => (*alpha, *beta),
        }
    }

    pub fn cost(&self, w: BlockWeight) -> CostPair {
        match self {
            Objective::Cnot => CostPair { primary: w.cnot, secondary: w.t },
            Objective::TCount => CostPair { primary: w.t, secondary: w.cnot },
            Objective::Weighted { alpha, beta } => CostPair {
                primary: alpha * w.cnot + beta * w.t,
                secondary: 0,
            },
        }
    }
}

/// Lexicographically ordered (objective, tie-break) cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CostPair {
    pub primary: u64,
    pub secondary: u64,
}

impl Add for CostPair {
    type Output = CostPair;
    fn add(self, rhs: CostPair) -> CostPair {
        CostPair {
            primary: self.primary + rhs.primary,
            secondary: self.secondary + rhs.secondary,
        }
    }
}

impl AddAssign for CostPair {
    fn add_assign(&mut self, rhs: CostPair) {
        *self = *self + rhs;
    }
}

impl Sum for CostPair {
    fn sum<I: Iterator<Item = CostPair>>(iter: I) -> CostPair {
        iter.fold(CostPair::default(), |a, b| a + b)
    }
}

/// Cost of selecting one parallelotope under an objective.
pub fn block_cost(p: &Parallelotope, objective: Objective) -> CostPair {
    objective.cost(block_weight(p))
}
