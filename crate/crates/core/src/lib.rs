//! Synthesis of reversible oracle circuits for small Boolean functions.
//!
//! A function's on-set is covered, with parity, by parallelotopes embedded in
//! the Boolean hypercube; each selected parallelotope becomes one circuit
//! block built from CNOTs and a single multi-controlled Toffoli. Two
//! synthesizers share that machinery: a ratio-threshold greedy
//! ([`greedy::synth_greedy`]) and an exact branch-and-bound over the weighted
//! parity set-covering formulation ([`cover::synth_exact`]). Restricting the
//! candidate family to subcubes recovers classic ESOP synthesis, which makes
//! the two directly comparable under the same cost model.

pub mod bits;
pub mod boolfn;
pub mod circuit;
pub mod cost;
pub mod cover;
pub mod greedy;
pub mod netlist;
pub mod ptope;

pub use bits::Bits256;
pub use boolfn::{random_corpus, BoolFn, MintermSet};
pub use circuit::{build_block, Circuit, Control, Gate, GateStats};
pub use cost::{block_cost, block_weight, mct_cost, CostPair, Objective};
pub use cover::{
    build_instance, export_lp, solve, synth_exact, verify_solution, CoverInstance, CoverSolution,
    SolveStatus,
};
pub use greedy::{
    residual_trace, synth_greedy, GreedyConfig, Improvement, Ratio, SynthStatus, SynthesisResult,
};
pub use ptope::{count_formula, enumerate_all, FamilyKind, Parallelotope, PtopeFamily};
