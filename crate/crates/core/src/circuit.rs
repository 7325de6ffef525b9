//! Reversible-circuit IR over X, CNOT, and polarity-aware multi-controlled
//! Toffoli gates, plus the per-parallelotope block builder, a basis-state
//! simulator, and gate-count statistics.
//!
//! Qubit layout: input bit `x_{n-1}` (the most significant) rides on `q_0`,
//! down to `x_0` on `q_{n-1}`; the output rides on `q_n`.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::boolfn::BoolFn;
use crate::cost::mct_cost;
use crate::ptope::{block_rep, Parallelotope};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitRange { qubit: u8, width: u8 },
    #[error("control and target qubits must be distinct")]
    ControlIsTarget,
    #[error("duplicate control qubit {0}")]
    DuplicateControl(u8),
    #[error("multi-controlled gate needs at least one control")]
    EmptyControls,
    #[error("circuit widths differ: {0} vs {1}")]
    WidthMismatch(u8, u8),
    #[error("parallelotope has {got} variables, expected {expected}")]
    VarMismatch { expected: u8, got: u8 },
}

/// One control wire of a multi-controlled gate; `positive` fires on |1>.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Control {
    pub qubit: u8,
    pub positive: bool,
}

impl Control {
    pub fn pos(qubit: u8) -> Self {
        Control { qubit, positive: true }
    }

    pub fn neg(qubit: u8) -> Self {
        Control { qubit, positive: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Gate {
    X { target: u8 },
    #[serde(rename = "cx")]
    Cnot { control: u8, target: u8 },
    #[serde(rename = "mcx")]
    Mct { controls: Vec<Control>, target: u8 },
}

impl Gate {
    fn validate(&self, width: u8) -> Result<(), CircuitError> {
        let check = |qubit: u8| {
            if qubit < width {
                Ok(())
            } else {
                Err(CircuitError::QubitRange { qubit, width })
            }
        };
        match self {
            Gate::X { target } => check(*target),
            Gate::Cnot { control, target } => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(CircuitError::ControlIsTarget);
                }
                Ok(())
            }
            Gate::Mct { controls, target } => {
                if controls.is_empty() {
                    return Err(CircuitError::EmptyControls);
                }
                check(*target)?;
                let mut seen = 0u32;
                for c in controls {
                    check(c.qubit)?;
                    if c.qubit == *target {
                        return Err(CircuitError::ControlIsTarget);
                    }
                    if seen >> c.qubit & 1 == 1 {
                        return Err(CircuitError::DuplicateControl(c.qubit));
                    }
                    seen |= 1 << c.qubit;
                }
                Ok(())
            }
        }
    }

    /// Applies the gate to an `(n+1)`-bit basis state (bit `i` = qubit `i`).
    #[inline]
    fn apply(&self, state: u16) -> u16 {
        match self {
            Gate::X { target } => state ^ 1 << target,
            Gate::Cnot { control, target } => {
                if state >> control & 1 == 1 {
                    state ^ 1 << target
                } else {
                    state
                }
            }
            Gate::Mct { controls, target } => {
                let fire = controls.iter().all(|c| (state >> c.qubit & 1 == 1) == c.positive);
                if fire {
                    state ^ 1 << target
                } else {
                    state
                }
            }
        }
    }
}

/// Per-circuit gate tallies: native counts, MCT histogram, and the decomposed
/// Clifford+T totals. `x` includes the two X gates that lower each negative
/// control; `cnot` counts native CNOTs plus single-control MCTs; ancillae are
/// reusable across gates, so `ancilla_max` is the circuit's requirement while
/// `ancilla_sum` is the additive per-gate view.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateStats {
    pub x: u64,
    pub cnot: u64,
    pub mct: BTreeMap<u8, u64>,
    pub t: u64,
    pub h: u64,
    pub cnot_total: u64,
    pub ancilla_max: u64,
    pub ancilla_sum: u64,
}

impl GateStats {
    /// Component-wise sum; `ancilla_max` takes the max.
    pub fn merge(&mut self, other: &GateStats) {
        self.x += other.x;
        self.cnot += other.cnot;
        for (k, count) in &other.mct {
            *self.mct.entry(*k).or_insert(0) += count;
        }
        self.t += other.t;
        self.h += other.h;
        self.cnot_total += other.cnot_total;
        self.ancilla_max = self.ancilla_max.max(other.ancilla_max);
        self.ancilla_sum += other.ancilla_sum;
    }

    pub fn mct_count(&self, k: u8) -> u64 {
        self.mct.get(&k).copied().unwrap_or(0)
    }
}

/// An ordered gate list over `width` qubits with optional block markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    width: u8,
    gates: Vec<Gate>,
    block_starts: Vec<usize>,
}

impl Circuit {
    pub fn new(width: u8) -> Self {
        assert!(width >= 1, "circuit needs at least one qubit");
        assert!(width <= 16, "basis states are simulated in 16 bits");
        Circuit { width, gates: Vec::new(), block_starts: Vec::new() }
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Marks the start of a new block at the current position.
    pub fn mark_block(&mut self) {
        self.block_starts.push(self.gates.len());
    }

    /// Gate ranges of the marked blocks.
    pub fn block_ranges(&self) -> Vec<Range<usize>> {
        let mut ranges = Vec::with_capacity(self.block_starts.len());
        for (i, &start) in self.block_starts.iter().enumerate() {
            let end = self.block_starts.get(i + 1).copied().unwrap_or(self.gates.len());
            ranges.push(start..end);
        }
        ranges
    }

    pub fn append(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        if self.width != other.width {
            return Err(CircuitError::WidthMismatch(self.width, other.width));
        }
        let offset = self.gates.len();
        self.gates.extend(other.gates.iter().cloned());
        self.block_starts.extend(other.block_starts.iter().map(|s| s + offset));
        Ok(())
    }

    /// Runs the gate list as a classical permutation on `(x, y)` where the
    /// circuit is an oracle over `n = width - 1` input qubits.
    pub fn simulate(&self, x: u16, y: bool) -> (u16, bool) {
        let n = self.width - 1;
        debug_assert!(u32::from(x) < 1 << n);
        let mut state: u16 = 0;
        for q in 0..n {
            if x >> (n - 1 - q) & 1 == 1 {
                state |= 1 << q;
            }
        }
        if y {
            state |= 1 << n;
        }
        for gate in &self.gates {
            state = gate.apply(state);
        }
        let mut x_out: u16 = 0;
        for q in 0..n {
            if state >> q & 1 == 1 {
                x_out |= 1 << (n - 1 - q);
            }
        }
        (x_out, state >> n & 1 == 1)
    }

    /// Checks the oracle contract `(x, y) -> (x, y ^ f(x))` on every basis state.
    pub fn verify_oracle(&self, f: &BoolFn) -> bool {
        if self.width != f.n() + 1 {
            return false;
        }
        for x in 0..f.table_len() as u16 {
            let fx = f.eval(x);
            for y in [false, true] {
                if self.simulate(x, y) != (x, y ^ fx) {
                    return false;
                }
            }
        }
        true
    }

    /// Rewrites negative controls into X-sandwiched positive controls and
    /// single-control MCTs into CNOTs. Semantics are preserved.
    pub fn lowered(&self) -> Circuit {
        let mut out = Circuit::new(self.width);
        for gate in &self.gates {
            match gate {
                Gate::X { .. } | Gate::Cnot { .. } => out.gates.push(gate.clone()),
                Gate::Mct { controls, target } => {
                    let negatives: Vec<u8> =
                        controls.iter().filter(|c| !c.positive).map(|c| c.qubit).collect();
                    for &q in &negatives {
                        out.gates.push(Gate::X { target: q });
                    }
                    if controls.len() == 1 {
                        out.gates.push(Gate::Cnot { control: controls[0].qubit, target: *target });
                    } else {
                        out.gates.push(Gate::Mct {
                            controls: controls.iter().map(|c| Control::pos(c.qubit)).collect(),
                            target: *target,
                        });
                    }
                    for &q in &negatives {
                        out.gates.push(Gate::X { target: q });
                    }
                }
            }
        }
        // Block starts shift as lowering inserts gates; recompute from scratch.
        out.block_starts = relocate_block_starts(self, &out);
        out
    }

    pub fn stats(&self) -> GateStats {
        let mut s = GateStats::default();
        for gate in &self.gates {
            match gate {
                Gate::X { .. } => s.x += 1,
                Gate::Cnot { .. } => s.cnot += 1,
                Gate::Mct { controls, .. } => {
                    let negatives = controls.iter().filter(|c| !c.positive).count() as u64;
                    s.x += 2 * negatives;
                    let k = controls.len();
                    if k == 1 {
                        s.cnot += 1;
                    } else {
                        *s.mct.entry(k as u8).or_insert(0) += 1;
                        s.ancilla_max = s.ancilla_max.max(mct_cost(k as u32).ancilla);
                    }
                }
            }
        }
        s.cnot_total = s.cnot;
        for (&k, &count) in &s.mct {
            let c = mct_cost(u32::from(k));
            s.t += c.t * count;
            s.h += c.h * count;
            s.cnot_total += c.cnot * count;
            s.ancilla_sum += c.ancilla * count;
        }
        s
    }
}

fn relocate_block_starts(original: &Circuit, lowered: &Circuit) -> Vec<usize> {
    // Map original gate indices to lowered indices by replaying gate sizes.
    let mut lowered_at = Vec::with_capacity(original.gates.len() + 1);
    let mut pos = 0usize;
    for gate in &original.gates {
        lowered_at.push(pos);
        pos += match gate {
            Gate::X { .. } | Gate::Cnot { .. } => 1,
            Gate::Mct { controls, .. } => {
                1 + 2 * controls.iter().filter(|c| !c.positive).count()
            }
        };
    }
    lowered_at.push(pos);
    debug_assert_eq!(pos, lowered.gates.len());
    original.block_starts.iter().map(|&s| lowered_at[s]).collect()
}

/// Index of the qubit carrying coordinate `coord` when `n` inputs are laid
/// out MSB-first.
pub fn qubit_for_coord(n: u8, coord: u8) -> u8 {
    debug_assert!(coord < n);
    n - 1 - coord
}

/// Builds the oracle block that flips the output qubit exactly on the
/// vertices of `p`: a compute layer of `k_j - 1` CNOTs per block fanning out
/// from each block's representative, one `(n-m)`-control gate on the output,
/// and the mirrored uncompute layer. Degenerate control counts lower to a
/// CNOT (one positive control) or a bare X (none).
pub fn build_block(p: &Parallelotope, n: u8) -> Result<Circuit, CircuitError> {
    if p.n() != n {
        return Err(CircuitError::VarMismatch { expected: n, got: p.n() });
    }
    let mut circuit = Circuit::new(n + 1);
    let anchor = p.anchor();
    let out = n;

    let mut cnots: Vec<(u8, u8)> = Vec::new();
    let mut controls: Vec<Control> = Vec::new();
    for &block in p.blocks() {
        let rep = block_rep(block);
        let anchor_rep = anchor >> rep & 1;
        // Descending coordinate order is ascending qubit order.
        for coord in (0..n).rev() {
            if block >> coord & 1 == 0 || coord == rep {
                continue;
            }
            cnots.push((qubit_for_coord(n, rep), qubit_for_coord(n, coord)));
            let positive = (anchor >> coord & 1) ^ anchor_rep == 1;
            controls.push(Control { qubit: qubit_for_coord(n, coord), positive });
        }
    }
    let support = p.support();
    for coord in 0..n {
        if support >> coord & 1 == 0 {
            controls.push(Control {
                qubit: qubit_for_coord(n, coord),
                positive: anchor >> coord & 1 == 1,
            });
        }
    }
    controls.sort_by_key(|c| c.qubit);

    for &(control, target) in &cnots {
        circuit.push(Gate::Cnot { control, target })?;
    }
    match controls.len() {
        0 => circuit.push(Gate::X { target: out })?,
        1 if controls[0].positive => {
            circuit.push(Gate::Cnot { control: controls[0].qubit, target: out })?
        }
        _ => circuit.push(Gate::Mct { controls, target: out })?,
    }
    for &(control, target) in cnots.iter().rev() {
        circuit.push(Gate::Cnot { control, target })?;
    }
    Ok(circuit)
}
