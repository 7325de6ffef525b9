//! Text and JSON circuit formats.
//!
//! The text netlist is one gate per line with negative controls pre-lowered
//! to X pairs:
//!
//! ```text
//! x q[1]
//! cx q[2],q[3]
//! mcx q[0],q[2] -> q[4]
//! ```
//!
//! The JSON document keeps the raw IR (polarities included) alongside stats:
//! `{ "width": .., "gates": [..], "stats": {..} }`.

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Control, Gate, GateStats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: unrecognized gate {text:?}")]
    BadLine { line: usize, text: String },
    #[error("line {line}: bad qubit reference {text:?}")]
    BadQubit { line: usize, text: String },
    #[error("line {line}: {source}")]
    Gate {
        line: usize,
        #[source]
        source: CircuitError,
    },
}

/// Emits the lowered circuit as a text netlist.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    for gate in circuit.lowered().gates() {
        match gate {
            Gate::X { target } => out.push_str(&format!("x q[{target}]\n")),
            Gate::Cnot { control, target } => out.push_str(&format!("cx q[{control}],q[{target}]\n")),
            Gate::Mct { controls, target } => {
                let list: Vec<String> = controls.iter().map(|c| format!("q[{}]", c.qubit)).collect();
                out.push_str(&format!("mcx {} -> q[{target}]\n", list.join(",")));
            }
        }
    }
    out
}

fn parse_qubit(token: &str, line: usize) -> Result<u8, NetlistError> {
    let err = || NetlistError::BadQubit { line, text: token.to_string() };
    let inner = token.strip_prefix("q[").and_then(|t| t.strip_suffix(']')).ok_or_else(err)?;
    inner.parse().map_err(|_| err())
}

/// Parses a text netlist back into a circuit of the given width.
pub fn parse_qasm(text: &str, width: u8) -> Result<Circuit, NetlistError> {
    let mut circuit = Circuit::new(width);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let bad = || NetlistError::BadLine { line, text: raw.to_string() };
        let (op, rest) = trimmed.split_once(' ').ok_or_else(bad)?;
        let gate = match op {
            "x" => Gate::X { target: parse_qubit(rest.trim(), line)? },
            "cx" => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Gate::Cnot {
                    control: parse_qubit(a.trim(), line)?,
                    target: parse_qubit(b.trim(), line)?,
                }
            }
            "mcx" => {
                let (ctrls, target) = rest.split_once("->").ok_or_else(bad)?;
                let controls = ctrls
                    .trim()
                    .split(',')
                    .map(|t| Ok(Control::pos(parse_qubit(t.trim(), line)?)))
                    .collect::<Result<Vec<_>, NetlistError>>()?;
                Gate::Mct { controls, target: parse_qubit(target.trim(), line)? }
            }
            _ => return Err(bad()),
        };
        circuit.push(gate).map_err(|source| NetlistError::Gate { line, source })?;
    }
    Ok(circuit)
}

#[derive(Serialize)]
struct CircuitDoc<'a> {
    width: u8,
    gates: &'a [Gate],
    stats: GateStats,
}

/// Emits the full circuit document as pretty-printed JSON.
pub fn emit_json(circuit: &Circuit) -> String {
    let doc = CircuitDoc { width: circuit.width(), gates: circuit.gates(), stats: circuit.stats() };
    serde_json::to_string_pretty(&doc).expect("circuit document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Circuit {
        let mut c = Circuit::new(5);
        c.push(Gate::Cnot { control: 2, target: 3 }).unwrap();
        c.push(Gate::Mct { controls: vec![Control::neg(1), Control::pos(3)], target: 4 }).unwrap();
        c.push(Gate::Cnot { control: 2, target: 3 }).unwrap();
        c.push(Gate::X { target: 0 }).unwrap();
        c.push(Gate::Mct { controls: vec![Control::neg(0)], target: 4 }).unwrap();
        c
    }

    #[test]
    fn emit_format() {
        assert_eq!(
            emit_qasm(&sample()),
            "cx q[2],q[3]\n\
             x q[1]\n\
             mcx q[1],q[3] -> q[4]\n\
             x q[1]\n\
             cx q[2],q[3]\n\
             x q[0]\n\
             x q[0]\n\
             cx q[0],q[4]\n\
             x q[0]\n"
        );
    }

    #[test]
    fn round_trip_equals_lowered() {
        let c = sample();
        let parsed = parse_qasm(&emit_qasm(&c), c.width()).unwrap();
        assert_eq!(parsed.gates(), c.lowered().gates());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(parse_qasm("h q[0]\n", 3), Err(NetlistError::BadLine { line: 1, .. })));
        assert!(matches!(parse_qasm("cx q[0]\n", 3), Err(NetlistError::BadLine { .. })));
        assert!(matches!(parse_qasm("x q[x]\n", 3), Err(NetlistError::BadQubit { .. })));
        assert!(matches!(parse_qasm("x q[7]\n", 3), Err(NetlistError::Gate { line: 1, .. })));
        assert!(parse_qasm("\n  \n", 3).unwrap().is_empty());
    }

    #[test]
    fn json_document_shape() {
        let doc: serde_json::Value = serde_json::from_str(&emit_json(&sample())).unwrap();
        assert_eq!(doc["width"], 5);
        assert_eq!(doc["gates"][0]["kind"], "cx");
        assert_eq!(doc["gates"][1]["kind"], "mcx");
        assert_eq!(doc["gates"][1]["controls"][0]["positive"], false);
        assert_eq!(doc["gates"][3]["kind"], "x");
        assert_eq!(doc["stats"]["cnot_total"], 2 + 6 + 1);
        assert_eq!(doc["stats"]["x"], 1 + 2 + 2);
    }
}
