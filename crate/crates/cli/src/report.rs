//! Stats reporting: CSV rows and JSON summaries.

use sshr_core::{GateStats, SynthStatus, SynthesisResult};

pub const CSV_HEADER: &str =
    "n,id,method,x,cnot,mct2,mct3,mct4,mct5,mct6,mct7,mct8,t,h,cnot_total,ancilla_max,ancilla_sum,wall_ms";

pub fn csv_row(n: u8, id: &str, method: &str, stats: &GateStats, wall_ms: u64) -> String {
    let mct: Vec<String> = (2..=8).map(|k| stats.mct_count(k).to_string()).collect();
    format!(
        "{n},{id},{method},{},{},{},{},{},{},{},{},{wall_ms}",
        stats.x,
        stats.cnot,
        mct.join(","),
        stats.t,
        stats.h,
        stats.cnot_total,
        stats.ancilla_max,
        stats.ancilla_sum,
    )
}

pub fn status_name(status: SynthStatus) -> &'static str {
    match status {
        SynthStatus::Heuristic => "heuristic",
        SynthStatus::Optimal => "optimal",
        SynthStatus::FeasibleTimeout => "feasible-timeout",
    }
}

/// JSON summary of one synthesis run.
pub fn summary_json(n: u8, id: &str, method: &str, result: &SynthesisResult, wall_ms: u64) -> String {
    let doc = serde_json::json!({
        "n": n,
        "id": id,
        "method": method,
        "status": status_name(result.status),
        "tc": result.cost.primary,
        "tc_tiebreak": result.cost.secondary,
        "blocks": result.selected.len(),
        "stats": result.total,
        "wall_ms": wall_ms,
    });
    serde_json::to_string_pretty(&doc).expect("summary serializes")
}
