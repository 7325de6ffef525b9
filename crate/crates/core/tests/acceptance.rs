//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p sshr-core --test acceptance -- --nocapture` to see
//! the per-criterion lines.

mod common;

use std::time::{Duration, Instant};

use sshr_core::{
    boolfn, build_block, build_instance, cost, count_formula, cover, enumerate_all, greedy,
    synth_exact, synth_greedy, BoolFn, CostPair, FamilyKind, Gate, GreedyConfig, Objective,
    Parallelotope, SynthStatus,
};

fn report(criterion: &str, failures: &[String]) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict}");
    assert!(failures.is_empty(), "criterion {criterion} failures: {failures:#?}");
}

#[test]
fn criterion_1_enumeration_counts() {
    let mut failures = Vec::new();

    let start = Instant::now();
    for (n, want) in [(3u8, 49u64), (4, 257), (5, 1539), (6, 10299)] {
        let family = enumerate_all(n, FamilyKind::Full).unwrap();
        if family.len() as u64 != want {
            failures.push(format!("n={n}: enumerated {} full parallelotopes, want {want}", family.len()));
        }
        if count_formula(n) != want {
            failures.push(format!("n={n}: count formula gives {}, want {want}", count_formula(n)));
        }
    }
    let small = start.elapsed();
    if small > Duration::from_secs(10) {
        failures.push(format!("n=3..6 enumeration took {small:?}, budget 10s"));
    }

    let start = Instant::now();
    for (n, want) in [(7u8, 75905u64), (8, 609441)] {
        let family = enumerate_all(n, FamilyKind::Full).unwrap();
        if family.len() as u64 != want {
            failures.push(format!("n={n}: enumerated {} full parallelotopes, want {want}", family.len()));
        }
        if count_formula(n) != want {
            failures.push(format!("n={n}: count formula gives {}, want {want}", count_formula(n)));
        }
    }
    let extended = start.elapsed();
    if extended > Duration::from_secs(300) {
        failures.push(format!("n=7..8 enumeration took {extended:?}, budget 300s"));
    }

    report("1 (enumeration counts, n=3..8)", &failures);
}

#[test]
fn criterion_2_cost_model_golden_table() {
    let mut failures = Vec::new();
    let rows: [(u32, u64, u64, u64, u64); 7] = [
        (2, 7, 2, 6, 0),
        (3, 16, 6, 14, 1),
        (4, 24, 20, 10, 1),
        (5, 32, 28, 14, 2),
        (6, 40, 36, 18, 2),
        (7, 48, 44, 22, 3),
        (8, 56, 52, 26, 3),
    ];
    for (k, t, h, cnot, ancilla) in rows {
        let got = cost::mct_cost(k);
        if (got.t, got.h, got.cnot, got.ancilla) != (t, h, cnot, ancilla) {
            failures.push(format!("k={k}: got {got:?}, want ({t},{h},{cnot},{ancilla})"));
        }
    }
    report("2 (k-MCT decomposition cost table, k=2..8)", &failures);
}

#[test]
fn criterion_3_exhaustive_greedy_verification() {
    let mut failures = Vec::new();
    let start = Instant::now();
    for n in [3u8, 4] {
        let family = enumerate_all(n, FamilyKind::Full).unwrap();
        let cfg = GreedyConfig::default();
        let mut checked = 0u64;
        for f in common::all_functions(n) {
            let result = greedy::synth_greedy_with_family(&f, &cfg, &family);
            if !result.circuit.verify_oracle(&f) {
                failures.push(format!("greedy circuit fails oracle check for n={n} id={}", f.to_hex_id()));
                if failures.len() > 5 {
                    break;
                }
            }
            checked += 1;
        }
        let want = 1u64 << (1u64 << n);
        if checked != want {
            failures.push(format!("n={n}: checked {checked} functions, want {want}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(600) {
        failures.push(format!("exhaustive verification took {elapsed:?}, budget 600s"));
    }
    report("3 (greedy verifies on all 3-bit and 4-bit functions)", &failures);
}

/// One block must contain exactly one `(n-m)`-control gate on the output and
/// `2 * sum(k_j - 1)` wire CNOTs, and flip the output exactly on the
/// parallelotope's vertices.
fn check_block_structure(p: &Parallelotope, failures: &mut Vec<String>) {
    let n = p.n();
    let block = build_block(p, n).unwrap();
    let central_controls = u32::from(n) - p.dim() as u32;
    let expected_wire_cnots = 2 * (p.support_size() as usize - p.dim());

    let mut central = 0usize;
    let mut wire_cnots = 0usize;
    for gate in block.gates() {
        match gate {
            Gate::X { target } if u32::from(*target) == u32::from(n) && central_controls == 0 => {
                central += 1
            }
            Gate::Cnot { target, .. } if u32::from(*target) == u32::from(n) => {
                if central_controls == 1 {
                    central += 1;
                } else {
                    failures.push(format!("{p:?}: output CNOT in a {central_controls}-control block"));
                }
            }
            Gate::Cnot { .. } => wire_cnots += 1,
            Gate::Mct { controls, target } => {
                if u32::from(*target) != u32::from(n) || controls.len() as u32 != central_controls {
                    failures.push(format!("{p:?}: unexpected MCT shape"));
                } else {
                    central += 1;
                }
            }
            Gate::X { .. } => failures.push(format!("{p:?}: stray X gate")),
        }
    }
    if central != 1 {
        failures.push(format!("{p:?}: {central} central gates"));
    }
    if wire_cnots != expected_wire_cnots {
        failures.push(format!("{p:?}: {wire_cnots} wire CNOTs, want {expected_wire_cnots}"));
    }
    let vertices = p.vertices();
    for x in 0..(1u16 << n) {
        if block.simulate(x, false) != (x, vertices.contains(x)) {
            failures.push(format!("{p:?}: wrong flip at x={x}"));
            break;
        }
    }
}

#[test]
fn criterion_4_block_structure_theorem() {
    let mut failures = Vec::new();
    // Exhaustive for every parallelotope with up to five variables.
    for n in 1..=5u8 {
        let family = enumerate_all(n, FamilyKind::Full).unwrap();
        for p in &family.members {
            check_block_structure(p, &mut failures);
            if failures.len() > 5 {
                break;
            }
        }
    }
    // And at least ten thousand random draws at n = 5.
    use rand::{Rng, SeedableRng};
    let family = enumerate_all(5, FamilyKind::Full).unwrap();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        let p = &family.members[rng.random_range(0..family.len())];
        check_block_structure(p, &mut failures);
        if failures.len() > 5 {
            break;
        }
    }
    report("4 (block structure: one (n-m)-MCT plus mirrored CNOT layers)", &failures);
}

#[test]
fn criterion_5_worked_example() {
    let mut failures = Vec::new();
    let f = BoolFn::from_hex_id("0x46b9", 4).unwrap();
    let family = enumerate_all(4, FamilyKind::Full).unwrap();
    let inst = build_instance(&f, &family, Objective::Cnot).unwrap();

    let s1 = Parallelotope::new(4, 0, &[0b100, 0b010, 0b001]).unwrap();
    let s2 = Parallelotope::new(4, 0b0110, &[0b1000]).unwrap();
    let s3 = Parallelotope::new(4, 0b0001, &[0b0011, 0b1000]).unwrap();

    // The known selection verifies as a parity cover.
    let picks: Vec<usize> = [&s1, &s2, &s3]
        .iter()
        .map(|p| family.members.iter().position(|m| &m == p).unwrap())
        .collect();
    let sol = cover::CoverSolution::from_selection(&inst, picks, cover::SolveStatus::Optimal).unwrap();
    if !cover::verify_solution(&inst, &sol) {
        failures.push("the three-set selection does not satisfy the parity cover".into());
    }

    // Its cost is 23 CNOT weight by the independent measured-circuit route
    // and by the closed-form block weights.
    let measured: CostPair =
        [&s1, &s2, &s3].iter().map(|p| common::measured_cost(p, Objective::Cnot)).sum();
    if measured.primary != 23 {
        failures.push(format!("measured selection cost {measured:?}, want primary 23"));
    }
    if sol.cost != measured {
        failures.push(format!("block-weight cost {:?} disagrees with measured {measured:?}", sol.cost));
    }

    // The exact synthesizer must do at least as well, and verify.
    let exact = synth_exact(&f, FamilyKind::Full, Objective::Cnot, Duration::from_secs(120)).unwrap();
    if exact.cost.primary > 23 {
        failures.push(format!("exact cost {} exceeds the known selection at 23", exact.cost.primary));
    }
    if !exact.circuit.verify_oracle(&f) {
        failures.push("exact circuit fails oracle verification".into());
    }
    report("5 (worked example 0x46b9: known cover at 23, exact at or below)", &failures);
}

#[test]
fn criterion_6_exact_solver_matches_state_space_oracle() {
    let mut failures = Vec::new();
    let start = Instant::now();
    let family = enumerate_all(3, FamilyKind::Full).unwrap();
    let oracle = common::StateSpaceOracle::build(&family, Objective::Cnot);
    for f in common::all_functions(3) {
        let inst = build_instance(&f, &family, Objective::Cnot).unwrap();
        let sol = cover::solve(&inst, Duration::from_secs(120), None).unwrap();
        if sol.status != cover::SolveStatus::Optimal {
            failures.push(format!("{}: solver status {:?}", f.to_hex_id(), sol.status));
        }
        let want = oracle.optimum(&f);
        if sol.cost != want {
            failures.push(format!("{}: solver {:?}, oracle {want:?}", f.to_hex_id(), sol.cost));
        }
        if failures.len() > 5 {
            break;
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        failures.push(format!("oracle comparison took {elapsed:?}, budget 300s"));
    }
    report("6 (exact solver equals state-space oracle on all 3-bit functions)", &failures);
}

#[test]
fn criterion_7_dominance() {
    let mut failures = Vec::new();
    let mut strict_witnesses = 0usize;

    for (n, count, seed, limit) in
        [(4u8, 500usize, 7001u64, Duration::from_secs(10)), (5, 200, 7002, Duration::from_millis(150))]
    {
        let full = enumerate_all(n, FamilyKind::Full).unwrap();
        let singleton = enumerate_all(n, FamilyKind::Singleton).unwrap();
        for objective in [Objective::Cnot, Objective::TCount] {
            for f in boolfn::random_corpus(n, count, seed) {
                let sshr_h = greedy::synth_greedy_with_family(
                    &f,
                    &GreedyConfig { kind: FamilyKind::Full, objective, ..GreedyConfig::default() },
                    &full,
                );
                let minterm = greedy::synth_greedy_with_family(
                    &f,
                    &GreedyConfig { kind: FamilyKind::Singleton, objective, ..GreedyConfig::default() },
                    &singleton,
                );
                let mut sshr_i = synth_exact(&f, FamilyKind::Full, objective, limit).unwrap();
                let esop_i = synth_exact(&f, FamilyKind::Subcube, objective, limit).unwrap();
                if sshr_i.cost.primary > esop_i.cost.primary {
                    // Both are anytime results; wall-clock jitter at the
                    // cutoff can leave the full-family run one improvement
                    // behind. Give it more time before calling a violation.
                    sshr_i = synth_exact(&f, FamilyKind::Full, objective, limit * 8).unwrap();
                }

                let id = f.to_hex_id();
                if sshr_i.cost.primary > esop_i.cost.primary {
                    failures.push(format!("n={n} {objective:?} {id}: sshr-i {} > esop-i {}", sshr_i.cost.primary, esop_i.cost.primary));
                }
                if esop_i.cost.primary > minterm.cost.primary {
                    failures.push(format!("n={n} {objective:?} {id}: esop-i {} > minterm {}", esop_i.cost.primary, minterm.cost.primary));
                }
                if sshr_i.cost.primary > sshr_h.cost.primary {
                    failures.push(format!("n={n} {objective:?} {id}: sshr-i {} > sshr-h {}", sshr_i.cost.primary, sshr_h.cost.primary));
                }
                if n == 4 && objective == Objective::Cnot && sshr_i.cost.primary < esop_i.cost.primary {
                    strict_witnesses += 1;
                }
                if failures.len() > 8 {
                    break;
                }
            }
        }
    }
    if strict_witnesses == 0 {
        failures.push("no 4-bit function had a strictly cheaper full-family optimum".into());
    }
    report("7 (dominance sshr-i <= esop-i <= minterm and sshr-i <= sshr-h)", &failures);
}

#[test]
fn criterion_8_anytime_contract() {
    let mut failures = Vec::new();
    let family = enumerate_all(5, FamilyKind::Full).unwrap();
    for f in boolfn::random_corpus(5, 50, 8001) {
        let inst = build_instance(&f, &family, Objective::Cnot).unwrap();
        let quick = cover::solve(&inst, Duration::from_secs(1), None).unwrap();
        if !cover::verify_solution(&inst, &quick) {
            failures.push(format!("{}: 1s solution does not verify", f.to_hex_id()));
        }
        let longer = cover::solve(&inst, Duration::from_secs(3), None).unwrap();
        if !cover::verify_solution(&inst, &longer) {
            failures.push(format!("{}: 3s solution does not verify", f.to_hex_id()));
        }
        if longer.cost.primary > quick.cost.primary {
            failures.push(format!(
                "{}: raising the limit worsened TC ({} -> {})",
                f.to_hex_id(),
                quick.cost.primary,
                longer.cost.primary
            ));
        }
        if failures.len() > 5 {
            break;
        }
    }
    report("8 (anytime: 1s verifies at n=5; more time never worsens TC)", &failures);
}

#[test]
fn synthesis_status_reflects_search_completion() {
    // Small sanity on the status flag used throughout the suite.
    let f = BoolFn::from_hex_id("0xe8", 3).unwrap();
    let exact = synth_exact(&f, FamilyKind::Full, Objective::Cnot, Duration::from_secs(30)).unwrap();
    assert_eq!(exact.status, SynthStatus::Optimal);
    let greedy_result = synth_greedy(&f, &GreedyConfig::default());
    assert_eq!(greedy_result.status, SynthStatus::Heuristic);
}
