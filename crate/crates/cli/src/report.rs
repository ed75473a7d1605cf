//! Human-readable renderings of the library's result types.
//!
//! Every function returns a complete multi-line block (no trailing newline).
//! States, inputs, and outputs are printed as 1-based canonical indices, the
//! same convention the JSON reports use. Unobserved entries print as `*`.

use bcn_core::{
    Bcn, BasinResult, CanonicalVector, CycleSet, DataSet, KnowledgeMask, RegulationResult,
    SafeControlResult, TraceFile, Verdict,
};
use std::collections::BTreeSet;
use std::fmt::Write;

/// `{2, 3, 4}` for a non-empty set, `{}` for an empty one.
fn set(states: &BTreeSet<usize>) -> String {
    let inner: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

/// `[4, 2, *, 5]` — one row of a partially known logical matrix.
fn row(entries: &[Option<usize>]) -> String {
    let inner: Vec<String> = entries
        .iter()
        .map(|e| e.map_or_else(|| "*".to_string(), |v| v.to_string()))
        .collect();
    format!("[{}]", inner.join(", "))
}

/// The per-input blocks of a transition matrix, one line per input.
fn transition_blocks(mask: &KnowledgeMask) -> String {
    let mut out = String::new();
    for i in 1..=mask.n_inputs() {
        let entries: Vec<Option<usize>> =
            (1..=mask.n_states()).map(|j| mask.successor(i, j)).collect();
        let _ = writeln!(out, "  input {i}: {}", row(&entries));
    }
    out.pop();
    out
}

pub fn trace(file: &TraceFile) -> String {
    let mut out = format!(
        "trace: N={} states, M={} inputs, P={} outputs, {} experiment(s)",
        file.n,
        file.m,
        file.p,
        file.experiments.len()
    );
    for (idx, exp) in file.experiments.iter().enumerate() {
        let _ = write!(out, "\nexperiment {} ({} steps):", idx + 1, exp.len());
        let width = file.n.max(file.m).to_string().len();
        let line = |label: &str, vals: &[CanonicalVector]| {
            let cells: Vec<String> = vals
                .iter()
                .map(|v| format!("{:>width$}", v.index()))
                .collect();
            format!("\n  {label}: {}", cells.join(" "))
        };
        out.push_str(&line("x", exp.states()));
        out.push_str(&line("u", exp.inputs()));
        if let Some(y) = exp.outputs() {
            out.push_str(&line("y", y));
        }
    }
    out
}

pub fn identifiability(ds: &DataSet) -> String {
    let mask = ds.knowledge_mask();
    let total = ds.n_states() * ds.n_inputs();
    let verdict = if ds.is_informative_for_identifiability() {
        "yes"
    } else {
        "no"
    };
    let mut out = format!(
        "identifiable: {verdict} ({} of {total} transition columns observed)\n",
        mask.known_count()
    );
    let _ = writeln!(out, "transitions (successor of each state; * = unobserved):");
    out.push_str(&transition_blocks(mask));
    let outputs: Vec<Option<usize>> = (1..=mask.n_states()).map(|j| mask.output(j)).collect();
    let _ = write!(out, "\noutputs: {}", row(&outputs));
    out
}

pub fn model(bcn: &Bcn) -> String {
    let mut out = format!(
        "model: N={} states, M={} inputs, P={} outputs\ntransitions:",
        bcn.n_states(),
        bcn.n_inputs(),
        bcn.n_outputs()
    );
    for i in 1..=bcn.n_inputs() {
        let entries: Vec<Option<usize>> = (1..=bcn.n_states())
            .map(|j| Some(bcn.successor(j, i)))
            .collect();
        let _ = write!(out, "\n  input {i}: {}", row(&entries));
    }
    let outputs: Vec<Option<usize>> = (1..=bcn.n_states())
        .map(|j| Some(bcn.output_of(j)))
        .collect();
    let _ = write!(out, "\noutputs: {}", row(&outputs));
    out
}

pub fn equilibria(pairs: &[(usize, CanonicalVector)]) -> String {
    if pairs.is_empty() {
        return "no equilibria observed".to_string();
    }
    let mut out = format!("{} equilibria observed:", pairs.len());
    for (state, input) in pairs {
        let _ = write!(out, "\n  state {state} holds under input {}", input.index());
    }
    out
}

pub fn reach(target: &BTreeSet<usize>, reachable: bool) -> String {
    format!(
        "target {} reachable from every state: {}",
        set(target),
        if reachable { "yes" } else { "no" }
    )
}

pub fn basin(result: &BasinResult) -> String {
    let covered = result.basin().len();
    let mut out = format!(
        "basin of {}: {} of {} states",
        set(result.target()),
        covered,
        result.n_states()
    );
    for (d, layer) in result.layers().iter().enumerate() {
        if d == 0 {
            let _ = write!(out, "\n  layer 0 (target): {}", set(layer));
        } else {
            let cells: Vec<String> = layer
                .iter()
                .map(|&s| {
                    let u = result.input_for(s).expect("layered state has a witness");
                    format!("{s} (u{})", u.index())
                })
                .collect();
            let _ = write!(out, "\n  layer {d}: {}", cells.join(", "));
        }
    }
    let missing = result.missing();
    if !missing.is_empty() {
        let _ = write!(out, "\n  no observed path from: {}", set(&missing));
    }
    out
}

pub fn targets(ystar: usize, states: &BTreeSet<usize>) -> String {
    if states.is_empty() {
        format!("no state was observed with output {ystar}")
    } else {
        format!("states observed with output {ystar}: {}", set(states))
    }
}

fn cycle_line(cycle: &bcn_core::Cycle) -> String {
    let nodes = cycle.nodes();
    let inputs = cycle.edge_inputs();
    let mut out = String::new();
    for (node, input) in nodes.iter().zip(inputs) {
        let _ = write!(out, "{node} -({})-> ", input.index());
    }
    let _ = write!(out, "{}", nodes[0]);
    out
}

pub fn cycles(set_result: &CycleSet) -> String {
    let mut out = format!(
        "{} cycle(s) within {}:",
        set_result.len(),
        set(set_result.node_set())
    );
    if set_result.is_empty() {
        out.push_str(" none");
        return out;
    }
    for cycle in set_result.cycles() {
        let _ = write!(out, "\n  {}", cycle_line(cycle));
    }
    out
}

fn feedback_row(k: &bcn_core::FeedbackMatrix) -> String {
    let entries: Vec<Option<usize>> = (1..=k.n_states()).map(|j| Some(k.input_for(j))).collect();
    row(&entries)
}

pub fn verdict(v: &Verdict) -> String {
    if v.pass {
        format!(
            "verified against {} compatible models: pass (seed {})",
            v.models_checked, v.seed
        )
    } else {
        let ce = v
            .counterexample
            .as_ref()
            .expect("failed verdicts carry a counterexample");
        let trace: Vec<String> = ce.trace.iter().map(|s| s.to_string()).collect();
        format!(
            "verification FAILED after {} models (seed {}): from state {} the closed loop runs {}\n(the countermodel is in the JSON report)",
            v.models_checked,
            v.seed,
            ce.x0,
            trace.join(" -> ")
        )
    }
}

pub fn safe_control(result: &SafeControlResult, verdict_line: &str) -> String {
    let mut out = format!(
        "safe control with unsafe set {}: {}",
        set(result.unsafe_set()),
        if result.solvable() {
            "solvable"
        } else {
            "unsolvable"
        }
    );
    let _ = write!(out, "\n  safe set: {}", set(result.safe_set()));
    if let Some(k) = result.feedback() {
        let stays: Vec<String> = result
            .safe_set()
            .iter()
            .filter_map(|&s| result.stay_input(s).map(|u| format!("{s}:u{}", u.index())))
            .collect();
        let _ = write!(out, "\n  stay inputs: {}", stays.join(" "));
        let _ = write!(out, "\n  K: {}", feedback_row(k));
    } else {
        let missing_stay = result.missing_stay();
        if !missing_stay.is_empty() {
            let _ = write!(out, "\n  no stay input observed for: {}", set(missing_stay));
        }
        let unreachable = result.unreachable_states();
        if !unreachable.is_empty() {
            let _ = write!(
                out,
                "\n  no observed path into the safe set from: {}",
                set(&unreachable)
            );
        }
    }
    if !verdict_line.is_empty() {
        let _ = write!(out, "\n  {verdict_line}");
    }
    out
}

pub fn regulation(result: &RegulationResult, verdict_line: &str) -> String {
    let mut out = format!(
        "output regulation to y* = {}: {}",
        result.y_star().index(),
        if result.solvable() {
            "solvable"
        } else {
            "unsolvable"
        }
    );
    let _ = write!(
        out,
        "\n  states with the desired output: {}",
        set(result.target_states())
    );
    let cycle_set = result.cycles();
    if cycle_set.is_empty() {
        let _ = write!(out, "\n  cycles among them: none");
    } else {
        for cycle in cycle_set.cycles() {
            let _ = write!(out, "\n  cycle: {}", cycle_line(cycle));
        }
    }
    if let Some(k) = result.feedback() {
        let _ = write!(out, "\n  K: {}", feedback_row(k));
    } else {
        let unreachable = result.unreachable_states();
        if !unreachable.is_empty() {
            let _ = write!(
                out,
                "\n  no observed path to a cycle from: {}",
                set(&unreachable)
            );
        }
    }
    if !verdict_line.is_empty() {
        let _ = write!(out, "\n  {verdict_line}");
    }
    out
}
