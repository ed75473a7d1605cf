//! State-feedback synthesis from data: safe control and output regulation.
//!
//! Both problems ask for a feedback matrix K that works for *every* network
//! compatible with the data, so synthesis only ever uses observed
//! transitions. Safe control combines per-state "stay" inputs (a witnessed
//! transition from each safe state back into the safe set) with the
//! [`basin`] certificate steering unsafe states in. Output regulation finds
//! the states observed to emit the desired output, the data-witnessed cycles
//! among them, and the basin of the cycle nodes; the feedback pins each
//! cycle state to its cycle edge and routes every other state inward.
//!
//! Solvability is decided constructively: when it fails, results carry the
//! partial certificates (which safe states lack stay transitions, which
//! states no observed path covers) so the caller can see what data are
//! missing. K is materialized only on success — a partial feedback would
//! not be a logical matrix.

use crate::analysis::{basin, cycles_within, target_states, BasinResult, CycleSet};
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::logic::CanonicalVector;
use crate::model::FeedbackMatrix;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

fn validate_unsafe_set(n: usize, unsafe_set: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    for &j in unsafe_set {
        if j < 1 || j > n {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: j,
                bound: n,
            });
        }
    }
    let safe: BTreeSet<usize> = (1..=n).filter(|j| !unsafe_set.contains(j)).collect();
    if safe.is_empty() {
        return Err(Error::EmptySafeSet);
    }
    Ok(safe)
}

/// Outcome of safe-control synthesis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SafeControlResult {
    n: usize,
    unsafe_set: BTreeSet<usize>,
    safe_set: BTreeSet<usize>,
    solvable: bool,
    k: Option<FeedbackMatrix>,
    /// Slot j−1: the witnessed stay input of safe state j, when one exists.
    stay_inputs: Vec<Option<CanonicalVector>>,
    /// Safe states with no observed transition back into the safe set.
    missing_stay: BTreeSet<usize>,
    /// Basin certificate toward the safe set (approach inputs for the rest).
    certificate: BasinResult,
}

impl SafeControlResult {
    pub fn solvable(&self) -> bool {
        self.solvable
    }

    /// The synthesized feedback; present exactly when solvable.
    pub fn feedback(&self) -> Option<&FeedbackMatrix> {
        self.k.as_ref()
    }

    pub fn unsafe_set(&self) -> &BTreeSet<usize> {
        &self.unsafe_set
    }

    pub fn safe_set(&self) -> &BTreeSet<usize> {
        &self.safe_set
    }

    /// The stay input of a safe state, when the data witness one.
    pub fn stay_input(&self, state: usize) -> Option<&CanonicalVector> {
        self.stay_inputs.get(state - 1).and_then(Option::as_ref)
    }

    /// Safe states lacking a stay transition (first failure mode).
    pub fn missing_stay(&self) -> &BTreeSet<usize> {
        &self.missing_stay
    }

    /// States with no observed path into the safe set (second failure mode).
    pub fn unreachable_states(&self) -> BTreeSet<usize> {
        self.certificate.missing()
    }

    /// The layered reachability certificate toward the safe set.
    pub fn certificate(&self) -> &BasinResult {
        &self.certificate
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "solvable": self.solvable,
            "K": self.k.as_ref().map(|k| {
                (1..=self.n).map(|j| k.input_for(j)).collect::<Vec<_>>()
            }),
            "unsafe": self.unsafe_set.iter().copied().collect::<Vec<_>>(),
            "safe": self.safe_set.iter().copied().collect::<Vec<_>>(),
            "stay_inputs": (1..=self.n)
                .filter_map(|j| self.stay_input(j).map(|u| (j.to_string(), json!(u.index()))))
                .collect::<serde_json::Map<String, Value>>(),
            "missing_stay": self.missing_stay.iter().copied().collect::<Vec<_>>(),
            "unreachable": self.unreachable_states().iter().copied().collect::<Vec<_>>(),
            "certificate": self.certificate.to_json_value(),
        })
    }
}

/// Synthesize a feedback that keeps safe states safe forever and steers
/// unsafe states into the safe set in finitely many steps.
///
/// Three steps: (1) for every safe state, find the smallest-index data
/// column witnessing a transition back into the safe set — its input becomes
/// the state's feedback column; (2) compute the basin of the safe set for
/// the approach inputs of unsafe states; (3) solvable iff no safe state
/// lacks a stay transition and the basin covers every state. The two input
/// families have disjoint domains, so K is assembled by simple union.
pub fn safe_control(ds: &DataSet, unsafe_set: &BTreeSet<usize>) -> Result<SafeControlResult> {
    let n = ds.n_states();
    let safe_set = validate_unsafe_set(n, unsafe_set)?;
    let xp = ds.xp().column_indices();
    let xf = ds.xf().column_indices();
    let up = ds.up().column_indices();

    let mut stay_inputs: Vec<Option<CanonicalVector>> = vec![None; n];
    let mut missing_stay = BTreeSet::new();
    for &j in &safe_set {
        match (0..ds.len()).find(|&k| xp[k] == j && safe_set.contains(&xf[k])) {
            Some(k) => stay_inputs[j - 1] = Some(CanonicalVector::new(ds.n_inputs(), up[k])?),
            None => {
                missing_stay.insert(j);
            }
        }
    }

    let certificate = basin(ds, &safe_set)?;
    let solvable = missing_stay.is_empty() && certificate.covers_all();
    let k = if solvable {
        let columns = (1..=n)
            .map(|j| {
                if safe_set.contains(&j) {
                    debug_assert!(certificate.input_for(j).is_none());
                    stay_inputs[j - 1].as_ref().expect("stay input exists").index()
                } else {
                    certificate
                        .input_for(j)
                        .expect("basin covers all states")
                        .index()
                }
            })
            .collect();
        Some(FeedbackMatrix::from_indices(ds.n_inputs(), columns)?)
    } else {
        None
    };

    let result = SafeControlResult {
        n,
        unsafe_set: unsafe_set.clone(),
        safe_set,
        solvable,
        k,
        stay_inputs,
        missing_stay,
        certificate,
    };
    debug_assert!(
        result.k.is_none()
            || safe_control_data_valid(ds, result.k.as_ref().unwrap(), unsafe_set)?,
        "synthesized feedback must satisfy the data-level validity predicate"
    );
    Ok(result)
}

/// Data-level validity of a safe-control feedback, decided from the
/// knowledge mask alone: every state's closed-loop successor is a recorded
/// transition; safe states map into the safe set; unsafe states reach the
/// safe set within N steps of closed-loop iteration.
pub fn safe_control_data_valid(
    ds: &DataSet,
    k: &FeedbackMatrix,
    unsafe_set: &BTreeSet<usize>,
) -> Result<bool> {
    let n = ds.n_states();
    let safe_set = validate_unsafe_set(n, unsafe_set)?;
    if k.n_states() != n || k.n_inputs() != ds.n_inputs() {
        return Err(Error::DimensionMismatch {
            context: "feedback matrix dimensions",
            left_rows: ds.n_inputs(),
            left_cols: n,
            right_rows: k.n_inputs(),
            right_cols: k.n_states(),
        });
    }
    let mask = ds.knowledge_mask();
    let successor = |j: usize| mask.successor(k.input_for(j), j);
    // Every closed-loop transition must be data-witnessed.
    if (1..=n).any(|j| successor(j).is_none()) {
        return Ok(false);
    }
    for &j in &safe_set {
        if !safe_set.contains(&successor(j).expect("checked above")) {
            return Ok(false);
        }
    }
    for &j in unsafe_set {
        let mut x = j;
        let mut entered = false;
        for _ in 0..n {
            x = successor(x).expect("checked above");
            if safe_set.contains(&x) {
                entered = true;
                break;
            }
        }
        if !entered {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of output-regulation synthesis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegulationResult {
    n: usize,
    y_star: CanonicalVector,
    solvable: bool,
    k: Option<FeedbackMatrix>,
    /// States observed at least once with the desired output.
    target_states: BTreeSet<usize>,
    /// Data-witnessed cycles inside the target states.
    cycles: CycleSet,
    /// Basin of the cycle nodes; absent when there are no cycles.
    basin: Option<BasinResult>,
    /// For each cycle state, the index (into `cycles`) of the cycle whose
    /// edge input it was assigned — the first enumerated one containing it.
    chosen_cycle: BTreeMap<usize, usize>,
}

impl RegulationResult {
    pub fn solvable(&self) -> bool {
        self.solvable
    }

    /// The synthesized feedback; present exactly when solvable.
    pub fn feedback(&self) -> Option<&FeedbackMatrix> {
        self.k.as_ref()
    }

    pub fn y_star(&self) -> &CanonicalVector {
        &self.y_star
    }

    pub fn target_states(&self) -> &BTreeSet<usize> {
        &self.target_states
    }

    pub fn cycles(&self) -> &CycleSet {
        &self.cycles
    }

    /// The layered certificate toward the cycle nodes, when any cycle exists.
    pub fn certificate(&self) -> Option<&BasinResult> {
        self.basin.as_ref()
    }

    pub fn chosen_cycle(&self, state: usize) -> Option<usize> {
        self.chosen_cycle.get(&state).copied()
    }

    /// States with no observed path to any cycle (empty when solvable).
    pub fn unreachable_states(&self) -> BTreeSet<usize> {
        match &self.basin {
            Some(b) => b.missing(),
            None => (1..=self.n).collect(),
        }
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "solvable": self.solvable,
            "K": self.k.as_ref().map(|k| {
                (1..=self.n).map(|j| k.input_for(j)).collect::<Vec<_>>()
            }),
            "y_star": self.y_star.index(),
            "target_states": self.target_states.iter().copied().collect::<Vec<_>>(),
            "cycles": self.cycles.to_json_value(),
            "chosen_cycle": self
                .chosen_cycle
                .iter()
                .map(|(j, c)| (j.to_string(), json!(c)))
                .collect::<serde_json::Map<String, Value>>(),
            "unreachable": self.unreachable_states().iter().copied().collect::<Vec<_>>(),
            "certificate": self.basin.as_ref().map(BasinResult::to_json_value),
        })
    }
}

/// Synthesize a feedback forcing the output to equal `y_star` after finitely
/// many steps, from every initial state.
///
/// Pipeline: collect the states observed with output `y_star`, enumerate the
/// data-witnessed cycles among them, and compute the basin of the cycle
/// nodes. Solvable iff some cycle exists and the basin covers every state.
/// Feedback assembly: a state on a cycle gets that cycle's edge input (the
/// first enumerated cycle wins when several share a state — any choice
/// keeps the loop inside cycle nodes, since every chosen successor is again
/// a cycle node); every other state gets its basin input.
pub fn output_regulation(ds: &DataSet, y_star: &CanonicalVector) -> Result<RegulationResult> {
    let n = ds.n_states();
    let target = target_states(ds, y_star)?;
    if target.is_empty() {
        return Ok(RegulationResult {
            n,
            y_star: *y_star,
            solvable: false,
            k: None,
            target_states: target,
            cycles: CycleSet::empty(),
            basin: None,
            chosen_cycle: BTreeMap::new(),
        });
    }
    let cycles = cycles_within(ds, &target)?;
    let cycle_nodes = cycles.nodes_on_cycles();
    if cycle_nodes.is_empty() {
        return Ok(RegulationResult {
            n,
            y_star: *y_star,
            solvable: false,
            k: None,
            target_states: target,
            cycles,
            basin: None,
            chosen_cycle: BTreeMap::new(),
        });
    }

    let basin_result = basin(ds, &cycle_nodes)?;
    let solvable = basin_result.covers_all();
    let mut chosen_cycle = BTreeMap::new();
    for (c, cycle) in cycles.cycles().iter().enumerate() {
        for &j in cycle.nodes() {
            chosen_cycle.entry(j).or_insert(c);
        }
    }

    let k = if solvable {
        let columns = (1..=n)
            .map(|j| match chosen_cycle.get(&j) {
                Some(&c) => {
                    let cycle = &cycles.cycles()[c];
                    let pos = cycle
                        .nodes()
                        .iter()
                        .position(|&v| v == j)
                        .expect("chosen cycle contains the state");
                    cycle.edge_inputs()[pos].index()
                }
                None => basin_result
                    .input_for(j)
                    .expect("basin covers all states")
                    .index(),
            })
            .collect();
        Some(FeedbackMatrix::from_indices(ds.n_inputs(), columns)?)
    } else {
        None
    };

    let result = RegulationResult {
        n,
        y_star: *y_star,
        solvable,
        k,
        target_states: target,
        cycles,
        basin: Some(basin_result),
        chosen_cycle,
    };
    debug_assert!(
        result.k.is_none() || regulation_data_valid(ds, result.k.as_ref().unwrap(), y_star)?,
        "synthesized feedback must satisfy the data-level validity predicate"
    );
    Ok(result)
}

/// Data-level validity of a regulation feedback, decided from the knowledge
/// mask alone: every closed-loop transition is data-witnessed, and from
/// every initial state the iteration is, after at most N steps, on a
/// periodic orbit whose every state has recorded output `y_star`.
pub fn regulation_data_valid(
    ds: &DataSet,
    k: &FeedbackMatrix,
    y_star: &CanonicalVector,
) -> Result<bool> {
    let n = ds.n_states();
    if ds.yp().is_none() {
        return Err(Error::MissingOutputs);
    }
    if k.n_states() != n || k.n_inputs() != ds.n_inputs() {
        return Err(Error::DimensionMismatch {
            context: "feedback matrix dimensions",
            left_rows: ds.n_inputs(),
            left_cols: n,
            right_rows: k.n_inputs(),
            right_cols: k.n_states(),
        });
    }
    let mask = ds.knowledge_mask();
    let successor = |j: usize| mask.successor(k.input_for(j), j);
    if (1..=n).any(|j| successor(j).is_none()) {
        return Ok(false);
    }
    for j in 1..=n {
        // After N steps a deterministic map on N states is on its cycle;
        // the next N states cover that cycle entirely.
        let mut x = j;
        for _ in 0..n {
            x = successor(x).expect("checked above");
        }
        for _ in 0..n {
            if mask.output(x) != Some(y_star.index()) {
                return Ok(false);
            }
            x = successor(x).expect("checked above");
        }
    }
    Ok(true)
}
