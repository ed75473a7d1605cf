//! Data-compatible reachability, equilibria and cycle analysis.
//!
//! Everything here is computed from the data alone, through the one-step
//! transition matrix L_tot^d (see [`DataSet::l_tot_d`]): a transition is used
//! only if it was observed. Consequences hold for *every* network compatible
//! with the data — conclusions are worst-case over the compatible family,
//! never optimistic.
//!
//! The two workhorses are [`basin`], a layered backward reachability sweep
//! that also records a witnessing input per state, and [`cycles_within`],
//! Johnson's simple-cycle enumeration on a data-induced subgraph. Feedback
//! synthesis stitches their certificates together.

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::logic::{reachability_matrix, CanonicalVector};
use serde_json::{json, Value};
use std::collections::BTreeSet;

/// Upper bound on enumerated cycles used by [`cycles_within`]. Simple-cycle
/// counts grow exponentially with graph size; past this many the enumeration
/// aborts with [`Error::CapExceeded`] rather than truncating silently.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

fn validate_state_set(n: usize, set: &BTreeSet<usize>) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyTarget);
    }
    for &j in set {
        if j < 1 || j > n {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: j,
                bound: n,
            });
        }
    }
    Ok(())
}

/// Whether every state has a data-witnessed path into `target`.
///
/// Computed from OR-powers of L_tot^d: with R = I ∨ L_tot^d ∨ … ∨
/// (L_tot^d)^{N−1}, the answer is true iff every column of R has a one in
/// some target row. This is a different computation from [`basin`] (matrix
/// powers vs. backward search); the two agree, and tests exploit that.
pub fn informative_for_reachability(ds: &DataSet, target: &BTreeSet<usize>) -> Result<bool> {
    let n = ds.n_states();
    validate_state_set(n, target)?;
    let r = reachability_matrix(&ds.l_tot_d())?;
    Ok((1..=n).all(|j| target.iter().any(|&i| r.get(i, j))))
}

/// Layered backward-reachability certificate for a target set.
///
/// `layers[0]` is the target itself; every state in `layers[k]` (k ≥ 1) has
/// a data-observed transition into `layers[k−1]` under its recorded input.
/// The basin S* is the union of all layers; it covers every state exactly
/// when the data are informative for reachability of the target.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BasinResult {
    n: usize,
    target: BTreeSet<usize>,
    layers: Vec<BTreeSet<usize>>,
    /// Slot j−1 holds the recorded input for state j; populated exactly on
    /// S* \ target.
    inputs: Vec<Option<CanonicalVector>>,
}

impl BasinResult {
    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> &BTreeSet<usize> {
        &self.target
    }

    /// The layers S_0 (= target), S_1, …, S_{d−1}, pairwise disjoint.
    pub fn layers(&self) -> &[BTreeSet<usize>] {
        &self.layers
    }

    /// The basin S*: every state some data path steers into the target.
    pub fn basin(&self) -> BTreeSet<usize> {
        self.layers.iter().flatten().copied().collect()
    }

    /// States outside the basin — no observed path reaches the target.
    pub fn missing(&self) -> BTreeSet<usize> {
        let b = self.basin();
        (1..=self.n).filter(|j| !b.contains(j)).collect()
    }

    /// Whether S* = [1, N].
    pub fn covers_all(&self) -> bool {
        self.layers.iter().map(BTreeSet::len).sum::<usize>() == self.n
    }

    /// Index of the layer containing `state`, if it lies in the basin.
    pub fn layer_of(&self, state: usize) -> Option<usize> {
        self.layers.iter().position(|s| s.contains(&state))
    }

    /// The recorded input steering `state` one layer closer to the target;
    /// present exactly for basin states outside the target.
    pub fn input_for(&self, state: usize) -> Option<&CanonicalVector> {
        self.inputs.get(state - 1).and_then(Option::as_ref)
    }

    pub fn to_json_value(&self) -> Value {
        let layers: Vec<Vec<usize>> = self
            .layers
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        let inputs: serde_json::Map<String, Value> = (1..=self.n)
            .filter_map(|j| {
                self.input_for(j)
                    .map(|u| (j.to_string(), json!(u.index())))
            })
            .collect();
        json!({
            "target": self.target.iter().copied().collect::<Vec<_>>(),
            "layers": layers,
            "basin": self.basin().iter().copied().collect::<Vec<_>>(),
            "covers_all": self.covers_all(),
            "inputs": inputs,
        })
    }
}

/// Backward layered reachability over data transitions.
///
/// Grows layers from the target: a state joins layer k when its
/// smallest-index data column witnesses a transition into layer k−1, and the
/// input of that column is recorded for it. Stops when a sweep adds nothing.
/// Replaying recorded inputs strictly decreases the layer index, so every
/// basin state reaches the target in at most (number of layers − 1) steps.
pub fn basin(ds: &DataSet, target: &BTreeSet<usize>) -> Result<BasinResult> {
    let n = ds.n_states();
    validate_state_set(n, target)?;
    let xp = ds.xp().column_indices();
    let xf = ds.xf().column_indices();
    let up = ds.up().column_indices();

    let mut assigned = vec![false; n + 1];
    for &j in target {
        assigned[j] = true;
    }
    let mut layers = vec![target.clone()];
    let mut inputs: Vec<Option<CanonicalVector>> = vec![None; n];
    loop {
        let prev = layers.last().expect("at least the target layer");
        let mut next = BTreeSet::new();
        for r in 1..=n {
            if assigned[r] {
                continue;
            }
            // Smallest data column witnessing r → (previous layer) wins.
            if let Some(k) = (0..ds.len()).find(|&k| xp[k] == r && prev.contains(&xf[k])) {
                next.insert(r);
                inputs[r - 1] = Some(CanonicalVector::new(ds.n_inputs(), up[k])?);
            }
        }
        if next.is_empty() {
            break;
        }
        for &r in &next {
            assigned[r] = true;
        }
        layers.push(next);
    }
    Ok(BasinResult {
        n,
        target: target.clone(),
        layers,
        inputs,
    })
}

/// Equilibria compatible with the data: states observed to map to
/// themselves, each paired with the recorded input of the witnessing column
/// (smallest column index wins). Sorted by state.
pub fn data_equilibria(ds: &DataSet) -> Vec<(usize, CanonicalVector)> {
    let xp = ds.xp().column_indices();
    let xf = ds.xf().column_indices();
    let up = ds.up().column_indices();
    let mut witness: Vec<Option<usize>> = vec![None; ds.n_states()];
    for k in 0..ds.len() {
        if xp[k] == xf[k] && witness[xp[k] - 1].is_none() {
            witness[xp[k] - 1] = Some(up[k]);
        }
    }
    witness
        .into_iter()
        .enumerate()
        .filter_map(|(j, u)| {
            u.map(|i| {
                (
                    j + 1,
                    CanonicalVector::new(ds.n_inputs(), i).expect("recorded input in range"),
                )
            })
        })
        .collect()
}

/// States observed at least once with output `y_star`: the candidate set
/// X^d(y*) on which a regulated closed loop must eventually live.
pub fn target_states(ds: &DataSet, y_star: &CanonicalVector) -> Result<BTreeSet<usize>> {
    let yp = ds.yp().ok_or(Error::MissingOutputs)?;
    if y_star.dim() != ds.n_outputs() {
        return Err(Error::DimensionMismatch {
            context: "target output dimension",
            left_rows: ds.n_outputs(),
            left_cols: 1,
            right_rows: y_star.dim(),
            right_cols: 1,
        });
    }
    let xp = ds.xp().column_indices();
    Ok((0..ds.len())
        .filter(|&k| yp.column_indices()[k] == y_star.index())
        .map(|k| xp[k])
        .collect())
}

/// One simple cycle of the data-transition digraph, with a recorded input
/// per edge. `nodes` are distinct; `edge_inputs[e]` steers `nodes[e]` to
/// `nodes[(e+1) % len]`. A self-loop is a length-1 cycle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cycle {
    nodes: Vec<usize>,
    edge_inputs: Vec<CanonicalVector>,
}

impl Cycle {
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edge_inputs(&self) -> &[CanonicalVector] {
        &self.edge_inputs
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // cycles have at least one node
    }

    pub fn is_self_loop(&self) -> bool {
        self.nodes.len() == 1
    }
}

/// All simple cycles found inside a node set, in enumeration order (roots
/// ascending; each cycle starts at its smallest node).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycleSet {
    node_set: BTreeSet<usize>,
    cycles: Vec<Cycle>,
}

impl CycleSet {
    /// The empty cycle set over an empty node set (nothing to search).
    pub(crate) fn empty() -> Self {
        Self {
            node_set: BTreeSet::new(),
            cycles: Vec::new(),
        }
    }

    pub fn node_set(&self) -> &BTreeSet<usize> {
        &self.node_set
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    /// Union of the nodes of all cycles.
    pub fn nodes_on_cycles(&self) -> BTreeSet<usize> {
        self.cycles.iter().flat_map(|c| c.nodes.iter().copied()).collect()
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "node_set": self.node_set.iter().copied().collect::<Vec<_>>(),
            "cycles": self.cycles.iter().map(|c| json!({
                "nodes": c.nodes,
                "inputs": c.edge_inputs.iter().map(CanonicalVector::index).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// [`cycles_within_capped`] with the default cycle cap.
pub fn cycles_within(ds: &DataSet, node_set: &BTreeSet<usize>) -> Result<CycleSet> {
    cycles_within_capped(ds, node_set, DEFAULT_CYCLE_CAP)
}

/// Enumerate all simple cycles of the data-transition digraph induced on
/// `node_set` (both endpoints inside; any data column as witness), with one
/// recorded input per edge (smallest witnessing column wins).
///
/// Uses Johnson's blocked search: roots ascend, each cycle is reported once
/// starting at its smallest node, and self-loops appear as length-1 cycles.
/// Aborts with [`Error::CapExceeded`] after `cap` cycles.
pub fn cycles_within_capped(
    ds: &DataSet,
    node_set: &BTreeSet<usize>,
    cap: usize,
) -> Result<CycleSet> {
    validate_state_set(ds.n_states(), node_set)?;
    let nodes: Vec<usize> = node_set.iter().copied().collect();
    let mut position = vec![usize::MAX; ds.n_states() + 1];
    for (p, &j) in nodes.iter().enumerate() {
        position[j] = p;
    }

    // Induced adjacency (positions) and the first witnessing input per edge.
    let s = nodes.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); s];
    let mut edge_input: Vec<Option<CanonicalVector>> = vec![None; s * s];
    let xp = ds.xp().column_indices();
    let xf = ds.xf().column_indices();
    let up = ds.up().column_indices();
    for k in 0..ds.len() {
        let (from, to) = (position[xp[k]], position[xf[k]]);
        if from == usize::MAX || to == usize::MAX {
            continue;
        }
        let slot = &mut edge_input[from * s + to];
        if slot.is_none() {
            *slot = Some(CanonicalVector::new(ds.n_inputs(), up[k])?);
            succ[from].push(to);
        }
    }
    for adj in &mut succ {
        adj.sort_unstable();
    }

    let mut johnson = Johnson {
        succ,
        root: 0,
        blocked: vec![false; s],
        b_sets: vec![BTreeSet::new(); s],
        stack: Vec::new(),
        cycles: Vec::new(),
        cap,
    };
    for root in 0..s {
        johnson.root = root;
        for v in root..s {
            johnson.blocked[v] = false;
            johnson.b_sets[v].clear();
        }
        johnson.circuit(root)?;
        debug_assert!(johnson.stack.is_empty());
    }

    let cycles = johnson
        .cycles
        .into_iter()
        .map(|positions| {
            let cycle_nodes: Vec<usize> = positions.iter().map(|&p| nodes[p]).collect();
            let edge_inputs = (0..positions.len())
                .map(|e| {
                    let from = positions[e];
                    let to = positions[(e + 1) % positions.len()];
                    edge_input[from * s + to].expect("every enumerated edge was witnessed")
                })
                .collect();
            Cycle {
                nodes: cycle_nodes,
                edge_inputs,
            }
        })
        .collect();
    Ok(CycleSet {
        node_set: node_set.clone(),
        cycles,
    })
}

/// Johnson's blocked backtracking search for simple cycles. Only nodes ≥
/// `root` participate in a pass, so each cycle is found exactly once, rooted
/// at its smallest node.
struct Johnson {
    succ: Vec<Vec<usize>>,
    root: usize,
    blocked: Vec<bool>,
    b_sets: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
    cycles: Vec<Vec<usize>>,
    cap: usize,
}

impl Johnson {
    fn unblock(&mut self, v: usize) {
        if !self.blocked[v] {
            return;
        }
        self.blocked[v] = false;
        let pending = std::mem::take(&mut self.b_sets[v]);
        for w in pending {
            self.unblock(w);
        }
    }

    fn circuit(&mut self, v: usize) -> Result<bool> {
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for idx in 0..self.succ[v].len() {
            let w = self.succ[v][idx];
            if w < self.root {
                continue;
            }
            if w == self.root {
                if self.cycles.len() >= self.cap {
                    return Err(Error::CapExceeded { cap: self.cap });
                }
                self.cycles.push(self.stack.clone());
                found = true;
            } else if !self.blocked[w] && self.circuit(w)? {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for idx in 0..self.succ[v].len() {
                let w = self.succ[v][idx];
                if w >= self.root {
                    self.b_sets[w].insert(v);
                }
            }
        }
        self.stack.pop();
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::tests::{six_state_data, trace_from_indices};
    use crate::data::{DataSet, ExperimentTrace};
    use crate::model::{random_bcn, random_inputs};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn seven_state_data() -> DataSet {
        crate::data::tests::seven_state_data()
    }

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    /// A random dataset from a simulated walk with a few restarts.
    fn random_walk_data(
        n: usize,
        m: usize,
        p: usize,
        restarts: usize,
        steps: usize,
        rng: &mut StdRng,
    ) -> DataSet {
        let bcn = random_bcn(n, m, p, rng);
        let mut traces = Vec::new();
        for _ in 0..restarts {
            let x0 = CanonicalVector::new(n, rng.random_range(1..=n)).unwrap();
            let inputs = random_inputs(m, steps, rng);
            let sim = bcn.simulate(&x0, &inputs).unwrap();
            let outputs = (p > 1).then_some(sim.outputs);
            traces.push(ExperimentTrace::new(sim.states, inputs, outputs).unwrap());
        }
        DataSet::assemble(traces).unwrap()
    }

    /// Reverse BFS over the data-transition digraph: distance classes from
    /// the target. Independent of `basin` (adjacency sets, forward queue).
    fn reverse_bfs_layers(ds: &DataSet, target: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
        let n = ds.n_states();
        let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n + 1];
        for k in 0..ds.len() {
            let (j, q) = (
                ds.xp().column_indices()[k],
                ds.xf().column_indices()[k],
            );
            preds[q].insert(j);
        }
        let mut dist = vec![usize::MAX; n + 1];
        let mut layers = vec![target.clone()];
        for &j in target {
            dist[j] = 0;
        }
        loop {
            let mut next = BTreeSet::new();
            for &q in layers.last().unwrap() {
                for &j in &preds[q] {
                    if dist[j] == usize::MAX {
                        next.insert(j);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            for &j in &next {
                dist[j] = layers.len();
            }
            layers.push(next);
        }
        layers
    }

    #[test]
    fn reachability_informativity_examples() {
        let ds = seven_state_data();
        assert!(informative_for_reachability(&ds, &set(&[1, 2, 5, 6])).unwrap());
        assert!(informative_for_reachability(&ds, &set(&(1..=7).collect::<Vec<_>>())).unwrap());
        // State 4's only observed continuation is 4 → 3 → {2,3} → {2}, so 5
        // is unreachable from it.
        assert!(!informative_for_reachability(&ds, &set(&[5])).unwrap());
        assert!(matches!(
            informative_for_reachability(&ds, &BTreeSet::new()),
            Err(Error::EmptyTarget)
        ));
        assert!(matches!(
            informative_for_reachability(&ds, &set(&[8])),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn basin_layers_on_the_seven_state_sample() {
        let ds = seven_state_data();
        let result = basin(&ds, &set(&[1, 2, 5, 6])).unwrap();
        assert_eq!(result.layers().len(), 3);
        assert_eq!(result.layers()[0], set(&[1, 2, 5, 6]));
        assert_eq!(result.layers()[1], set(&[3, 7]));
        assert_eq!(result.layers()[2], set(&[4]));
        assert!(result.covers_all());
        assert_eq!(result.missing(), BTreeSet::new());
        // Recorded inputs: 3 exits via input 1, 7 via 3, 4 via 3.
        assert_eq!(result.input_for(3).unwrap().index(), 1);
        assert_eq!(result.input_for(7).unwrap().index(), 3);
        assert_eq!(result.input_for(4).unwrap().index(), 3);
        // Inputs are defined exactly on S* \ target.
        for j in [1, 2, 5, 6] {
            assert!(result.input_for(j).is_none());
        }
        assert_eq!(result.layer_of(4), Some(2));
        assert_eq!(result.layer_of(1), Some(0));
    }

    #[test]
    fn basin_of_the_full_state_set_is_trivial() {
        let ds = seven_state_data();
        let all = set(&(1..=7).collect::<Vec<_>>());
        let result = basin(&ds, &all).unwrap();
        assert_eq!(result.layers().len(), 1);
        assert!(result.covers_all());
        assert!((1..=7).all(|j| result.input_for(j).is_none()));
    }

    #[test]
    fn basin_may_fall_short_of_full_coverage() {
        let ds = seven_state_data();
        let result = basin(&ds, &set(&[5])).unwrap();
        assert_eq!(result.basin(), set(&[1, 5, 6, 7]));
        assert_eq!(result.missing(), set(&[2, 3, 4]));
        assert!(!result.covers_all());
        assert_eq!(
            informative_for_reachability(&ds, &set(&[5])).unwrap(),
            result.covers_all()
        );
    }

    #[test]
    fn basin_agrees_with_reverse_bfs_and_replay() {
        let mut rng = StdRng::seed_from_u64(31);
        for round in 0..60 {
            let n = rng.random_range(2..=10);
            let ds = random_walk_data(n, rng.random_range(1..=3), 1, 2, 20, &mut rng);
            let size = rng.random_range(1..=n);
            let mut target = BTreeSet::new();
            while target.len() < size {
                target.insert(rng.random_range(1..=n));
            }
            let result = basin(&ds, &target).unwrap();

            // Layers are exactly the BFS distance classes.
            assert_eq!(result.layers(), &reverse_bfs_layers(&ds, &target)[..], "round {round}");

            // Two independent informativity computations agree.
            assert_eq!(
                informative_for_reachability(&ds, &target).unwrap(),
                result.covers_all()
            );

            // Witness replay: each recorded input is a known mask transition
            // landing exactly one layer down.
            let mask = ds.knowledge_mask();
            for (layer, states) in result.layers().iter().enumerate().skip(1) {
                for &r in states {
                    let u = result.input_for(r).unwrap();
                    let q = mask.successor(u.index(), r).unwrap();
                    assert_eq!(result.layer_of(q), Some(layer - 1));
                }
            }
            // Inputs undefined on the target and outside S*.
            for j in 1..=n {
                let expect_input =
                    result.layer_of(j).map(|l| l > 0).unwrap_or(false);
                assert_eq!(result.input_for(j).is_some(), expect_input);
            }
        }
    }

    #[test]
    fn equilibria_on_the_seven_state_sample() {
        let ds = seven_state_data();
        let eq = data_equilibria(&ds);
        let as_pairs: Vec<(usize, usize)> =
            eq.iter().map(|(j, u)| (*j, u.index())).collect();
        assert_eq!(as_pairs, vec![(2, 1), (3, 2), (7, 2)]);
    }

    #[test]
    fn equilibria_empty_without_repeats() {
        let ds = DataSet::assemble(vec![trace_from_indices(
            4,
            2,
            None,
            &[1, 2, 3, 4, 1],
            &[1, 2, 1, 2],
            None,
        )])
        .unwrap();
        assert!(data_equilibria(&ds).is_empty());
    }

    #[test]
    fn equilibria_match_the_knowledge_mask() {
        let mut rng = StdRng::seed_from_u64(32);
        for _ in 0..40 {
            let n = rng.random_range(2..=9);
            let m = rng.random_range(1..=3);
            let ds = random_walk_data(n, m, 1, 2, 15, &mut rng);
            let mask = ds.knowledge_mask();
            let expected: BTreeSet<usize> = (1..=n)
                .filter(|&j| (1..=m).any(|i| mask.successor(i, j) == Some(j)))
                .collect();
            let eq = data_equilibria(&ds);
            let states: BTreeSet<usize> = eq.iter().map(|(j, _)| *j).collect();
            assert_eq!(states, expected);
            for (j, u) in &eq {
                assert_eq!(mask.successor(u.index(), *j), Some(*j));
            }
        }
    }

    #[test]
    fn target_states_by_observed_output() {
        let ds = six_state_data();
        let y2 = CanonicalVector::new(2, 2).unwrap();
        assert_eq!(target_states(&ds, &y2).unwrap(), set(&[2, 3, 4]));
        let y1 = CanonicalVector::new(2, 1).unwrap();
        assert_eq!(target_states(&ds, &y1).unwrap(), set(&[1, 5, 6]));

        // Never-observed output value: empty set.
        let ds = DataSet::assemble(vec![trace_from_indices(
            3,
            2,
            Some(2),
            &[1, 2],
            &[1],
            Some(&[1]),
        )])
        .unwrap();
        assert_eq!(target_states(&ds, &y2).unwrap(), BTreeSet::new());

        // Output-free data cannot answer; wrong y* dimension is rejected.
        let no_outputs = seven_state_data();
        assert!(matches!(
            target_states(&no_outputs, &y2),
            Err(Error::MissingOutputs)
        ));
        let y3 = CanonicalVector::new(3, 1).unwrap();
        assert!(matches!(
            target_states(&six_state_data(), &y3),
            Err(Error::DimensionMismatch { .. })
        ));

        // Mask oracle on random data.
        let mut rng = StdRng::seed_from_u64(33);
        for _ in 0..30 {
            let n = rng.random_range(2..=8);
            let ds = random_walk_data(n, 2, 2, 2, 12, &mut rng);
            let mask = ds.knowledge_mask();
            for o in 1..=2 {
                let y = CanonicalVector::new(2, o).unwrap();
                let expected: BTreeSet<usize> =
                    (1..=n).filter(|&j| mask.output(j) == Some(o)).collect();
                assert_eq!(target_states(&ds, &y).unwrap(), expected);
            }
        }
    }

    #[test]
    fn cycles_on_the_six_state_sample() {
        let ds = six_state_data();
        let cs = cycles_within(&ds, &set(&[2, 3, 4])).unwrap();
        assert_eq!(cs.len(), 2);
        // Roots ascend: the 2 ↔ 4 cycle precedes the self-loop at 3.
        assert_eq!(cs.cycles()[0].nodes(), &[2, 4]);
        assert_eq!(
            cs.cycles()[0]
                .edge_inputs()
                .iter()
                .map(CanonicalVector::index)
                .collect::<Vec<_>>(),
            vec![1, 2] // 2 → 4 under input 1, 4 → 2 under input 2
        );
        assert_eq!(cs.cycles()[1].nodes(), &[3]);
        assert!(cs.cycles()[1].is_self_loop());
        assert_eq!(cs.cycles()[1].edge_inputs()[0].index(), 1);
        assert_eq!(cs.nodes_on_cycles(), set(&[2, 3, 4]));
    }

    #[test]
    fn cycles_empty_without_internal_edges() {
        let ds = six_state_data();
        // 1's and 5's observed successors (2 and 4) lie outside the set.
        let cs = cycles_within(&ds, &set(&[1, 5])).unwrap();
        assert!(cs.is_empty());
        assert_eq!(cs.nodes_on_cycles(), BTreeSet::new());
    }

    #[test]
    fn cycle_cap_aborts_loudly() {
        let ds = six_state_data();
        assert!(matches!(
            cycles_within_capped(&ds, &set(&[2, 3, 4]), 1),
            Err(Error::CapExceeded { cap: 1 })
        ));
    }

    /// Brute-force oracle: enumerate simple cycles by DFS from each root,
    /// restricted to nodes ≥ root, with explicit on-path bookkeeping.
    fn brute_force_cycles(edges: &BTreeSet<(usize, usize)>, nodes: &[usize]) -> BTreeSet<Vec<usize>> {
        fn extend(
            edges: &BTreeSet<(usize, usize)>,
            nodes: &[usize],
            root: usize,
            path: &mut Vec<usize>,
            found: &mut BTreeSet<Vec<usize>>,
        ) {
            let last = *path.last().unwrap();
            if edges.contains(&(last, root)) {
                found.insert(path.clone());
            }
            for &next in nodes {
                if next > root && !path.contains(&next) && edges.contains(&(last, next)) {
                    path.push(next);
                    extend(edges, nodes, root, path, found);
                    path.pop();
                }
            }
        }
        let mut found = BTreeSet::new();
        for &root in nodes {
            let mut path = vec![root];
            extend(edges, nodes, root, &mut path, &mut found);
        }
        found
    }

    #[test]
    fn cycles_match_brute_force_enumeration() {
        let mut rng = StdRng::seed_from_u64(34);
        for _ in 0..40 {
            let n = rng.random_range(3..=12);
            let ds = random_walk_data(n, rng.random_range(1..=4), 1, 3, 25, &mut rng);
            let size = rng.random_range(1..=n.min(10));
            let mut node_set = BTreeSet::new();
            while node_set.len() < size {
                node_set.insert(rng.random_range(1..=n));
            }
            let cs = cycles_within(&ds, &node_set).unwrap();

            let mut edges = BTreeSet::new();
            for k in 0..ds.len() {
                let (j, q) = (
                    ds.xp().column_indices()[k],
                    ds.xf().column_indices()[k],
                );
                if node_set.contains(&j) && node_set.contains(&q) {
                    edges.insert((j, q));
                }
            }
            let nodes: Vec<usize> = node_set.iter().copied().collect();
            let expected = brute_force_cycles(&edges, &nodes);
            let got: BTreeSet<Vec<usize>> =
                cs.cycles().iter().map(|c| c.nodes().to_vec()).collect();
            assert_eq!(got, expected);
            assert_eq!(got.len(), cs.len(), "no duplicate cycles");

            // Every edge input is a known mask transition along the cycle.
            let mask = ds.knowledge_mask();
            for cycle in cs.cycles() {
                for e in 0..cycle.len() {
                    let from = cycle.nodes()[e];
                    let to = cycle.nodes()[(e + 1) % cycle.len()];
                    let u = &cycle.edge_inputs()[e];
                    assert_eq!(mask.successor(u.index(), from), Some(to));
                }
            }
        }
    }

    #[test]
    fn data_cycles_are_generator_cycles() {
        // Conservativity: on simulator-backed data, every enumerated cycle
        // edge is realized by the generator under the recovered input.
        let mut rng = StdRng::seed_from_u64(35);
        for _ in 0..20 {
            let n = rng.random_range(3..=8);
            let bcn = random_bcn(n, 2, 1, &mut rng);
            let x0 = CanonicalVector::new(n, 1).unwrap();
            let inputs = random_inputs(2, 40, &mut rng);
            let sim = bcn.simulate(&x0, &inputs).unwrap();
            let ds = DataSet::assemble(vec![
                ExperimentTrace::new(sim.states, inputs, None).unwrap(),
            ])
            .unwrap();
            let all: BTreeSet<usize> = (1..=n).collect();
            let cs = cycles_within(&ds, &all).unwrap();
            for cycle in cs.cycles() {
                for e in 0..cycle.len() {
                    let from = cycle.nodes()[e];
                    let to = cycle.nodes()[(e + 1) % cycle.len()];
                    assert_eq!(bcn.successor(from, cycle.edge_inputs()[e].index()), to);
                }
            }
        }
    }

    #[test]
    fn json_shapes() {
        let ds = seven_state_data();
        let b = basin(&ds, &set(&[1, 2, 5, 6])).unwrap().to_json_value();
        assert_eq!(b["layers"][1], json!([3, 7]));
        assert_eq!(b["covers_all"], json!(true));
        assert_eq!(b["inputs"]["4"], json!(3));

        let cs = cycles_within(&six_state_data(), &set(&[2, 3, 4]))
            .unwrap()
            .to_json_value();
        assert_eq!(cs["cycles"][0]["nodes"], json!([2, 4]));
        assert_eq!(cs["cycles"][0]["inputs"], json!([1, 2]));
    }
}
