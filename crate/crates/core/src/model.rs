//! Boolean control networks in algebraic form.
//!
//! A [`Bcn`] stores the transition matrix L ∈ L_{N×NM} and the output matrix
//! H ∈ L_{P×N}. L splits into M blocks L_1 … L_M of size N×N, block i being
//! the subsystem obtained by freezing the input at δ_M^i; column (i−1)N+j of
//! L is the successor of state δ_N^j under input δ_M^i. A [`Bn`] is the
//! autonomous counterpart (one successor per state), e.g. a closed loop
//! obtained by feeding back u(t) = K x(t) through a [`FeedbackMatrix`].
//!
//! Besides simulation this module carries the model-side analyses
//! ([`Bcn::model_equilibria`], [`Bcn::model_reachable_set`]) that the rest of
//! the crate uses as ground-truth oracles for its data-side counterparts.

use crate::error::{Error, Result};
use crate::logic::{BooleanMatrix, CanonicalVector, Digraph, LogicalMatrix};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A Boolean control network (N states, M inputs, P outputs) in algebraic
/// form: x(t+1) = L ⋉ u(t) ⋉ x(t), y(t) = H x(t).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bcn {
    n: usize,
    m: usize,
    p: usize,
    l: LogicalMatrix,
    h: LogicalMatrix,
}

impl Bcn {
    pub fn new(n: usize, m: usize, p: usize, l: LogicalMatrix, h: LogicalMatrix) -> Result<Self> {
        if n == 0 || m == 0 || p == 0 {
            return Err(Error::EmptyMatrix);
        }
        if l.rows() != n || l.cols() != n * m {
            return Err(Error::DimensionMismatch {
                context: "transition matrix L",
                left_rows: n,
                left_cols: n * m,
                right_rows: l.rows(),
                right_cols: l.cols(),
            });
        }
        if h.rows() != p || h.cols() != n {
            return Err(Error::DimensionMismatch {
                context: "output matrix H",
                left_rows: p,
                left_cols: n,
                right_rows: h.rows(),
                right_cols: h.cols(),
            });
        }
        Ok(Self { n, m, p, l, h })
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn n_inputs(&self) -> usize {
        self.m
    }

    pub fn n_outputs(&self) -> usize {
        self.p
    }

    pub fn l(&self) -> &LogicalMatrix {
        &self.l
    }

    pub fn h(&self) -> &LogicalMatrix {
        &self.h
    }

    /// The N×N block L_i (1-based input index): the subsystem under the
    /// constant input δ_M^i.
    pub fn block(&self, i: usize) -> Result<LogicalMatrix> {
        if i == 0 || i > self.m {
            return Err(Error::IndexOutOfRange {
                what: "input block",
                index: i,
                bound: self.m,
            });
        }
        let start = (i - 1) * self.n;
        LogicalMatrix::new(
            self.n,
            self.l.column_indices()[start..start + self.n].to_vec(),
        )
    }

    /// Successor state index of state `j` under input `i` (both 1-based):
    /// column (i−1)N+j of L.
    pub fn successor(&self, j: usize, i: usize) -> usize {
        self.l.column_indices()[(i - 1) * self.n + (j - 1)]
    }

    /// Output index of state `j` (1-based).
    pub fn output_of(&self, j: usize) -> usize {
        self.h.column_indices()[j - 1]
    }

    /// One step: x⁺ = L ⋉ u ⋉ x and the output y = H x at the *current*
    /// state.
    pub fn step(
        &self,
        x: &CanonicalVector,
        u: &CanonicalVector,
    ) -> Result<(CanonicalVector, CanonicalVector)> {
        if x.dim() != self.n || u.dim() != self.m {
            return Err(Error::DimensionMismatch {
                context: "step operands",
                left_rows: self.n,
                left_cols: self.m,
                right_rows: x.dim(),
                right_cols: u.dim(),
            });
        }
        let next = CanonicalVector::new(self.n, self.successor(x.index(), u.index()))?;
        let y = CanonicalVector::new(self.p, self.output_of(x.index()))?;
        Ok((next, y))
    }

    /// Iterate [`Bcn::step`] along an input sequence of length T. The trace
    /// holds T+1 states and T outputs: y(t) is reported for t ∈ [0, T−1]
    /// only, mirroring the span of recorded data (y(T) is not emitted).
    pub fn simulate(
        &self,
        x0: &CanonicalVector,
        inputs: &[CanonicalVector],
    ) -> Result<SimulationTrace> {
        let mut states = Vec::with_capacity(inputs.len() + 1);
        let mut outputs = Vec::with_capacity(inputs.len());
        let mut x = *x0;
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                context: "simulate initial state",
                left_rows: self.n,
                left_cols: 1,
                right_rows: x.dim(),
                right_cols: 1,
            });
        }
        states.push(x);
        for u in inputs {
            let (next, y) = self.step(&x, u)?;
            outputs.push(y);
            states.push(next);
            x = next;
        }
        Ok(SimulationTrace { states, outputs })
    }

    /// L_tot = L_1 ∨ L_2 ∨ … ∨ L_M: entry (i, j) is 1 iff some input moves
    /// state j to state i in one step.
    pub fn l_tot(&self) -> BooleanMatrix {
        let mut acc = BooleanMatrix::zeros(self.n, self.n);
        for i in 1..=self.m {
            for j in 1..=self.n {
                acc.set(self.successor(j, i), j, true);
            }
        }
        acc
    }

    /// Close the loop with u(t) = K x(t). Column j of the result is column
    /// (i−1)N+j of L where δ_M^i = col_j(K) — equivalently L ⋉ K ⋉ Φ_N.
    pub fn closed_loop(&self, k: &FeedbackMatrix) -> Result<Bn> {
        if k.n_inputs() != self.m || k.n_states() != self.n {
            return Err(Error::DimensionMismatch {
                context: "feedback matrix",
                left_rows: self.m,
                left_cols: self.n,
                right_rows: k.n_inputs(),
                right_cols: k.n_states(),
            });
        }
        let columns = (1..=self.n)
            .map(|j| self.successor(j, k.input_for(j)))
            .collect();
        Bn::new(LogicalMatrix::new(self.n, columns)?)
    }

    /// All pairs (state j, input i), 1-based, with L's column (i−1)N+j equal
    /// to δ_N^j — i.e. the equilibrium points together with the inputs that
    /// hold them. Sorted by state, then input.
    pub fn model_equilibria(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 1..=self.n {
            for i in 1..=self.m {
                if self.successor(j, i) == j {
                    out.push((j, i));
                }
            }
        }
        out
    }

    /// States reachable from `from` under some input sequence: the BFS
    /// closure of `from` in the digraph of L_tot (τ = 0 included, so `from`
    /// is always a member).
    pub fn model_reachable_set(&self, from: &CanonicalVector) -> Result<BTreeSet<usize>> {
        if from.dim() != self.n {
            return Err(Error::DimensionMismatch {
                context: "reachable-set source",
                left_rows: self.n,
                left_cols: 1,
                right_rows: from.dim(),
                right_cols: 1,
            });
        }
        let g = Digraph::from_boolean(&self.l_tot())?;
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.index()];
        seen.insert(from.index());
        while let Some(v) = stack.pop() {
            for &w in g.successors(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        Ok(seen)
    }

    /// Parse the JSON model format:
    /// `{"N":…,"M":…,"P":…,"L":[…],"H":[…]}` with 1-based column indices,
    /// L of length N·M and H of length N.
    pub fn from_json(s: &str) -> Result<Bcn> {
        let file: ModelFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelFile::from(self)).expect("model serializes")
    }
}

/// States and outputs produced by [`Bcn::simulate`]: T+1 states, T outputs.
#[derive(Clone, Debug)]
pub struct SimulationTrace {
    pub states: Vec<CanonicalVector>,
    pub outputs: Vec<CanonicalVector>,
}

/// An autonomous Boolean network: x(t+1) = L x(t) with L ∈ L_{N×N}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bn {
    l: LogicalMatrix,
}

impl Bn {
    pub fn new(l: LogicalMatrix) -> Result<Self> {
        if l.rows() != l.cols() {
            return Err(Error::NotSquare {
                rows: l.rows(),
                cols: l.cols(),
            });
        }
        Ok(Self { l })
    }

    pub fn n_states(&self) -> usize {
        self.l.rows()
    }

    pub fn l(&self) -> &LogicalMatrix {
        &self.l
    }

    /// The unique successor of state `j` (1-based).
    pub fn successor(&self, j: usize) -> usize {
        self.l.column_indices()[j - 1]
    }

    /// The state sequence from `from` up to and including the first repeated
    /// state, together with the position of that repeat. The slice from the
    /// returned position onward (exclusive of the final repeat) is the
    /// eventual periodic orbit; with N states it is entered within N−1 steps.
    pub fn orbit(&self, from: usize) -> (Vec<usize>, usize) {
        let n = self.n_states();
        let mut first_seen = vec![usize::MAX; n + 1];
        let mut seq = Vec::with_capacity(n + 1);
        let mut x = from;
        loop {
            if first_seen[x] != usize::MAX {
                seq.push(x);
                return (seq, first_seen[x]);
            }
            first_seen[x] = seq.len();
            seq.push(x);
            x = self.successor(x);
        }
    }
}

/// A state-feedback matrix K ∈ L_{M×N}: column j is the input applied in
/// state δ_N^j.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FeedbackMatrix {
    k: LogicalMatrix,
}

impl FeedbackMatrix {
    pub fn new(k: LogicalMatrix) -> Self {
        Self { k }
    }

    /// Build from 1-based input indices, one per state.
    pub fn from_indices(m: usize, inputs: Vec<usize>) -> Result<Self> {
        Ok(Self::new(LogicalMatrix::new(m, inputs)?))
    }

    pub fn n_inputs(&self) -> usize {
        self.k.rows()
    }

    pub fn n_states(&self) -> usize {
        self.k.cols()
    }

    pub fn matrix(&self) -> &LogicalMatrix {
        &self.k
    }

    /// The 1-based input index applied in state `j` (1-based).
    pub fn input_for(&self, j: usize) -> usize {
        self.k.column_indices()[j - 1]
    }
}

/// Draw a BCN uniformly: each column of L and H is an independent uniform
/// canonical vector.
pub fn random_bcn<R: Rng + ?Sized>(n: usize, m: usize, p: usize, rng: &mut R) -> Bcn {
    let l = LogicalMatrix::new(n, (0..n * m).map(|_| rng.random_range(1..=n)).collect())
        .expect("in-range columns");
    let h = LogicalMatrix::new(p, (0..n).map(|_| rng.random_range(1..=p)).collect())
        .expect("in-range columns");
    Bcn::new(n, m, p, l, h).expect("consistent dimensions")
}

/// Draw a uniform input schedule of the given length.
pub fn random_inputs<R: Rng + ?Sized>(m: usize, len: usize, rng: &mut R) -> Vec<CanonicalVector> {
    (0..len)
        .map(|_| CanonicalVector::new(m, rng.random_range(1..=m)).expect("in range"))
        .collect()
}

/// On-disk model format (all indices 1-based).
#[derive(Serialize, Deserialize)]
struct ModelFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "P")]
    p: usize,
    #[serde(rename = "L")]
    l: Vec<usize>,
    #[serde(rename = "H")]
    h: Vec<usize>,
}

impl From<&Bcn> for ModelFile {
    fn from(bcn: &Bcn) -> Self {
        ModelFile {
            n: bcn.n,
            m: bcn.m,
            p: bcn.p,
            l: bcn.l.column_indices().to_vec(),
            h: bcn.h.column_indices().to_vec(),
        }
    }
}

impl TryFrom<ModelFile> for Bcn {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<Bcn> {
        if file.n == 0 || file.m == 0 || file.p == 0 {
            return Err(Error::EmptyMatrix);
        }
        let l = LogicalMatrix::new(file.n, file.l)?;
        let h = LogicalMatrix::new(file.p, file.h)?;
        Bcn::new(file.n, file.m, file.p, l, h)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::logic::{power_reducing_matrix, stp_logical};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    /// 7-state, 3-input sample network used across the test suite.
    pub(crate) fn seven_state() -> Bcn {
        let l = [4, 2, 2, 5, 2, 7, 5, 6, 1, 3, 2, 4, 5, 7, 7, 6, 2, 3, 1, 6, 6];
        Bcn::new(
            7,
            3,
            1,
            LogicalMatrix::new(7, l.to_vec()).unwrap(),
            LogicalMatrix::new(1, vec![1; 7]).unwrap(),
        )
        .unwrap()
    }

    /// 6-state, 3-input, 2-output sample network used across the test suite.
    pub(crate) fn six_state() -> Bcn {
        let l = [2, 4, 3, 3, 6, 5, 1, 5, 2, 2, 6, 1, 5, 1, 4, 5, 4, 6];
        Bcn::new(
            6,
            3,
            2,
            LogicalMatrix::new(6, l.to_vec()).unwrap(),
            LogicalMatrix::new(2, vec![1, 2, 2, 2, 1, 1]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn step_follows_the_selected_block() {
        let bcn = seven_state();
        let x = CanonicalVector::new(7, 6).unwrap();
        let u = CanonicalVector::new(3, 2).unwrap();
        let (next, _) = bcn.step(&x, &u).unwrap();
        assert_eq!(next.index(), 5);

        let bcn2 = six_state();
        let x = CanonicalVector::new(6, 5).unwrap();
        let u = CanonicalVector::new(3, 3).unwrap();
        let (next, y) = bcn2.step(&x, &u).unwrap();
        assert_eq!(next.index(), 4);
        assert_eq!(y.index(), 1);
    }

    #[test]
    fn step_degenerate_single_state() {
        let bcn = Bcn::new(
            1,
            1,
            1,
            LogicalMatrix::new(1, vec![1]).unwrap(),
            LogicalMatrix::new(1, vec![1]).unwrap(),
        )
        .unwrap();
        let x = CanonicalVector::new(1, 1).unwrap();
        let u = CanonicalVector::new(1, 1).unwrap();
        let (next, _) = bcn.step(&x, &u).unwrap();
        assert_eq!(next, x);
    }

    #[test]
    fn simulate_reports_t_outputs_and_replays() {
        let mut rng = StdRng::seed_from_u64(3);
        let bcn = random_bcn(5, 2, 3, &mut rng);
        let inputs = random_inputs(2, 9, &mut rng);
        let x0 = CanonicalVector::new(5, 4).unwrap();
        let trace = bcn.simulate(&x0, &inputs).unwrap();
        assert_eq!(trace.states.len(), 10);
        assert_eq!(trace.outputs.len(), 9);
        // Replaying the produced trace through step reproduces it.
        for (t, input) in inputs.iter().enumerate() {
            let (next, y) = bcn.step(&trace.states[t], input).unwrap();
            assert_eq!(next, trace.states[t + 1]);
            assert_eq!(y, trace.outputs[t]);
        }
        // T = 0 gives a single state and no outputs.
        let empty = bcn.simulate(&x0, &[]).unwrap();
        assert_eq!(empty.states.len(), 1);
        assert!(empty.outputs.is_empty());
    }

    #[test]
    fn l_tot_ors_the_blocks() {
        let bcn = six_state();
        let l_tot = bcn.l_tot();
        assert_eq!(l_tot.ones_in_col(1), vec![1, 2, 5]);
        // Every column has between 1 and M ones.
        for j in 1..=6 {
            let ones = l_tot.ones_in_col(j).len();
            assert!((1..=3).contains(&ones));
        }
        // M = 1 collapses to the single block.
        let single = Bcn::new(
            3,
            1,
            1,
            LogicalMatrix::new(3, vec![2, 3, 1]).unwrap(),
            LogicalMatrix::new(1, vec![1, 1, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(single.l_tot(), single.block(1).unwrap().to_boolean());
    }

    #[test]
    fn closed_loop_selects_columns_and_matches_stp_formula() {
        let bcn = six_state();
        let k =
            FeedbackMatrix::from_indices(3, vec![1, 1, 1, 2, 3, 2]).unwrap();
        let closed = bcn.closed_loop(&k).unwrap();
        assert_eq!(closed.successor(5), 4);

        // Constant feedback selects the corresponding block.
        for i in 1..=3 {
            let constant = FeedbackMatrix::from_indices(3, vec![i; 6]).unwrap();
            let cl = bcn.closed_loop(&constant).unwrap();
            assert_eq!(cl.l(), &bcn.block(i).unwrap());
        }

        // Column selection equals L ⋉ K ⋉ Φ_N on random instances.
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..25 {
            let bcn = random_bcn(
                rng.random_range(1..=5),
                rng.random_range(1..=3),
                1,
                &mut rng,
            );
            let (n, m) = (bcn.n_states(), bcn.n_inputs());
            let k = FeedbackMatrix::from_indices(
                m,
                (0..n).map(|_| rng.random_range(1..=m)).collect(),
            )
            .unwrap();
            let closed = bcn.closed_loop(&k).unwrap();
            let formula = stp_logical(
                &stp_logical(bcn.l(), k.matrix()).unwrap(),
                &power_reducing_matrix(n),
            )
            .unwrap();
            assert_eq!(closed.l(), &formula);
        }
    }

    #[test]
    fn equilibria_by_scan_and_by_diagonal() {
        let bcn = seven_state();
        let states: BTreeSet<usize> = bcn.model_equilibria().iter().map(|&(j, _)| j).collect();
        assert_eq!(states, BTreeSet::from([2, 3, 6, 7]));

        // Identity network: every state is an equilibrium.
        let id = Bcn::new(
            4,
            1,
            1,
            LogicalMatrix::identity(4),
            LogicalMatrix::new(1, vec![1; 4]).unwrap(),
        )
        .unwrap();
        assert_eq!(id.model_equilibria().len(), 4);

        // Agreement with the diagonal of L_tot and with a step-by-step scan.
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..25 {
            let bcn = random_bcn(
                rng.random_range(1..=6),
                rng.random_range(1..=3),
                2,
                &mut rng,
            );
            let eq = bcn.model_equilibria();
            let l_tot = bcn.l_tot();
            let diag: BTreeSet<usize> = (1..=bcn.n_states())
                .filter(|&j| l_tot.get(j, j))
                .collect();
            let states: BTreeSet<usize> = eq.iter().map(|&(j, _)| j).collect();
            assert_eq!(states, diag);
            for &(j, i) in &eq {
                let x = CanonicalVector::new(bcn.n_states(), j).unwrap();
                let u = CanonicalVector::new(bcn.n_inputs(), i).unwrap();
                assert_eq!(bcn.step(&x, &u).unwrap().0, x);
            }
        }
    }

    #[test]
    fn reachable_set_is_bfs_closure() {
        let bcn = seven_state();
        let from = CanonicalVector::new(7, 1).unwrap();
        let reach = bcn.model_reachable_set(&from).unwrap();
        assert_eq!(reach, (1..=7).collect());

        let id = Bcn::new(
            4,
            1,
            1,
            LogicalMatrix::identity(4),
            LogicalMatrix::new(1, vec![1; 4]).unwrap(),
        )
        .unwrap();
        let from = CanonicalVector::new(4, 3).unwrap();
        assert_eq!(id.model_reachable_set(&from).unwrap(), BTreeSet::from([3]));
    }

    #[test]
    fn orbit_structure() {
        // 1 -> 2 -> 3 -> 2 …: tail of length 1 into a 2-cycle.
        let bn = Bn::new(LogicalMatrix::new(3, vec![2, 3, 2]).unwrap()).unwrap();
        let (seq, cycle_start) = bn.orbit(1);
        assert_eq!(seq, vec![1, 2, 3, 2]);
        assert_eq!(cycle_start, 1);
        let (seq, cycle_start) = bn.orbit(2);
        assert_eq!(seq, vec![2, 3, 2]);
        assert_eq!(cycle_start, 0);
    }

    #[test]
    fn model_json_round_trip() {
        let bcn = six_state();
        let json = bcn.to_json();
        let back = Bcn::from_json(&json).unwrap();
        assert_eq!(back, bcn);

        assert!(Bcn::from_json("{\"N\":2,\"M\":1,\"P\":1,\"L\":[3,1],\"H\":[1,1]}").is_err());
        assert!(Bcn::from_json("{\"N\":2,\"M\":2,\"P\":1,\"L\":[1,1],\"H\":[1,1]}").is_err());
        assert!(Bcn::from_json("not json").is_err());
    }
}
