//! Experiment traces, data matrices and identification.
//!
//! A recorded experiment i is a state sequence x(0…T_i), the applied inputs
//! u(0…T_i−1) and, when measured, the outputs y(0…T_i−1). Note the output
//! span: y(T_i) is never recorded. Stacking all experiments column by column
//! (one column per transition, never across trace boundaries) gives the data
//! matrices
//!
//! ```text
//! X_p = [x(0) … x(T−1)]   X_f = [x(1) … x(T)]   U_p, Y_p analogously,
//! ```
//!
//! with T the total number of recorded transitions. Everything the crate
//! derives from data — the set of networks compatible with it, identifiability,
//! reachability, synthesis — is a function of these matrices.
//!
//! The [`KnowledgeMask`] is the semantic digest of the data: which columns of
//! L (which (input, state) pairs) and which outputs have been observed, and
//! what they are. Duplicate observations are deduplicated here but retained
//! in the matrices.

use crate::error::{Error, Result};
use crate::logic::{boolean_product, khatri_rao, BooleanMatrix, CanonicalVector, LogicalMatrix};
use crate::model::Bcn;
use serde::{Deserialize, Serialize};

/// One recorded experiment: T+1 states, T inputs and, when the output
/// channel was logged, T outputs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExperimentTrace {
    states: Vec<CanonicalVector>,
    inputs: Vec<CanonicalVector>,
    outputs: Option<Vec<CanonicalVector>>,
}

impl ExperimentTrace {
    pub fn new(
        states: Vec<CanonicalVector>,
        inputs: Vec<CanonicalVector>,
        outputs: Option<Vec<CanonicalVector>>,
    ) -> Result<Self> {
        if states.is_empty() || states.len() != inputs.len() + 1 {
            return Err(Error::TraceLengthMismatch {
                states: states.len(),
                inputs: inputs.len(),
                outputs: outputs.as_ref().map(Vec::len),
            });
        }
        if let Some(outs) = &outputs {
            if outs.len() != inputs.len() {
                return Err(Error::TraceLengthMismatch {
                    states: states.len(),
                    inputs: inputs.len(),
                    outputs: Some(outs.len()),
                });
            }
        }
        let n = states[0].dim();
        if states.iter().any(|s| s.dim() != n) {
            return Err(Error::DimensionMismatch {
                context: "state dimensions within a trace",
                left_rows: n,
                left_cols: 1,
                right_rows: states.iter().map(CanonicalVector::dim).max().unwrap_or(0),
                right_cols: 1,
            });
        }
        if let Some(u) = inputs.iter().find(|u| u.dim() != inputs[0].dim()) {
            return Err(Error::DimensionMismatch {
                context: "input dimensions within a trace",
                left_rows: inputs[0].dim(),
                left_cols: 1,
                right_rows: u.dim(),
                right_cols: 1,
            });
        }
        if let Some(outs) = &outputs {
            if let Some(y) = outs.iter().find(|y| y.dim() != outs[0].dim()) {
                return Err(Error::DimensionMismatch {
                    context: "output dimensions within a trace",
                    left_rows: outs[0].dim(),
                    left_cols: 1,
                    right_rows: y.dim(),
                    right_cols: 1,
                });
            }
        }
        Ok(Self {
            states,
            inputs,
            outputs,
        })
    }

    /// Number of recorded transitions T (may be 0 for a bare initial state).
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn states(&self) -> &[CanonicalVector] {
        &self.states
    }

    pub fn inputs(&self) -> &[CanonicalVector] {
        &self.inputs
    }

    pub fn outputs(&self) -> Option<&[CanonicalVector]> {
        self.outputs.as_deref()
    }
}

/// One column of the data matrices: the snapshot
/// (x(t), u(t), x(t+1), y(t)) at some time t of some experiment.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DataColumn {
    /// 1-based state index of the X_p column.
    pub x: usize,
    /// 1-based input index of the U_p column.
    pub u: usize,
    /// 1-based state index of the X_f column.
    pub x_next: usize,
    /// 1-based output index of the Y_p column, when outputs were recorded.
    pub y: Option<usize>,
}

/// Which columns of L and which outputs the data pin down.
///
/// A pair (L̃, H̃) is compatible with the data exactly when it matches every
/// known (input, state) → successor entry and every known state → output
/// entry recorded here; all remaining columns are unconstrained.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KnowledgeMask {
    n: usize,
    m: usize,
    p: usize,
    /// Slot (i−1)·N + (j−1) holds the observed successor of state j under
    /// input i, if that pair ever occurs in the data.
    successors: Vec<Option<usize>>,
    /// Slot j−1 holds the observed output of state j, if recorded.
    outputs: Vec<Option<usize>>,
}

impl KnowledgeMask {
    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn n_inputs(&self) -> usize {
        self.m
    }

    pub fn n_outputs(&self) -> usize {
        self.p
    }

    /// Whether the pair (input i, state j) occurs in the data.
    pub fn known(&self, input: usize, state: usize) -> bool {
        self.successor(input, state).is_some()
    }

    /// Observed successor of `state` under `input`, if any (all 1-based).
    pub fn successor(&self, input: usize, state: usize) -> Option<usize> {
        self.successors[(input - 1) * self.n + (state - 1)]
    }

    /// Observed output of `state`, if any (1-based).
    pub fn output(&self, state: usize) -> Option<usize> {
        self.outputs[state - 1]
    }

    /// Number of distinct known L-columns.
    pub fn known_count(&self) -> usize {
        self.successors.iter().filter(|s| s.is_some()).count()
    }

    /// The (input, state) pairs whose L-column the data do not determine,
    /// ordered by column index (i−1)N+j.
    pub fn free_l_columns(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.m {
            for j in 1..=self.n {
                if !self.known(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The states whose output the data do not determine, ascending.
    pub fn free_h_columns(&self) -> Vec<usize> {
        (1..=self.n).filter(|&j| self.output(j).is_none()).collect()
    }
}

/// An assembled, validated data set: the experiments, the data matrices and
/// the knowledge mask. Immutable once built.
#[derive(Clone, Debug)]
pub struct DataSet {
    n: usize,
    m: usize,
    p: usize,
    traces: Vec<ExperimentTrace>,
    xp: LogicalMatrix,
    xf: LogicalMatrix,
    up: LogicalMatrix,
    yp: Option<LogicalMatrix>,
    mask: KnowledgeMask,
}

impl DataSet {
    /// Stack the experiments into data matrices, validating as it goes.
    ///
    /// The output dimension P is read off the recorded outputs; output-free
    /// data get P = 1 (the only output map on one output value is constant,
    /// so nothing about it is lost). Use [`DataSet::assemble_with_output_dim`]
    /// when an output-free problem has a declared P > 1.
    ///
    /// Errors: empty experiment list, an experiment without transitions,
    /// dimension mismatches across experiments, mixed output-recorded and
    /// output-free experiments, and data inconsistent with a single
    /// deterministic network (the compatible family would be empty).
    pub fn assemble(traces: Vec<ExperimentTrace>) -> Result<DataSet> {
        let p = traces
            .first()
            .and_then(|t| t.outputs())
            .map(|o| o[0].dim());
        Self::assemble_inner(traces, p)
    }

    /// [`DataSet::assemble`] with an explicit output dimension, for
    /// output-free data describing a P-output system. When the traces do
    /// record outputs, their dimension must equal `p`.
    pub fn assemble_with_output_dim(traces: Vec<ExperimentTrace>, p: usize) -> Result<DataSet> {
        if p == 0 {
            return Err(Error::EmptyMatrix);
        }
        Self::assemble_inner(traces, Some(p))
    }

    fn assemble_inner(traces: Vec<ExperimentTrace>, p: Option<usize>) -> Result<DataSet> {
        if traces.is_empty() || traces.iter().any(ExperimentTrace::is_empty) {
            return Err(Error::EmptyData);
        }
        let n = traces[0].states()[0].dim();
        let m = traces[0].inputs()[0].dim();
        let has_outputs = traces[0].outputs().is_some();
        let p = p.unwrap_or(1);
        for t in &traces {
            if t.states()[0].dim() != n || t.inputs()[0].dim() != m {
                return Err(Error::DimensionMismatch {
                    context: "experiment dimensions across the data set",
                    left_rows: n,
                    left_cols: m,
                    right_rows: t.states()[0].dim(),
                    right_cols: t.inputs()[0].dim(),
                });
            }
            if t.outputs().is_some() != has_outputs {
                return Err(Error::MixedOutputs);
            }
            if let Some(outs) = t.outputs() {
                if outs[0].dim() != p {
                    return Err(Error::DimensionMismatch {
                        context: "output dimension across the data set",
                        left_rows: p,
                        left_cols: 1,
                        right_rows: outs[0].dim(),
                        right_cols: 1,
                    });
                }
            }
        }

        let total: usize = traces.iter().map(ExperimentTrace::len).sum();
        let mut xp = Vec::with_capacity(total);
        let mut xf = Vec::with_capacity(total);
        let mut up = Vec::with_capacity(total);
        let mut yp = has_outputs.then(|| Vec::with_capacity(total));
        for t in &traces {
            for k in 0..t.len() {
                xp.push(t.states()[k].index());
                xf.push(t.states()[k + 1].index());
                up.push(t.inputs()[k].index());
                if let (Some(yp), Some(outs)) = (yp.as_mut(), t.outputs()) {
                    yp.push(outs[k].index());
                }
            }
        }
        let xp = LogicalMatrix::new(n, xp)?;
        let xf = LogicalMatrix::new(n, xf)?;
        let up = LogicalMatrix::new(m, up)?;
        let yp = yp.map(|y| LogicalMatrix::new(p, y)).transpose()?;

        // Build the knowledge mask; inconsistency is a hard error because no
        // deterministic network could have produced such data.
        let mut successors = vec![None; n * m];
        let mut outputs = vec![None; n];
        for k in 0..total {
            let (j, i, q) = (
                xp.column_indices()[k],
                up.column_indices()[k],
                xf.column_indices()[k],
            );
            let slot = &mut successors[(i - 1) * n + (j - 1)];
            match *slot {
                None => *slot = Some(q),
                Some(prev) if prev != q => {
                    return Err(Error::InconsistentData {
                        state: j,
                        input: i,
                        first: prev,
                        second: q,
                    })
                }
                Some(_) => {}
            }
            if let Some(yp) = &yp {
                let o = yp.column_indices()[k];
                let slot = &mut outputs[j - 1];
                match *slot {
                    None => *slot = Some(o),
                    Some(prev) if prev != o => {
                        return Err(Error::InconsistentOutputs {
                            state: j,
                            first: prev,
                            second: o,
                        })
                    }
                    Some(_) => {}
                }
            }
        }

        let mask = KnowledgeMask {
            n,
            m,
            p,
            successors,
            outputs,
        };
        Ok(DataSet {
            n,
            m,
            p,
            traces,
            xp,
            xf,
            up,
            yp,
            mask,
        })
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

    /// Total number of recorded transitions T (columns of the data matrices).
    pub fn len(&self) -> usize {
        self.xp.cols()
    }

    pub fn is_empty(&self) -> bool {
        false // assemble rejects empty data
    }

    pub fn traces(&self) -> &[ExperimentTrace] {
        &self.traces
    }

    pub fn xp(&self) -> &LogicalMatrix {
        &self.xp
    }

    pub fn xf(&self) -> &LogicalMatrix {
        &self.xf
    }

    pub fn up(&self) -> &LogicalMatrix {
        &self.up
    }

    pub fn yp(&self) -> Option<&LogicalMatrix> {
        self.yp.as_ref()
    }

    pub fn has_outputs(&self) -> bool {
        self.yp.is_some()
    }

    pub fn knowledge_mask(&self) -> &KnowledgeMask {
        &self.mask
    }

    /// Column `k` (1-based) of the data matrices as plain indices.
    pub fn column(&self, k: usize) -> Result<DataColumn> {
        Ok(DataColumn {
            x: self.xp.col_index(k)?,
            u: self.up.col_index(k)?,
            x_next: self.xf.col_index(k)?,
            y: self
                .yp
                .as_ref()
                .map(|yp| yp.col_index(k))
                .transpose()?,
        })
    }

    /// Whether the data determine (L, H) uniquely: true iff the Khatri-Rao
    /// product U_p * X_p has no zero row, i.e. every (input, state) pair
    /// occurs in the data.
    pub fn is_informative_for_identifiability(&self) -> bool {
        let kr = khatri_rao(&self.up.to_boolean(), &self.xp.to_boolean())
            .expect("U_p and X_p have equally many columns");
        (1..=self.n * self.m).all(|r| kr.row_has_any(r))
    }

    /// Recover the unique network compatible with informative data.
    ///
    /// L = X_f ⊙_B (U_p * X_p)ᵀ, evaluated over the Boolean semiring. H is
    /// read off column-wise: the output of state j is the Y_p entry at any
    /// column with X_p column δ_N^j (informativity guarantees every state
    /// appears; consistency was checked at assembly). This equals the
    /// pseudo-inverse formula H = Y_p X_p^#, since for a full-row-rank
    /// logical X_p the product Y_p X_p^# averages identical observations —
    /// but stays exact, with no real arithmetic.
    ///
    /// Output-free data identify H only when P = 1 (the constant map);
    /// otherwise this returns [`Error::MissingOutputs`].
    pub fn identify(&self) -> Result<Bcn> {
        if !self.is_informative_for_identifiability() {
            return Err(Error::NotInformative);
        }
        let kr = khatri_rao(&self.up.to_boolean(), &self.xp.to_boolean())?;
        let l = boolean_product(&self.xf.to_boolean(), &kr.transpose())?
            .try_to_logical()
            .expect("informative, consistent data give exactly one successor per column");
        let h = match (&self.yp, self.p) {
            (Some(yp), _) => {
                let mut cols = vec![0usize; self.n];
                for k in 1..=self.len() {
                    let j = self.xp.col_index(k)?;
                    if cols[j - 1] == 0 {
                        cols[j - 1] = yp.col_index(k)?;
                    }
                }
                LogicalMatrix::new(self.p, cols)?
            }
            (None, 1) => LogicalMatrix::new(1, vec![1; self.n])?,
            (None, _) => return Err(Error::MissingOutputs),
        };
        Bcn::new(self.n, self.m, self.p, l, h)
    }

    /// The data-compatible one-step transition matrix
    /// L_tot^d = X_f ⊙_B X_pᵀ: entry (i, j) is 1 iff the transition j → i
    /// occurs in the data under some input. An under-approximation of the
    /// true L_tot; columns of never-visited states are zero.
    pub fn l_tot_d(&self) -> BooleanMatrix {
        boolean_product(&self.xf.to_boolean(), &self.xp.to_boolean().transpose())
            .expect("X_f and X_pᵀ are conformable")
    }

    /// Serialize back to the trace-file format.
    pub fn to_trace_file(&self) -> TraceFile {
        TraceFile {
            n: self.n,
            m: self.m,
            p: self.p,
            experiments: self.traces.clone(),
        }
    }
}

/// The on-disk trace format: dimensions plus one `{x, u, y?}` record per
/// experiment, all indices 1-based, `y` optional (uniformly present or
/// absent across experiments).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceFile {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub experiments: Vec<ExperimentTrace>,
}

#[derive(Serialize, Deserialize)]
struct RawTraceFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "P")]
    p: usize,
    experiments: Vec<RawExperiment>,
}

#[derive(Serialize, Deserialize)]
struct RawExperiment {
    x: Vec<usize>,
    u: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<Vec<usize>>,
}

impl TraceFile {
    pub fn from_json(s: &str) -> Result<TraceFile> {
        let raw: RawTraceFile = serde_json::from_str(s)?;
        if raw.n == 0 || raw.m == 0 || raw.p == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut experiments = Vec::with_capacity(raw.experiments.len());
        for e in raw.experiments {
            let states = e
                .x
                .iter()
                .map(|&j| CanonicalVector::new(raw.n, j))
                .collect::<Result<Vec<_>>>()?;
            let inputs = e
                .u
                .iter()
                .map(|&i| CanonicalVector::new(raw.m, i))
                .collect::<Result<Vec<_>>>()?;
            let outputs = e
                .y
                .map(|ys| {
                    ys.iter()
                        .map(|&o| CanonicalVector::new(raw.p, o))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            experiments.push(ExperimentTrace::new(states, inputs, outputs)?);
        }
        Ok(TraceFile {
            n: raw.n,
            m: raw.m,
            p: raw.p,
            experiments,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = RawTraceFile {
            n: self.n,
            m: self.m,
            p: self.p,
            experiments: self
                .experiments
                .iter()
                .map(|t| RawExperiment {
                    x: t.states().iter().map(CanonicalVector::index).collect(),
                    u: t.inputs().iter().map(CanonicalVector::index).collect(),
                    y: t.outputs()
                        .map(|o| o.iter().map(CanonicalVector::index).collect()),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("trace file serializes")
    }

    /// Validate and assemble into a [`DataSet`].
    pub fn into_dataset(self) -> Result<DataSet> {
        DataSet::assemble_with_output_dim(self.experiments, self.p)
    }
}
