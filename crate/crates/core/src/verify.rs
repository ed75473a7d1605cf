//! Independent verification against the compatible family.
//!
//! A synthesized feedback claims to work for *every* network compatible with
//! the data. This module makes that claim falsifiable: materialize the
//! compatible family (exhaustively when small, by seeded sampling plus
//! fixed extreme completions otherwise), always include the adversarial
//! completion — the one that turns every unobserved transition into a
//! self-loop trap — and run the closed loop from every initial state of
//! every model. Nothing here shares code with synthesis: checks go through
//! [`Bcn::closed_loop`] and orbit simulation only.
//!
//! With the `parallel` feature (default), model checks fan out across
//! threads; the reported counterexample is the first in model order either
//! way, so results are identical with or without the feature.

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::logic::{CanonicalVector, LogicalMatrix};
use crate::model::{Bcn, FeedbackMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeSet;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// The family B_d of networks compatible with a data set: known L-columns
/// and outputs are fixed by the knowledge mask; every free slot may hold any
/// canonical vector. Carries the sampling seed so verification verdicts are
/// reproducible.
#[derive(Clone, Debug)]
pub struct CompatibleFamily {
    n: usize,
    m: usize,
    p: usize,
    /// Template L columns; free slots hold 0 until a completion fills them.
    base_l: Vec<usize>,
    /// Template H columns; free slots hold 0.
    base_h: Vec<usize>,
    free_l: Vec<(usize, usize)>,
    free_h: Vec<usize>,
    seed: u64,
}

impl CompatibleFamily {
    pub fn new(ds: &DataSet) -> Self {
        Self::with_seed(ds, 0)
    }

    pub fn with_seed(ds: &DataSet, seed: u64) -> Self {
        let mask = ds.knowledge_mask();
        let (n, m, p) = (ds.n_states(), ds.n_inputs(), ds.n_outputs());
        let mut base_l = vec![0; n * m];
        for i in 1..=m {
            for j in 1..=n {
                if let Some(q) = mask.successor(i, j) {
                    base_l[(i - 1) * n + (j - 1)] = q;
                }
            }
        }
        let mut base_h = vec![0; n];
        for j in 1..=n {
            if let Some(o) = mask.output(j) {
                base_h[j - 1] = o;
            }
        }
        Self {
            n,
            m,
            p,
            base_l,
            base_h,
            free_l: mask.free_l_columns(),
            free_h: mask.free_h_columns(),
            seed,
        }
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

    pub fn free_l_columns(&self) -> &[(usize, usize)] {
        &self.free_l
    }

    pub fn free_h_columns(&self) -> &[usize] {
        &self.free_h
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// |B_d| = N^{#free L} · P^{#free H}; `None` when it overflows u128.
    pub fn size(&self) -> Option<u128> {
        let mut total: u128 = 1;
        for _ in &self.free_l {
            total = total.checked_mul(self.n as u128)?;
        }
        for _ in &self.free_h {
            total = total.checked_mul(self.p as u128)?;
        }
        Some(total)
    }

    /// Whether `bcn` agrees with every data-determined entry.
    pub fn contains(&self, bcn: &Bcn) -> bool {
        if bcn.n_states() != self.n || bcn.n_inputs() != self.m || bcn.n_outputs() != self.p {
            return false;
        }
        for i in 1..=self.m {
            for j in 1..=self.n {
                let known = self.base_l[(i - 1) * self.n + (j - 1)];
                if known != 0 && bcn.successor(j, i) != known {
                    return false;
                }
            }
        }
        (1..=self.n).all(|j| {
            let known = self.base_h[j - 1];
            known == 0 || bcn.output_of(j) == known
        })
    }

    /// Materialize one member from per-slot choices (1-based, aligned with
    /// `free_l_columns` / `free_h_columns`).
    fn build(&self, choice_l: &[usize], choice_h: &[usize]) -> Bcn {
        let mut l = self.base_l.clone();
        for (slot, &(i, j)) in self.free_l.iter().enumerate() {
            l[(i - 1) * self.n + (j - 1)] = choice_l[slot];
        }
        let mut h = self.base_h.clone();
        for (slot, &j) in self.free_h.iter().enumerate() {
            h[j - 1] = choice_h[slot];
        }
        Bcn::new(
            self.n,
            self.m,
            self.p,
            LogicalMatrix::new(self.n, l).expect("choices are in range"),
            LogicalMatrix::new(self.p, h).expect("choices are in range"),
        )
        .expect("mask dimensions are consistent")
    }

    fn self_loop_choices(&self) -> Vec<usize> {
        self.free_l.iter().map(|&(_, j)| j).collect()
    }

    fn enumerate_all(&self, total: usize) -> Vec<Bcn> {
        let mut models = Vec::with_capacity(total);
        let mut choice_l = vec![1usize; self.free_l.len()];
        let mut choice_h = vec![1usize; self.free_h.len()];
        loop {
            models.push(self.build(&choice_l, &choice_h));
            // Mixed-radix increment: L slots count in base N, H slots in
            // base P; done when every slot wraps.
            let mut slot = 0;
            loop {
                if slot < choice_l.len() {
                    choice_l[slot] += 1;
                    if choice_l[slot] <= self.n {
                        break;
                    }
                    choice_l[slot] = 1;
                } else if slot < choice_l.len() + choice_h.len() {
                    let h = slot - choice_l.len();
                    choice_h[h] += 1;
                    if choice_h[h] <= self.p {
                        break;
                    }
                    choice_h[h] = 1;
                } else {
                    debug_assert_eq!(models.len(), total);
                    return models;
                }
                slot += 1;
            }
        }
    }

    fn sample(&self, budget: usize) -> Vec<Bcn> {
        let mut models = Vec::with_capacity(budget);
        // Generator-agnostic extremes first: all free transitions as
        // self-loops, with the two output polarities.
        let self_loops = self.self_loop_choices();
        models.push(self.build(&self_loops, &vec![1; self.free_h.len()]));
        if self.p > 1 && !self.free_h.is_empty() {
            models.push(self.build(&self_loops, &vec![self.p; self.free_h.len()]));
        }
        models.truncate(budget);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        while models.len() < budget {
            let choice_l: Vec<usize> = (0..self.free_l.len())
                .map(|_| rng.random_range(1..=self.n))
                .collect();
            let choice_h: Vec<usize> = (0..self.free_h.len())
                .map(|_| rng.random_range(1..=self.p))
                .collect();
            models.push(self.build(&choice_l, &choice_h));
        }
        models
    }
}

/// Materialize compatible models: the whole family when its size fits the
/// budget, otherwise `budget` members — the self-loop extremes followed by
/// uniform seeded samples.
pub fn enumerate_or_sample(family: &CompatibleFamily, budget: usize) -> Vec<Bcn> {
    let budget = budget.max(1);
    match family.size() {
        Some(total) if total <= budget as u128 => family.enumerate_all(total as usize),
        _ => family.sample(budget),
    }
}

/// The hardest compatible model for reachability claims: every free
/// L-column (i, j) becomes the self-loop δ_N^j, so any state the data never
/// connect onward is a trap. Free outputs are set to differ from `avoid`
/// when possible (the witness construction for regulation necessity),
/// otherwise to the first output.
pub fn adversarial_completion(family: &CompatibleFamily, avoid: Option<&CanonicalVector>) -> Bcn {
    let h_value = match avoid {
        Some(y) if family.p > 1 && y.index() == 1 => 2,
        _ => 1,
    };
    family.build(
        &family.self_loop_choices(),
        &vec![h_value; family.free_h.len()],
    )
}

/// A concrete refutation: a compatible model and an initial state whose
/// closed-loop orbit violates the property. `trace` runs from `x0` to the
/// first repeated state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    pub model: Bcn,
    pub x0: usize,
    pub trace: Vec<usize>,
}

/// Outcome of a verification batch.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Verdict {
    pub pass: bool,
    pub models_checked: usize,
    pub counterexample: Option<Counterexample>,
    pub seed: u64,
}

impl Verdict {
    pub fn to_json_value(&self) -> Value {
        json!({
            "pass": self.pass,
            "models_checked": self.models_checked,
            "counterexample": self.counterexample.as_ref().map(|c| json!({
                "model": c.model.to_json_value(),
                "x0": c.x0,
                "trace": c.trace,
            })),
            "seed": self.seed,
        })
    }
}

/// The safety violation of `k` on one model, if any: some initial state
/// whose closed-loop orbit never enters the safe set within N steps, or
/// leaves it again afterwards. The orbit is checked up to its first repeat,
/// which covers the infinite trajectory.
pub fn safe_control_violation(
    model: &Bcn,
    k: &FeedbackMatrix,
    unsafe_set: &BTreeSet<usize>,
) -> Option<(usize, Vec<usize>)> {
    let closed = model
        .closed_loop(k)
        .expect("feedback dimensions match the model");
    for x0 in 1..=model.n_states() {
        let (seq, _) = closed.orbit(x0);
        match seq.iter().position(|j| !unsafe_set.contains(j)) {
            // Entered the safe set; it must never be left again.
            Some(t0) => {
                if seq[t0..].iter().any(|j| unsafe_set.contains(j)) {
                    return Some((x0, seq));
                }
            }
            // The whole orbit stays unsafe.
            None => return Some((x0, seq)),
        }
    }
    None
}

/// The regulation violation of `k` on one model, if any: some initial state
/// whose eventual periodic orbit contains a state with output ≠ y*.
pub fn regulation_violation(
    model: &Bcn,
    k: &FeedbackMatrix,
    y_star: &CanonicalVector,
) -> Option<(usize, Vec<usize>)> {
    debug_assert_eq!(y_star.dim(), model.n_outputs());
    let closed = model
        .closed_loop(k)
        .expect("feedback dimensions match the model");
    for x0 in 1..=model.n_states() {
        let (seq, cycle_start) = closed.orbit(x0);
        // seq[cycle_start .. len−1] is exactly the periodic orbit.
        if seq[cycle_start..seq.len() - 1]
            .iter()
            .any(|&j| model.output_of(j) != y_star.index())
        {
            return Some((x0, seq));
        }
    }
    None
}

/// Apply `violation` across models, returning the first counterexample in
/// model order (identical with and without the `parallel` feature).
fn first_violation<F>(models: &[Bcn], violation: F) -> Option<Counterexample>
where
    F: Fn(&Bcn) -> Option<(usize, Vec<usize>)> + Sync,
{
    let to_counterexample = |(model, hit): (&Bcn, Option<(usize, Vec<usize>)>)| {
        hit.map(|(x0, trace)| Counterexample {
            model: model.clone(),
            x0,
            trace,
        })
    };
    #[cfg(feature = "parallel")]
    {
        models
            .par_iter()
            .find_map_first(|m| to_counterexample((m, violation(m))))
    }
    #[cfg(not(feature = "parallel"))]
    {
        models
            .iter()
            .find_map(|m| to_counterexample((m, violation(m))))
    }
}

/// Check a safe-control feedback against every model by closed-loop
/// simulation: each orbit must enter the safe set within N steps and stay
/// there, and orbits starting safe must never visit the unsafe set.
pub fn check_safe_control(
    models: &[Bcn],
    k: &FeedbackMatrix,
    unsafe_set: &BTreeSet<usize>,
) -> Verdict {
    let counterexample = first_violation(models, |m| safe_control_violation(m, k, unsafe_set));
    Verdict {
        pass: counterexample.is_none(),
        models_checked: models.len(),
        counterexample,
        seed: 0,
    }
}

/// Check a regulation feedback against every model: each orbit's eventual
/// periodic part must emit y* everywhere.
pub fn check_output_regulation(
    models: &[Bcn],
    k: &FeedbackMatrix,
    y_star: &CanonicalVector,
) -> Verdict {
    let counterexample = first_violation(models, |m| regulation_violation(m, k, y_star));
    Verdict {
        pass: counterexample.is_none(),
        models_checked: models.len(),
        counterexample,
        seed: 0,
    }
}

fn validate_feedback(ds: &DataSet, k: &FeedbackMatrix) -> Result<()> {
    if k.n_states() != ds.n_states() || k.n_inputs() != ds.n_inputs() {
        return Err(Error::DimensionMismatch {
            context: "feedback matrix dimensions",
            left_rows: ds.n_inputs(),
            left_cols: ds.n_states(),
            right_rows: k.n_inputs(),
            right_cols: k.n_states(),
        });
    }
    Ok(())
}

/// Full safe-control verification pipeline: materialize the family at
/// `seed`/`budget`, force the adversarial completion into the batch, and
/// check. The verdict records the seed.
pub fn verify_safe_control(
    ds: &DataSet,
    k: &FeedbackMatrix,
    unsafe_set: &BTreeSet<usize>,
    budget: usize,
    seed: u64,
) -> Result<Verdict> {
    validate_feedback(ds, k)?;
    for &j in unsafe_set {
        if j < 1 || j > ds.n_states() {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: j,
                bound: ds.n_states(),
            });
        }
    }
    let family = CompatibleFamily::with_seed(ds, seed);
    let mut models = enumerate_or_sample(&family, budget);
    let adversarial = adversarial_completion(&family, None);
    if !models.contains(&adversarial) {
        models.push(adversarial);
    }
    let mut verdict = check_safe_control(&models, k, unsafe_set);
    verdict.seed = seed;
    Ok(verdict)
}

/// Full regulation verification pipeline; the adversarial completion here
/// also points every free output away from y*.
pub fn verify_output_regulation(
    ds: &DataSet,
    k: &FeedbackMatrix,
    y_star: &CanonicalVector,
    budget: usize,
    seed: u64,
) -> Result<Verdict> {
    validate_feedback(ds, k)?;
    if y_star.dim() != ds.n_outputs() {
        return Err(Error::DimensionMismatch {
            context: "target output dimension",
            left_rows: ds.n_outputs(),
            left_cols: 1,
            right_rows: y_star.dim(),
            right_cols: 1,
        });
    }
    let family = CompatibleFamily::with_seed(ds, seed);
    let mut models = enumerate_or_sample(&family, budget);
    let adversarial = adversarial_completion(&family, Some(y_star));
    if !models.contains(&adversarial) {
        models.push(adversarial);
    }
    let mut verdict = check_output_regulation(&models, k, y_star);
    verdict.seed = seed;
    Ok(verdict)
}
