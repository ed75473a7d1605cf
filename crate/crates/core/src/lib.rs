//! Data-driven analysis and control of Boolean control networks (BCNs).
//!
//! A BCN with N states, M inputs and P outputs is written in algebraic form
//! as a pair of logical matrices (L, H):
//!
//! ```text
//! x(t+1) = L ⋉ u(t) ⋉ x(t),      y(t) = H x(t),
//! ```
//!
//! where ⋉ is the (left) semi-tensor product and states, inputs and outputs
//! are canonical vectors δ_N^j, δ_M^i, δ_P^o. Starting from recorded
//! input/state(/output) trajectories, this crate decides what the data alone
//! determine — identifiability of (L, H), equilibria, reachability, and the
//! solvability of safe-control and output-regulation problems — and, when a
//! problem is solvable, synthesizes a state-feedback matrix whose guarantees
//! hold for *every* network compatible with the data, not just a nominal
//! model.
//!
//! Module map:
//! - [`logic`]: exact Boolean/logical linear algebra kernel (no floats);
//! - [`model`]: BCNs in algebraic form, simulation, closed loops;
//! - [`data`]: trace ingestion, data matrices, identifiability, identification;
//! - [`analysis`]: data-compatible equilibria, reachability, basins, cycles;
//! - [`synthesis`]: safe-control and output-regulation feedback synthesis;
//! - [`verify`]: enumeration/sampling of the compatible family and
//!   closed-loop model checking of synthesized feedbacks.
//!
//! Built with the default `parallel` feature, the verify module checks
//! batches of compatible models on a rayon thread pool; without it, the same
//! entry points run sequentially.

pub mod analysis;
pub mod data;
pub mod error;
pub mod logic;
pub mod model;
pub mod synthesis;
pub mod verify;

pub use analysis::{basin, cycles_within, cycles_within_capped, data_equilibria,
                   informative_for_reachability, target_states, BasinResult, Cycle, CycleSet,
                   DEFAULT_CYCLE_CAP};
pub use data::{DataColumn, DataSet, ExperimentTrace, KnowledgeMask, TraceFile};
pub use error::{Error, Result};
pub use logic::{boolean_product, hadamard, is_irreducible, khatri_rao, khatri_rao_logical,
                power_reducing_matrix, reachability_matrix, stp, stp_logical, BooleanMatrix,
                CanonicalVector, Digraph, IntMatrix, LogicalMatrix};
pub use model::{random_bcn, random_inputs, Bcn, Bn, FeedbackMatrix, SimulationTrace};
pub use synthesis::{output_regulation, regulation_data_valid, safe_control,
                    safe_control_data_valid, RegulationResult, SafeControlResult};
pub use verify::{adversarial_completion, check_output_regulation, check_safe_control,
                 enumerate_or_sample, regulation_violation, safe_control_violation,
                 verify_output_regulation, verify_safe_control, CompatibleFamily, Counterexample,
                 Verdict};
