//! Declarative preparation sequences.
//!
//! A protocol is a list of [`ProtocolStep`]s run against a composite state
//! whose cavity starts in `|α⟩`. Sampled measurements draw from the supplied
//! random stream; post-selected ones force an outcome and record its
//! probability. The recipes in this module reproduce the Bell and GHZ
//! preparations, and [`branch_tree`] enumerates every sampled outcome path.

mod branches;
mod recipes;
mod step;

pub use branches::{branch_tree, path_key, BranchOutcome, BranchTree};
pub use recipes::{
    atomic_fidelity, atomic_state, bell_target, cascade_pipeline, cavity_readout_steps, epr_steps, ghz_steps,
    ghz_target, hybrid_target, prepare_epr, prepare_ghz, probe_steps, EprVariant, GhzMode, RecipeParams,
};
pub use step::{
    run_protocol, run_steps, run_steps_with, success_probability_report, validate_steps, MeasureMode,
    MeasurementRecord, ProtocolRun, ProtocolStep,
};
