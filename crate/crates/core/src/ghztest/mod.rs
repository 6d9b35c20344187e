//! Mermin-style GHZ test.
//!
//! Observables are dense matrices on a composite [`Space`](crate::hilbert::Space).
//! Each shot applies `K` to `A1` and `A2` and reads them out, then reads the
//! third party: `A3` after `K` in atomic mode, or the cavity through a
//! Ramsey-prepared reader atom and a post-selected probe in hybrid mode.
//! A detected `g` counts as the `σx = +1` eigenvalue and `f` as `−1`.

mod lhv;
mod observable;
mod run;

pub use lhv::{lhv_prediction, lhv_scan, qm_prediction, LhvAssignment, LhvScan};
pub use observable::{
    build_cavity_sigma_x, build_mermin, build_pauli, expectation, expectation_complex, expectation_density, Axis,
    Mermin, Observable, ObservableLabel,
};
pub use run::{
    allowed_branches, analysis_steps, branch_product, expected_branch_probabilities, ghz_branch_tree, level_letter,
    run_ghz_test, shot_rng, GhzTestResult, Verdict,
};
