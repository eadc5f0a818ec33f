//! Exchange symmetry of Bell states under every Kraus decomposition of the
//! dephasing channel.
//!
//! A decomposition `{E_μ}` splits the channel output into outcome states
//! `E_μ ρ₀ E_μ† / p_μ`. For `B1` and `B2` these are always exchange
//! symmetric. For `B3`, outcome `μ` is symmetric only when `u_μ2 = 0`, and
//! at full dephasing the symmetric outcomes carry total probability at most
//! one half.

mod optimize;
mod outcomes;
mod pattern;
mod scan;
mod states;

pub use optimize::{maximize_symmetric_probability, OptimizationResult, OptimizerConfig};
pub use outcomes::{
    asymptotic_symmetric_probability, central_amplitudes, closed_form_outcome, corner_amplitudes,
    mixed_kraus_diagonal, outcome_analysis, outcomes_for_set, symmetric_probability, OutcomeReport,
    NEGLIGIBLE_PROBABILITY, SYMMETRY_TOL,
};
pub use pattern::ConstraintPattern;
pub use scan::{
    brute_force_symmetry_scan, feasible_symmetry_scan, histogram, HistogramBin, OptimizerStats,
    ScanStats, ScanSummary, SymmetryReport, HISTOGRAM_BIN_WIDTH,
};
pub use states::{
    asymmetry, classify, is_exchange_symmetric, matches_symmetric_form, swap_expectation,
    swap_operator, BellState, SymmetricStateForm, SymmetryClass,
};
