//! Decision making with credal sets on finite spaces.
//!
//! An agent observes `X`, must pick an action, and is scored by a loss that
//! depends on the unobserved `Y`. Uncertainty about the joint law of
//! `(X, Y)` is a closed convex set `P` of distributions. The crate computes
//! minimax decision rules before and after observing `X`, solves the
//! corresponding bookie-versus-agent games with checkable certificates, and
//! analyses update rules for calibration and sharpness.

pub mod credal;
pub mod decision;
mod error;
pub mod games;
pub mod numerics;
pub mod prob;
pub mod updating;

pub use credal::{CredalSet, DilationReport, HullSet};
pub use decision::{
    aposteriori_minimax, apriori_minimax, check_conditioning_optimal, check_ignoring_optimal, walley_compare,
    ConditioningReport, DecisionRule, HypothesisVerdict, IgnoringReport, MinimaxResult, WalleyComparison,
    WalleyOrder,
};
pub use error::{Error, Result};
pub use games::{
    solve_p_game, solve_px_game, time_inconsistency_report, BookieMixture, Equilibrium, EquilibriumCertificate,
    TimeInconsistencyReport,
};
pub use prob::{expected_loss, Event, JointDist, LossFn, SpaceSpec};
pub use updating::{
    c_conditioning, check_calibration, compare_narrowness, rule_from_update, sharp_search, CalibrationReport,
    Narrowness, Partition, Provenance, SharpSearchResult, UpdateRuleTable,
};
