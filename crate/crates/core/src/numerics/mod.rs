//! Linear programming and polytope kernel.

mod lp;
mod polytope;
mod vertex;

pub use lp::{
    lp_audit, reset_lp_audit, solve_lp, Bound, LpAudit, LinearProgram, LpDiagnostics, LpSolution, LpStatus,
    COMPLEMENTARY_SLACKNESS_TOL, DUALITY_GAP_TOL, PRIMAL_FEASIBILITY_TOL,
};
pub use polytope::{membership_residual, polytope_contains, VPolytope, MEMBERSHIP_TOL};
pub use vertex::{
    dedup_points, enumerate_vertices, max_abs_diff, LinearConstraint, Relation, CONSTRAINT_TOL,
    DEDUP_TOL, MAX_DIMENSION,
};
