//! Polytopes held as vertex lists, with LP-based membership.

use crate::error::{Error, Result};

use super::lp::{solve_lp, LinearProgram, LpStatus};
use super::vertex::{dedup_points, DEDUP_TOL};

/// Membership tolerance for convex-combination tests.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Smallest max-norm distance between `query` and the convex hull of
/// `vertices`, found by
/// `minimize t  s.t.  -t <= (V·λ - q)_i <= t,  λ in simplex`.
pub fn membership_residual(vertices: &[Vec<f64>], query: &[f64]) -> Result<f64> {
    let Some(first) = vertices.first() else {
        return Err(Error::MalformedDimensions("empty vertex list".into()));
    };
    let dim = first.len();
    if query.len() != dim || vertices.iter().any(|v| v.len() != dim) {
        return Err(Error::MalformedDimensions(format!(
            "query of length {} against vertices of length {dim}",
            query.len()
        )));
    }
    let n = vertices.len();
    // Variables: λ_0..λ_{n-1}, t.
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::new(objective);
    let mut simplex_row = vec![1.0; n + 1];
    simplex_row[n] = 0.0;
    lp.add_eq(simplex_row, 1.0);
    for i in 0..dim {
        let mut upper: Vec<f64> = vertices.iter().map(|v| v[i]).collect();
        let mut lower: Vec<f64> = upper.iter().map(|v| -v).collect();
        upper.push(-1.0);
        lower.push(-1.0);
        lp.add_le(upper, query[i]);
        lp.add_le(lower, -query[i]);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective.max(0.0)),
        status => Err(Error::NumericalFailure(format!(
            "membership program reported {status}"
        ))),
    }
}

/// True iff `query` is a convex combination of `vertices` within
/// [`MEMBERSHIP_TOL`].
pub fn polytope_contains(vertices: &[Vec<f64>], query: &[f64]) -> Result<bool> {
    Ok(membership_residual(vertices, query)? <= MEMBERSHIP_TOL)
}

/// A polytope given by an irredundant vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl VPolytope {
    /// Builds the hull of `points`, dropping duplicates and points that are
    /// convex combinations of the others.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::MalformedDimensions("empty point list".into()));
        };
        let dim = first.len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::MalformedDimensions("points of mixed length".into()));
        }
        let mut kept = dedup_points(points, DEDUP_TOL);
        let mut i = 0;
        while i < kept.len() && kept.len() > 1 {
            let others: Vec<Vec<f64>> = kept
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, p)| p.clone())
                .collect();
            if membership_residual(&others, &kept[i])? <= MEMBERSHIP_TOL {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(Self {
            dim,
            vertices: kept,
        })
    }

    /// Wraps a list already known to be irredundant.
    pub(crate) fn from_irredundant(vertices: Vec<Vec<f64>>) -> Self {
        let dim = vertices.first().map_or(0, |v| v.len());
        Self { dim, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn residual(&self, query: &[f64]) -> Result<f64> {
        membership_residual(&self.vertices, query)
    }

    pub fn contains(&self, query: &[f64]) -> Result<bool> {
        Ok(self.residual(query)? <= MEMBERSHIP_TOL)
    }

    /// Largest membership residual of one of our vertices in `other`.
    pub fn excess_over(&self, other: &VPolytope) -> Result<f64> {
        let mut worst = 0.0f64;
        for v in &self.vertices {
            worst = worst.max(other.residual(v)?);
        }
        Ok(worst)
    }

    pub fn is_subset_of(&self, other: &VPolytope) -> Result<bool> {
        self.is_subset_within(other, MEMBERSHIP_TOL)
    }

    pub fn is_subset_within(&self, other: &VPolytope, tol: f64) -> Result<bool> {
        for v in &self.vertices {
            if other.residual(v)? > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn set_eq(&self, other: &VPolytope) -> Result<bool> {
        Ok(self.is_subset_of(other)? && other.is_subset_of(self)?)
    }
}
