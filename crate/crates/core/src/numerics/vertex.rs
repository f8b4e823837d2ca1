//! Vertex enumeration for polytopes inside the probability simplex.
//!
//! Incremental (double-description style) cutting: start from the simplex,
//! whose vertices are the unit vectors, and intersect with one constraint at
//! a time. New vertices arise on edges that cross the cutting hyperplane.
//! Adjacency is decided algebraically: two vertices span an edge iff the
//! constraints tight at both, together with the equalities, have rank
//! `dim - 1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest ambient dimension accepted by [`enumerate_vertices`].
pub const MAX_DIMENSION: usize = 16;
/// Vertices closer than this in the max-norm are merged.
pub const DEDUP_TOL: f64 = 1e-9;
pub const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            relation: Relation::Eq,
            rhs,
        }
    }

    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self {
            coeffs,
            relation: Relation::Le,
            rhs,
        }
    }

    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self::le(coeffs.into_iter().map(|c| -c).collect(), -rhs)
    }

    /// Signed violation: positive when the point breaks the constraint.
    pub fn violation(&self, point: &[f64]) -> f64 {
        let lhs: f64 = self.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
        match self.relation {
            Relation::Eq => (lhs - self.rhs).abs(),
            Relation::Le => lhs - self.rhs,
        }
    }

    pub fn is_satisfied(&self, point: &[f64], tol: f64) -> bool {
        self.violation(point) <= tol
    }
}

#[derive(Debug, Clone)]
struct Vertex {
    point: Vec<f64>,
    tight: Vec<usize>,
}

/// Returns the extreme points of `{x in simplex : constraints}`.
///
/// The simplex constraints (`x >= 0`, `sum x = 1`) are always part of the
/// system, so the result is bounded. An empty list means the constraints are
/// infeasible.
pub fn enumerate_vertices(dim: usize, constraints: &[LinearConstraint]) -> Result<Vec<Vec<f64>>> {
    if dim == 0 {
        return Err(Error::MalformedDimensions("dimension must be positive".into()));
    }
    if dim > MAX_DIMENSION {
        return Err(Error::SizeLimit {
            what: "vertex enumeration dimension",
            limit: MAX_DIMENSION,
            got: dim,
        });
    }
    if let Some((i, c)) = constraints
        .iter()
        .enumerate()
        .find(|(_, c)| c.coeffs.len() != dim)
    {
        return Err(Error::MalformedDimensions(format!(
            "constraint {i} has {} coefficients, expected {dim}",
            c.coeffs.len()
        )));
    }
    if constraints
        .iter()
        .any(|c| !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::MalformedDimensions("non-finite constraint coefficient".into()));
    }

    // Inequality rows `a·x <= b`; the first `dim` are the nonnegativity rows.
    let mut ineqs: Vec<(Vec<f64>, f64)> = (0..dim)
        .map(|i| {
            let mut row = vec![0.0; dim];
            row[i] = -1.0;
            (row, 0.0)
        })
        .collect();
    let mut eqs: Vec<(Vec<f64>, f64)> = vec![(vec![1.0; dim], 1.0)];

    let mut vertices: Vec<Vertex> = (0..dim)
        .map(|i| {
            let mut point = vec![0.0; dim];
            point[i] = 1.0;
            Vertex {
                point,
                tight: (0..dim).filter(|&j| j != i).collect(),
            }
        })
        .collect();

    for c in constraints {
        if vertices.is_empty() {
            break;
        }
        let scale = 1.0 + c.rhs.abs() + c.coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-11 * scale;
        let values: Vec<f64> = vertices
            .iter()
            .map(|v| {
                let lhs: f64 = c.coeffs.iter().zip(&v.point).map(|(a, x)| a * x).sum();
                lhs - c.rhs
            })
            .collect();
        let pos: Vec<usize> = (0..vertices.len()).filter(|&k| values[k] > eps).collect();
        let neg: Vec<usize> = (0..vertices.len()).filter(|&k| values[k] < -eps).collect();

        let eq_rank = rank(&eqs.iter().map(|(r, _)| r.clone()).collect::<Vec<_>>(), dim);
        let new_id = ineqs.len();
        let mut next = Vec::new();
        for k in 0..vertices.len() {
            let v = &vertices[k];
            if values[k].abs() <= eps {
                let mut tight = v.tight.clone();
                if c.relation == Relation::Le {
                    tight.push(new_id);
                }
                next.push(Vertex {
                    point: v.point.clone(),
                    tight,
                });
            } else if values[k] < 0.0 && c.relation == Relation::Le {
                next.push(v.clone());
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common = intersect_sorted(&vertices[p].tight, &vertices[q].tight);
                if common.len() + eq_rank + 1 < dim {
                    continue;
                }
                let mut rows: Vec<Vec<f64>> = eqs.iter().map(|(r, _)| r.clone()).collect();
                rows.extend(common.iter().map(|&t| ineqs[t].0.clone()));
                if rank(&rows, dim) != dim - 1 {
                    continue;
                }
                let (vp, vq) = (values[p], values[q]);
                let lambda = vp / (vp - vq);
                let point: Vec<f64> = vertices[p]
                    .point
                    .iter()
                    .zip(&vertices[q].point)
                    .map(|(a, b)| a + lambda * (b - a))
                    .collect();
                let mut tight = common;
                if c.relation == Relation::Le {
                    tight.push(new_id);
                }
                next.push(Vertex { point, tight });
            }
        }
        match c.relation {
            Relation::Le => ineqs.push((c.coeffs.clone(), c.rhs)),
            Relation::Eq => eqs.push((c.coeffs.clone(), c.rhs)),
        }
        for v in &mut next {
            v.tight.sort_unstable();
            v.tight.dedup();
        }
        vertices = dedup_vertices(next);
    }

    let mut out = Vec::with_capacity(vertices.len());
    for v in vertices {
        let point = polish(&v, &eqs, &ineqs, dim);
        out.push(point);
    }
    let out = dedup_points(out, DEDUP_TOL);
    for p in &out {
        if let Some(c) = constraints
            .iter()
            .find(|c| !c.is_satisfied(p, CONSTRAINT_TOL))
        {
            return Err(Error::NumericalFailure(format!(
                "enumerated vertex violates a constraint by {:.3e}",
                c.violation(p)
            )));
        }
    }
    Ok(out)
}

/// Re-solves the active system of a vertex to remove accumulated drift.
fn polish(v: &Vertex, eqs: &[(Vec<f64>, f64)], ineqs: &[(Vec<f64>, f64)], dim: usize) -> Vec<f64> {
    let rows: Vec<&(Vec<f64>, f64)> = eqs.iter().chain(v.tight.iter().map(|&t| &ineqs[t])).collect();
    let a = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i].0[j]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let mut point = match a.svd(true, true).solve(&b, 1e-12) {
        Ok(x) if x.iter().zip(&v.point).all(|(p, q)| (p - q).abs() < 1e-6) => {
            x.iter().copied().collect()
        }
        _ => v.point.clone(),
    };
    for &t in &v.tight {
        if t < dim {
            point[t] = 0.0;
        }
    }
    for x in &mut point {
        if x.abs() < 1e-15 {
            *x = 0.0;
        } else if (*x - 1.0).abs() < 1e-13 {
            *x = 1.0;
        }
    }
    point
}

fn dedup_vertices(vertices: Vec<Vertex>) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if let Some(existing) = out
            .iter_mut()
            .find(|w| max_abs_diff(&w.point, &v.point) <= DEDUP_TOL)
        {
            // Same point reached twice: keep the union of tight sets.
            existing.tight.extend(v.tight);
            existing.tight.sort_unstable();
            existing.tight.dedup();
        } else {
            out.push(v);
        }
    }
    out
}

/// Removes points within `tol` (max-norm) of an earlier point.
pub fn dedup_points(points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| max_abs_diff(q, &p) <= tol) {
            out.push(p);
        }
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn rank(rows: &[Vec<f64>], dim: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    m.rank(1e-9)
}
