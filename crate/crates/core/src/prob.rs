//! Finite probability primitives on a product space `X × Y`.
//!
//! Joint weights are stored row-major: cell `(x, y)` lives at `x * |Y| + y`.

use std::collections::HashSet;

use crate::decision::DecisionRule;
use crate::error::{Error, Result};

/// Label sets are capped at this many entries.
pub const MAX_LABELS: usize = 16;
/// An event with at most this much mass counts as having probability zero.
pub const POSITIVE_TOL: f64 = 1e-12;
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Labels of the observation space `X`, outcome space `Y` and action set `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSpec {
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    pub a_labels: Vec<String>,
}

impl SpaceSpec {
    pub fn new(x_labels: Vec<String>, y_labels: Vec<String>, a_labels: Vec<String>) -> Result<Self> {
        for (name, labels) in [("X", &x_labels), ("Y", &y_labels), ("A", &a_labels)] {
            if labels.is_empty() {
                return Err(Error::InvalidSpace(format!("{name} has no labels")));
            }
            if labels.len() > MAX_LABELS {
                return Err(Error::SizeLimit {
                    what: "label count",
                    limit: MAX_LABELS,
                    got: labels.len(),
                });
            }
            let mut seen = HashSet::new();
            if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
                return Err(Error::InvalidSpace(format!("duplicate {name} label '{dup}'")));
            }
        }
        Ok(Self {
            x_labels,
            y_labels,
            a_labels,
        })
    }

    /// Convenience constructor with labels `0..n`.
    pub fn indexed(nx: usize, ny: usize, na: usize) -> Result<Self> {
        let labels = |n: usize| (0..n).map(|i| i.to_string()).collect();
        Self::new(labels(nx), labels(ny), labels(na))
    }

    pub fn nx(&self) -> usize {
        self.x_labels.len()
    }

    pub fn ny(&self) -> usize {
        self.y_labels.len()
    }

    pub fn na(&self) -> usize {
        self.a_labels.len()
    }

    pub fn joint_dim(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn x_index(&self, label: &str) -> Option<usize> {
        self.x_labels.iter().position(|l| l == label)
    }

    pub fn y_index(&self, label: &str) -> Option<usize> {
        self.y_labels.iter().position(|l| l == label)
    }

    pub fn a_index(&self, label: &str) -> Option<usize> {
        self.a_labels.iter().position(|l| l == label)
    }
}

/// Probability distribution on `X × Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    nx: usize,
    ny: usize,
    weights: Vec<f64>,
}

impl JointDist {
    pub fn new(nx: usize, ny: usize, weights: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || weights.len() != nx * ny {
            return Err(Error::MalformedDimensions(format!(
                "{} weights for a {nx}x{ny} space",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -POSITIVE_TOL) {
            return Err(Error::InvalidDistribution(format!("weight {w} is negative or non-finite")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        let weights = weights.into_iter().map(|w| w.max(0.0)).collect();
        Ok(Self { nx, ny, weights })
    }

    pub fn uniform(nx: usize, ny: usize) -> Self {
        let n = nx * ny;
        Self {
            nx,
            ny,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(nx: usize, ny: usize, x: usize, y: usize) -> Self {
        let mut weights = vec![0.0; nx * ny];
        weights[x * ny + y] = 1.0;
        Self { nx, ny, weights }
    }

    /// `Pr(x, y) = m(x) · q(y)`.
    pub fn product(m: &[f64], q: &[f64]) -> Result<Self> {
        let weights = m.iter().flat_map(|mx| q.iter().map(move |qy| mx * qy)).collect();
        Self::new(m.len(), q.len(), weights)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.weights[x * self.ny + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.weights[x * self.ny..(x + 1) * self.ny]
    }

    pub fn prob(&self, e: &Event) -> Result<f64> {
        self.check_event(e)?;
        Ok(self
            .weights
            .iter()
            .zip(&e.cells)
            .filter(|(_, &inside)| inside)
            .map(|(w, _)| w)
            .sum())
    }

    /// `Pr(X = x)`.
    pub fn prob_x(&self, x: usize) -> f64 {
        self.row(x).iter().sum()
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.nx).map(|x| self.prob_x(x)).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.ny];
        for x in 0..self.nx {
            for (o, w) in out.iter_mut().zip(self.row(x)) {
                *o += w;
            }
        }
        out
    }

    /// `Pr | E`: mass outside `e` removed, the rest renormalized.
    pub fn condition(&self, e: &Event) -> Result<JointDist> {
        let mass = self.prob(e)?;
        if mass <= POSITIVE_TOL {
            return Err(Error::ZeroProbabilityEvent { mass });
        }
        let weights = self
            .weights
            .iter()
            .zip(&e.cells)
            .map(|(w, &inside)| if inside { w / mass } else { 0.0 })
            .collect();
        Ok(JointDist {
            nx: self.nx,
            ny: self.ny,
            weights,
        })
    }

    /// Convex combination `Σ_k c_k · d_k`.
    pub fn mixture(dists: &[&JointDist], coeffs: &[f64]) -> Result<JointDist> {
        let Some(first) = dists.first() else {
            return Err(Error::MalformedDimensions("empty mixture".into()));
        };
        if dists.len() != coeffs.len() {
            return Err(Error::MalformedDimensions("mixture weight count".into()));
        }
        let mut weights = vec![0.0; first.weights.len()];
        for (d, c) in dists.iter().zip(coeffs) {
            if d.nx != first.nx || d.ny != first.ny {
                return Err(Error::MalformedDimensions("mixture of different spaces".into()));
            }
            for (w, v) in weights.iter_mut().zip(&d.weights) {
                *w += c * v;
            }
        }
        JointDist::new(first.nx, first.ny, weights)
    }

    fn check_event(&self, e: &Event) -> Result<()> {
        if e.nx != self.nx || e.ny != self.ny {
            return Err(Error::MalformedDimensions(format!(
                "event over {}x{} applied to a {}x{} distribution",
                e.nx, e.ny, self.nx, self.ny
            )));
        }
        Ok(())
    }
}

/// A subset of `X × Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    nx: usize,
    ny: usize,
    cells: Vec<bool>,
}

impl Event {
    pub fn full(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            cells: vec![true; nx * ny],
        }
    }

    pub fn from_cells(nx: usize, ny: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut mask = vec![false; nx * ny];
        for (x, y) in cells {
            if x >= nx || y >= ny {
                return Err(Error::MalformedDimensions(format!(
                    "cell ({x}, {y}) outside a {nx}x{ny} space"
                )));
            }
            mask[x * ny + y] = true;
        }
        Ok(Self {
            nx,
            ny,
            cells: mask,
        })
    }

    /// `X = x`.
    pub fn observation(nx: usize, ny: usize, x: usize) -> Result<Self> {
        Self::observations(nx, ny, &[x])
    }

    /// `X ∈ xs`.
    pub fn observations(nx: usize, ny: usize, xs: &[usize]) -> Result<Self> {
        Self::from_cells(nx, ny, xs.iter().flat_map(|&x| (0..ny).map(move |y| (x, y))))
    }

    /// `Y ∈ ys`.
    pub fn outcomes(nx: usize, ny: usize, ys: &[usize]) -> Result<Self> {
        Self::from_cells(nx, ny, (0..nx).flat_map(|x| ys.iter().map(move |&y| (x, y))))
    }

    pub fn intersect(&self, other: &Event) -> Result<Event> {
        if self.nx != other.nx || self.ny != other.ny {
            return Err(Error::MalformedDimensions("events over different spaces".into()));
        }
        Ok(Event {
            nx: self.nx,
            ny: self.ny,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| *a && *b).collect(),
        })
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.cells[x * self.ny + y]
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }
}

/// Loss table `L(y, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossFn {
    ny: usize,
    na: usize,
    table: Vec<f64>,
}

impl LossFn {
    /// One row per outcome `y`, one column per action `a`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let ny = rows.len();
        let na = rows.first().map_or(0, |r| r.len());
        if ny == 0 || na == 0 {
            return Err(Error::InvalidLoss("empty loss table".into()));
        }
        if let Some(y) = rows.iter().position(|r| r.len() != na) {
            return Err(Error::InvalidLoss(format!(
                "row {y} has {} entries, expected {na}",
                rows[y].len()
            )));
        }
        let table: Vec<f64> = rows.into_iter().flatten().collect();
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidLoss("non-finite loss entry".into()));
        }
        Ok(Self { ny, na, table })
    }

    /// Classification loss: 0 when `a == y`, 1 otherwise.
    pub fn zero_one(n: usize) -> Self {
        let table = (0..n)
            .flat_map(|y| (0..n).map(move |a| if a == y { 0.0 } else { 1.0 }))
            .collect();
        Self { ny: n, na: n, table }
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn na(&self) -> usize {
        self.na
    }

    pub fn get(&self, y: usize, a: usize) -> f64 {
        self.table[y * self.na + a]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.na)
    }

    /// `a·L + b`.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        Self {
            ny: self.ny,
            na: self.na,
            table: self.table.iter().map(|v| scale * v + shift).collect(),
        }
    }

    /// `Σ_y q(y) L(y, a)` for each action.
    pub fn action_losses(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.na];
        for (qy, row) in q.iter().zip(self.rows()) {
            if *qy != 0.0 {
                for (o, l) in out.iter_mut().zip(row) {
                    *o += qy * l;
                }
            }
        }
        out
    }

    /// `L_δ(x, y)` for a randomized action `mix` at `x`.
    pub fn mixed_loss(&self, y: usize, mix: &[f64]) -> f64 {
        mix.iter().enumerate().map(|(a, p)| p * self.get(y, a)).sum()
    }
}

/// `E_Pr[L_δ] = Σ_{x,y} Pr(x,y) Σ_a δ(x)(a) L(y,a)`.
pub fn expected_loss(p: &JointDist, rule: &DecisionRule, l: &LossFn) -> Result<f64> {
    if rule.nx() != p.nx() || l.ny() != p.ny() || rule.na() != l.na() {
        return Err(Error::MalformedDimensions(format!(
            "distribution {}x{}, rule {}x{}, loss {}x{}",
            p.nx(),
            p.ny(),
            rule.nx(),
            rule.na(),
            l.ny(),
            l.na()
        )));
    }
    Ok(expected_loss_unchecked(p.weights(), p.ny(), rule, l))
}

pub(crate) fn expected_loss_unchecked(weights: &[f64], ny: usize, rule: &DecisionRule, l: &LossFn) -> f64 {
    let mut total = 0.0;
    for x in 0..rule.nx() {
        let row = &weights[x * ny..(x + 1) * ny];
        if row.iter().all(|w| *w == 0.0) {
            continue;
        }
        let per_action = l.action_losses(row);
        total += per_action.iter().zip(rule.row(x)).map(|(la, d)| la * d).sum::<f64>();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn condition_uniform_on_observation() {
        let p = JointDist::uniform(2, 2);
        let e = Event::observation(2, 2, 0).unwrap();
        let c = p.condition(&e).unwrap();
        assert_eq!(c.weights(), &[0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn condition_on_full_space_is_identity() {
        let p = JointDist::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let c = p.condition(&Event::full(2, 2)).unwrap();
        for (a, b) in c.weights().iter().zip(p.weights()) {
            assert!(close(*a, *b));
        }
    }

    #[test]
    fn condition_zero_mass_errors() {
        let p = JointDist::point_mass(2, 2, 0, 0);
        let e = Event::observation(2, 2, 1).unwrap();
        assert!(matches!(p.condition(&e), Err(Error::ZeroProbabilityEvent { .. })));
    }

    #[test]
    fn monty_hall_forced_door() {
        // X = {G2, G3}, Y = {1, 2, 3}. Car behind door 2 forces Monty to open 3.
        let mut w = vec![0.0; 6];
        w[3 + 1] = 1.0 / 3.0; // (G3, car 2)
        w[2] = 1.0 / 3.0; // (G2, car 3)
        w[0] = 1.0 / 3.0; // (G2, car 1)
        let p = JointDist::new(2, 3, w).unwrap();
        let c = p.condition(&Event::observation(2, 3, 1).unwrap()).unwrap();
        assert!(close(c.marginal_y()[1], 1.0));
    }

    #[test]
    fn marginals() {
        let p = JointDist::product(&[0.5, 0.5], &[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        let my = p.marginal_y();
        assert!(close(my[0], 2.0 / 3.0) && close(my[1], 1.0 / 3.0));
        let pm = JointDist::point_mass(3, 2, 2, 1);
        assert_eq!(pm.marginal_y(), vec![0.0, 1.0]);
        assert_eq!(pm.marginal_x(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn expected_loss_cases() {
        let l = LossFn::zero_one(2);
        let pm = JointDist::point_mass(2, 2, 1, 0);
        let rule = DecisionRule::deterministic(&[0, 1], 2).unwrap();
        assert!(close(expected_loss(&pm, &rule, &l).unwrap(), l.get(0, 1)));

        let p = JointDist::new(2, 2, vec![0.0, 2.0 / 3.0, 1.0 / 3.0, 0.0]).unwrap();
        let always_one = DecisionRule::deterministic(&[1, 1], 2).unwrap();
        assert!(close(expected_loss(&p, &always_one, &l).unwrap(), 1.0 / 3.0));

        let flat = LossFn::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let coin = DecisionRule::uniform(2, 2);
        assert!(close(expected_loss(&p, &coin, &flat).unwrap(), 0.5));
    }

    #[test]
    fn expected_loss_dimension_mismatch() {
        let l = LossFn::zero_one(3);
        let rule = DecisionRule::uniform(2, 2);
        assert!(expected_loss(&JointDist::uniform(2, 2), &rule, &l).is_err());
    }

    #[test]
    fn space_validation() {
        assert!(SpaceSpec::new(vec!["a".into(), "a".into()], vec!["y".into()], vec!["z".into()]).is_err());
        assert!(SpaceSpec::new(vec![], vec!["y".into()], vec!["z".into()]).is_err());
        assert!(matches!(SpaceSpec::indexed(17, 2, 2), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(JointDist::new(1, 2, vec![0.5, 0.6]).is_err());
        assert!(JointDist::new(1, 2, vec![1.5, -0.5]).is_err());
        assert!(JointDist::new(1, 3, vec![0.5, 0.5]).is_err());
    }
}
