//! Dense two-phase primal simplex with dual recovery.
//!
//! Problems are tiny (a few hundred columns at most), so the tableau is kept
//! dense. After the simplex phase the final basis is re-solved with an LU
//! factorization, which gives clean primal and dual vectors, and the
//! optimality conditions are re-checked against the original program before
//! anything is returned.

use std::cell::Cell;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const ENTER_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 50_000;
/// Degenerate pivots tolerated before switching to Bland's rule for good.
const DEGENERATE_STREAK: usize = 50;

pub const PRIMAL_FEASIBILITY_TOL: f64 = 1e-9;
pub const COMPLEMENTARY_SLACKNESS_TOL: f64 = 1e-7;
pub const DUALITY_GAP_TOL: f64 = 1e-7;

/// Lower bound of a decision variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Lower(f64),
    Free,
}

/// `minimize c·x` subject to `A_eq x = b_eq`, `A_le x <= b_le` and per-variable
/// lower bounds (default `x >= 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub le_matrix: Vec<Vec<f64>>,
    pub le_rhs: Vec<f64>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            le_matrix: Vec::new(),
            le_rhs: Vec::new(),
            bounds: vec![Bound::Lower(0.0); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.eq_rhs.len() + self.le_rhs.len()
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.le_matrix.push(row);
        self.le_rhs.push(rhs);
        self
    }

    /// Adds `row·x >= rhs`, stored as `-row·x <= -rhs`.
    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.add_le(row.into_iter().map(|v| -v).collect(), -rhs)
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.bounds[var] = Bound::Free;
        self
    }

    pub fn set_lower(&mut self, var: usize, lower: f64) -> &mut Self {
        self.bounds[var] = Bound::Lower(lower);
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if n == 0 {
            return Err(Error::MalformedDimensions("program has no variables".into()));
        }
        if self.bounds.len() != n {
            return Err(Error::MalformedDimensions(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        if self.eq_matrix.len() != self.eq_rhs.len() || self.le_matrix.len() != self.le_rhs.len() {
            return Err(Error::MalformedDimensions(
                "constraint matrix and right-hand side lengths differ".into(),
            ));
        }
        for (kind, rows) in [("equality", &self.eq_matrix), ("inequality", &self.le_matrix)] {
            if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(Error::MalformedDimensions(format!(
                    "{kind} row {i} has width {}, expected {n}",
                    row.len()
                )));
            }
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.eq_rhs.iter().chain(&self.le_rhs).all(|v| v.is_finite())
            && self
                .eq_matrix
                .iter()
                .chain(&self.le_matrix)
                .all(|r| r.iter().all(|v| v.is_finite()))
            && self.bounds.iter().all(|b| match b {
                Bound::Lower(l) => l.is_finite(),
                Bound::Free => true,
            });
        if !finite {
            return Err(Error::MalformedDimensions("non-finite coefficient".into()));
        }
        Ok(())
    }

    fn data_scale(&self) -> f64 {
        let m = self
            .objective
            .iter()
            .chain(&self.eq_rhs)
            .chain(&self.le_rhs)
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        m.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

/// Residuals of the optimality conditions, measured on the original program.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpDiagnostics {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementary_slackness: f64,
    pub duality_gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Empty unless optimal.
    pub primal: Vec<f64>,
    /// One multiplier per constraint, equality rows first, then `<=` rows.
    /// Sign convention: `c - Aᵀy >= 0` on bounded variables, `y <= 0` on `<=` rows.
    pub dual: Vec<f64>,
    /// `+inf` when infeasible, `-inf` when unbounded.
    pub objective: f64,
    pub diagnostics: LpDiagnostics,
}

impl LpSolution {
    fn terminal(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: match status {
                LpStatus::Infeasible => f64::INFINITY,
                _ => f64::NEG_INFINITY,
            },
            diagnostics: LpDiagnostics {
                iterations,
                ..Default::default()
            },
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        dual_objective(lp, &self.dual)
    }
}

/// Standard form `M z = r, z >= 0` derived from a [`LinearProgram`].
struct StandardForm {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    /// For each original variable: (positive column, optional negative column, shift).
    var_map: Vec<(usize, Option<usize>, f64)>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let n_le = lp.le_rhs.len();
        let mut var_map = Vec::with_capacity(n);
        let mut cost = Vec::new();
        for (j, b) in lp.bounds.iter().enumerate() {
            match *b {
                Bound::Lower(l) => {
                    var_map.push((cost.len(), None, l));
                    cost.push(lp.objective[j]);
                }
                Bound::Free => {
                    var_map.push((cost.len(), Some(cost.len() + 1), 0.0));
                    cost.push(lp.objective[j]);
                    cost.push(-lp.objective[j]);
                }
            }
        }
        let n_struct = cost.len();
        cost.extend(std::iter::repeat(0.0).take(n_le));
        let width = cost.len();

        let mut rows = Vec::with_capacity(lp.num_constraints());
        let mut rhs = Vec::with_capacity(lp.num_constraints());
        let all = lp
            .eq_matrix
            .iter()
            .zip(&lp.eq_rhs)
            .map(|(r, b)| (r, *b, None))
            .chain(
                lp.le_matrix
                    .iter()
                    .zip(&lp.le_rhs)
                    .enumerate()
                    .map(|(k, (r, b))| (r, *b, Some(k))),
            );
        for (row, b, slack) in all {
            let mut out = vec![0.0; width];
            let mut shifted = b;
            for (j, &(pos, neg, shift)) in var_map.iter().enumerate() {
                out[pos] = row[j];
                if let Some(neg) = neg {
                    out[neg] = -row[j];
                }
                shifted -= row[j] * shift;
            }
            if let Some(k) = slack {
                out[n_struct + k] = 1.0;
            }
            rows.push(out);
            rhs.push(shifted);
        }
        Self {
            rows,
            rhs,
            cost,
            var_map,
        }
    }
}

struct Tableau {
    m: usize,
    /// Structural columns; artificial column `i` lives at `n + i`.
    n: usize,
    width: usize,
    a: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
    degenerate_run: usize,
    bland: bool,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(sf: &StandardForm, signs: &[f64]) -> Self {
        let m = sf.rows.len();
        let n = sf.cost.len();
        let width = n + m;
        let mut a = vec![0.0; m * width];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            for j in 0..n {
                a[i * width + j] = signs[i] * sf.rows[i][j];
            }
            a[i * width + n + i] = 1.0;
            rhs[i] = signs[i] * sf.rhs[i];
        }
        Self {
            m,
            n,
            width,
            a,
            rhs,
            basis: (n..n + m).collect(),
            iterations: 0,
            degenerate_run: 0,
            bland: false,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width + j]
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.width..(i + 1) * self.width];
                for (dj, aij) in d.iter_mut().zip(row) {
                    *dj -= cb * aij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        self.rhs[r] /= p;
        self.a[r * w + c] = 1.0;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.a[r * w + j];
                if v != 0.0 {
                    self.a[i * w + j] -= f * v;
                }
            }
            self.a[i * w + c] = 0.0;
            self.rhs[i] -= f * self.rhs[r];
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Runs primal simplex on `cost`; only structural columns may enter.
    fn run(&mut self, cost: &[f64]) -> Result<PhaseOutcome> {
        let cost_scale = cost.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::NumericalFailure(format!(
                    "simplex iteration budget of {MAX_ITERATIONS} exhausted"
                )));
            }
            let d = self.reduced_costs(cost);
            let mut entering = None;
            let mut best = -ENTER_TOL * cost_scale;
            for (j, &dj) in d.iter().enumerate().take(self.n) {
                if dj < best {
                    entering = Some(j);
                    if self.bland {
                        break;
                    }
                    best = dj;
                }
            }
            let Some(c) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aic = self.at(i, c);
                if aic <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / aic;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs());
                        if ratio < best_ratio && !tie {
                            Some((i, ratio))
                        } else if tie {
                            let better = if self.bland {
                                self.basis[i] < self.basis[k]
                            } else {
                                aic > self.at(k, c)
                            };
                            if better {
                                Some((i, ratio.min(best_ratio)))
                            } else {
                                Some((k, ratio.min(best_ratio)))
                            }
                        } else {
                            Some((k, best_ratio))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if ratio <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.m {
            if self.basis[i] < self.n {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                let v = self.at(i, j).abs();
                if v > 1e-9 && best.is_none_or(|(_, b)| v > b) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(i, j);
            }
        }
    }
}

/// Running summary of every program that reached the optimality check on
/// the current thread.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpAudit {
    pub checked: usize,
    pub max_duality_gap: f64,
    pub max_primal_residual: f64,
}

thread_local! {
    static AUDIT: Cell<LpAudit> = const {
        Cell::new(LpAudit {
            checked: 0,
            max_duality_gap: 0.0,
            max_primal_residual: 0.0,
        })
    };
}

pub fn lp_audit() -> LpAudit {
    AUDIT.with(Cell::get)
}

pub fn reset_lp_audit() {
    AUDIT.with(|a| a.set(LpAudit::default()));
}

fn record(d: &LpDiagnostics) {
    AUDIT.with(|a| {
        let mut v = a.get();
        v.checked += 1;
        v.max_duality_gap = v.max_duality_gap.max(d.duality_gap);
        v.max_primal_residual = v.max_primal_residual.max(d.primal_residual);
        a.set(v);
    });
}

/// Solves a linear program.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let sf = StandardForm::build(lp);
    let m = sf.rows.len();
    let n_std = sf.cost.len();
    let signs: Vec<f64> = sf.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
    let scale = lp.data_scale();

    let mut tab = Tableau::new(&sf, &signs);

    let mut phase1_cost = vec![0.0; n_std + m];
    for c in phase1_cost.iter_mut().skip(n_std) {
        *c = 1.0;
    }
    // Phase one cannot be unbounded: the objective is bounded below by zero.
    tab.run(&phase1_cost)?;
    let infeasibility: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= n_std)
        .map(|i| tab.rhs[i].max(0.0))
        .sum();
    let rhs_scale = sf.rhs.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    if infeasibility > 1e-9 * rhs_scale {
        return Ok(LpSolution::terminal(LpStatus::Infeasible, tab.iterations));
    }
    tab.drive_out_artificials();

    let mut phase2_cost = sf.cost.clone();
    phase2_cost.extend(std::iter::repeat(0.0).take(m));
    if let PhaseOutcome::Unbounded = tab.run(&phase2_cost)? {
        return Ok(LpSolution::terminal(LpStatus::Unbounded, tab.iterations));
    }

    let (z, y) = refine(&sf, &signs, &tab.basis, &phase2_cost)?;

    let primal: Vec<f64> = sf
        .var_map
        .iter()
        .map(|&(pos, neg, shift)| z[pos] - neg.map_or(0.0, |k| z[k]) + shift)
        .collect();
    let objective = dot(&lp.objective, &primal);
    let diagnostics = diagnose(lp, &primal, &y, tab.iterations);
    record(&diagnostics);

    if diagnostics.primal_residual > PRIMAL_FEASIBILITY_TOL * scale
        || diagnostics.duality_gap > DUALITY_GAP_TOL * scale
        || diagnostics.complementary_slackness > COMPLEMENTARY_SLACKNESS_TOL * scale
        || diagnostics.dual_residual > COMPLEMENTARY_SLACKNESS_TOL * scale
    {
        return Err(Error::NumericalFailure(format!(
            "could not certify optimality: primal residual {:.3e}, dual residual {:.3e}, \
             complementary slackness {:.3e}, duality gap {:.3e}",
            diagnostics.primal_residual,
            diagnostics.dual_residual,
            diagnostics.complementary_slackness,
            diagnostics.duality_gap
        )));
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual: y,
        objective,
        diagnostics,
    })
}

/// Re-solves the final basis exactly: `B z_B = r` and `Bᵀ y = c_B`.
fn refine(
    sf: &StandardForm,
    signs: &[f64],
    basis: &[usize],
    cost: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = sf.rows.len();
    let n_std = sf.cost.len();
    if m == 0 {
        return Ok((vec![0.0; n_std], Vec::new()));
    }
    let bmat = DMatrix::from_fn(m, m, |i, k| {
        let col = basis[k];
        if col < n_std {
            sf.rows[i][col]
        } else if col - n_std == i {
            signs[i]
        } else {
            0.0
        }
    });
    let lu = bmat.clone().lu();
    let zb = lu
        .solve(&DVector::from_column_slice(&sf.rhs))
        .ok_or_else(|| Error::NumericalFailure("singular final basis".into()))?;
    let cb = DVector::from_iterator(m, basis.iter().map(|&c| cost[c]));
    let y = bmat
        .transpose()
        .lu()
        .solve(&cb)
        .ok_or_else(|| Error::NumericalFailure("singular final basis".into()))?;
    let mut z = vec![0.0; n_std];
    for (k, &col) in basis.iter().enumerate() {
        if col < n_std {
            z[col] = zb[k].max(0.0);
        }
    }
    Ok((z, y.iter().copied().collect()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn reduced_cost(lp: &LinearProgram, y: &[f64], j: usize) -> f64 {
    let n_eq = lp.eq_rhs.len();
    let mut d = lp.objective[j];
    for (i, row) in lp.eq_matrix.iter().enumerate() {
        d -= row[j] * y[i];
    }
    for (k, row) in lp.le_matrix.iter().enumerate() {
        d -= row[j] * y[n_eq + k];
    }
    d
}

fn dual_objective(lp: &LinearProgram, y: &[f64]) -> f64 {
    let n_eq = lp.eq_rhs.len();
    let mut v = dot(&lp.eq_rhs, &y[..n_eq]) + dot(&lp.le_rhs, &y[n_eq..]);
    for (j, b) in lp.bounds.iter().enumerate() {
        if let Bound::Lower(l) = *b {
            v += l * reduced_cost(lp, y, j);
        }
    }
    v
}

fn diagnose(lp: &LinearProgram, x: &[f64], y: &[f64], iterations: usize) -> LpDiagnostics {
    let n_eq = lp.eq_rhs.len();
    let mut primal_residual = 0.0f64;
    let mut dual_residual = 0.0f64;
    let mut cs = 0.0f64;
    for (row, b) in lp.eq_matrix.iter().zip(&lp.eq_rhs) {
        primal_residual = primal_residual.max((dot(row, x) - b).abs());
    }
    for (k, (row, b)) in lp.le_matrix.iter().zip(&lp.le_rhs).enumerate() {
        let slack = b - dot(row, x);
        primal_residual = primal_residual.max(-slack);
        let yk = y[n_eq + k];
        dual_residual = dual_residual.max(yk);
        cs = cs.max((yk * slack).abs());
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        let d = reduced_cost(lp, y, j);
        match *b {
            Bound::Lower(l) => {
                primal_residual = primal_residual.max(l - x[j]);
                dual_residual = dual_residual.max(-d);
                cs = cs.max((d * (x[j] - l)).abs());
            }
            Bound::Free => dual_residual = dual_residual.max(d.abs()),
        }
    }
    let gap = (dot(&lp.objective, x) - dual_objective(lp, y)).abs();
    LpDiagnostics {
        primal_residual,
        dual_residual,
        complementary_slackness: cs,
        duality_gap: gap,
        iterations,
    }
}
