//! Decision rules, a priori and a posteriori minimax solvers, and the
//! structural checks for when conditioning or ignoring information is
//! optimal.
//!
//! Both solvers reduce to the same linear program: the agent picks one
//! distribution over actions per block (per observation for a priori rules,
//! a single block for a randomized action) and the bookie picks a vertex.
//!
//! Optimal strategies are often not unique. Among the optimal ones the
//! solver returns the leximin-central strategy: the smallest probability
//! assigned to any action that some optimal strategy uses is as large as
//! possible, then the next smallest, and so on. This point is unique, so
//! ties are resolved independently of pivoting order, and it turns tied
//! best responses into uniform randomization over the tie.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;

use crate::credal::CredalSet;
use crate::error::{Error, Result};
use crate::numerics::{solve_lp, LinearProgram, LpSolution, LpStatus, VPolytope};
use crate::prob::{expected_loss_unchecked, JointDist, LossFn, NORMALIZATION_TOL};

/// Tolerance for comparing minimax values and rule rows.
pub const VALUE_TOL: f64 = 1e-7;
/// Dominance threshold of the Walley order.
pub const WALLEY_TOL: f64 = 1e-9;
/// Interior samples of `P_Y` drawn by [`check_ignoring_optimal`].
pub const IGNORING_SAMPLES: usize = 100;
const SAMPLE_SEED: u64 = 0x5eed_1e55;
/// Independence feasibility accepts residuals up to this value.
const INDEPENDENCE_TOL: f64 = 1e-8;
/// Above this many supported coordinates the tie-break does a single round.
const MAX_LEXIMIN_COORDS: usize = 64;
const SUPPORT_TOL: f64 = 1e-7;
/// Relative slack on the optimal value when describing the optimal face.
const FACE_SLACK: f64 = 1e-12;

/// Randomized decision rule `δ : X → Δ(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRule {
    nx: usize,
    na: usize,
    table: Vec<f64>,
}

impl DecisionRule {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nx = rows.len();
        let na = rows.first().map_or(0, |r| r.len());
        if nx == 0 || na == 0 {
            return Err(Error::InvalidRule("empty rule".into()));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != na {
                return Err(Error::InvalidRule(format!("row {x} has {} actions, expected {na}", row.len())));
            }
            if row.iter().any(|p| !p.is_finite() || *p < -NORMALIZATION_TOL) {
                return Err(Error::InvalidRule(format!("row {x} has a negative entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidRule(format!("row {x} sums to {s}")));
            }
        }
        Ok(Self {
            nx,
            na,
            table: rows.into_iter().flatten().map(|p| p.max(0.0)).collect(),
        })
    }

    /// `δ(x)` puts all mass on `actions[x]`.
    pub fn deterministic(actions: &[usize], na: usize) -> Result<Self> {
        if let Some(a) = actions.iter().find(|&&a| a >= na) {
            return Err(Error::InvalidRule(format!("action {a} out of range")));
        }
        Self::new(
            actions
                .iter()
                .map(|&a| (0..na).map(|k| if k == a { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn uniform(nx: usize, na: usize) -> Self {
        Self {
            nx,
            na,
            table: vec![1.0 / na as f64; nx * na],
        }
    }

    /// A rule that plays `mix` whatever is observed.
    pub fn ignoring(nx: usize, mix: &[f64]) -> Result<Self> {
        Self::new(vec![mix.to_vec(); nx])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn na(&self) -> usize {
        self.na
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.table[x * self.na..(x + 1) * self.na]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.na)
    }

    pub fn with_row(&self, x: usize, mix: &[f64]) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = self.rows().map(<[f64]>::to_vec).collect();
        rows[x] = mix.to_vec();
        Self::new(rows)
    }

    /// The action played with probability one at `x`, if any.
    pub fn deterministic_action(&self, x: usize) -> Option<usize> {
        self.row(x).iter().position(|p| *p >= 1.0 - 1e-9)
    }

    pub fn ignores_information(&self) -> bool {
        (1..self.nx).all(|x| total_variation(self.row(0), self.row(x)) <= 1e-9)
    }

    pub fn row_distance(&self, other: &DecisionRule, x: usize) -> f64 {
        total_variation(self.row(x), other.row(x))
    }

    /// Worst case of `E_Pr[L_δ]` over the vertices of `p`.
    pub fn worst_case(&self, p: &CredalSet, l: &LossFn) -> Result<f64> {
        check_dims(p, l)?;
        if self.nx != p.nx() || self.na != l.na() {
            return Err(Error::MalformedDimensions("rule does not match credal set and loss".into()));
        }
        Ok(p
            .vertices()
            .iter()
            .map(|v| expected_loss_unchecked(v.weights(), p.ny(), self, l))
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn check_dims(p: &CredalSet, l: &LossFn) -> Result<()> {
    if p.ny() != l.ny() {
        return Err(Error::MalformedDimensions(format!(
            "credal set has |Y| = {}, loss has {} rows",
            p.ny(),
            l.ny()
        )));
    }
    Ok(())
}

/// Solution of a minimax problem over decision rules.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxResult {
    pub rule: DecisionRule,
    /// `max` over the credal vertices of `E[L_δ]` for the returned rule.
    pub value: f64,
    /// Indices of the vertices attaining `value` within [`VALUE_TOL`].
    pub worst_case_vertices: Vec<usize>,
    /// A posteriori only: the minimax value of each observable cell.
    pub per_x_values: Option<Vec<Option<f64>>>,
    /// A posteriori only: cells no vertex can produce; their rows are uniform.
    pub unconstrained: Vec<usize>,
    /// A priori only: optimal bookie mixture over the vertices, read off the
    /// LP duals of the vertex constraints.
    pub vertex_duals: Vec<f64>,
    /// A priori only: the optimal LP objective.
    pub lp_value: Option<f64>,
}

/// Optimal randomized action against a set of outcome distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionMinimax {
    pub mix: Vec<f64>,
    /// Worst-case expected loss of `mix` over the set.
    pub value: f64,
    /// Optimal LP objective.
    pub lp_value: f64,
    /// Bookie mixture over the set's vertices (LP duals).
    pub weights: Vec<f64>,
}

/// Raw result of the block minimax program.
struct BlockSolution {
    rows: Vec<Vec<f64>>,
    lp_value: f64,
    bookie: Vec<f64>,
}

/// `min_δ max_j Σ_{x,a} δ(x)(a) · coeffs[j][x][a]` over one action
/// distribution per block.
fn block_minimax(coeffs: &[Vec<Vec<f64>>], blocks: usize, na: usize) -> Result<BlockSolution> {
    let nvar = blocks * na;
    let mut objective = vec![0.0; nvar + 1];
    objective[nvar] = 1.0;
    let mut lp = LinearProgram::new(objective);
    lp.set_free(nvar);
    for x in 0..blocks {
        let mut row = vec![0.0; nvar + 1];
        row[x * na..(x + 1) * na].iter_mut().for_each(|v| *v = 1.0);
        lp.add_eq(row, 1.0);
    }
    for cj in coeffs {
        let mut row: Vec<f64> = cj.iter().flatten().copied().collect();
        row.push(-1.0);
        lp.add_le(row, 0.0);
    }
    let sol = expect_optimal(solve_lp(&lp)?, "minimax program")?;
    let lp_value = sol.objective;
    let mut bookie: Vec<f64> = sol.dual[blocks..].iter().map(|y| (-y).max(0.0)).collect();
    let total: f64 = bookie.iter().sum();
    if total > 0.0 {
        bookie.iter_mut().for_each(|w| *w /= total);
    }

    let face = OptimalFace {
        coeffs,
        blocks,
        na,
        bound: lp_value + FACE_SLACK * (1.0 + lp_value.abs()),
    };
    let start: Vec<f64> = sol.primal[..nvar].to_vec();
    let central = face.leximin(&start)?;
    let rows = central
        .chunks(na)
        .map(|r| {
            let cleaned: Vec<f64> = r.iter().map(|p| if *p < 1e-12 { 0.0 } else { *p }).collect();
            let s: f64 = cleaned.iter().sum();
            cleaned.iter().map(|p| p / s).collect()
        })
        .collect();
    Ok(BlockSolution {
        rows,
        lp_value,
        bookie,
    })
}

fn expect_optimal(sol: LpSolution, what: &str) -> Result<LpSolution> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        status => Err(Error::NumericalFailure(format!("{what} reported {status}"))),
    }
}

/// Solves a tie-break program. On a face that is numerically a point these
/// can be too ill-conditioned to certify; the caller then keeps the point it
/// already has, which is optimal either way.
fn tie_break(lp: &LinearProgram) -> Result<Option<LpSolution>> {
    match solve_lp(lp) {
        Ok(sol) if sol.status == LpStatus::Optimal => Ok(Some(sol)),
        Ok(_) | Err(Error::NumericalFailure(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The set of optimal block strategies, `{δ : every vertex row <= bound}`.
struct OptimalFace<'a> {
    coeffs: &'a [Vec<Vec<f64>>],
    blocks: usize,
    na: usize,
    bound: f64,
}

impl OptimalFace<'_> {
    /// Program over `(δ, s)` restricted to the face, with `extra` rows.
    fn program(&self, objective: Vec<f64>) -> LinearProgram {
        let nvar = self.blocks * self.na;
        let mut lp = LinearProgram::new(objective);
        for x in 0..self.blocks {
            let mut row = vec![0.0; nvar + 1];
            row[x * self.na..(x + 1) * self.na].iter_mut().for_each(|v| *v = 1.0);
            lp.add_eq(row, 1.0);
        }
        for cj in self.coeffs {
            let mut row: Vec<f64> = cj.iter().flatten().copied().collect();
            row.push(0.0);
            lp.add_le(row, self.bound);
        }
        lp
    }

    /// Largest value of coordinate `i` on the face, with lower bounds.
    /// `None` when the program cannot be certified.
    fn maximize(&self, i: usize, lower: &[(usize, f64)]) -> Result<Option<Vec<f64>>> {
        let nvar = self.blocks * self.na;
        let mut objective = vec![0.0; nvar + 1];
        objective[i] = -1.0;
        let mut lp = self.program(objective);
        for &(k, lb) in lower {
            lp.set_lower(k, lb);
        }
        Ok(tie_break(&lp)?.map(|s| s.primal))
    }

    fn leximin(&self, start: &[f64]) -> Result<Vec<f64>> {
        let nvar = self.blocks * self.na;
        // Coordinates used by at least one optimal strategy.
        let mut support = vec![false; nvar];
        for (i, p) in start.iter().enumerate() {
            support[i] = *p > SUPPORT_TOL;
        }
        for i in 0..nvar {
            if !support[i] {
                let Some(sol) = self.maximize(i, &[])? else { continue };
                for (k, p) in sol[..nvar].iter().enumerate() {
                    support[k] |= *p > SUPPORT_TOL;
                }
            }
        }
        let mut free: Vec<usize> = (0..nvar).filter(|&i| support[i]).collect();
        let mut fixed: Vec<(usize, f64)> = Vec::new();
        let mut current = start.to_vec();
        let single_round = free.len() > MAX_LEXIMIN_COORDS;

        while !free.is_empty() {
            // maximize s subject to δ_i >= s on free coordinates.
            let mut objective = vec![0.0; nvar + 1];
            objective[nvar] = -1.0;
            let mut lp = self.program(objective);
            for &i in &free {
                let mut row = vec![0.0; nvar + 1];
                row[i] = -1.0;
                row[nvar] = 1.0;
                lp.add_le(row, 0.0);
            }
            for &(k, lb) in &fixed {
                lp.set_lower(k, lb);
            }
            let Some(sol) = tie_break(&lp)? else { break };
            let level = sol.primal[nvar];
            current = sol.primal[..nvar].to_vec();
            if single_round {
                break;
            }
            let slack = 1e-9;
            let floor = (level - slack).max(0.0);
            let mut lower: Vec<(usize, f64)> = fixed.clone();
            lower.extend(free.iter().map(|&i| (i, floor)));
            let mut saturated = Vec::new();
            for &i in &free {
                if current[i] > level + 1e-7 {
                    continue;
                }
                match self.maximize(i, &lower)? {
                    Some(best) if best[i] > level + 1e-7 => current = best[..nvar].to_vec(),
                    _ => saturated.push(i),
                }
            }
            if saturated.is_empty() {
                // Numerical stall: every coordinate can still rise.
                break;
            }
            for i in saturated {
                fixed.push((i, floor));
                free.retain(|&k| k != i);
            }
        }
        Ok(current)
    }
}

/// Optimal randomized action against the outcome distributions in `set`.
pub fn minimax_action(set: &VPolytope, l: &LossFn) -> Result<ActionMinimax> {
    if set.dim() != l.ny() {
        return Err(Error::MalformedDimensions(format!(
            "distributions over {} outcomes, loss over {}",
            set.dim(),
            l.ny()
        )));
    }
    let coeffs: Vec<Vec<Vec<f64>>> = set.vertices().iter().map(|q| vec![l.action_losses(q)]).collect();
    let sol = block_minimax(&coeffs, 1, l.na())?;
    let mix = sol.rows.into_iter().next().expect("one block");
    let value = set
        .vertices()
        .iter()
        .map(|q| dot(&l.action_losses(q), &mix))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ActionMinimax {
        mix,
        value,
        lp_value: sol.lp_value,
        weights: sol.bookie,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vertex_losses(p: &CredalSet, rule: &DecisionRule, l: &LossFn) -> Vec<f64> {
    p.vertices()
        .iter()
        .map(|v| expected_loss_unchecked(v.weights(), p.ny(), rule, l))
        .collect()
}

fn attaining(losses: &[f64], value: f64) -> Vec<usize> {
    (0..losses.len()).filter(|&j| losses[j] >= value - VALUE_TOL).collect()
}

/// `min_δ max_{Pr ∈ P} E_Pr[L_δ]` over full decision rules.
pub fn apriori_minimax(p: &CredalSet, l: &LossFn) -> Result<MinimaxResult> {
    check_dims(p, l)?;
    let coeffs: Vec<Vec<Vec<f64>>> = p
        .vertices()
        .iter()
        .map(|v| (0..p.nx()).map(|x| l.action_losses(v.row(x))).collect())
        .collect();
    let sol = block_minimax(&coeffs, p.nx(), l.na())?;
    let rule = DecisionRule::new(sol.rows)?;
    let losses = vertex_losses(p, &rule, l);
    let value = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MinimaxResult {
        worst_case_vertices: attaining(&losses, value),
        rule,
        value,
        per_x_values: None,
        unconstrained: Vec::new(),
        vertex_duals: sol.bookie,
        lp_value: Some(sol.lp_value),
    })
}

/// Minimax solution of the game restricted to `P | X = x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSolution {
    pub x: usize,
    /// `(P | X = x)_Y`.
    pub conditional: VPolytope,
    pub action: ActionMinimax,
}

/// Solves the randomized-action game at `x`, or `None` if `x` cannot occur.
pub fn solve_cell(p: &CredalSet, l: &LossFn, x: usize) -> Result<Option<CellSolution>> {
    check_dims(p, l)?;
    if x >= p.nx() {
        return Err(Error::MalformedDimensions(format!("observation {x} out of range")));
    }
    let Some(conditional) = p.conditional_y(x)? else {
        return Ok(None);
    };
    let action = minimax_action(&conditional, l)?;
    Ok(Some(CellSolution { x, conditional, action }))
}

/// Per-observation minimax after conditioning on `X = x`.
pub fn aposteriori_minimax(p: &CredalSet, l: &LossFn) -> Result<MinimaxResult> {
    check_dims(p, l)?;
    let mut rows = Vec::with_capacity(p.nx());
    let mut per_x = Vec::with_capacity(p.nx());
    let mut unconstrained = Vec::new();
    for x in 0..p.nx() {
        match solve_cell(p, l, x)? {
            Some(cell) => {
                per_x.push(Some(cell.action.value));
                rows.push(cell.action.mix);
            }
            None => {
                per_x.push(None);
                unconstrained.push(x);
                rows.push(vec![1.0 / l.na() as f64; l.na()]);
            }
        }
    }
    let rule = DecisionRule::new(rows)?;
    let losses = vertex_losses(p, &rule, l);
    let value = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MinimaxResult {
        worst_case_vertices: attaining(&losses, value),
        rule,
        value,
        per_x_values: Some(per_x),
        unconstrained,
        vertex_duals: Vec::new(),
        lp_value: None,
    })
}

/// Worst case of row `x` of `rule` over `(P | X = x)`, `None` if `x` cannot occur.
pub fn conditional_worst_case(p: &CredalSet, rule: &DecisionRule, l: &LossFn, x: usize) -> Result<Option<f64>> {
    Ok(p.conditional_y(x)?.map(|c| {
        c.vertices()
            .iter()
            .map(|q| dot(&l.action_losses(q), rule.row(x)))
            .fold(f64::NEG_INFINITY, f64::max)
    }))
}

/// Outcome of the sufficient condition for conditioning to be optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningReport {
    /// `P = ⟨P⟩`.
    pub hull_equal: bool,
    /// Every vertex gives every `x` positive probability.
    pub full_support: bool,
    pub apriori: MinimaxResult,
    pub aposteriori: MinimaxResult,
    /// Conditional worst case of the a priori rule at each observable `x`.
    pub apriori_conditional_values: Vec<Option<f64>>,
    /// Largest gap between the a priori rule's conditional worst case and
    /// the a posteriori value, over observable `x`.
    pub max_deviation: f64,
    /// The a priori rule is a posteriori optimal within tolerance.
    pub apriori_rule_conditions: bool,
    /// The a posteriori rule is a priori optimal within tolerance.
    pub aposteriori_rule_optimal: bool,
    /// When `hull_equal` holds: whether the guaranteed agreement was observed.
    pub verified: Option<bool>,
}

pub fn check_conditioning_optimal(p: &CredalSet, l: &LossFn) -> Result<ConditioningReport> {
    check_conditioning_optimal_with(p, l, 1e-6)
}

pub fn check_conditioning_optimal_with(p: &CredalSet, l: &LossFn, tol: f64) -> Result<ConditioningReport> {
    check_dims(p, l)?;
    let hull = p.build_hull()?;
    let hull_equal = p.set_eq(&hull)?;
    let full_support = p.has_full_x_support();
    let apriori = apriori_minimax(p, l)?;
    let aposteriori = aposteriori_minimax(p, l)?;
    let per_x = aposteriori.per_x_values.clone().unwrap_or_default();
    let mut conditional_values = Vec::with_capacity(p.nx());
    let mut max_deviation = 0.0f64;
    for (x, post) in per_x.iter().enumerate() {
        let c = conditional_worst_case(p, &apriori.rule, l, x)?;
        if let (Some(c), Some(v)) = (c, post) {
            max_deviation = max_deviation.max((c - v).abs());
        }
        conditional_values.push(c);
    }
    let apriori_rule_conditions = max_deviation <= tol;
    let aposteriori_rule_optimal = (aposteriori.value - apriori.value).abs() <= tol;
    let verified = hull_equal.then(|| {
        if full_support {
            apriori_rule_conditions
        } else {
            apriori_rule_conditions || aposteriori_rule_optimal
        }
    });
    Ok(ConditioningReport {
        hull_equal,
        full_support,
        apriori,
        aposteriori,
        apriori_conditional_values: conditional_values,
        max_deviation,
        apriori_rule_conditions,
        aposteriori_rule_optimal,
        verified,
    })
}

/// Three-valued result of the independence hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisVerdict {
    /// Every vertex of `P_Y` and every sampled point has an independent witness.
    Holds,
    /// Some vertex of `P_Y` has no independent witness in `P`.
    Fails,
    /// Vertices pass but a sampled interior point of `P_Y` has no witness.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IgnoringReport {
    pub verdict: HypothesisVerdict,
    /// Indices (into `P_Y`'s vertex list) lacking an independent witness.
    pub failing_vertices: Vec<usize>,
    /// First sampled point of `P_Y` lacking a witness.
    pub failing_sample: Option<Vec<f64>>,
    /// Best information-ignoring rule: minimax action against `P_Y`.
    pub ignoring_rule: DecisionRule,
    /// `max_{Pr ∈ P} E_Pr[L_δ]` for the ignoring rule.
    pub ignoring_value: f64,
    /// `max_{Pr_Y ∈ P_Y} E[L'_δ]` for the ignoring rule.
    pub marginal_value: f64,
    pub identity_residual: f64,
    pub apriori_value: f64,
    /// Ignoring rule attains the a priori minimax value within tolerance.
    pub ignoring_optimal: bool,
}

/// Smallest max-norm residual of `m ⊗ q = Σ_j λ_j V_j` over `m`, `λ` in simplices.
fn independence_residual(p: &CredalSet, q: &[f64]) -> Result<f64> {
    let (nx, ny) = (p.nx(), p.ny());
    let nv = p.vertices().len();
    let nvar = nx + nv + 1;
    let t = nx + nv;
    let mut objective = vec![0.0; nvar];
    objective[t] = 1.0;
    let mut lp = LinearProgram::new(objective);
    let mut m_row = vec![0.0; nvar];
    m_row[..nx].iter_mut().for_each(|v| *v = 1.0);
    lp.add_eq(m_row, 1.0);
    let mut l_row = vec![0.0; nvar];
    l_row[nx..nx + nv].iter_mut().for_each(|v| *v = 1.0);
    lp.add_eq(l_row, 1.0);
    for x in 0..nx {
        for y in 0..ny {
            let mut row = vec![0.0; nvar];
            row[x] = q[y];
            for (j, v) in p.vertices().iter().enumerate() {
                row[nx + j] = -v.get(x, y);
            }
            let mut neg: Vec<f64> = row.iter().map(|c| -c).collect();
            row[t] = -1.0;
            neg[t] = -1.0;
            lp.add_le(row, 0.0);
            lp.add_le(neg, 0.0);
        }
    }
    let sol = expect_optimal(solve_lp(&lp)?, "independence program")?;
    Ok(sol.objective.max(0.0))
}

pub fn check_ignoring_optimal(p: &CredalSet, l: &LossFn) -> Result<IgnoringReport> {
    check_ignoring_optimal_with(p, l, 1e-6)
}

pub fn check_ignoring_optimal_with(p: &CredalSet, l: &LossFn, tol: f64) -> Result<IgnoringReport> {
    check_dims(p, l)?;
    let py = p.marginal_y()?;
    let mut failing_vertices = Vec::new();
    for (k, q) in py.vertices().iter().enumerate() {
        if independence_residual(p, q)? > INDEPENDENCE_TOL {
            failing_vertices.push(k);
        }
    }
    let mut failing_sample = None;
    if failing_vertices.is_empty() && !py.is_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        for _ in 0..IGNORING_SAMPLES {
            let q = random_interior_point(&py, &mut rng);
            if independence_residual(p, &q)? > INDEPENDENCE_TOL {
                failing_sample = Some(q);
                break;
            }
        }
    }
    let verdict = if !failing_vertices.is_empty() {
        HypothesisVerdict::Fails
    } else if failing_sample.is_some() {
        HypothesisVerdict::Indeterminate
    } else {
        HypothesisVerdict::Holds
    };

    let action = minimax_action(&py, l)?;
    let ignoring_rule = DecisionRule::ignoring(p.nx(), &action.mix)?;
    let ignoring_value = ignoring_rule.worst_case(p, l)?;
    let marginal_value = action.value;
    let apriori_value = apriori_minimax(p, l)?.value;
    Ok(IgnoringReport {
        verdict,
        failing_vertices,
        failing_sample,
        identity_residual: (ignoring_value - marginal_value).abs(),
        ignoring_optimal: (ignoring_value - apriori_value).abs() <= tol,
        ignoring_rule,
        ignoring_value,
        marginal_value,
        apriori_value,
    })
}

/// Dirichlet(1, ..., 1) mixture of the polytope's vertices.
fn random_interior_point(set: &VPolytope, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..set.len()).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let mut out = vec![0.0; set.dim()];
    for (w, v) in raw.iter().zip(set.vertices()) {
        for (o, c) in out.iter_mut().zip(v) {
            *o += w / total * c;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalleyOrder {
    Better,
    Worse,
    Equivalent,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalleyComparison {
    pub order: WalleyOrder,
    /// `max_{Pr ∈ P} E_Pr[L_{d1} - L_{d2}]`.
    pub s12: f64,
    /// `max_{Pr ∈ P} E_Pr[L_{d2} - L_{d1}]`.
    pub s21: f64,
}

/// Compares two rules under the partial order `d1 ⪯ d2 iff max_P E[L_{d1} - L_{d2}] <= 0`.
pub fn walley_compare(d1: &DecisionRule, d2: &DecisionRule, p: &CredalSet, l: &LossFn) -> Result<WalleyComparison> {
    check_dims(p, l)?;
    if d1.nx() != p.nx() || d2.nx() != p.nx() || d1.na() != l.na() || d2.na() != l.na() {
        return Err(Error::MalformedDimensions("rules do not match credal set and loss".into()));
    }
    let l1 = vertex_losses(p, d1, l);
    let l2 = vertex_losses(p, d2, l);
    let s12 = l1.iter().zip(&l2).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    let s21 = l1.iter().zip(&l2).map(|(a, b)| b - a).fold(f64::NEG_INFINITY, f64::max);
    let order = match (s12 <= WALLEY_TOL, s21 <= WALLEY_TOL) {
        (true, true) => WalleyOrder::Equivalent,
        (true, false) => WalleyOrder::Better,
        (false, true) => WalleyOrder::Worse,
        (false, false) => WalleyOrder::Incomparable,
    };
    Ok(WalleyComparison { order, s12, s21 })
}

/// Bayes act against a single joint distribution, row by row.
pub fn best_response(p: &JointDist, l: &LossFn) -> (DecisionRule, f64) {
    let mut rows = Vec::with_capacity(p.nx());
    let mut total = 0.0;
    for x in 0..p.nx() {
        let losses = l.action_losses(p.row(x));
        let (best, v) = losses
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (a, v)| if v < acc.1 { (a, v) } else { acc });
        total += v;
        rows.push((0..l.na()).map(|a| if a == best { 1.0 } else { 0.0 }).collect());
    }
    (DecisionRule::new(rows).expect("one-hot rows"), total)
}
