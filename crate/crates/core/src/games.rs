//! The bookie-versus-agent games and their equilibrium certificates.
//!
//! In the P-game the bookie picks a distribution from `P` before anything is
//! observed and the agent answers with a full decision rule. In the P-x-game
//! the bookie picks from `P | X = x` after `x` is revealed and the agent
//! answers with a single randomized action. Both are solved in normal form as
//! linear programs, and each solution carries a certificate that re-derives
//! the minimax equality chain from scratch.

use std::fmt;

use crate::credal::CredalSet;
use crate::decision::{
    apriori_minimax, aposteriori_minimax, best_response, conditional_worst_case, solve_cell,
    total_variation, DecisionRule, MinimaxResult,
};
use crate::error::{Error, Result};
use crate::numerics::{solve_lp, LinearProgram, LpStatus};
use crate::prob::{JointDist, LossFn};

/// Default acceptance threshold for certificate residuals.
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Bookie weights at or below this are treated as outside the support.
/// Slack within which a pure action counts as optimal in a P-x-game.
pub const PURE_SLACK: f64 = 1e-9;
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-9;

/// Finitely supported distribution over credal vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BookieMixture {
    pub support: Vec<JointDist>,
    pub weights: Vec<f64>,
    /// Position of each support point in the vertex list it was drawn from.
    pub vertex_indices: Vec<usize>,
}

impl BookieMixture {
    fn from_weights(vertices: &[JointDist], weights: &[f64]) -> Self {
        let mut kept: Vec<(usize, f64)> = weights
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, w)| w > SUPPORT_WEIGHT_TOL)
            .collect();
        if kept.is_empty() {
            kept.push((0, 1.0));
        }
        let total: f64 = kept.iter().map(|(_, w)| w).sum();
        Self {
            support: kept.iter().map(|&(j, _)| vertices[j].clone()).collect(),
            weights: kept.iter().map(|&(_, w)| w / total).collect(),
            vertex_indices: kept.iter().map(|&(j, _)| j).collect(),
        }
    }

    /// `Pr* = Σ_j w_j · support_j`.
    pub fn aggregate(&self) -> JointDist {
        let refs: Vec<&JointDist> = self.support.iter().collect();
        JointDist::mixture(&refs, &self.weights).expect("weights form a distribution")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub bookie: BookieMixture,
    pub agent: DecisionRule,
    pub value: f64,
    pub aggregate: JointDist,
    /// `Some(x)` for a P-x-game. Only row `x` of `agent` is meaningful then;
    /// the other rows are uniform placeholders.
    pub observation: Option<usize>,
}

/// Residuals re-derived from an equilibrium; all are non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCertificate {
    /// Largest shortfall of a support vertex below the agent's worst case.
    pub support_condition_residual: f64,
    /// Gaps between consecutive terms of `chain_values`.
    pub equality_chain_residuals: [f64; 4],
    /// `E_{Pr*}[L_δ*]`, `min_δ E_{Pr*}[L_δ]`, `max_Pr min_δ E_Pr[L_δ]`,
    /// `min_δ max_Pr E_Pr[L_δ]`, `max_Pr E_Pr[L_δ*]`.
    pub chain_values: [f64; 5],
    /// How far changing one row of the agent's strategy lowers the worst
    /// case over the bookie's support.
    pub best_response_gap_agent: f64,
    /// How far the best vertex beats the game value against `δ*`.
    pub best_response_gap_bookie: f64,
}

impl EquilibriumCertificate {
    pub fn max_residual(&self) -> f64 {
        self.equality_chain_residuals
            .iter()
            .copied()
            .chain([
                self.support_condition_residual,
                self.best_response_gap_agent,
                self.best_response_gap_bookie,
            ])
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }

    fn from_parts(chain_values: [f64; 5], support: f64, agent_gap: f64, bookie_gap: f64) -> Self {
        let mut residuals = [0.0; 4];
        for (k, r) in residuals.iter_mut().enumerate() {
            *r = (chain_values[k] - chain_values[k + 1]).abs();
        }
        Self {
            support_condition_residual: support.max(0.0),
            equality_chain_residuals: residuals,
            chain_values,
            best_response_gap_agent: agent_gap.max(0.0),
            best_response_gap_bookie: bookie_gap.max(0.0),
        }
    }
}

impl fmt::Display for EquilibriumCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c1, c2, c3, c4] = self.equality_chain_residuals;
        write!(
            f,
            "support {:.3e}, chain [{c1:.3e}, {c2:.3e}, {c3:.3e}, {c4:.3e}], agent gap {:.3e}, bookie gap {:.3e}",
            self.support_condition_residual, self.best_response_gap_agent, self.best_response_gap_bookie
        )
    }
}

/// Per-vertex payoff table: `coeffs[j][x][a]` is the loss contribution of
/// playing `a` at `x` when the bookie plays vertex `j`.
type Payoffs = Vec<Vec<Vec<f64>>>;

fn payoff(c: &[Vec<f64>], rule: &[&[f64]]) -> f64 {
    c.iter()
        .zip(rule)
        .map(|(cx, r)| cx.iter().zip(r.iter()).map(|(a, b)| a * b).sum::<f64>())
        .sum()
}

/// `max_{λ ∈ Δ} Σ_x min_a Σ_j λ_j coeffs[j][x][a]`.
fn maximin(coeffs: &Payoffs) -> Result<f64> {
    let nv = coeffs.len();
    let nx = coeffs[0].len();
    let na = coeffs[0][0].len();
    let mut objective = vec![0.0; nv + nx];
    objective[nv..].iter_mut().for_each(|c| *c = -1.0);
    let mut lp = LinearProgram::new(objective);
    for x in 0..nx {
        lp.set_free(nv + x);
    }
    let mut simplex = vec![0.0; nv + nx];
    simplex[..nv].iter_mut().for_each(|c| *c = 1.0);
    lp.add_eq(simplex, 1.0);
    for x in 0..nx {
        for a in 0..na {
            let mut row = vec![0.0; nv + nx];
            for j in 0..nv {
                row[j] = -coeffs[j][x][a];
            }
            row[nv + x] = 1.0;
            lp.add_le(row, 0.0);
        }
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(-sol.objective),
        status => Err(Error::NumericalFailure(format!("maximin program reported {status}"))),
    }
}

/// Largest drop in `max_{j ∈ support} payoff_j` from replacing one row of `rule`.
fn row_deviation_gap(coeffs: &Payoffs, support: &[usize], rule: &[&[f64]]) -> Result<f64> {
    let na = rule[0].len();
    let current: Vec<f64> = support.iter().map(|&j| payoff(&coeffs[j], rule)).collect();
    let worst = current.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut gap = 0.0f64;
    for x in 0..rule.len() {
        // Variables: the new row r(a), then t. Minimize t.
        let mut objective = vec![0.0; na + 1];
        objective[na] = 1.0;
        let mut lp = LinearProgram::new(objective);
        lp.set_free(na);
        let mut simplex = vec![1.0; na + 1];
        simplex[na] = 0.0;
        lp.add_eq(simplex, 1.0);
        for (k, &j) in support.iter().enumerate() {
            let own: f64 = coeffs[j][x].iter().zip(rule[x]).map(|(a, b)| a * b).sum();
            let mut row = coeffs[j][x].clone();
            row.push(-1.0);
            lp.add_le(row, own - current[k]);
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::NumericalFailure(format!("deviation program reported {}", sol.status)));
        }
        gap = gap.max(worst - sol.objective);
    }
    Ok(gap)
}

fn certify(
    coeffs: &Payoffs,
    weights: &[f64],
    rule: &[&[f64]],
    lp_value: f64,
    best_response_value: f64,
) -> Result<EquilibriumCertificate> {
    let losses: Vec<f64> = coeffs.iter().map(|c| payoff(c, rule)).collect();
    let worst = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let support: Vec<usize> = (0..weights.len()).filter(|&j| weights[j] > SUPPORT_WEIGHT_TOL).collect();
    let support_residual = support.iter().map(|&j| worst - losses[j]).fold(0.0, f64::max);
    let mixture_loss: f64 = weights.iter().zip(&losses).map(|(w, l)| w * l).sum();
    let chain = [mixture_loss, best_response_value, maximin(coeffs)?, lp_value, worst];
    let agent_gap = row_deviation_gap(coeffs, &support, rule)?;
    let bookie_gap = worst - lp_value;
    Ok(EquilibriumCertificate::from_parts(chain, support_residual, agent_gap, bookie_gap))
}

fn accept(eq: Equilibrium, cert: EquilibriumCertificate, tol: f64) -> Result<(Equilibrium, EquilibriumCertificate)> {
    if cert.passes(tol) {
        Ok((eq, cert))
    } else {
        Err(Error::CertificateFailure(Box::new(cert)))
    }
}

/// Solves the P-game and certifies the equilibrium at [`CERTIFICATE_TOL`].
pub fn solve_p_game(p: &CredalSet, l: &LossFn) -> Result<(Equilibrium, EquilibriumCertificate)> {
    solve_p_game_with_tolerance(p, l, CERTIFICATE_TOL)
}

pub fn solve_p_game_with_tolerance(
    p: &CredalSet,
    l: &LossFn,
    tol: f64,
) -> Result<(Equilibrium, EquilibriumCertificate)> {
    let minimax = apriori_minimax(p, l)?;
    let coeffs: Payoffs = p
        .vertices()
        .iter()
        .map(|v| (0..p.nx()).map(|x| l.action_losses(v.row(x))).collect())
        .collect();
    let bookie = BookieMixture::from_weights(p.vertices(), &minimax.vertex_duals);
    let aggregate = bookie.aggregate();
    let mut weights = vec![0.0; p.vertices().len()];
    for (&j, &w) in bookie.vertex_indices.iter().zip(&bookie.weights) {
        weights[j] = w;
    }
    let rows: Vec<&[f64]> = minimax.rule.rows().collect();
    let (_, br_value) = best_response(&aggregate, l);
    let lp_value = minimax.lp_value.unwrap_or(minimax.value);
    let cert = certify(&coeffs, &weights, &rows, lp_value, br_value)?;
    let eq = Equilibrium {
        bookie,
        agent: minimax.rule,
        value: minimax.value,
        aggregate,
        observation: None,
    };
    accept(eq, cert, tol)
}

/// Solves the P-x-game at observation `x` and certifies it at [`CERTIFICATE_TOL`].
pub fn solve_px_game(p: &CredalSet, l: &LossFn, x: usize) -> Result<(Equilibrium, EquilibriumCertificate)> {
    solve_px_game_with_tolerance(p, l, x, CERTIFICATE_TOL)
}

pub fn solve_px_game_with_tolerance(
    p: &CredalSet,
    l: &LossFn,
    x: usize,
    tol: f64,
) -> Result<(Equilibrium, EquilibriumCertificate)> {
    let cell = solve_cell(p, l, x)?.ok_or(Error::EmptyConditional)?;
    let (nx, ny) = (p.nx(), p.ny());
    // Conditional vertices embedded as joints concentrated on row x.
    let joints: Vec<JointDist> = cell
        .conditional
        .vertices()
        .iter()
        .map(|q| {
            let mut w = vec![0.0; nx * ny];
            w[x * ny..(x + 1) * ny].copy_from_slice(q);
            JointDist::new(nx, ny, w).expect("conditional is a distribution")
        })
        .collect();
    let coeffs: Payoffs = cell.conditional.vertices().iter().map(|q| vec![l.action_losses(q)]).collect();
    let bookie = BookieMixture::from_weights(&joints, &cell.action.weights);
    let aggregate = bookie.aggregate();
    let mut weights = vec![0.0; joints.len()];
    for (&j, &w) in bookie.vertex_indices.iter().zip(&bookie.weights) {
        weights[j] = w;
    }
    let br_value = l
        .action_losses(aggregate.row(x))
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    // After the bookie has committed, a pure optimal action is the natural answer; keep the
    // mixed one only when no pure action attains the value.
    let na = l.na();
    let pure = (0..na).find(|&a| {
        let worst = coeffs.iter().map(|c| c[0][a]).fold(f64::NEG_INFINITY, f64::max);
        worst <= cell.action.value + PURE_SLACK * (1.0 + cell.action.value.abs())
    });
    let mix = match pure {
        Some(a) => {
            let mut m = vec![0.0; na];
            m[a] = 1.0;
            m
        }
        None => cell.action.mix.clone(),
    };
    let cert = certify(&coeffs, &weights, &[&mix], cell.action.lp_value, br_value)?;
    let agent = DecisionRule::uniform(nx, na).with_row(x, &mix)?;
    let eq = Equilibrium {
        bookie,
        agent,
        value: cell.action.value,
        aggregate,
        observation: Some(x),
    };
    accept(eq, cert, tol)
}

/// Side-by-side view of the two rules at one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationComparison {
    pub x: usize,
    pub observable: bool,
    /// Total-variation distance between the two rules' rows.
    pub rule_distance: f64,
    /// Worst case of the a priori rule's row over `P | X = x`.
    pub apriori_conditional_value: Option<f64>,
    /// A posteriori minimax value at `x`.
    pub aposteriori_value: Option<f64>,
    pub rules_differ: bool,
    pub values_differ: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeInconsistencyReport {
    /// Answer to the P-game: the bookie commits before `x` is seen.
    pub apriori: MinimaxResult,
    /// Answer to the P-x-games: the bookie commits after `x` is seen.
    pub aposteriori: MinimaxResult,
    pub observations: Vec<ObservationComparison>,
    pub rules_differ: bool,
    pub values_differ: bool,
    pub inconsistent: bool,
}

pub fn time_inconsistency_report(p: &CredalSet, l: &LossFn) -> Result<TimeInconsistencyReport> {
    time_inconsistency_report_with(p, l, CERTIFICATE_TOL)
}

pub fn time_inconsistency_report_with(p: &CredalSet, l: &LossFn, tol: f64) -> Result<TimeInconsistencyReport> {
    let apriori = apriori_minimax(p, l)?;
    let aposteriori = aposteriori_minimax(p, l)?;
    let per_x = aposteriori.per_x_values.clone().unwrap_or_default();
    let mut observations = Vec::with_capacity(p.nx());
    for (x, post) in per_x.into_iter().enumerate() {
        let observable = post.is_some();
        let pre = conditional_worst_case(p, &apriori.rule, l, x)?;
        let rule_distance = total_variation(apriori.rule.row(x), aposteriori.rule.row(x));
        let values_differ = matches!((pre, post), (Some(a), Some(b)) if (a - b).abs() > tol);
        observations.push(ObservationComparison {
            x,
            observable,
            rule_distance,
            apriori_conditional_value: pre,
            aposteriori_value: post,
            rules_differ: observable && rule_distance > tol,
            values_differ,
        });
    }
    let rules_differ = observations.iter().any(|o| o.rules_differ);
    let values_differ = observations.iter().any(|o| o.values_differ);
    Ok(TimeInconsistencyReport {
        apriori,
        aposteriori,
        observations,
        rules_differ,
        values_differ,
        inconsistent: rules_differ || values_differ,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::LinearConstraint;
    use crate::prob::SpaceSpec;

    fn example_2_1() -> CredalSet {
        let space = SpaceSpec::indexed(2, 2, 2).unwrap();
        CredalSet::from_constraints(&space, vec![LinearConstraint::eq(vec![0.0, 1.0, 0.0, 1.0], 2.0 / 3.0)])
            .unwrap()
    }

    #[test]
    fn p_game_example_2_1() {
        let (eq, cert) = solve_p_game(&example_2_1(), &LossFn::zero_one(2)).unwrap();
        assert!((eq.value - 1.0 / 3.0).abs() < 1e-9);
        assert!(cert.passes(1e-6), "{cert}");
        // X carries no information about Y under Pr*.
        let a = &eq.aggregate;
        let m = a.marginal_x();
        let q = a.marginal_y();
        for x in 0..2 {
            for y in 0..2 {
                assert!((a.get(x, y) - m[x] * q[y]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn px_game_example_2_1() {
        let (eq, cert) = solve_px_game(&example_2_1(), &LossFn::zero_one(2), 0).unwrap();
        assert!((eq.value - 0.5).abs() < 1e-9);
        assert_eq!(eq.agent.row(0), &[0.5, 0.5]);
        assert!(cert.passes(1e-6), "{cert}");
    }

    #[test]
    fn zero_loss() {
        let l = LossFn::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let (eq, cert) = solve_p_game(&example_2_1(), &l).unwrap();
        assert_eq!(eq.value, 0.0);
        assert_eq!(cert.max_residual(), 0.0);
    }

    #[test]
    fn unobservable_x() {
        let p = CredalSet::singleton(JointDist::new(2, 2, vec![0.5, 0.5, 0.0, 0.0]).unwrap());
        assert!(matches!(
            solve_px_game(&p, &LossFn::zero_one(2), 1),
            Err(Error::EmptyConditional)
        ));
    }

    #[test]
    fn inconsistency_example_2_1() {
        let r = time_inconsistency_report(&example_2_1(), &LossFn::zero_one(2)).unwrap();
        assert!(r.inconsistent && r.rules_differ && r.values_differ);
    }

    #[test]
    fn singleton_consistent() {
        let p = CredalSet::singleton(JointDist::new(2, 2, vec![0.1, 0.3, 0.4, 0.2]).unwrap());
        let r = time_inconsistency_report(&p, &LossFn::zero_one(2)).unwrap();
        assert!(!r.inconsistent);
    }
}
