//! Subcommands and their reports.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use credal_core::decision::{check_conditioning_optimal_with, check_ignoring_optimal_with};
use credal_core::games::{
    solve_p_game_with_tolerance, solve_px_game_with_tolerance, time_inconsistency_report_with,
    EquilibriumCertificate,
};
use credal_core::numerics::VPolytope;
use credal_core::{
    aposteriori_minimax, apriori_minimax, c_conditioning, check_calibration, rule_from_update, sharp_search,
    walley_compare, DecisionRule, HypothesisVerdict, Partition, SpaceSpec, WalleyOrder,
};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::parse::{format_partition, parse_event, parse_partition, parse_rule, RuleSpec};
use crate::scenario::{builtin_text, load_scenario, parse_scenario, Scenario, BUILTINS, BUILTIN_PREFIX};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "credal", version, about = "Minimax decisions and update rules over credal sets")]
pub struct Cli {
    /// Scenario file, or builtin:NAME for a shipped scenario.
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Acceptance threshold for certificates and verdicts.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Minimax rule chosen before X is observed.
    SolveApriori,
    /// Minimax action chosen after each observation.
    SolveAposteriori,
    /// Solve the bookie game, or the game after observing one x.
    SolveGame {
        #[arg(long, value_name = "X-LABEL")]
        observe: Option<String>,
    },
    /// Condition the credal set on an event such as X=G2|G3&Y=1.
    Condition {
        #[arg(long, value_name = "EVENT")]
        on: String,
    },
    /// Joints recombined from feasible marginals and conditionals.
    Hull,
    /// Check whether conditioning is guaranteed optimal.
    CheckConditioning,
    /// Check whether ignoring X is guaranteed optimal.
    CheckIgnoring,
    /// Report observations whose conditional set strictly contains the prior.
    DetectDilation,
    /// Condition on the partition cell containing each observation.
    CCondition {
        #[arg(long, value_name = "SPEC")]
        partition: String,
    },
    /// Check calibration of the conditioning table for a partition.
    CheckCalibration {
        /// Defaults to one cell per observation.
        #[arg(long, value_name = "SPEC")]
        partition: Option<String>,
    },
    /// Search all partitions for minimal calibrated conditioning tables.
    SharpSearch,
    /// Compare the rules chosen before and after observing X.
    TimeInconsistency,
    /// Order two rules by worst-case loss difference.
    CompareRules {
        /// apriori, aposteriori, uniform, or x=action pairs separated by commas.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        rules: Option<Vec<String>>,
    },
    /// List shipped scenarios, or print one.
    Examples { name: Option<String> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SolveApriori => "solve-apriori",
            Command::SolveAposteriori => "solve-aposteriori",
            Command::SolveGame { .. } => "solve-game",
            Command::Condition { .. } => "condition",
            Command::Hull => "hull",
            Command::CheckConditioning => "check-conditioning",
            Command::CheckIgnoring => "check-ignoring",
            Command::DetectDilation => "detect-dilation",
            Command::CCondition { .. } => "c-condition",
            Command::CheckCalibration { .. } => "check-calibration",
            Command::SharpSearch => "sharp-search",
            Command::TimeInconsistency => "time-inconsistency",
            Command::CompareRules { .. } => "compare-rules",
            Command::Examples { .. } => "examples",
        }
    }
}

/// Output of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub json: Value,
}

fn envelope(command: &str, scenario: Option<&str>, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "scenario": scenario,
        "result": result,
    })
}

pub fn certificate_json(c: &EquilibriumCertificate) -> Value {
    json!({
        "support_condition_residual": c.support_condition_residual,
        "equality_chain_residuals": c.equality_chain_residuals,
        "chain_values": c.chain_values,
        "best_response_gap_agent": c.best_response_gap_agent,
        "best_response_gap_bookie": c.best_response_gap_bookie,
        "max_residual": c.max_residual(),
    })
}

/// JSON body written for a failed command.
pub fn error_json(command: &str, scenario: Option<&str>, err: &CliError) -> Value {
    let mut error = json!({ "kind": err.kind(), "message": err.to_string(), "exit_code": err.exit_code() });
    if let CliError::Certificate(c) = err {
        error["certificate"] = certificate_json(c);
    }
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "scenario": scenario,
        "error": error,
    })
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    if !(cli.tolerance.is_finite() && cli.tolerance > 0.0) {
        return Err(CliError::Validation(format!("tolerance must be positive, got {}", cli.tolerance)));
    }
    if let Command::Examples { name } = &cli.command {
        return examples(name.as_deref());
    }
    let source = cli
        .scenario
        .as_deref()
        .ok_or_else(|| CliError::Validation(format!("{} needs --scenario PATH", cli.command.name())))?;
    let scenario = load_scenario(source)?;
    let (text, result) = run_on(&cli.command, &scenario, cli.tolerance)?;
    Ok(Report {
        text,
        json: envelope(cli.command.name(), Some(&scenario.name), result),
    })
}

fn examples(name: Option<&str>) -> CliResult<Report> {
    match name {
        None => {
            let mut text = String::from("shipped scenarios (use --scenario builtin:NAME):\n");
            let mut list = Vec::new();
            for (n, body) in BUILTINS {
                let s = parse_scenario(body, n)?;
                let _ = writeln!(text, "  {n}: {}", s.description);
                list.push(json!({ "name": n, "description": s.description }));
            }
            Ok(Report {
                text,
                json: envelope("examples", None, json!({ "scenarios": list })),
            })
        }
        Some(n) => {
            let n = n.strip_prefix(BUILTIN_PREFIX).unwrap_or(n);
            let body = builtin_text(n)?;
            let value: Value = serde_json::from_str(body).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(Report {
                text: body.to_string(),
                json: envelope("examples", Some(n), json!({ "scenario": value })),
            })
        }
    }
}

fn f(v: f64) -> String {
    format!("{v:.6}")
}

fn rule_json(space: &SpaceSpec, rule: &DecisionRule) -> Value {
    json!({
        "actions": space.a_labels,
        "rows": (0..rule.nx()).map(|x| json!({
            "x": space.x_labels[x],
            "probabilities": rule.row(x),
        })).collect::<Vec<_>>(),
    })
}

fn mix_text(space: &SpaceSpec, mix: &[f64]) -> String {
    if let Some(a) = mix.iter().position(|p| *p >= 1.0 - 1e-9) {
        return space.a_labels[a].clone();
    }
    mix.iter()
        .enumerate()
        .filter(|(_, p)| **p > 1e-12)
        .map(|(a, p)| format!("{} w.p. {}", space.a_labels[a], f(*p)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn rule_text(space: &SpaceSpec, rule: &DecisionRule) -> String {
    let mut out = String::new();
    for x in 0..rule.nx() {
        let _ = writeln!(out, "  x = {}: {}", space.x_labels[x], mix_text(space, rule.row(x)));
    }
    out
}

fn joint_json(space: &SpaceSpec, weights: &[f64]) -> Value {
    Value::Array(weights.chunks(space.ny()).map(|r| json!(r)).collect())
}

fn polytope_json(p: &VPolytope) -> Value {
    json!(p.vertices())
}

fn dist_text(labels: &[String], q: &[f64]) -> String {
    let parts: Vec<String> = labels.iter().zip(q).map(|(l, p)| format!("{l}: {}", f(*p))).collect();
    format!("({})", parts.join(", "))
}

fn x_index(space: &SpaceSpec, label: &str) -> CliResult<usize> {
    space
        .x_index(label)
        .ok_or_else(|| CliError::Validation(format!("unknown x label '{label}'")))
}

fn resolve_rule(s: &Scenario, spec: &RuleSpec) -> CliResult<DecisionRule> {
    Ok(match spec {
        RuleSpec::Apriori => apriori_minimax(&s.credal, &s.loss)?.rule,
        RuleSpec::Aposteriori => aposteriori_minimax(&s.credal, &s.loss)?.rule,
        RuleSpec::Uniform => DecisionRule::uniform(s.space.nx(), s.space.na()),
        RuleSpec::Mapping(actions) => DecisionRule::deterministic(actions, s.space.na())?,
    })
}

/// Runs one command against a loaded scenario, returning text and result payload.
pub fn run_on(cmd: &Command, s: &Scenario, tol: f64) -> CliResult<(String, Value)> {
    let (p, l, space) = (&s.credal, &s.loss, &s.space);
    let mut t = String::new();
    let _ = writeln!(t, "scenario: {}", s.name);
    let result = match cmd {
        Command::SolveApriori => {
            let r = apriori_minimax(p, l)?;
            let _ = writeln!(t, "a priori minimax value: {}", f(r.value));
            let _ = write!(t, "rule:\n{}", rule_text(space, &r.rule));
            let _ = writeln!(t, "worst-case vertices: {:?}", r.worst_case_vertices);
            json!({
                "value": r.value,
                "lp_value": r.lp_value,
                "rule": rule_json(space, &r.rule),
                "worst_case_vertices": r.worst_case_vertices,
                "bookie_weights": r.vertex_duals,
                "vertices": p.vertices().iter().map(|v| joint_json(space, v.weights())).collect::<Vec<_>>(),
            })
        }
        Command::SolveAposteriori => {
            let r = aposteriori_minimax(p, l)?;
            let per_x = r.per_x_values.clone().unwrap_or_default();
            for (x, v) in per_x.iter().enumerate() {
                let value = v.map_or_else(|| "unobservable".to_string(), f);
                let _ = writeln!(
                    t,
                    "x = {}: value {value}, play {}",
                    space.x_labels[x],
                    mix_text(space, r.rule.row(x))
                );
            }
            let _ = writeln!(t, "worst case of this rule before observing: {}", f(r.value));
            json!({
                "value": r.value,
                "per_x": per_x.iter().enumerate().map(|(x, v)| json!({
                    "x": space.x_labels[x],
                    "value": v,
                })).collect::<Vec<_>>(),
                "rule": rule_json(space, &r.rule),
                "unconstrained": r.unconstrained.iter().map(|&x| &space.x_labels[x]).collect::<Vec<_>>(),
            })
        }
        Command::SolveGame { observe: None } => {
            let (eq, cert) = solve_p_game_with_tolerance(p, l, tol)?;
            let _ = writeln!(t, "P-game value: {}", f(eq.value));
            let _ = write!(t, "agent rule:\n{}", rule_text(space, &eq.agent));
            let _ = writeln!(t, "bookie mixture:");
            for (j, w) in eq.bookie.vertex_indices.iter().zip(&eq.bookie.weights) {
                let _ = writeln!(t, "  vertex {j}: {}", f(*w));
            }
            let _ = writeln!(t, "certificate: {cert}");
            json!({
                "game": "P-game",
                "value": eq.value,
                "agent": rule_json(space, &eq.agent),
                "bookie": {
                    "vertex_indices": eq.bookie.vertex_indices,
                    "weights": eq.bookie.weights,
                    "support": eq.bookie.support.iter().map(|v| joint_json(space, v.weights())).collect::<Vec<_>>(),
                },
                "aggregate": joint_json(space, eq.aggregate.weights()),
                "certificate": certificate_json(&cert),
            })
        }
        Command::SolveGame { observe: Some(label) } => {
            let x = x_index(space, label)?;
            let (eq, cert) = solve_px_game_with_tolerance(p, l, x, tol).map_err(|e| match e {
                credal_core::Error::EmptyConditional => {
                    CliError::Validation(format!("no distribution in the credal set can produce x = '{label}'"))
                }
                other => other.into(),
            })?;
            let mix = eq.agent.row(x);
            let action = eq.agent.deterministic_action(x).map(|a| space.a_labels[a].clone());
            let _ = writeln!(t, "P-x-game at x = {label}: value {}", f(eq.value));
            let _ = writeln!(t, "agent plays {}", mix_text(space, mix));
            let _ = writeln!(t, "bookie mixture over conditional vertices:");
            for (q, w) in eq.bookie.support.iter().zip(&eq.bookie.weights) {
                let _ = writeln!(t, "  {} with weight {}", dist_text(&space.y_labels, q.row(x)), f(*w));
            }
            let _ = writeln!(t, "certificate: {cert}");
            json!({
                "game": "P-x-game",
                "x": label,
                "value": eq.value,
                "agent": { "actions": space.a_labels, "probabilities": mix, "action": action },
                "bookie": {
                    "weights": eq.bookie.weights,
                    "support": eq.bookie.support.iter().map(|v| v.row(x).to_vec()).collect::<Vec<_>>(),
                },
                "aggregate": eq.aggregate.row(x),
                "certificate": certificate_json(&cert),
            })
        }
        Command::Condition { on } => {
            let e = parse_event(space, on)?;
            let (c, dropped) = p.condition_with_report(&e).map_err(|err| match err {
                credal_core::Error::EmptyConditional => {
                    CliError::Validation(format!("no distribution in the credal set gives '{on}' positive probability"))
                }
                other => other.into(),
            })?;
            let ym = c.marginal_y()?;
            let _ = writeln!(t, "conditioned on {on}: {} vertices ({dropped} dropped for zero mass)", c.vertices().len());
            let _ = writeln!(t, "outcome marginals:");
            for q in ym.vertices() {
                let _ = writeln!(t, "  {}", dist_text(&space.y_labels, q));
            }
            json!({
                "event": on,
                "vertices": c.vertices().iter().map(|v| joint_json(space, v.weights())).collect::<Vec<_>>(),
                "dropped_vertices": dropped,
                "y_marginal": polytope_json(&ym),
            })
        }
        Command::Hull => {
            let h = p.build_hull()?;
            let equal = p.set_eq(&h)?;
            let _ = writeln!(t, "hull has {} vertices; equal to the credal set: {equal}", h.vertices().len());
            json!({
                "vertices": h.vertices().iter().map(|v| joint_json(space, v.weights())).collect::<Vec<_>>(),
                "equals_credal_set": equal,
            })
        }
        Command::CheckConditioning => {
            let r = check_conditioning_optimal_with(p, l, tol)?;
            let _ = writeln!(t, "credal set equals its hull: {}", r.hull_equal);
            let _ = writeln!(t, "full observation support: {}", r.full_support);
            let _ = writeln!(t, "a priori value: {}", f(r.apriori.value));
            let _ = writeln!(t, "largest gap to the a posteriori values: {:.3e}", r.max_deviation);
            let verdict = match r.verified {
                Some(true) => "conditioning is optimal (sufficient condition holds and was verified)",
                Some(false) => "sufficient condition holds but verification failed",
                None => "sufficient condition does not hold; no guarantee",
            };
            let _ = writeln!(t, "verdict: {verdict}");
            let per_x = r.aposteriori.per_x_values.clone().unwrap_or_default();
            json!({
                "hull_equal": r.hull_equal,
                "full_support": r.full_support,
                "apriori_value": r.apriori.value,
                "apriori_rule": rule_json(space, &r.apriori.rule),
                "aposteriori_rule": rule_json(space, &r.aposteriori.rule),
                "observations": (0..space.nx()).map(|x| json!({
                    "x": space.x_labels[x],
                    "aposteriori_value": per_x.get(x).copied().flatten(),
                    "apriori_conditional_value": r.apriori_conditional_values[x],
                })).collect::<Vec<_>>(),
                "max_deviation": r.max_deviation,
                "apriori_rule_conditions": r.apriori_rule_conditions,
                "aposteriori_rule_optimal": r.aposteriori_rule_optimal,
                "verified": r.verified,
            })
        }
        Command::CheckIgnoring => {
            let r = check_ignoring_optimal_with(p, l, tol)?;
            let verdict = match r.verdict {
                HypothesisVerdict::Holds => "holds",
                HypothesisVerdict::Fails => "fails",
                HypothesisVerdict::Indeterminate => "indeterminate",
            };
            let py = p.marginal_y()?;
            let _ = writeln!(t, "independence hypothesis: {verdict}");
            let _ = writeln!(t, "ignoring rule plays {}", mix_text(space, r.ignoring_rule.row(0)));
            let _ = writeln!(t, "ignoring rule worst case: {}", f(r.ignoring_value));
            let _ = writeln!(t, "a priori minimax value: {}", f(r.apriori_value));
            let _ = writeln!(t, "ignoring is optimal: {}", r.ignoring_optimal);
            json!({
                "hypothesis": verdict,
                "failing_vertices": r.failing_vertices.iter().map(|&k| &py.vertices()[k]).collect::<Vec<_>>(),
                "failing_sample": r.failing_sample,
                "ignoring_rule": { "actions": space.a_labels, "probabilities": r.ignoring_rule.row(0) },
                "ignoring_value": r.ignoring_value,
                "marginal_value": r.marginal_value,
                "identity_residual": r.identity_residual,
                "apriori_value": r.apriori_value,
                "ignoring_optimal": r.ignoring_optimal,
            })
        }
        Command::DetectDilation => {
            let prior = p.marginal_y()?;
            let reports = p.detect_dilation()?;
            let _ = writeln!(t, "prior outcome marginals:");
            for q in prior.vertices() {
                let _ = writeln!(t, "  {}", dist_text(&space.y_labels, q));
            }
            for d in &reports {
                let status = match (&d.posterior, d.dilation) {
                    (None, _) => "unobservable".to_string(),
                    (Some(_), true) => "dilation".to_string(),
                    (Some(_), false) => format!("no dilation (covers prior: {})", d.covers_prior),
                };
                let _ = writeln!(t, "x = {}: {status}", space.x_labels[d.x]);
            }
            json!({
                "prior": polytope_json(&prior),
                "any_dilation": reports.iter().any(|d| d.dilation),
                "observations": reports.iter().map(|d| json!({
                    "x": space.x_labels[d.x],
                    "observable": d.posterior.is_some(),
                    "posterior": d.posterior.as_ref().map(polytope_json),
                    "covers_prior": d.covers_prior,
                    "excess": d.excess,
                    "dilation": d.dilation,
                })).collect::<Vec<_>>(),
            })
        }
        Command::CCondition { partition } => {
            let part = parse_partition(space, partition)?;
            let table = c_conditioning(p, &part)?;
            let rule = rule_from_update(&table, l)?;
            let worst = rule.worst_case(p, l)?;
            let _ = writeln!(t, "partition: {}", format_partition(space, &part));
            let mut entries = Vec::new();
            for x in 0..space.nx() {
                match table.entry(x) {
                    Some(e) => {
                        let ym = e.marginal_y()?;
                        let _ = writeln!(t, "x = {}: {} outcome marginal vertices", space.x_labels[x], ym.len());
                        entries.push(json!({
                            "x": space.x_labels[x],
                            "defined": true,
                            "vertices": e.vertices().iter().map(|v| joint_json(space, v.weights())).collect::<Vec<_>>(),
                            "y_marginal": polytope_json(&ym),
                        }));
                    }
                    None => {
                        let _ = writeln!(t, "x = {}: undefined (cell has zero probability)", space.x_labels[x]);
                        entries.push(json!({ "x": space.x_labels[x], "defined": false }));
                    }
                }
            }
            let _ = write!(t, "induced rule:\n{}", rule_text(space, &rule));
            let _ = writeln!(t, "worst case of induced rule: {}", f(worst));
            json!({
                "partition": format_partition(space, &part),
                "entries": entries,
                "rule": rule_json(space, &rule),
                "rule_worst_case": worst,
            })
        }
        Command::CheckCalibration { partition } => {
            let part = match partition {
                Some(spec) => parse_partition(space, spec)?,
                None => Partition::singletons(space.nx()),
            };
            let table = c_conditioning(p, &part)?;
            let r = check_calibration(p, &table)?;
            let labels = |xs: &[usize]| xs.iter().map(|&x| space.x_labels[x].clone()).collect::<Vec<_>>();
            let _ = writeln!(t, "partition: {}", format_partition(space, &part));
            let _ = writeln!(t, "calibrated: {}", r.is_calibrated());
            for (k, c) in r.classes.iter().enumerate() {
                let _ = writeln!(t, "class {k}: x in {{{}}}", labels(&c.cells).join(", "));
            }
            for v in &r.violations {
                let _ = writeln!(t, "violation: vertex {} in class {} (residual {:.3e})", v.vertex, v.class, v.residual);
            }
            json!({
                "partition": format_partition(space, &part),
                "calibrated": r.is_calibrated(),
                "classes": r.classes.iter().map(|c| json!({
                    "cells": labels(&c.cells),
                    "range": polytope_json(&c.range),
                })).collect::<Vec<_>>(),
                "violations": r.violations.iter().map(|v| json!({
                    "vertex": v.vertex, "class": v.class, "residual": v.residual,
                })).collect::<Vec<_>>(),
                "skipped": r.skipped.iter().map(|(v, c)| json!({ "vertex": v, "class": c })).collect::<Vec<_>>(),
                "undefined": labels(&r.undefined),
            })
        }
        Command::SharpSearch => {
            let r = sharp_search(p)?;
            let names: Vec<String> = r.candidates.iter().map(|(part, _)| format_partition(space, part)).collect();
            let _ = writeln!(t, "{} candidate partitions, {} minimal:", names.len(), r.minimal.len());
            for &i in &r.minimal {
                let _ = writeln!(t, "  {}", names[i]);
            }
            let mut calibrated = Vec::with_capacity(names.len());
            for (_, table) in &r.candidates {
                calibrated.push(check_calibration(p, table)?.is_calibrated());
            }
            json!({
                "candidates": names.iter().zip(&calibrated).map(|(n, c)| json!({
                    "partition": n, "provenance": "c-conditioning", "calibrated": c,
                })).collect::<Vec<_>>(),
                "matrix": r.matrix.iter().map(|row| row.iter().map(|n| n.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "minimal": r.minimal.iter().map(|&i| &names[i]).collect::<Vec<_>>(),
            })
        }
        Command::TimeInconsistency => {
            let r = time_inconsistency_report_with(p, l, tol)?;
            let _ = writeln!(t, "a priori rule (answer to the P-game), value {}:", f(r.apriori.value));
            t.push_str(&rule_text(space, &r.apriori.rule));
            let _ = writeln!(t, "a posteriori rule (answer to the P-x-games), value {}:", f(r.aposteriori.value));
            t.push_str(&rule_text(space, &r.aposteriori.rule));
            let _ = writeln!(
                t,
                "time inconsistent: {} (rules differ: {}, values differ: {})",
                r.inconsistent, r.rules_differ, r.values_differ
            );
            json!({
                "inconsistent": r.inconsistent,
                "rules_differ": r.rules_differ,
                "values_differ": r.values_differ,
                "apriori": {
                    "game": "P-game: the bookie commits before X is observed",
                    "value": r.apriori.value,
                    "rule": rule_json(space, &r.apriori.rule),
                },
                "aposteriori": {
                    "game": "P-x-game: the bookie commits after X is observed",
                    "value": r.aposteriori.value,
                    "rule": rule_json(space, &r.aposteriori.rule),
                },
                "observations": r.observations.iter().map(|o| json!({
                    "x": space.x_labels[o.x],
                    "observable": o.observable,
                    "rule_distance": o.rule_distance,
                    "apriori_conditional_value": o.apriori_conditional_value,
                    "aposteriori_value": o.aposteriori_value,
                    "rules_differ": o.rules_differ,
                    "values_differ": o.values_differ,
                })).collect::<Vec<_>>(),
            })
        }
        Command::CompareRules { rules } => {
            let names = rules.clone().unwrap_or_else(|| vec!["apriori".into(), "aposteriori".into()]);
            let d1 = resolve_rule(s, &parse_rule(space, &names[0])?)?;
            let d2 = resolve_rule(s, &parse_rule(space, &names[1])?)?;
            let c = walley_compare(&d1, &d2, p, l)?;
            let order = match c.order {
                WalleyOrder::Better => "better",
                WalleyOrder::Worse => "worse",
                WalleyOrder::Equivalent => "equivalent",
                WalleyOrder::Incomparable => "incomparable",
            };
            let _ = writeln!(t, "{} is {order} compared with {}", names[0], names[1]);
            let _ = writeln!(t, "max E[L1 - L2] = {}, max E[L2 - L1] = {}", f(c.s12), f(c.s21));
            json!({
                "rules": names,
                "order": order,
                "s12": c.s12,
                "s21": c.s21,
                "first": rule_json(space, &d1),
                "second": rule_json(space, &d2),
            })
        }
        Command::Examples { .. } => unreachable!("handled before loading a scenario"),
    };
    Ok((t, result))
}
