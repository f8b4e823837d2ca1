//! Scenario files: a labelled space, a loss table and a credal set.
//!
//! ```json
//! {
//!   "name": "example",
//!   "description": "optional",
//!   "space": { "x": ["0", "1"], "y": ["0", "1"], "a": ["0", "1"] },
//!   "loss": [[0, 1], [1, 0]],
//!   "credal": {
//!     "constraints": [{ "coeffs": [0, 1, 0, 1], "relation": "eq", "rhs": "2/3" }]
//!   }
//! }
//! ```
//!
//! `loss` has one row per `y` label and one column per `a` label. Joint
//! weights, constraint coefficients and vertices are indexed row-major over
//! `X × Y`, so entry `x * |Y| + y` belongs to the pair `(x, y)`. `credal`
//! holds either `vertices` or `constraints`. Numbers may be written as JSON
//! numbers or as strings holding a decimal or a fraction such as `"1/3"`.

use std::fs;
use std::path::Path;

use credal_core::numerics::{LinearConstraint, Relation, MAX_DIMENSION};
use credal_core::prob::{MAX_LABELS, NORMALIZATION_TOL};
use credal_core::{CredalSet, JointDist, LossFn, SpaceSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::locate::LineIndex;

pub const BUILTIN_PREFIX: &str = "builtin:";

/// Scenarios shipped with the tool.
pub const BUILTINS: [(&str, &str); 3] = [
    ("example_2_1", include_str!("../../../scenarios/example_2_1.json")),
    ("monty_hall", include_str!("../../../scenarios/monty_hall.json")),
    ("walley_coin", include_str!("../../../scenarios/walley_coin.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    x: Vec<String>,
    y: Vec<String>,
    a: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    coeffs: Vec<Num>,
    relation: String,
    rhs: Num,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CredalFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constraints: Option<Vec<ConstraintFile>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    description: String,
    space: SpaceFile,
    loss: Vec<Vec<Num>>,
    credal: CredalFile,
}

/// How the credal set was written down.
#[derive(Debug, Clone, PartialEq)]
pub enum CredalSpec {
    Vertices(Vec<Vec<f64>>),
    Constraints(Vec<LinearConstraint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub space: SpaceSpec,
    pub loss: LossFn,
    pub spec: CredalSpec,
    pub credal: CredalSet,
}

/// Resolves `builtin:NAME` or reads a file.
pub fn load_scenario(source: &str) -> CliResult<Scenario> {
    if let Some(name) = source.strip_prefix(BUILTIN_PREFIX) {
        let text = builtin_text(name)?;
        return parse_scenario(text, source);
    }
    let text = fs::read_to_string(Path::new(source))
        .map_err(|e| CliError::Validation(format!("{source}: cannot read scenario: {e}")))?;
    parse_scenario(&text, source)
}

pub fn builtin_text(name: &str) -> CliResult<&'static str> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = BUILTINS.iter().map(|(n, _)| *n).collect();
            CliError::Validation(format!("unknown built-in scenario '{name}' (available: {})", names.join(", ")))
        })
}

struct Ctx<'a> {
    source: &'a str,
    index: LineIndex,
}

impl Ctx<'_> {
    fn err(&self, path: &str, msg: impl std::fmt::Display) -> CliError {
        match self.index.line(path) {
            Some(line) => CliError::Validation(format!("{}:{line}: {path}: {msg}", self.source)),
            None => CliError::Validation(format!("{}: {path}: {msg}", self.source)),
        }
    }

    fn size(&self, path: &str, msg: impl std::fmt::Display) -> CliError {
        match self.err(path, msg) {
            CliError::Validation(m) => CliError::SizeLimit(m),
            other => other,
        }
    }

    fn num(&self, path: &str, n: &Num) -> CliResult<f64> {
        let v = match n {
            Num::Number(v) => *v,
            Num::Text(t) => parse_number(t).ok_or_else(|| self.err(path, format!("'{t}' is not a number")))?,
        };
        if !v.is_finite() {
            return Err(self.err(path, "number is not finite"));
        }
        Ok(v)
    }
}

/// Parses `"0.25"`, `"1/3"` or `"-2"`.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim().parse::<f64>().ok()?, d.trim().parse::<f64>().ok()?);
            (d != 0.0).then(|| n / d)
        }
        None => t.parse().ok(),
    }
}

pub fn parse_scenario(text: &str, source: &str) -> CliResult<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
        CliError::Validation(format!("{source}:{}:{}: {}", e.line(), e.column(), strip_position(&e.to_string())))
    })?;
    let ctx = Ctx {
        source,
        index: LineIndex::new(text),
    };

    for (key, labels) in [("x", &file.space.x), ("y", &file.space.y), ("a", &file.space.a)] {
        let path = format!("space.{key}");
        if labels.is_empty() {
            return Err(ctx.err(&path, "no labels"));
        }
        if labels.len() > MAX_LABELS {
            return Err(ctx.size(&path, format!("{} labels, at most {MAX_LABELS} supported", labels.len())));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.trim().is_empty() {
                return Err(ctx.err(&format!("{path}[{i}]"), "empty label"));
            }
            if labels[..i].contains(l) {
                return Err(ctx.err(&format!("{path}[{i}]"), format!("duplicate label '{l}'")));
            }
        }
    }
    let space = SpaceSpec::new(file.space.x.clone(), file.space.y.clone(), file.space.a.clone())?;
    let (nx, ny, na) = (space.nx(), space.ny(), space.na());

    if file.loss.len() != ny {
        let missing = if file.loss.len() < ny {
            format!(" (no row for y = '{}')", space.y_labels[file.loss.len()])
        } else {
            String::new()
        };
        return Err(ctx.err("loss", format!("{} rows, expected one per y label ({ny}){missing}", file.loss.len())));
    }
    let mut loss_rows = Vec::with_capacity(ny);
    for (y, row) in file.loss.iter().enumerate() {
        let path = format!("loss[{y}]");
        if row.len() != na {
            return Err(ctx.err(
                &path,
                format!("row for y = '{}' has {} entries, expected {na}", space.y_labels[y], row.len()),
            ));
        }
        loss_rows.push(
            row.iter()
                .enumerate()
                .map(|(a, v)| ctx.num(&format!("{path}[{a}]"), v))
                .collect::<CliResult<Vec<f64>>>()?,
        );
    }
    let loss = LossFn::new(loss_rows)?;

    let dim = nx * ny;
    let (spec, credal) = match (&file.credal.vertices, &file.credal.constraints) {
        (Some(_), Some(_)) => return Err(ctx.err("credal", "give either 'vertices' or 'constraints', not both")),
        (None, None) => return Err(ctx.err("credal", "needs 'vertices' or 'constraints'")),
        (Some(vs), None) => {
            if vs.is_empty() {
                return Err(ctx.err("credal.vertices", "no vertices"));
            }
            let mut points = Vec::with_capacity(vs.len());
            for (i, v) in vs.iter().enumerate() {
                let path = format!("credal.vertices[{i}]");
                if v.len() != dim {
                    return Err(ctx.err(&path, format!("{} weights, expected |X|·|Y| = {dim}", v.len())));
                }
                let w = v
                    .iter()
                    .enumerate()
                    .map(|(k, n)| ctx.num(&format!("{path}[{k}]"), n))
                    .collect::<CliResult<Vec<f64>>>()?;
                if let Some(k) = w.iter().position(|p| *p < 0.0) {
                    return Err(ctx.err(&format!("{path}[{k}]"), "negative weight"));
                }
                let s: f64 = w.iter().sum();
                if (s - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(ctx.err(&path, format!("weights sum to {s}, expected 1")));
                }
                points.push(w);
            }
            let dists = points
                .iter()
                .map(|w| JointDist::new(nx, ny, w.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            (CredalSpec::Vertices(points), CredalSet::from_vertices(dists)?)
        }
        (None, Some(cs)) => {
            if dim > MAX_DIMENSION {
                return Err(ctx.size(
                    "credal.constraints",
                    format!("|X|·|Y| = {dim} exceeds the vertex enumeration limit of {MAX_DIMENSION}"),
                ));
            }
            let mut constraints = Vec::with_capacity(cs.len());
            for (i, c) in cs.iter().enumerate() {
                let path = format!("credal.constraints[{i}]");
                if c.coeffs.len() != dim {
                    return Err(ctx.err(
                        &format!("{path}.coeffs"),
                        format!("{} coefficients, expected |X|·|Y| = {dim}", c.coeffs.len()),
                    ));
                }
                let coeffs = c
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, n)| ctx.num(&format!("{path}.coeffs[{k}]"), n))
                    .collect::<CliResult<Vec<f64>>>()?;
                let rhs = ctx.num(&format!("{path}.rhs"), &c.rhs)?;
                // `ge` rows are stored negated as `le`.
                let constraint = match c.relation.as_str() {
                    "eq" => LinearConstraint::eq(coeffs, rhs),
                    "le" => LinearConstraint::le(coeffs, rhs),
                    "ge" => LinearConstraint::ge(coeffs, rhs),
                    other => {
                        return Err(ctx.err(
                            &format!("{path}.relation"),
                            format!("'{other}' is not 'eq', 'le' or 'ge'"),
                        ))
                    }
                };
                constraints.push(constraint);
            }
            let set = CredalSet::from_constraints(&space, constraints.clone()).map_err(|e| match e {
                credal_core::Error::EmptySet => ctx.err("credal.constraints", "constraints are infeasible"),
                other => CliError::from(other),
            })?;
            (CredalSpec::Constraints(constraints), set)
        }
    };

    Ok(Scenario {
        name: file.name,
        description: file.description,
        space,
        loss,
        spec,
        credal,
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(cut) => &msg[..cut],
        None => msg,
    }
    .replace("data did not match any variant of untagged enum Num", "expected a number or a string holding one")
}

impl Scenario {
    /// The scenario in file format, with every number written out in full.
    pub fn to_json(&self) -> String {
        let nums = |v: &[f64]| v.iter().map(|x| Num::Number(*x)).collect::<Vec<_>>();
        let credal = match &self.spec {
            CredalSpec::Vertices(vs) => CredalFile {
                vertices: Some(vs.iter().map(|v| nums(v)).collect()),
                constraints: None,
            },
            CredalSpec::Constraints(cs) => CredalFile {
                vertices: None,
                constraints: Some(
                    cs.iter()
                        .map(|c| ConstraintFile {
                            coeffs: nums(&c.coeffs),
                            relation: match c.relation {
                                Relation::Eq => "eq".into(),
                                Relation::Le => "le".into(),
                            },
                            rhs: Num::Number(c.rhs),
                        })
                        .collect(),
                ),
            },
        };
        let file = ScenarioFile {
            name: self.name.clone(),
            description: self.description.clone(),
            space: SpaceFile {
                x: self.space.x_labels.clone(),
                y: self.space.y_labels.clone(),
                a: self.space.a_labels.clone(),
            },
            loss: self.loss.rows().map(nums).collect(),
            credal,
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }
}
