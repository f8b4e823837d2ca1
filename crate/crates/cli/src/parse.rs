//! Command-line mini languages: events, partitions and rule names.

use credal_core::{Event, Partition, SpaceSpec};

use crate::error::{CliError, CliResult};

fn x_index(space: &SpaceSpec, label: &str) -> CliResult<usize> {
    space
        .x_index(label.trim())
        .ok_or_else(|| CliError::Validation(format!("unknown x label '{}'", label.trim())))
}

/// `X=G2|G3&Y=1`: clauses joined by `&`, alternatives within a clause by `|`.
pub fn parse_event(space: &SpaceSpec, text: &str) -> CliResult<Event> {
    let (nx, ny) = (space.nx(), space.ny());
    let mut event = Event::full(nx, ny);
    for clause in text.split('&') {
        let (var, labels) = clause
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("event clause '{clause}' is not VAR=LABELS")))?;
        let labels: Vec<&str> = labels.split('|').map(str::trim).collect();
        let clause_event = match var.trim() {
            "X" | "x" => {
                let xs = labels.iter().map(|l| x_index(space, l)).collect::<CliResult<Vec<_>>>()?;
                Event::observations(nx, ny, &xs)?
            }
            "Y" | "y" => {
                let ys = labels
                    .iter()
                    .map(|l| {
                        space
                            .y_index(l)
                            .ok_or_else(|| CliError::Validation(format!("unknown y label '{l}'")))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Event::outcomes(nx, ny, &ys)?
            }
            other => return Err(CliError::Validation(format!("event variable '{other}' is not X or Y"))),
        };
        event = event.intersect(&clause_event)?;
    }
    Ok(event)
}

/// `G2;G3` (two cells) or `G2,G3` (one cell).
pub fn parse_partition(space: &SpaceSpec, text: &str) -> CliResult<Partition> {
    let cells = text
        .split(';')
        .map(|cell| cell.split(',').map(|l| x_index(space, l)).collect::<CliResult<Vec<_>>>())
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Partition::new(space.nx(), cells)?)
}

pub fn format_partition(space: &SpaceSpec, p: &Partition) -> String {
    p.cells()
        .iter()
        .map(|c| c.iter().map(|&x| space.x_labels[x].as_str()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

/// A rule named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleSpec {
    Apriori,
    Aposteriori,
    Uniform,
    /// Deterministic action per observation.
    Mapping(Vec<usize>),
}

/// `apriori`, `aposteriori`, `uniform`, or `G2=door 3,G3=door 2`.
pub fn parse_rule(space: &SpaceSpec, text: &str) -> CliResult<RuleSpec> {
    match text.trim() {
        "apriori" => return Ok(RuleSpec::Apriori),
        "aposteriori" => return Ok(RuleSpec::Aposteriori),
        "uniform" => return Ok(RuleSpec::Uniform),
        _ => {}
    }
    let mut actions = vec![None; space.nx()];
    for pair in text.split(',') {
        let (x, a) = pair.split_once('=').ok_or_else(|| {
            CliError::Validation(format!(
                "rule '{text}' is not apriori, aposteriori, uniform or a list of x=action pairs"
            ))
        })?;
        let xi = x_index(space, x)?;
        let ai = space
            .a_index(a.trim())
            .ok_or_else(|| CliError::Validation(format!("unknown action label '{}'", a.trim())))?;
        if actions[xi].replace(ai).is_some() {
            return Err(CliError::Validation(format!("x label '{}' assigned twice", x.trim())));
        }
    }
    let actions = actions
        .into_iter()
        .enumerate()
        .map(|(x, a)| a.ok_or_else(|| CliError::Validation(format!("no action for x = '{}'", space.x_labels[x]))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(RuleSpec::Mapping(actions))
}
