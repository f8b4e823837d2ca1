//! Update rules over credal sets: conditioning on partition cells, the
//! calibration test, narrowness, and the search for sharply calibrated rules.

use std::collections::HashMap;
use std::fmt;

use crate::credal::CredalSet;
use crate::decision::{minimax_action, DecisionRule};
use crate::error::{Error, Result};
use crate::numerics::VPolytope;
use crate::prob::{Event, LossFn, POSITIVE_TOL};

/// Largest `|X|` accepted by [`sharp_search`].
pub const MAX_SEARCH_X: usize = 6;
/// Residual above which a conditional marginal counts as outside its class.
pub const CALIBRATION_TOL: f64 = 1e-8;

/// A partition of `X` held in canonical form: each cell sorted, cells ordered
/// by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    nx: usize,
    cells: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(nx: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; nx];
        for cell in &cells {
            if cell.is_empty() {
                return Err(Error::InvalidPartition("empty cell".into()));
            }
            for &x in cell {
                if x >= nx {
                    return Err(Error::InvalidPartition(format!("observation {x} out of range")));
                }
                if seen[x] {
                    return Err(Error::InvalidPartition(format!("observation {x} appears twice")));
                }
                seen[x] = true;
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("observation {x} is not covered")));
        }
        let mut cells: Vec<Vec<usize>> = cells
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        cells.sort_unstable_by_key(|c| c[0]);
        Ok(Self { nx, cells })
    }

    /// `{{x} : x ∈ X}`.
    pub fn singletons(nx: usize) -> Self {
        Self {
            nx,
            cells: (0..nx).map(|x| vec![x]).collect(),
        }
    }

    /// `{X}`.
    pub fn single_cell(nx: usize) -> Self {
        Self {
            nx,
            cells: vec![(0..nx).collect()],
        }
    }

    /// Every partition of `{0, .., nx - 1}`, in canonical order.
    pub fn all(nx: usize) -> Vec<Partition> {
        if nx == 0 {
            return Vec::new();
        }
        // Restricted growth strings: labels[0] = 0, labels[i] <= 1 + max(labels[..i]).
        let mut out = Vec::new();
        let mut labels = vec![0usize; nx];
        loop {
            let blocks = labels.iter().max().map_or(0, |m| m + 1);
            let mut cells = vec![Vec::new(); blocks];
            for (x, &b) in labels.iter().enumerate() {
                cells[b].push(x);
            }
            out.push(Self { nx, cells });

            let mut i = nx - 1;
            loop {
                if i == 0 {
                    return out;
                }
                let prefix_max = labels[..i].iter().copied().max().unwrap_or(0);
                if labels[i] <= prefix_max {
                    labels[i] += 1;
                    labels[i + 1..].iter_mut().for_each(|l| *l = 0);
                    break;
                }
                i -= 1;
            }
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// `C(x)`.
    pub fn cell_of(&self, x: usize) -> &[usize] {
        self.cells.iter().find(|c| c.contains(&x)).expect("partition covers X")
    }

    fn mask(cell: &[usize]) -> usize {
        cell.iter().fold(0, |m, &x| m | (1 << x))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self
            .cells
            .iter()
            .map(|c| c.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{{{}}}", cells.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Conditioning on the cell containing the observation.
    CConditioning(Partition),
    /// Every entry is the set of all joint distributions.
    Vacuous,
    External,
}

/// `Π(P, ·)`: one credal set per observation, `None` where undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRuleTable {
    nx: usize,
    ny: usize,
    entries: Vec<Option<CredalSet>>,
    provenance: Provenance,
}

impl UpdateRuleTable {
    pub fn new(nx: usize, ny: usize, entries: Vec<Option<CredalSet>>, provenance: Provenance) -> Result<Self> {
        if entries.len() != nx {
            return Err(Error::MalformedDimensions(format!("{} entries for {nx} observations", entries.len())));
        }
        if entries.iter().flatten().any(|e| e.nx() != nx || e.ny() != ny) {
            return Err(Error::MalformedDimensions("entry over a different space".into()));
        }
        Ok(Self {
            nx,
            ny,
            entries,
            provenance,
        })
    }

    /// `Π(P, x) = Δ(X × Y)` for every `x`.
    pub fn vacuous(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            entries: vec![Some(CredalSet::vacuous(nx, ny)); nx],
            provenance: Provenance::Vacuous,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn entry(&self, x: usize) -> Option<&CredalSet> {
        self.entries[x].as_ref()
    }

    pub fn entries(&self) -> &[Option<CredalSet>] {
        &self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Observations with a defined entry.
    pub fn defined(&self) -> Vec<usize> {
        (0..self.nx).filter(|&x| self.entries[x].is_some()).collect()
    }
}

/// `Π(P, x) = P | X ∈ C(x)`. Cells no vertex can produce get `None`.
pub fn c_conditioning(p: &CredalSet, c: &Partition) -> Result<UpdateRuleTable> {
    if c.nx() != p.nx() {
        return Err(Error::InvalidPartition(format!(
            "partition of {} observations for a space with {}",
            c.nx(),
            p.nx()
        )));
    }
    let mut entries = vec![None; p.nx()];
    for cell in c.cells() {
        let entry = condition_on_cell(p, cell)?;
        for &x in cell {
            entries[x] = entry.clone();
        }
    }
    UpdateRuleTable::new(p.nx(), p.ny(), entries, Provenance::CConditioning(c.clone()))
}

fn condition_on_cell(p: &CredalSet, cell: &[usize]) -> Result<Option<CredalSet>> {
    let e = Event::observations(p.nx(), p.ny(), cell)?;
    match p.condition(&e) {
        Ok(s) => Ok(Some(s)),
        Err(Error::EmptyConditional) => Ok(None),
        Err(err) => Err(err),
    }
}

/// At each `x`, the minimax randomized action against the `Y`-marginals of
/// `Π(P, x)`. Undefined entries get uniform rows.
pub fn rule_from_update(table: &UpdateRuleTable, l: &LossFn) -> Result<DecisionRule> {
    if table.ny() != l.ny() {
        return Err(Error::MalformedDimensions("table and loss disagree on |Y|".into()));
    }
    let mut rows = Vec::with_capacity(table.nx());
    for entry in table.entries() {
        rows.push(match entry {
            Some(set) => minimax_action(&set.marginal_y()?, l)?.mix,
            None => vec![1.0 / l.na() as f64; l.na()],
        });
    }
    DecisionRule::new(rows)
}

/// Observations sharing one `Y`-marginal set `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeClass {
    pub range: VPolytope,
    /// `X_R`.
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationViolation {
    pub vertex: usize,
    pub class: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub classes: Vec<RangeClass>,
    pub violations: Vec<CalibrationViolation>,
    /// `(vertex, class)` pairs skipped because the vertex gives `X_R` no mass.
    pub skipped: Vec<(usize, usize)>,
    /// Observations without an entry; they belong to no class.
    pub undefined: Vec<usize>,
}

impl CalibrationReport {
    pub fn is_calibrated(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Pr_Y(· | X ∈ X_R) ∈ R` for every class `R` and every vertex.
///
/// Membership in `R` is convex and conditioning on a fixed event maps
/// segments to segments, so checking the vertices with positive mass on
/// `X_R` covers the whole set when no vertex is skipped.
pub fn check_calibration(p: &CredalSet, table: &UpdateRuleTable) -> Result<CalibrationReport> {
    if table.nx() != p.nx() || table.ny() != p.ny() {
        return Err(Error::MalformedDimensions("table and credal set over different spaces".into()));
    }
    let mut classes: Vec<RangeClass> = Vec::new();
    let mut undefined = Vec::new();
    for x in 0..table.nx() {
        let Some(entry) = table.entry(x) else {
            undefined.push(x);
            continue;
        };
        let range = entry.marginal_y()?;
        let mut placed = false;
        for class in &mut classes {
            if class.range.set_eq(&range)? {
                class.cells.push(x);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(RangeClass { range, cells: vec![x] });
        }
    }

    let mut violations = Vec::new();
    let mut skipped = Vec::new();
    for (k, class) in classes.iter().enumerate() {
        let e = Event::observations(p.nx(), p.ny(), &class.cells)?;
        for (j, v) in p.vertices().iter().enumerate() {
            if v.prob(&e)? <= POSITIVE_TOL {
                skipped.push((j, k));
                continue;
            }
            let q = v.condition(&e)?.marginal_y();
            let residual = class.range.residual(&q)?;
            if residual > CALIBRATION_TOL {
                violations.push(CalibrationViolation {
                    vertex: j,
                    class: k,
                    residual,
                });
            }
        }
    }
    Ok(CalibrationReport {
        classes,
        violations,
        skipped,
        undefined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Narrowness {
    Narrower,
    Wider,
    Equal,
    Incomparable,
}

impl fmt::Display for Narrowness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Narrowness::Narrower => "narrower",
            Narrowness::Wider => "wider",
            Narrowness::Equal => "equal",
            Narrowness::Incomparable => "incomparable",
        })
    }
}

fn aggregate(relations: impl IntoIterator<Item = (bool, bool)>) -> Narrowness {
    let (mut all_sub, mut all_sup, mut some_strict_sub, mut some_strict_sup) = (true, true, false, false);
    for (sub, sup) in relations {
        all_sub &= sub;
        all_sup &= sup;
        some_strict_sub |= sub && !sup;
        some_strict_sup |= sup && !sub;
    }
    match (all_sub, all_sup) {
        (true, true) => Narrowness::Equal,
        (true, false) if some_strict_sub => Narrowness::Narrower,
        (false, true) if some_strict_sup => Narrowness::Wider,
        _ => Narrowness::Incomparable,
    }
}

/// Compares `t1` with `t2` entry by entry.
///
/// Tables defined on different sets of observations are reported as
/// incomparable.
pub fn compare_narrowness(t1: &UpdateRuleTable, t2: &UpdateRuleTable) -> Result<Narrowness> {
    if t1.nx() != t2.nx() || t1.ny() != t2.ny() {
        return Err(Error::MalformedDimensions("tables over different spaces".into()));
    }
    if t1.defined() != t2.defined() {
        return Ok(Narrowness::Incomparable);
    }
    let mut relations = Vec::new();
    for x in t1.defined() {
        let (a, b) = (t1.entry(x).expect("defined"), t2.entry(x).expect("defined"));
        relations.push((a.is_subset_of(b)?, b.is_subset_of(a)?));
    }
    Ok(aggregate(relations))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpSearchResult {
    pub candidates: Vec<(Partition, UpdateRuleTable)>,
    /// `matrix[i][j]` compares candidate `i` with candidate `j`.
    pub matrix: Vec<Vec<Narrowness>>,
    /// Candidates with no strictly narrower competitor.
    pub minimal: Vec<usize>,
}

impl SharpSearchResult {
    pub fn minimal_candidates(&self) -> impl Iterator<Item = &(Partition, UpdateRuleTable)> {
        self.minimal.iter().map(|&i| &self.candidates[i])
    }
}

/// Enumerates every partition of `X`, conditions on it, and keeps the tables
/// no other candidate is strictly narrower than.
pub fn sharp_search(p: &CredalSet) -> Result<SharpSearchResult> {
    let nx = p.nx();
    if nx > MAX_SEARCH_X {
        return Err(Error::SizeLimit {
            what: "|X| for sharp search",
            limit: MAX_SEARCH_X,
            got: nx,
        });
    }
    let partitions = Partition::all(nx);

    // Every cell that can occur, conditioned once.
    let mut conditioned: HashMap<usize, Option<CredalSet>> = HashMap::new();
    for mask in 1usize..(1 << nx) {
        let cell: Vec<usize> = (0..nx).filter(|x| mask >> x & 1 == 1).collect();
        conditioned.insert(mask, condition_on_cell(p, &cell)?);
    }
    let mut subset: HashMap<(usize, usize), bool> = HashMap::new();
    let mut is_subset = |a: usize, b: usize| -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        if let Some(r) = subset.get(&(a, b)) {
            return Ok(*r);
        }
        let r = match (&conditioned[&a], &conditioned[&b]) {
            (Some(s), Some(t)) => s.is_subset_of(t)?,
            _ => false,
        };
        subset.insert((a, b), r);
        Ok(r)
    };

    let mut candidates = Vec::with_capacity(partitions.len());
    let mut cell_masks = Vec::with_capacity(partitions.len());
    for part in partitions {
        let masks: Vec<usize> = (0..nx).map(|x| Partition::mask(part.cell_of(x))).collect();
        let entries = masks.iter().map(|m| conditioned[m].clone()).collect();
        let table = UpdateRuleTable::new(nx, p.ny(), entries, Provenance::CConditioning(part.clone()))?;
        candidates.push((part, table));
        cell_masks.push(masks);
    }

    let n = candidates.len();
    let mut matrix = vec![vec![Narrowness::Equal; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (ti, tj) = (&candidates[i].1, &candidates[j].1);
            let rel = if ti.defined() != tj.defined() {
                Narrowness::Incomparable
            } else {
                let mut relations = Vec::new();
                for x in ti.defined() {
                    let (a, b) = (cell_masks[i][x], cell_masks[j][x]);
                    relations.push((is_subset(a, b)?, is_subset(b, a)?));
                }
                aggregate(relations)
            };
            matrix[i][j] = rel;
            matrix[j][i] = match rel {
                Narrowness::Narrower => Narrowness::Wider,
                Narrowness::Wider => Narrowness::Narrower,
                other => other,
            };
        }
    }
    let minimal = (0..n)
        .filter(|&i| (0..n).all(|j| matrix[j][i] != Narrowness::Narrower))
        .collect();
    Ok(SharpSearchResult {
        candidates,
        matrix,
        minimal,
    })
}
