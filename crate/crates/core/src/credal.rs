//! Credal sets: closed convex sets of joint distributions, held by vertices.
//!
//! Arbitrary closed sets are represented by their convex hull. Expected loss
//! is linear in the distribution, so every minimax value and worst case is
//! the same for a set and its hull.

use crate::error::{Error, Result};
use crate::numerics::{enumerate_vertices, LinearConstraint, VPolytope, MAX_DIMENSION};
use crate::prob::{Event, JointDist, SpaceSpec, POSITIVE_TOL};

/// Upper bound on the number of candidate vertices assembled by
/// [`CredalSet::build_hull`].
pub const MAX_HULL_COMBINATIONS: usize = 1_000_000;
/// Residual above which a conditional marginal counts as leaving `P_Y`.
pub const DILATION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct CredalSet {
    nx: usize,
    ny: usize,
    vertices: Vec<JointDist>,
    hull: VPolytope,
    origin: Option<Vec<LinearConstraint>>,
}

/// `⟨P⟩` has the same representation as any other credal set.
pub type HullSet = CredalSet;

impl CredalSet {
    /// Convex hull of `points`, reduced to its extreme points.
    pub fn from_vertices(points: Vec<JointDist>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptySet);
        };
        let (nx, ny) = (first.nx(), first.ny());
        if points.iter().any(|p| p.nx() != nx || p.ny() != ny) {
            return Err(Error::MalformedDimensions("vertices over different spaces".into()));
        }
        let hull = VPolytope::from_points(points.into_iter().map(JointDist::into_weights).collect())?;
        Ok(Self::from_polytope(nx, ny, hull))
    }

    fn from_polytope(nx: usize, ny: usize, hull: VPolytope) -> Self {
        let vertices = hull
            .vertices()
            .iter()
            .map(|w| JointDist::new(nx, ny, w.clone()).expect("hull of distributions"))
            .collect();
        Self {
            nx,
            ny,
            vertices,
            hull,
            origin: None,
        }
    }

    /// The polytope `{Pr : constraints}` over joint weights indexed `x * |Y| + y`.
    pub fn from_constraints(space: &SpaceSpec, constraints: Vec<LinearConstraint>) -> Result<Self> {
        let dim = space.joint_dim();
        if dim > MAX_DIMENSION {
            return Err(Error::SizeLimit {
                what: "joint space size for constraint-defined credal sets",
                limit: MAX_DIMENSION,
                got: dim,
            });
        }
        let points = enumerate_vertices(dim, &constraints)?;
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        let hull = VPolytope::from_irredundant(points);
        let mut set = Self::from_polytope(space.nx(), space.ny(), hull);
        set.origin = Some(constraints);
        Ok(set)
    }

    pub fn singleton(p: JointDist) -> Self {
        let (nx, ny) = (p.nx(), p.ny());
        Self::from_polytope(nx, ny, VPolytope::from_irredundant(vec![p.into_weights()]))
    }

    /// All of `Δ(X × Y)`.
    pub fn vacuous(nx: usize, ny: usize) -> Self {
        let corners = (0..nx * ny)
            .map(|k| {
                let mut w = vec![0.0; nx * ny];
                w[k] = 1.0;
                w
            })
            .collect();
        Self::from_polytope(nx, ny, VPolytope::from_irredundant(corners))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn vertices(&self) -> &[JointDist] {
        &self.vertices
    }

    pub fn polytope(&self) -> &VPolytope {
        &self.hull
    }

    pub fn origin(&self) -> Option<&[LinearConstraint]> {
        self.origin.as_deref()
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn contains(&self, p: &JointDist) -> Result<bool> {
        self.check_space(p.nx(), p.ny())?;
        self.hull.contains(p.weights())
    }

    /// `P | E`, built from the vertices that give `e` positive probability.
    ///
    /// Vertices with `v(e) = 0` are skipped; when some but not all vertices
    /// vanish on `e` the result is the closure of `P | E`.
    pub fn condition(&self, e: &Event) -> Result<CredalSet> {
        Ok(self.condition_with_report(e)?.0)
    }

    /// Like [`condition`](Self::condition), also returning how many vertices
    /// were dropped for giving `e` zero probability.
    pub fn condition_with_report(&self, e: &Event) -> Result<(CredalSet, usize)> {
        let mut images = Vec::with_capacity(self.vertices.len());
        let mut dropped = 0;
        for v in &self.vertices {
            if v.prob(e)? > POSITIVE_TOL {
                images.push(v.condition(e)?);
            } else {
                dropped += 1;
            }
        }
        if images.is_empty() {
            return Err(Error::EmptyConditional);
        }
        Ok((Self::from_vertices(images)?, dropped))
    }

    /// `P | X = x`, or `None` when every vertex gives `x` probability zero.
    pub fn condition_on_x(&self, x: usize) -> Result<Option<CredalSet>> {
        let e = Event::observation(self.nx, self.ny, x)?;
        match self.condition(&e) {
            Ok(c) => Ok(Some(c)),
            Err(Error::EmptyConditional) => Ok(None),
            Err(err) => Err(err),
        }
    }

    /// True when some vertex gives `X = x` positive probability.
    pub fn observable(&self, x: usize) -> bool {
        self.vertices.iter().any(|v| v.prob_x(x) > POSITIVE_TOL)
    }

    /// True when every vertex gives every `x` positive probability.
    pub fn has_full_x_support(&self) -> bool {
        self.vertices
            .iter()
            .all(|v| (0..self.nx).all(|x| v.prob_x(x) > POSITIVE_TOL))
    }

    pub fn marginal_y(&self) -> Result<VPolytope> {
        VPolytope::from_points(self.vertices.iter().map(JointDist::marginal_y).collect())
    }

    pub fn marginal_x(&self) -> Result<VPolytope> {
        VPolytope::from_points(self.vertices.iter().map(JointDist::marginal_x).collect())
    }

    /// `(P | X = x)_Y`: the conditional distributions of `Y` given `X = x`.
    pub fn conditional_y(&self, x: usize) -> Result<Option<VPolytope>> {
        let mut rows = Vec::new();
        for v in &self.vertices {
            let mass = v.prob_x(x);
            if mass > POSITIVE_TOL {
                rows.push(v.row(x).iter().map(|w| w / mass).collect());
            }
        }
        if rows.is_empty() {
            return Ok(None);
        }
        VPolytope::from_points(rows).map(Some)
    }

    /// `⟨P⟩`: every joint whose `X`-marginal is in `P_X` and whose conditional
    /// at each observable `x` is in `(P | X = x)`.
    ///
    /// The set is convex and its extreme points are products of an extreme
    /// marginal with one extreme conditional per cell.
    pub fn build_hull(&self) -> Result<HullSet> {
        let marginals = self.marginal_x()?;
        let mut conditionals: Vec<Option<VPolytope>> = Vec::with_capacity(self.nx);
        for x in 0..self.nx {
            conditionals.push(self.conditional_y(x)?);
        }
        let per_cell: usize = conditionals
            .iter()
            .map(|c| c.as_ref().map_or(1, VPolytope::len))
            .try_fold(1usize, |acc, k| acc.checked_mul(k))
            .unwrap_or(usize::MAX);
        let total = per_cell.saturating_mul(marginals.len());
        if total > MAX_HULL_COMBINATIONS {
            return Err(Error::SizeLimit {
                what: "hull candidate combinations",
                limit: MAX_HULL_COMBINATIONS,
                got: total,
            });
        }

        let mut candidates: Vec<Vec<f64>> = Vec::new();
        for m in marginals.vertices() {
            // Cells without mass contribute a zero row whatever the conditional.
            let live: Vec<usize> = (0..self.nx)
                .filter(|&x| m[x] > POSITIVE_TOL && conditionals[x].is_some())
                .collect();
            let choices: Vec<&[Vec<f64>]> = live
                .iter()
                .map(|&x| conditionals[x].as_ref().map(VPolytope::vertices).unwrap_or_default())
                .collect();
            let mut pick = vec![0usize; live.len()];
            loop {
                let mut w = vec![0.0; self.nx * self.ny];
                for (k, &x) in live.iter().enumerate() {
                    for (y, c) in choices[k][pick[k]].iter().enumerate() {
                        w[x * self.ny + y] = m[x] * c;
                    }
                }
                candidates.push(w);
                // Odometer over the conditional choices.
                let mut k = 0;
                while k < pick.len() {
                    pick[k] += 1;
                    if pick[k] < choices[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == pick.len() {
                    break;
                }
            }
        }
        let hull = VPolytope::from_points(candidates)?;
        Ok(Self::from_polytope(self.nx, self.ny, hull))
    }

    pub fn is_subset_of(&self, other: &CredalSet) -> Result<bool> {
        self.check_space(other.nx, other.ny)?;
        self.hull.is_subset_of(&other.hull)
    }

    pub fn set_eq(&self, other: &CredalSet) -> Result<bool> {
        Ok(self.is_subset_of(other)? && other.is_subset_of(self)?)
    }

    /// Per-observation dilation of the `Y`-marginal set.
    pub fn detect_dilation(&self) -> Result<Vec<DilationReport>> {
        let prior = self.marginal_y()?;
        let mut out = Vec::with_capacity(self.nx);
        for x in 0..self.nx {
            let Some(post) = self.conditional_y(x)? else {
                out.push(DilationReport {
                    x,
                    posterior: None,
                    covers_prior: false,
                    excess: 0.0,
                    dilation: false,
                });
                continue;
            };
            let covers_prior = prior.is_subset_within(&post, DILATION_TOL)?;
            let excess = post.excess_over(&prior)?;
            out.push(DilationReport {
                x,
                dilation: covers_prior && excess > DILATION_TOL,
                posterior: Some(post),
                covers_prior,
                excess,
            });
        }
        Ok(out)
    }

    fn check_space(&self, nx: usize, ny: usize) -> Result<()> {
        if nx != self.nx || ny != self.ny {
            return Err(Error::MalformedDimensions(format!(
                "{}x{} credal set compared with a {nx}x{ny} object",
                self.nx, self.ny
            )));
        }
        Ok(())
    }
}

/// Dilation verdict for one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationReport {
    pub x: usize,
    /// `(P | X = x)_Y`, absent when no vertex can produce `x`.
    pub posterior: Option<VPolytope>,
    /// `P_Y ⊆ (P | X = x)_Y`.
    pub covers_prior: bool,
    /// Largest membership residual of a posterior vertex in `P_Y`.
    pub excess: f64,
    /// Strict superset: `covers_prior` and some posterior vertex leaves `P_Y`.
    pub dilation: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{max_abs_diff, LinearConstraint};

    fn example_2_1() -> CredalSet {
        let space = SpaceSpec::indexed(2, 2, 2).unwrap();
        CredalSet::from_constraints(&space, vec![LinearConstraint::eq(vec![0.0, 1.0, 0.0, 1.0], 2.0 / 3.0)])
            .unwrap()
    }

    fn walley_coin() -> CredalSet {
        let space = SpaceSpec::indexed(2, 2, 2).unwrap();
        CredalSet::from_constraints(
            &space,
            vec![
                LinearConstraint::eq(vec![1.0, 1.0, 0.0, 0.0], 0.5),
                LinearConstraint::eq(vec![1.0, 0.0, 1.0, 0.0], 0.5),
            ],
        )
        .unwrap()
    }

    fn is_full_simplex(p: &VPolytope) -> bool {
        let n = p.dim();
        (0..n).all(|k| {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            p.contains(&e).unwrap()
        })
    }

    #[test]
    fn example_2_1_vertices() {
        let p = example_2_1();
        assert_eq!(p.vertices().len(), 4);
        for v in p.vertices() {
            assert!((v.marginal_y()[1] - 2.0 / 3.0).abs() < 1e-12);
        }
        let py = p.marginal_y().unwrap();
        assert!(py.is_point());
        assert!(max_abs_diff(&py.vertices()[0], &[1.0 / 3.0, 2.0 / 3.0]) < 1e-12);
    }

    #[test]
    fn example_2_1_conditionals_are_vacuous() {
        let p = example_2_1();
        for x in 0..2 {
            assert!(is_full_simplex(&p.conditional_y(x).unwrap().unwrap()));
        }
    }

    #[test]
    fn pinned_set_is_singleton() {
        let space = SpaceSpec::indexed(1, 3, 1).unwrap();
        let cs = vec![
            LinearConstraint::eq(vec![1.0, 0.0, 0.0], 0.25),
            LinearConstraint::eq(vec![0.0, 1.0, 0.0], 0.25),
        ];
        assert!(CredalSet::from_constraints(&space, cs).unwrap().is_singleton());
    }

    #[test]
    fn infeasible_constraints() {
        let space = SpaceSpec::indexed(1, 2, 1).unwrap();
        let cs = vec![LinearConstraint::ge(vec![1.0, 1.0], 2.0)];
        assert!(matches!(CredalSet::from_constraints(&space, cs), Err(Error::EmptySet)));
    }

    #[test]
    fn singleton_condition() {
        let p = CredalSet::singleton(JointDist::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap());
        let c = p.condition(&Event::observation(2, 2, 1).unwrap()).unwrap();
        assert!(c.is_singleton());
        assert!(max_abs_diff(c.vertices()[0].weights(), &[0.0, 0.0, 3.0 / 7.0, 4.0 / 7.0]) < 1e-12);
    }

    #[test]
    fn condition_on_null_event() {
        let p = CredalSet::singleton(JointDist::point_mass(2, 2, 0, 0));
        let e = Event::observation(2, 2, 1).unwrap();
        assert!(matches!(p.condition(&e), Err(Error::EmptyConditional)));
        assert!(p.condition_on_x(1).unwrap().is_none());
    }

    #[test]
    fn hull_of_example_2_1_is_whole_simplex() {
        let p = example_2_1();
        let h = p.build_hull().unwrap();
        assert!(p.is_subset_of(&h).unwrap());
        assert!(!h.is_subset_of(&p).unwrap());
        assert!(is_full_simplex(h.polytope()));
        assert!(!p.set_eq(&h).unwrap());
    }

    #[test]
    fn hull_of_full_support_singleton() {
        let p = CredalSet::singleton(JointDist::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap());
        assert!(p.set_eq(&p.build_hull().unwrap()).unwrap());
    }

    #[test]
    fn marginal_of_vacuous() {
        let v = CredalSet::vacuous(3, 2);
        assert!(is_full_simplex(&v.marginal_y().unwrap()));
    }

    #[test]
    fn walley_coin_dilates() {
        let p = walley_coin();
        let reports = p.detect_dilation().unwrap();
        assert!(reports.iter().all(|r| r.dilation));
        assert!(!CredalSet::singleton(JointDist::uniform(2, 2))
            .detect_dilation()
            .unwrap()
            .iter()
            .any(|r| r.dilation));
    }
}
