//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use credal_core::numerics::LinearConstraint;
use credal_core::{CredalSet, JointDist, LossFn, SpaceSpec};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn indicator(dim: usize, cells: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; dim];
    for &k in cells {
        c[k] = 1.0;
    }
    c
}

/// Two binary variables, `Pr(Y = 1) = 2/3`, nothing else known.
pub fn example_2_1() -> CredalSet {
    let space = SpaceSpec::indexed(2, 2, 2).unwrap();
    CredalSet::from_constraints(&space, vec![LinearConstraint::eq(indicator(4, &[1, 3]), 2.0 / 3.0)]).unwrap()
}

/// Contestant picked door 1. `X` is the door Monty opens (0 = door 2,
/// 1 = door 3), `Y` the car's door (0, 1, 2 for doors 1, 2, 3). Monty's
/// choice when the car is behind door 1 is unknown.
pub fn monty_hall() -> CredalSet {
    let space = SpaceSpec::indexed(2, 3, 3).unwrap();
    CredalSet::from_constraints(
        &space,
        vec![
            LinearConstraint::eq(indicator(6, &[0, 3]), 1.0 / 3.0),
            LinearConstraint::eq(indicator(6, &[1, 4]), 1.0 / 3.0),
            LinearConstraint::eq(indicator(6, &[2, 5]), 1.0 / 3.0),
            // Monty never opens the door hiding the car.
            LinearConstraint::eq(indicator(6, &[1]), 0.0),
            LinearConstraint::eq(indicator(6, &[5]), 0.0),
        ],
    )
    .unwrap()
}

/// Two fair coins with unknown dependence.
pub fn walley_coin() -> CredalSet {
    let space = SpaceSpec::indexed(2, 2, 2).unwrap();
    CredalSet::from_constraints(
        &space,
        vec![
            LinearConstraint::eq(indicator(4, &[0, 1]), 0.5),
            LinearConstraint::eq(indicator(4, &[0, 2]), 0.5),
        ],
    )
    .unwrap()
}

pub fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

pub fn random_loss(rng: &mut ChaCha8Rng, ny: usize, na: usize) -> LossFn {
    LossFn::new((0..ny).map(|_| (0..na).map(|_| rng.gen::<f64>()).collect()).collect()).unwrap()
}

/// Hull of `count` random joints over `nx × ny`.
pub fn random_credal(rng: &mut ChaCha8Rng, nx: usize, ny: usize, count: usize) -> CredalSet {
    let points = (0..count)
        .map(|_| JointDist::new(nx, ny, random_simplex_point(rng, nx * ny)).unwrap())
        .collect();
    CredalSet::from_vertices(points).unwrap()
}

pub fn outer(m: &[f64], q: &[f64]) -> Vec<f64> {
    m.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect()
}

/// Every map `X → A`, as action indices.
pub fn deterministic_rules(nx: usize, na: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; nx];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == nx {
                return out;
            }
            cur[i] += 1;
            if cur[i] < na {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Expected loss of a deterministic rule under a joint given as weights.
pub fn rule_loss(w: &[f64], ny: usize, rule: &[usize], l: &LossFn) -> f64 {
    let mut total = 0.0;
    for (x, &a) in rule.iter().enumerate() {
        for y in 0..ny {
            total += w[x * ny + y] * l.get(y, a);
        }
    }
    total
}

/// Payoff matrix of the P-game in normal form: rows are credal vertices,
/// columns are deterministic rules, entries are expected losses.
pub fn p_game_matrix(p: &CredalSet, l: &LossFn) -> Vec<Vec<f64>> {
    let rules = deterministic_rules(p.nx(), l.na());
    p.vertices()
        .iter()
        .map(|v| rules.iter().map(|r| rule_loss(v.weights(), p.ny(), r, l)).collect())
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Value of the zero-sum game where the row player maximizes `m` and the
/// column player minimizes it.
///
/// Enumerates square supports. Every finite zero-sum game has a pair of
/// extreme optimal strategies supported inside a square nonsingular
/// submatrix, and on that submatrix both strategies solve the
/// indifference equations, so checking each candidate for global best
/// responses finds the value.
pub fn matrix_game_value(m: &[Vec<f64>]) -> f64 {
    let rows = m.len();
    let cols = m[0].len();
    let tol = 1e-9;
    for k in 1..=rows.min(cols) {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                // Row mix p on rs: Σ_i p_i m[i][j] = v for j in cs, Σ p = 1.
                let mut a = DMatrix::zeros(k + 1, k + 1);
                let mut b = DVector::zeros(k + 1);
                for (c, &j) in cs.iter().enumerate() {
                    for (r, &i) in rs.iter().enumerate() {
                        a[(c, r)] = m[i][j];
                    }
                    a[(c, k)] = -1.0;
                }
                for r in 0..k {
                    a[(k, r)] = 1.0;
                }
                b[k] = 1.0;
                let Some(p) = a.clone().lu().solve(&b) else { continue };
                // Column mix q on cs: Σ_j m[i][j] q_j = v for i in rs, Σ q = 1.
                let mut a2 = DMatrix::zeros(k + 1, k + 1);
                for (r, &i) in rs.iter().enumerate() {
                    for (c, &j) in cs.iter().enumerate() {
                        a2[(r, c)] = m[i][j];
                    }
                    a2[(r, k)] = -1.0;
                }
                for c in 0..k {
                    a2[(k, c)] = 1.0;
                }
                let Some(q) = a2.lu().solve(&b) else { continue };
                if p.iter().take(k).any(|v| *v < -tol) || q.iter().take(k).any(|v| *v < -tol) {
                    continue;
                }
                let v = p[k];
                if (q[k] - v).abs() > 1e-7 {
                    continue;
                }
                let col_ok = (0..cols).all(|j| {
                    let s: f64 = rs.iter().enumerate().map(|(r, &i)| p[r] * m[i][j]).sum();
                    s >= v - 1e-7
                });
                let row_ok = (0..rows).all(|i| {
                    let s: f64 = cs.iter().enumerate().map(|(c, &j)| q[c] * m[i][j]).sum();
                    s <= v + 1e-7
                });
                if col_ok && row_ok {
                    return v;
                }
            }
        }
    }
    panic!("support enumeration found no equilibrium");
}

/// Vertices of `{x : simplex, constraints}` by solving every square
/// subsystem of active constraints.
pub fn brute_force_vertices(dim: usize, constraints: &[LinearConstraint]) -> Vec<Vec<f64>> {
    use credal_core::numerics::Relation;
    let mut eqs: Vec<(Vec<f64>, f64)> = vec![(vec![1.0; dim], 1.0)];
    let mut ineqs: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = -1.0;
        ineqs.push((e, 0.0));
    }
    for c in constraints {
        match c.relation {
            Relation::Eq => eqs.push((c.coeffs.clone(), c.rhs)),
            Relation::Le => ineqs.push((c.coeffs.clone(), c.rhs)),
        }
    }
    let feasible = |x: &[f64]| {
        let dot = |a: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
        eqs.iter().all(|(a, b)| (dot(a) - b).abs() <= 1e-9) && ineqs.iter().all(|(a, b)| dot(a) <= b + 1e-9)
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for k in 0..=dim {
        for pick in subsets(ineqs.len(), k) {
            let rows: Vec<&(Vec<f64>, f64)> = eqs.iter().chain(pick.iter().map(|&i| &ineqs[i])).collect();
            let a = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i].0[j]);
            if a.rank(1e-10) != dim {
                continue;
            }
            let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
            let Ok(x) = a.svd(true, true).solve(&b, 1e-12) else { continue };
            let x: Vec<f64> = x.iter().copied().collect();
            if feasible(&x) && !out.iter().any(|o| o.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-8)) {
                out.push(x);
            }
        }
    }
    out
}

/// Same point sets up to ordering, within `tol` coordinatewise.
pub fn same_points(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    let covered = |xs: &[Vec<f64>], ys: &[Vec<f64>]| {
        xs.iter()
            .all(|x| ys.iter().any(|y| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol)))
    };
    a.len() == b.len() && covered(a, b) && covered(b, a)
}

/// `conv{m ⊗ (q_x)_x}` over the given marginals and per-observation
/// conditional lists. Such a set equals its own hull of recombinations.
pub fn product_credal(marginals: &[Vec<f64>], conditionals: &[Vec<Vec<f64>>]) -> CredalSet {
    let nx = conditionals.len();
    let ny = conditionals[0][0].len();
    let mut points = Vec::new();
    for m in marginals {
        let mut pick = vec![0usize; nx];
        loop {
            let mut w = vec![0.0; nx * ny];
            for x in 0..nx {
                for y in 0..ny {
                    w[x * ny + y] = m[x] * conditionals[x][pick[x]][y];
                }
            }
            points.push(JointDist::new(nx, ny, w).unwrap());
            let mut i = 0;
            while i < nx {
                pick[i] += 1;
                if pick[i] < conditionals[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == nx {
                break;
            }
        }
    }
    CredalSet::from_vertices(points).unwrap()
}

/// A credal set whose every outcome marginal has an independent witness:
/// `conv({m ⊗ q_k} ∪ extras)` where each extra has its `Y`-marginal in
/// `conv{q_k}`.
pub fn independent_witness_credal(
    rng: &mut ChaCha8Rng,
    nx: usize,
    ny: usize,
    outcome_points: usize,
    extras: usize,
) -> (CredalSet, Vec<Vec<f64>>) {
    let m = random_simplex_point(rng, nx);
    let qs: Vec<Vec<f64>> = (0..outcome_points).map(|_| random_simplex_point(rng, ny)).collect();
    let mut points: Vec<JointDist> = qs
        .iter()
        .map(|q| JointDist::new(nx, ny, outer(&m, q)).unwrap())
        .collect();
    for _ in 0..extras {
        let mu = random_simplex_point(rng, outcome_points);
        let q: Vec<f64> = (0..ny).map(|y| qs.iter().zip(&mu).map(|(qk, w)| w * qk[y]).sum()).collect();
        let mut w = vec![0.0; nx * ny];
        for y in 0..ny {
            let r = random_simplex_point(rng, nx);
            for x in 0..nx {
                w[x * ny + y] = q[y] * r[x];
            }
        }
        points.push(JointDist::new(nx, ny, w).unwrap());
    }
    (CredalSet::from_vertices(points).unwrap(), qs)
}
