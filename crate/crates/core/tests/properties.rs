mod common;

use common::*;
use credal_core::decision::{best_response, conditional_worst_case};
use credal_core::games::CERTIFICATE_TOL;
use credal_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-6;

/// Random credal set and loss from a seed: small sizes so the LPs stay quick.
fn instance(seed: u64) -> (CredalSet, LossFn) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nx = 2 + (seed % 2) as usize;
    let ny = 2 + ((seed / 2) % 2) as usize;
    let na = 2 + ((seed / 4) % 2) as usize;
    let k = 2 + ((seed / 8) % 3) as usize;
    (random_credal(&mut rng, nx, ny, k), random_loss(&mut rng, ny, na))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn singleton_sets_make_observing_free(seed in any::<u64>()) {
        let (p, l) = instance(seed);
        let single = CredalSet::singleton(p.vertices()[0].clone());
        let pri = apriori_minimax(&single, &l).unwrap();
        let post = aposteriori_minimax(&single, &l).unwrap();
        let (_, bayes) = best_response(&single.vertices()[0], &l);
        prop_assert!(close(pri.value, bayes, TOL), "{} vs {}", pri.value, bayes);
        prop_assert!(close(post.value, bayes, TOL), "{} vs {}", post.value, bayes);
    }

    #[test]
    fn apriori_beats_every_other_rule(seed in any::<u64>()) {
        let (p, l) = instance(seed);
        let pri = apriori_minimax(&p, &l).unwrap();
        let post = aposteriori_minimax(&p, &l).unwrap();
        prop_assert!(pri.value <= post.value + TOL);
        for r in deterministic_rules(p.nx(), l.na()) {
            let worst = p.vertices().iter().map(|v| rule_loss(v.weights(), p.ny(), &r, &l)).fold(f64::MIN, f64::max);
            prop_assert!(pri.value <= worst + TOL);
        }
        prop_assert!(close(pri.value, matrix_game_value(&p_game_matrix(&p, &l)), TOL));
    }

    #[test]
    fn px_game_value_matches_per_x_minimax(seed in any::<u64>()) {
        let (p, l) = instance(seed);
        let post = aposteriori_minimax(&p, &l).unwrap();
        let per_x = post.per_x_values.unwrap();
        for x in 0..p.nx() {
            match per_x[x] {
                Some(v) => {
                    let (eq, cert) = solve_px_game(&p, &l, x).unwrap();
                    prop_assert!(close(eq.value, v, TOL));
                    prop_assert!(cert.passes(CERTIFICATE_TOL));
                    prop_assert_eq!(eq.observation, Some(x));
                }
                None => prop_assert!(solve_px_game(&p, &l, x).is_err()),
            }
        }
    }

    #[test]
    fn positive_affine_loss_changes_nothing_but_scale(seed in any::<u64>(), scale in 0.1f64..10.0, shift in -5.0f64..5.0) {
        let (p, l) = instance(seed);
        let m = l.affine(scale, shift);
        let a = apriori_minimax(&p, &l).unwrap();
        let b = apriori_minimax(&p, &m).unwrap();
        prop_assert!(close(b.value, scale * a.value + shift, TOL * (1.0 + scale + shift.abs())));
        // The original optimal rule stays optimal under the new loss.
        prop_assert!(close(a.rule.worst_case(&p, &m).unwrap(), b.value, TOL * (1.0 + scale + shift.abs())));
        let pa = aposteriori_minimax(&p, &l).unwrap().per_x_values.unwrap();
        let pb = aposteriori_minimax(&p, &m).unwrap().per_x_values.unwrap();
        for (u, v) in pa.iter().zip(&pb) {
            match (u, v) {
                (Some(u), Some(v)) => prop_assert!(close(*v, scale * u + shift, TOL * (1.0 + scale + shift.abs()))),
                (None, None) => {}
                _ => prop_assert!(false, "observability changed"),
            }
        }
    }

    #[test]
    fn singleton_c_conditioning_is_the_aposteriori_rule(seed in any::<u64>()) {
        let (p, l) = instance(seed);
        let table = c_conditioning(&p, &Partition::singletons(p.nx())).unwrap();
        let rule = rule_from_update(&table, &l).unwrap();
        let per_x = aposteriori_minimax(&p, &l).unwrap().per_x_values.unwrap();
        for x in 0..p.nx() {
            let got = conditional_worst_case(&p, &rule, &l, x).unwrap();
            match (got, per_x[x]) {
                (Some(g), Some(v)) => prop_assert!(close(g, v, TOL), "x={x}: {g} vs {v}"),
                (None, None) => {}
                other => prop_assert!(false, "{other:?}"),
            }
        }
        prop_assert!(check_calibration(&p, &table).unwrap().is_calibrated());
    }

    #[test]
    fn walley_comparison_is_antisymmetric(seed in any::<u64>()) {
        let (p, l) = instance(seed);
        let a = apriori_minimax(&p, &l).unwrap().rule;
        let b = aposteriori_minimax(&p, &l).unwrap().rule;
        let ab = walley_compare(&a, &b, &p, &l).unwrap();
        let ba = walley_compare(&b, &a, &p, &l).unwrap();
        prop_assert!(close(ab.s12, ba.s21, 1e-9) && close(ab.s21, ba.s12, 1e-9));
        let flipped = match ab.order {
            WalleyOrder::Better => WalleyOrder::Worse,
            WalleyOrder::Worse => WalleyOrder::Better,
            o => o,
        };
        prop_assert_eq!(ba.order, flipped);
        // Sublinearity: max E[L1 - L2] is at least the gap of the worst cases.
        let gap = a.worst_case(&p, &l).unwrap() - b.worst_case(&p, &l).unwrap();
        prop_assert!(ab.s12 + 1e-9 >= gap);
        let self_cmp = walley_compare(&a, &a, &p, &l).unwrap();
        prop_assert_eq!(self_cmp.order, WalleyOrder::Equivalent);
    }

    #[test]
    fn conditioned_vertices_lie_in_the_conditional_set(seed in any::<u64>()) {
        let (p, _) = instance(seed);
        for x in 0..p.nx() {
            let Some(c) = p.condition_on_x(x).unwrap() else { continue };
            let e = Event::observation(p.nx(), p.ny(), x).unwrap();
            for v in p.vertices() {
                if v.prob_x(x) > 1e-9 {
                    prop_assert!(c.contains(&v.condition(&e).unwrap()).unwrap());
                }
            }
        }
    }
}

#[test]
fn narrowness_is_a_partial_order_on_search_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..6 {
        let nx = 2 + round % 2;
        let p = random_credal(&mut rng, nx, 2, 3);
        let r = sharp_search(&p).unwrap();
        let n = r.candidates.len();
        assert_eq!(n, Partition::all(nx).len());
        for i in 0..n {
            assert_eq!(r.matrix[i][i], Narrowness::Equal);
            for j in 0..n {
                let back = match r.matrix[i][j] {
                    Narrowness::Narrower => Narrowness::Wider,
                    Narrowness::Wider => Narrowness::Narrower,
                    o => o,
                };
                assert_eq!(r.matrix[j][i], back, "{i} {j}");
                for k in 0..n {
                    let below = |a: usize, b: usize| matches!(r.matrix[a][b], Narrowness::Narrower | Narrowness::Equal);
                    if below(i, j) && below(j, k) {
                        assert!(below(i, k), "transitivity fails at {i} {j} {k}");
                    }
                }
            }
        }
        for &m in &r.minimal {
            assert!((0..n).all(|j| r.matrix[j][m] != Narrowness::Narrower));
        }
    }
}

#[test]
fn vacuous_set_gives_the_same_value_before_and_after() {
    let l = LossFn::new(vec![vec![0.0, 1.0, 0.4], vec![1.0, 0.0, 0.4]]).unwrap();
    let p = CredalSet::vacuous(3, 2);
    let pri = apriori_minimax(&p, &l).unwrap();
    let post = aposteriori_minimax(&p, &l).unwrap();
    // Against total ignorance the hedge action is minimax.
    assert!(close(pri.value, 0.4, TOL));
    assert!(close(post.value, 0.4, TOL));
    for x in 0..3 {
        assert_eq!(post.rule.deterministic_action(x), Some(2));
    }
}

#[test]
fn monty_singleton_conditioning_loses_to_switching() {
    let p = monty_hall();
    let l = LossFn::zero_one(3);
    let pri = apriori_minimax(&p, &l).unwrap();
    assert!(close(pri.value, 1.0 / 3.0, TOL));
    let single = rule_from_update(&c_conditioning(&p, &Partition::singletons(2)).unwrap(), &l).unwrap();
    let ignore = rule_from_update(&c_conditioning(&p, &Partition::single_cell(2)).unwrap(), &l).unwrap();
    assert!(single.worst_case(&p, &l).unwrap() >= 0.5 - TOL);
    assert!(ignore.worst_case(&p, &l).unwrap() >= 2.0 / 3.0 - TOL);
    let switch = DecisionRule::deterministic(&[2, 1], 3).unwrap();
    assert_eq!(walley_compare(&switch, &single, &p, &l).unwrap().order, WalleyOrder::Better);
}

#[test]
fn coin_posteriors_cover_the_simplex() {
    let p = walley_coin();
    for d in p.detect_dilation().unwrap() {
        assert!(d.dilation);
        let post = d.posterior.unwrap();
        assert!(same_points(post.vertices(), &[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9));
    }
}

#[test]
fn example_posterior_rule_is_worse_than_prior_rule() {
    let p = example_2_1();
    let l = LossFn::zero_one(2);
    let r = time_inconsistency_report(&p, &l).unwrap();
    assert!(r.inconsistent);
    assert!(close(r.apriori.value, 1.0 / 3.0, TOL));
    for o in &r.observations {
        assert!(close(o.aposteriori_value.unwrap(), 0.5, TOL));
    }
}
