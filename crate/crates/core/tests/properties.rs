use centrality_game::best_response::best_response_set;
use centrality_game::centrality::{bonacich_direct, bonacich_power_series, hitting_times, utility};
use centrality_game::{
    build_matrices, classify, parse_rational, structural_best_response_m1,
    structural_br_support_m2, Configuration, Game, GameParams, Rational,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BETAS: [&str; 5] = ["1/10", "1/3", "1/2", "17/20", "99/100"];

#[derive(Debug, Clone)]
struct Instance {
    params: GameParams,
    config: Configuration,
    s: usize,
}

fn instance(max_n: usize, m_choices: &'static [usize]) -> impl Strategy<Value = Instance> {
    (
        3usize..=max_n,
        0..m_choices.len(),
        0..BETAS.len(),
        any::<bool>(),
        any::<u64>(),
    )
        .prop_flat_map(move |(n, mi, bi, skewed, seed)| {
            let m = m_choices[mi].min(n - 1);
            (
                Just((n, m, bi, skewed, seed)),
                proptest::collection::vec(1i64..=9, n),
                0..n,
            )
        })
        .prop_map(|((n, m, bi, skewed, seed), weights, s)| {
            let total: i64 = weights.iter().sum();
            let eta = skewed.then(|| {
                weights
                    .iter()
                    .map(|&w| Rational::new(BigInt::from(w), BigInt::from(total)))
                    .collect()
            });
            let params = GameParams::new(n, m, parse_rational(BETAS[bi]).unwrap(), eta).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let config = Configuration::random(n, m, &mut rng).unwrap();
            Instance { params, config, s }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transition_rows_sum_to_one(inst in instance(9, &[1, 2, 3])) {
        let game = Game::<Rational>::new(&inst.params);
        let (w, p) = build_matrices(&game, &inst.config).unwrap();
        for i in 0..inst.params.n() {
            let row: Rational = (0..inst.params.n()).map(|j| p.0[(i, j)].clone()).sum();
            prop_assert!(row.is_one());
            let out: Rational = (0..inst.params.n()).map(|j| w.0[(i, j)].clone()).sum();
            prop_assert!(out.is_one());
            prop_assert!(w.0[(i, i)].is_zero());
        }
    }

    #[test]
    fn utility_equals_centrality(inst in instance(8, &[1, 2, 3])) {
        let game = Game::<Rational>::new(&inst.params);
        let pi = bonacich_direct(&game, &inst.config).unwrap();
        prop_assert!(pi.total().is_one());
        prop_assert_eq!(utility(&game, &inst.config, inst.s).unwrap(), pi.pi[inst.s].clone());
    }

    #[test]
    fn power_series_converges(inst in instance(9, &[1, 2])) {
        let game = Game::<f64>::new(&inst.params);
        let direct = bonacich_direct(&game, &inst.config).unwrap();
        let beta = game.beta().to_owned();
        let terms = 12;
        let series = bonacich_power_series(&game, &inst.config, terms).unwrap();
        let gap: f64 = direct.pi.iter().zip(&series.pi).map(|(a, b)| (a - b).abs()).sum();
        prop_assert!(gap <= 2.0 * beta.powi(terms as i32 + 1) + 1e-12, "gap {gap}");
    }

    #[test]
    fn backends_agree(inst in instance(10, &[1, 2, 3])) {
        let exact = Game::<Rational>::new(&inst.params);
        let float = Game::<f64>::new(&inst.params);
        let a = hitting_times(&exact, &inst.config, inst.s).unwrap();
        let b = hitting_times(&float, &inst.config, inst.s).unwrap();
        for (x, y) in a.tau.iter().zip(&b.tau) {
            let x = num_traits::ToPrimitive::to_f64(x).unwrap();
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
        let pa = bonacich_direct(&exact, &inst.config).unwrap();
        let pb = bonacich_direct(&float, &inst.config).unwrap();
        for (x, y) in pa.pi.iter().zip(&pb.pi) {
            prop_assert!((num_traits::ToPrimitive::to_f64(x).unwrap() - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn m1_structural_best_response_is_exact(inst in instance(9, &[1])) {
        let game = Game::<Rational>::new(&inst.params);
        let br = best_response_set(&game, &inst.config, inst.s).unwrap();
        prop_assert_eq!(br.actions, structural_best_response_m1(&inst.config, inst.s).unwrap());
    }

    #[test]
    fn m2_best_responses_stay_in_support(inst in instance(9, &[2])) {
        let game = Game::<Rational>::new(&inst.params);
        let br = best_response_set(&game, &inst.config, inst.s).unwrap();
        let support = structural_br_support_m2(&inst.config, inst.s).unwrap();
        for a in &br.actions {
            prop_assert!(support.admits(a), "{a:?} outside {support:?}");
        }
    }

    #[test]
    fn best_response_is_optimal(inst in instance(7, &[1, 2, 3])) {
        let game = Game::<Rational>::new(&inst.params);
        let br = best_response_set(&game, &inst.config, inst.s).unwrap();
        let best = utility(&game, &inst.config.with_action(inst.s, &br.actions[0]).unwrap(), inst.s).unwrap();
        for a in &br.actions[1..] {
            let u = utility(&game, &inst.config.with_action(inst.s, a).unwrap(), inst.s).unwrap();
            prop_assert_eq!(&u, &best);
        }
        // No action outside the set does as well.
        let current = utility(&game, &inst.config, inst.s).unwrap();
        prop_assert!(current <= best);
        if !br.contains(inst.config.action(inst.s)) {
            prop_assert!(current < best);
        }
    }

    #[test]
    fn canonicalization_ignores_target_order(inst in instance(9, &[1, 2])) {
        let again = Configuration::new(
            inst.params.n(),
            inst.params.m(),
            inst.config.to_actions().into_iter().map(|mut a| { a.reverse(); a }).collect(),
        ).unwrap();
        prop_assert_eq!(&again, &inst.config);
        prop_assert_eq!(classify(&again), classify(&inst.config));
    }

    #[test]
    fn relabelling_preserves_class(inst in instance(8, &[1, 2]), shift in 1usize..8) {
        let n = inst.params.n();
        let perm = |v: usize| (v + shift) % n;
        let mut actions = vec![Vec::new(); n];
        for i in 0..n {
            actions[perm(i)] = inst.config.action(i).iter().map(|&j| perm(j)).collect();
        }
        let moved = Configuration::new(n, inst.params.m(), actions).unwrap();
        prop_assert_eq!(classify(&moved), classify(&inst.config));
    }
}

#[test]
fn in_neighborhood_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let x = Configuration::random(8, 2, &mut rng).unwrap();
        for s in 0..8 {
            let (first, second) = x.in_neighborhoods(s);
            let by_scan: Vec<usize> = (0..8).filter(|&i| x.links(i, s)).collect();
            assert_eq!(first.iter().copied().collect::<Vec<_>>(), by_scan);
            let by_scan2: Vec<usize> = (0..8)
                .filter(|&i| i != s && (x.links(i, s) || by_scan.iter().any(|&k| x.links(i, k))))
                .collect();
            assert_eq!(second.iter().copied().collect::<Vec<_>>(), by_scan2);
        }
    }
}

#[test]
fn transition_matches_definition() {
    let params = GameParams::uniform(4, 2, parse_rational("1/2").unwrap()).unwrap();
    let game = Game::<Rational>::new(&params);
    let x = Configuration::new(4, 2, vec![vec![1, 2], vec![0, 3], vec![0, 1], vec![1, 2]]).unwrap();
    // Linked: β/m + (1 − β)η = 1/4 + 1/8; not linked: 1/8.
    assert_eq!(game.transition(&x, 0, 1), parse_rational("3/8").unwrap());
    assert_eq!(game.transition(&x, 0, 3), parse_rational("1/8").unwrap());
    assert_eq!(game.transition(&x, 0, 0), parse_rational("1/8").unwrap());
}
