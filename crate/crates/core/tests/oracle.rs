use centrality_game::classify::{condensation_conditions, is_nash, is_strict_nash};
use centrality_game::oracle::{enumerate_nash, perfect_matchings, verify_theorems};
use centrality_game::{parse_rational, Configuration, Game, GameParams, GraphClass, Rational};

fn uniform(n: usize, m: usize, beta: &str) -> GameParams {
    GameParams::uniform(n, m, parse_rational(beta).unwrap()).unwrap()
}

#[test]
fn m1_small_cases_match_classification() {
    for (n, strict) in [(3, 0), (4, 3)] {
        let report = verify_theorems(&uniform(n, 1, "1/3")).unwrap();
        assert!(report.passed(), "{}", report.table());
        assert_eq!(report.strict_count, strict);
        assert_eq!(perfect_matchings(n) as usize, strict);
    }
}

#[test]
fn m2_four_nodes() {
    let result = enumerate_nash(&uniform(4, 2, "1/2")).unwrap();
    assert_eq!(result.total_configs, 81);
    // Three labelled 4-rings, twelve triangles with a singleton, twelve kites.
    assert_eq!(result.strict.len(), 3);
    assert_eq!(result.nash.len(), 27);
    assert!(result
        .strict
        .iter()
        .all(|x| centrality_game::classify(x) == GraphClass::RingUnion { lengths: vec![4] }));
}

/// Two triangles sharing the edge {1, 3}: 1↔2, 1↔3, 3↔4, 2→3, 4→1. Every
/// node is at a best response for all β and η tried, yet the graph is a
/// strongly connected sink that is neither a ring nor the Butterfly, so the
/// sink-shape condition rejects it.
#[test]
fn kite_is_a_nash_equilibrium_outside_the_sink_condition() {
    let kite =
        Configuration::new(4, 2, vec![vec![1, 2], vec![0, 2], vec![0, 3], vec![0, 2]]).unwrap();
    for beta in ["1/10", "1/2", "17/20", "99/100"] {
        let game = Game::<Rational>::new(&uniform(4, 2, beta));
        assert!(is_nash(&game, &kite).unwrap().0, "beta {beta}");
        assert!(!is_strict_nash(&game, &kite).unwrap());
    }
    let skewed: Vec<Rational> = ["1/10", "2/10", "3/10", "4/10"]
        .iter()
        .map(|s| parse_rational(s).unwrap())
        .collect();
    let params = GameParams::new(4, 2, parse_rational("2/3").unwrap(), Some(skewed)).unwrap();
    assert!(is_nash(&Game::<Rational>::new(&params), &kite).unwrap().0);
    assert!(!condensation_conditions(&kite).unwrap());
}

#[test]
fn enumeration_is_deterministic() {
    let a = enumerate_nash(&uniform(4, 1, "1/2")).unwrap();
    let b = enumerate_nash(&uniform(4, 1, "1/2")).unwrap();
    assert_eq!(a.nash, b.nash);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    // Lexicographic order of the enumeration is preserved.
    assert!(a.nash.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn equilibrium_sets_do_not_depend_on_beta_or_eta() {
    let skewed: Vec<Rational> = ["1/10", "2/10", "3/10", "4/10"]
        .iter()
        .map(|s| parse_rational(s).unwrap())
        .collect();
    for m in [1, 2] {
        let reference = enumerate_nash(&uniform(4, m, "1/2")).unwrap();
        for beta in ["1/10", "99/100"] {
            for eta in [None, Some(skewed.clone())] {
                let params = GameParams::new(4, m, parse_rational(beta).unwrap(), eta).unwrap();
                let other = enumerate_nash(&params).unwrap();
                assert_eq!(other.nash, reference.nash, "m={m} beta={beta}");
                assert_eq!(other.strict, reference.strict);
            }
        }
    }
}
