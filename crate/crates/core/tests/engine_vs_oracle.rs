mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use scion_core::oracle::{
    all_images, brute_nondominated, enumerate_true_combinations, level_set, verify_instance,
};
use scion_core::{
    run_cascade, run_instance, run_instance_with_ladder, Combination, EngineConfig,
    KnapsackInstance, Permutation, ProblemInstance,
};

fn set_strategy(k: usize, max: i64) -> impl Strategy<Value = ProblemInstance> {
    proptest::collection::hash_set(proptest::collection::vec(0..max, k), 0..25).prop_map(move |s| {
        ProblemInstance::ExplicitSet {
            k,
            images: s.into_iter().collect(),
        }
    })
}

fn any_set() -> impl Strategy<Value = ProblemInstance> {
    prop_oneof![
        set_strategy(2, 8),
        set_strategy(3, 5),
        set_strategy(4, 4),
        set_strategy(5, 3)
    ]
}

fn instrumented(threads: usize) -> EngineConfig {
    EngineConfig {
        instrument: true,
        ..EngineConfig::with_threads(threads)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    // Coarse coordinates force many ties, so these sets are rarely in
    // general position.
    #[test]
    fn explored_nodes_are_the_true_combinations(p in any_set()) {
        let r = run_instance(&p, &instrumented(1)).unwrap();
        let y_n = brute_nondominated(&all_images(&p));
        prop_assert_eq!(r.images(), y_n.clone());
        let oracle: HashSet<Combination> = enumerate_true_combinations(&y_n, p.k())
            .into_iter()
            .map(|n| n.combination)
            .collect();
        let engine: HashSet<Combination> = r
            .provenance
            .unwrap()
            .into_iter()
            .map(|n| n.combination)
            .collect();
        prop_assert_eq!(engine.len() as u64, r.scalarizations_solved);
        prop_assert_eq!(engine, oracle);
    }

    #[test]
    fn thread_budget_does_not_matter(p in any_set(), threads in 2usize..9) {
        let one = run_instance(&p, &EngineConfig::default()).unwrap();
        let many = run_instance(&p, &EngineConfig::with_threads(threads)).unwrap();
        prop_assert_eq!(one.images(), many.images());
        prop_assert_eq!(one.scalarizations_solved, many.scalarizations_solved);
        prop_assert_eq!(one.infeasible_count, many.infeasible_count);
    }

    #[test]
    fn cascade_levels_follow_the_definition(p in any_set()) {
        let cfg = EngineConfig { verify_skips: true, ..EngineConfig::default() };
        let (ladder, report) = run_cascade(&p, &cfg).unwrap();
        let y_n = brute_nondominated(&all_images(&p));
        prop_assert_eq!(report.skip_violations, 0);
        for r in 1..=p.k() {
            let level: Vec<Vec<i64>> = ladder.level(r).iter().map(|s| s.image.values()).collect();
            prop_assert_eq!(level, level_set(&y_n, r));
        }
        prop_assert_eq!(report.images(), y_n.clone());
        // only an empty instance ever reaches the backend with an infeasible query
        prop_assert_eq!(report.infeasible_count, u64::from(y_n.is_empty()));
    }

    #[test]
    fn objective_order_does_not_change_the_set(p in set_strategy(3, 5), perm in 0usize..6) {
        let orders = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
        let cfg = EngineConfig {
            order: Some(Permutation::from_one_based(&orders[perm]).unwrap()),
            ..EngineConfig::default()
        };
        let reordered = run_instance(&p, &cfg).unwrap();
        prop_assert_eq!(reordered.images(), brute_nondominated(&all_images(&p)));
    }

    #[test]
    fn reordered_cascade_levels_follow_the_definition(p in set_strategy(3, 5), perm in 0usize..6) {
        let orders = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
        let sigma = Permutation::from_one_based(&orders[perm]).unwrap();
        let cfg = EngineConfig {
            order: Some(sigma.clone()),
            cascade: true,
            ..EngineConfig::default()
        };
        let (ladder, report) = run_instance_with_ladder(&p, &cfg).unwrap();
        let ladder = ladder.unwrap();
        let permuted: Vec<Vec<i64>> = brute_nondominated(&all_images(&p))
            .iter()
            .map(|y| sigma.apply(y))
            .collect();
        let permuted = brute_nondominated(&permuted);
        for r in 1..=3 {
            let mut expected: Vec<Vec<i64>> = level_set(&permuted, r)
                .iter()
                .map(|y| sigma.inverse().apply(y))
                .collect();
            expected.sort();
            let mut got = ladder.level_values(r);
            got.sort();
            prop_assert_eq!(got, expected);
        }
        prop_assert_eq!(report.images(), brute_nondominated(&all_images(&p)));
    }
}

#[test]
fn knapsack_runs_verify() {
    for seed in 0..20 {
        let k = 2 + (seed % 3) as usize;
        let n = 8 + (seed % 7) as usize;
        let p = common::knapsack(k, n, seed);
        let outcome = verify_instance(&p, &EngineConfig::with_threads(2)).unwrap();
        assert!(outcome.passed(), "seed {seed}: {:?}", outcome.mismatches);
        assert!(outcome.true_combinations.is_some());
    }
}

#[test]
fn tiny_ilp_fixture_verifies() {
    let p = common::fixture("tiny_ilp.txt");
    let outcome = verify_instance(&p, &EngineConfig::default()).unwrap();
    assert!(outcome.passed(), "{:?}", outcome.mismatches);
    // images (3,1) (2,2) (1,3) are nondominated; pairs are dominated
    assert_eq!(outcome.nondominated, 3);
}

#[test]
fn knapsack_results_match_enumeration_with_witnesses() {
    let p = common::knapsack(3, 12, 77);
    let ProblemInstance::Knapsack(kp) = &p else {
        unreachable!()
    };
    let r = run_instance(&p, &EngineConfig::with_threads(4)).unwrap();
    assert_eq!(r.images(), brute_nondominated(&all_images(&p)));
    for s in &r.nondominated {
        let x = &s.witness;
        let weight: i64 = kp.weights.iter().zip(x).map(|(w, b)| w * b).sum();
        assert!(weight <= kp.capacity);
        let values: Vec<i64> = kp
            .profits
            .iter()
            .map(|row| -row.iter().zip(x).map(|(p, b)| p * b).sum::<i64>())
            .collect();
        assert_eq!(values, s.image.values());
    }
}

#[test]
fn single_item_knapsack() {
    let p = ProblemInstance::Knapsack(KnapsackInstance {
        profits: vec![vec![5], vec![3]],
        weights: vec![4],
        capacity: 9,
    });
    let r = run_instance(&p, &EngineConfig::default()).unwrap();
    assert_eq!(r.images(), vec![vec![-5, -3]]);
}

#[test]
fn fixture_with_known_storing_combination() {
    let p = common::fixture("storing_combination.txt");
    let r = run_instance(&p, &instrumented(1)).unwrap();
    let stores: Vec<Combination> = r
        .provenance
        .unwrap()
        .into_iter()
        .filter(|n| n.stored && n.optimum.as_ref().map(|y| y.values()) == Some(vec![3, 3, 5]))
        .map(|n| n.combination)
        .collect();
    assert_eq!(stores.len(), 1);
    assert_eq!(format!("{:?}", stores[0]), "((6,2,4), (5,4,1))");
}

#[test]
fn last_objective_grows_along_every_path_in_general_position() {
    for (name, p) in common::general_position_corpus() {
        let r = run_instance(&p, &instrumented(1)).unwrap();
        let records = r.provenance.unwrap();
        let k = p.k();
        let optimum_of: std::collections::HashMap<&Combination, Option<i64>> = records
            .iter()
            .map(|n| {
                (
                    &n.combination,
                    n.optimum.as_ref().map(|y| y.values()[k - 1]),
                )
            })
            .collect();
        for n in &records {
            let (Some(parent), Some(Some(child))) = (
                &n.parent,
                n.optimum.as_ref().map(|y| Some(y.values()[k - 1])),
            ) else {
                continue;
            };
            let above = optimum_of[parent].expect("a parent with children has an optimum");
            assert!(child > above, "{name}: {child} after {above}");
        }
    }
}
