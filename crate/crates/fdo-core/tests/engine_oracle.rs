//! Engine correctness against the brute-force oracle, for both the indexed
//! and the instrumented query paths, across all three models.

mod common;

use std::collections::BTreeSet;

use fdo_core::engine::{AssociationEngine, StepCounter};
use fdo_core::fixtures;
use fdo_core::model::Model;
use fdo_core::pid::Pid;

use common::{oracle_relation, random_ecosystem, Shape};

fn engine_relation_via_queries(engine: &AssociationEngine) -> BTreeSet<(Pid, Pid)> {
    let mut relation = BTreeSet::new();
    let eco = engine.ecosystem();
    for f in eco.fdos() {
        for o in engine.ops_for_fdo(f).unwrap() {
            relation.insert((f.clone(), o));
        }
    }
    relation
}

#[test]
fn fixtures_match_oracle_and_expected_relation() {
    for model in Model::ALL {
        let eco = fixtures::fixture(model);
        let engine = AssociationEngine::new(eco.clone()).unwrap();
        assert_eq!(
            engine_relation_via_queries(&engine),
            fixtures::expected_relation(),
            "engine relation for {model}"
        );
        assert_eq!(
            oracle_relation(&eco),
            fixtures::expected_relation(),
            "oracle relation for {model}"
        );
    }
}

#[test]
fn all_query_paths_agree_with_oracle_on_random_ecosystems() {
    let shape = Shape::default();
    for seed in 0..150u64 {
        for model in Model::ALL {
            let eco = random_ecosystem(seed, model, &shape);
            let engine = AssociationEngine::new(eco.clone()).unwrap();
            let expected = oracle_relation(&eco);

            // Whole-relation equality via ops_for_fdo.
            assert_eq!(
                engine_relation_via_queries(&engine),
                expected,
                "seed {seed} model {model}"
            );

            // Pairwise: indexed and counted answers agree with the oracle.
            let fdos: Vec<Pid> = eco.fdos().cloned().collect();
            let ops: Vec<Pid> = eco.operations().cloned().collect();
            let mut steps = StepCounter::new();
            for f in &fdos {
                for o in &ops {
                    let want = expected.contains(&(f.clone(), o.clone()));
                    assert_eq!(engine.is_associated(f, o).unwrap(), want);
                    steps.reset();
                    assert_eq!(engine.is_associated_counted(f, o, &mut steps).unwrap(), want);
                }
            }

            // Reverse direction via fdos_for_op, indexed and counted.
            for o in &ops {
                let want: BTreeSet<Pid> = expected
                    .iter()
                    .filter(|(_, op)| op == o)
                    .map(|(f, _)| f.clone())
                    .collect();
                assert_eq!(engine.fdos_for_op(o).unwrap(), want);
                steps.reset();
                assert_eq!(engine.fdos_for_op_counted(o, &mut steps).unwrap(), want);
            }

            // Counted forward direction too.
            for f in &fdos {
                steps.reset();
                assert_eq!(
                    engine.ops_for_fdo_counted(f, &mut steps).unwrap(),
                    engine.ops_for_fdo(f).unwrap()
                );
            }
        }
    }
}

#[test]
fn unknown_and_mismatched_pids_are_rejected() {
    let eco = fixtures::record_fixture();
    let engine = AssociationEngine::new(eco).unwrap();
    let ghost = Pid::parse("demo/ghost").unwrap();
    let f1 = fixtures::pid("f1");
    let o1 = fixtures::pid("o1");
    assert!(engine.ops_for_fdo(&ghost).is_err());
    assert!(engine.fdos_for_op(&ghost).is_err());
    // Swapped kinds are a kind mismatch, not a silent empty answer.
    assert!(engine.ops_for_fdo(&o1).is_err());
    assert!(engine.fdos_for_op(&f1).is_err());
}
