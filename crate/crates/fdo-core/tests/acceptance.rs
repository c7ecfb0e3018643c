//! Acceptance suite: one test per criterion, with pinned tolerances.
//!
//! 1. Fixture equivalence across engine, graph and CLI (exact, < 1 s).
//! 2. Exact component/attribute formulas on 500 generated ecosystems per
//!    model, |F| <= 200, zero tolerance (< 30 s).
//! 3. Query ceilings on >= 1000 instrumented queries per model, plus
//!    pairwise Q_1 <= Q_2 and Q_1 <= Q_3 on shared relations.
//! 4. Update write accounting, exact, 100 randomized scenarios per model.
//! 5. Scaling shape on |F| in {10, 100, 1000, 10000}; ratio to ceiling in
//!    [0.1, 1.0] at every rung (< 2 min).
//! 6. Engine/oracle equivalence on 1000 random instances (<= 30 FDOs,
//!    <= 15 operations).
//! 7. Relation preservation for all 6 ordered conversion pairs plus
//!    consistency on every converted triple, 1000 random ecosystems.
//! 8. Persistence round-trip identity (200 ecosystems) and the handshake
//!    identity over a 10,000-step mutation sequence.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fdo_core::engine::{AssociationEngine, StepCounter};
use fdo_core::fixtures;
use fdo_core::graph::{associations_from_graph, build_graph};
use fdo_core::interop::{check_consistency, convert};
use fdo_core::metrics::{
    attributes_formula, count_attributes, count_components, generate_ecosystem,
    measure_new_fdo, measure_new_operation, measure_query_costs, scaling_report, GeneratorParams,
};
use fdo_core::model::{
    InformationRecord, Model, OperationSpec, RecordKind, OPERATION_REF_KEY, PROFILE_REF_KEY,
};
use fdo_core::pid::Pid;
use fdo_core::store::{dump_ecosystem, load_ecosystem, Component, RegistryStore};

use common::{oracle_relation, random_ecosystem, Shape};

const BIN: &str = env!("CARGO_BIN_EXE_fdo");

#[test]
fn acceptance_1_fixture_equivalence() {
    let start = Instant::now();
    let expected = fixtures::expected_relation();
    for model in Model::ALL {
        let eco = fixtures::fixture(model);

        // Engine route.
        let engine = AssociationEngine::new(eco.clone()).unwrap();
        let mut via_engine = BTreeSet::new();
        for f in eco.fdos() {
            for o in engine.ops_for_fdo(f).unwrap() {
                via_engine.insert((f.clone(), o));
            }
        }
        assert_eq!(via_engine, expected, "engine relation under {model}");

        // Graph path semantics.
        let graph = build_graph(&eco).unwrap();
        assert_eq!(
            associations_from_graph(&graph),
            expected,
            "graph relation under {model}"
        );

        // CLI route.
        let dir = tempfile::tempdir().unwrap();
        dump_ecosystem(&eco, dir.path()).unwrap();
        let out = Command::new(BIN)
            .arg("--store")
            .arg(dir.path())
            .args(["query", "ops-for", "demo/f1"])
            .output()
            .unwrap();
        assert!(out.status.success());
        assert_eq!(
            String::from_utf8(out.stdout).unwrap(),
            "demo/o1\ndemo/o2\ndemo/o3\n",
            "CLI relation under {model}"
        );
    }
    assert!(start.elapsed() < Duration::from_secs(1), "{:?}", start.elapsed());
    println!("acceptance 1: ok ({:?})", start.elapsed());
}

#[test]
fn acceptance_2_exact_formulas() {
    let start = Instant::now();
    for model in Model::ALL {
        for seed in 0..500u64 {
            let mut params = GeneratorParams::new(model, seed);
            params.n_fdos = 1 + (seed as usize * 7) % 200;
            params.n_ops = 1 + (seed as usize) % 12;
            params.n_profiles = 1 + (seed as usize) % 5;
            params.association_density = 0.1 + (seed % 8) as f64 * 0.1;
            let eco = generate_ecosystem(&params);
            let engine = AssociationEngine::new(eco.clone()).unwrap();
            let relation = oracle_relation(&eco);
            assert_eq!(
                count_components(&eco),
                components_expected(&eco),
                "C mismatch: seed {seed} model {model}"
            );
            assert_eq!(
                count_attributes(&eco, &engine),
                attributes_formula(&eco, &relation),
                "A mismatch: seed {seed} model {model}"
            );
        }
    }

    // Pinned figure values.
    assert_eq!(count_components(&fixtures::record_fixture()), 10);
    let record = fixtures::record_fixture();
    let engine = AssociationEngine::new(record.clone()).unwrap();
    assert_eq!(count_attributes(&record, &engine), 6);
    let profile = fixtures::profile_fixture();
    let engine = AssociationEngine::new(profile.clone()).unwrap();
    assert_eq!(count_attributes(&profile, &engine), 7);

    assert!(start.elapsed() < Duration::from_secs(30), "{:?}", start.elapsed());
    println!("acceptance 2: ok ({:?})", start.elapsed());
}

/// Independent closed form for C_i, recomputed from raw set sizes.
fn components_expected(eco: &fdo_core::model::Ecosystem) -> u64 {
    let f = eco.fdo_count() as u64;
    let o = eco.operation_count() as u64;
    match eco.model {
        Model::Record => f + o + 1,
        Model::Profile => f + o + eco.profiles.len() as u64 + 2,
        Model::Attribute => f + o + eco.attribute_defs.len() as u64,
    }
}

#[test]
fn acceptance_3_query_ceilings_and_pairwise_order() {
    let start = Instant::now();

    // Ceilings: >= 1000 instrumented queries per model.
    for model in Model::ALL {
        let mut queries = 0usize;
        for seed in 0..25u64 {
            let mut params = GeneratorParams::new(model, seed);
            params.n_fdos = 10 + (seed as usize % 5) * 10;
            let eco = generate_ecosystem(&params);
            let engine = AssociationEngine::new(eco.clone()).unwrap();
            let fdos: Vec<Pid> = eco.fdos().cloned().collect();
            let ops: Vec<Pid> = eco.operations().cloned().collect();
            let sample: Vec<(Pid, Pid)> = fdos
                .iter()
                .flat_map(|f| ops.iter().map(move |o| (f.clone(), o.clone())))
                .collect();
            let costs = measure_query_costs(&engine, &sample).unwrap();
            queries += costs.len();
            for cost in costs {
                assert!(cost.within_ceiling(), "seed {seed} model {model}: {cost:?}");
            }
        }
        assert!(queries >= 1000, "only {queries} queries for {model}");
    }

    // Pairwise Q_1 <= Q_2 and Q_1 <= Q_3 on shared relations: start from a
    // record-typed ecosystem and convert.
    for seed in 0..30u64 {
        let base = generate_ecosystem(&GeneratorParams::new(Model::Record, seed));
        let (as_profile, _) = convert(&base, Model::Profile).unwrap();
        let (as_attribute, _) = convert(&base, Model::Attribute).unwrap();
        let e1 = AssociationEngine::new(base.clone()).unwrap();
        let e2 = AssociationEngine::new(as_profile).unwrap();
        let e3 = AssociationEngine::new(as_attribute).unwrap();
        let mut steps = StepCounter::new();
        for f in base.fdos() {
            for o in base.operations() {
                steps.reset();
                e1.is_associated_counted(f, o, &mut steps).unwrap();
                let q1 = steps.count();
                steps.reset();
                e2.is_associated_counted(f, o, &mut steps).unwrap();
                let q2 = steps.count();
                steps.reset();
                e3.is_associated_counted(f, o, &mut steps).unwrap();
                let q3 = steps.count();
                assert!(q1 <= q2, "seed {seed} ({f},{o}): Q_1={q1} > Q_2={q2}");
                assert!(q1 <= q3, "seed {seed} ({f},{o}): Q_1={q1} > Q_3={q3}");
            }
        }
    }
    println!("acceptance 3: ok ({:?})", start.elapsed());
}

#[test]
fn acceptance_4_update_accounting() {
    let start = Instant::now();
    let shape = Shape {
        max_fdos: 10,
        max_ops: 5,
        ..Shape::default()
    };
    for model in Model::ALL {
        for scenario in 0..100u64 {
            let eco = random_ecosystem(scenario, model, &shape);
            let dir = tempfile::tempdir().unwrap();
            dump_ecosystem(&eco, dir.path()).unwrap();
            let mut store = RegistryStore::open(dir.path()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(scenario ^ 0x5eed);

            if scenario % 2 == 0 {
                // New operation.
                let pid = Pid::parse("t.x/0001").unwrap();
                let record = InformationRecord::new(pid.clone(), RecordKind::OperationFdo);
                let spec = OperationSpec::new(pid);
                let (targets, expected) = match model {
                    Model::Record => {
                        let targets: BTreeSet<Pid> = eco
                            .fdos()
                            .filter(|_| rng.gen_bool(0.5))
                            .cloned()
                            .collect();
                        let expected = targets.len() as u64;
                        (targets, expected)
                    }
                    Model::Profile => {
                        // A union of whole profile blocks is always
                        // expressible; count the blocks actually touched.
                        let chosen: BTreeSet<Pid> = eco
                            .profiles
                            .keys()
                            .filter(|_| rng.gen_bool(0.5))
                            .cloned()
                            .collect();
                        let targets: BTreeSet<Pid> = eco
                            .records
                            .values()
                            .filter(|r| r.kind == RecordKind::DataFdo)
                            .filter(|r| {
                                r.profile_ref().map(|p| chosen.contains(&p)).unwrap_or(false)
                            })
                            .map(|r| r.pid.clone())
                            .collect();
                        let touched: BTreeSet<Pid> = targets
                            .iter()
                            .filter_map(|f| eco.records[f].profile_ref())
                            .collect();
                        (targets, touched.len() as u64)
                    }
                    Model::Attribute => (BTreeSet::new(), 0),
                };
                let m = measure_new_operation(&mut store, record, spec, &targets).unwrap();
                assert_eq!(
                    m.measured, expected,
                    "T mismatch: model {model} scenario {scenario}"
                );
                assert!(m.exact());
            } else {
                // New FDO.
                let pid = Pid::parse("t.y/0001").unwrap();
                let mut record = InformationRecord::new(pid, RecordKind::DataFdo);
                let profile_pid = eco
                    .profiles
                    .keys()
                    .nth(rng.gen_range(0..eco.profiles.len()))
                    .unwrap()
                    .clone();
                record.push_attribute(PROFILE_REF_KEY, profile_pid.as_str());
                let (ops, expected) = match model {
                    Model::Record => {
                        let ops: BTreeSet<Pid> = eco
                            .operations()
                            .filter(|_| rng.gen_bool(0.5))
                            .cloned()
                            .collect();
                        let expected = ops.len() as u64;
                        (ops, expected)
                    }
                    Model::Profile => {
                        let implied: BTreeSet<Pid> = eco.profiles[&profile_pid]
                            .operation_list
                            .iter()
                            .cloned()
                            .collect();
                        (implied, 0)
                    }
                    Model::Attribute => {
                        // The oracle decides the implied set for this record.
                        let implied: BTreeSet<Pid> = eco
                            .operations()
                            .filter(|o| common::oracle_is_associated(&eco, &record, o))
                            .cloned()
                            .collect();
                        (implied, 0)
                    }
                };
                let m = measure_new_fdo(&mut store, record, &ops).unwrap();
                assert_eq!(
                    m.measured, expected,
                    "U mismatch: model {model} scenario {scenario}"
                );
                assert!(m.exact());
            }
        }
    }
    println!("acceptance 4: ok ({:?})", start.elapsed());
}

#[test]
fn acceptance_5_scaling_shape() {
    let start = Instant::now();
    let ladder = [10, 100, 1000, 10000];

    let record_rows = scaling_report(Model::Record, &ladder, 5).unwrap();
    let first = record_rows[0].measured;
    for row in &record_rows {
        assert_eq!(
            row.measured, first,
            "S_1 must be constant in |F|, grew at |F|={}",
            row.n_fdos
        );
    }

    let attr_rows = scaling_report(Model::Attribute, &ladder, 5).unwrap();
    for row in &attr_rows {
        assert!(
            row.measured >= row.sum_attrs_per_op,
            "S_3 must grow with sum of operation attributes"
        );
        let ratio = row.ratio();
        assert!(
            (0.1..=1.0).contains(&ratio),
            "ratio {ratio} out of [0.1, 1.0] at |F|={}",
            row.n_fdos
        );
    }

    assert!(start.elapsed() < Duration::from_secs(120), "{:?}", start.elapsed());
    println!("acceptance 5: ok ({:?})", start.elapsed());
}

#[test]
fn acceptance_6_oracle_equivalence() {
    let start = Instant::now();
    let shape = Shape {
        max_fdos: 30,
        max_ops: 15,
        ..Shape::default()
    };
    for instance in 0..1000u64 {
        let model = Model::ALL[(instance % 3) as usize];
        let eco = random_ecosystem(instance, model, &shape);
        let engine = AssociationEngine::new(eco.clone()).unwrap();
        let expected = oracle_relation(&eco);
        let fdos: Vec<Pid> = eco.fdos().cloned().collect();
        let ops: Vec<Pid> = eco.operations().cloned().collect();
        for f in &fdos {
            let want_ops: BTreeSet<Pid> = expected
                .iter()
                .filter(|(ff, _)| ff == f)
                .map(|(_, o)| o.clone())
                .collect();
            assert_eq!(
                engine.ops_for_fdo(f).unwrap(),
                want_ops,
                "instance {instance} model {model}"
            );
            for o in &ops {
                assert_eq!(
                    engine.is_associated(f, o).unwrap(),
                    expected.contains(&(f.clone(), o.clone())),
                    "instance {instance} model {model} pair ({f},{o})"
                );
            }
        }
        for o in &ops {
            let want_fdos: BTreeSet<Pid> = expected
                .iter()
                .filter(|(_, oo)| oo == o)
                .map(|(f, _)| f.clone())
                .collect();
            assert_eq!(engine.fdos_for_op(o).unwrap(), want_fdos);
        }
    }
    println!("acceptance 6: ok ({:?})", start.elapsed());
}

#[test]
fn acceptance_7_interoperability() {
    let start = Instant::now();
    let shape = Shape {
        max_fdos: 8,
        max_ops: 5,
        ..Shape::default()
    };
    for instance in 0..1000u64 {
        let source = Model::ALL[(instance % 3) as usize];
        let eco = random_ecosystem(instance, source, &shape);
        let expected = oracle_relation(&eco);
        let mut converted = Vec::new();
        let mut mappings = Vec::new();
        for target in Model::ALL.into_iter().filter(|t| *t != source) {
            let (c, m) = convert(&eco, target).unwrap();
            assert_eq!(
                oracle_relation(&c),
                expected,
                "instance {instance} {source} -> {target}"
            );
            converted.push(c);
            mappings.push(m);
        }
        let ecosystems: Vec<&_> = std::iter::once(&eco).chain(converted.iter()).collect();
        let mapping_refs: Vec<&_> = mappings.iter().collect();
        assert!(
            check_consistency(&ecosystems, &mapping_refs)
                .unwrap()
                .consistent(),
            "instance {instance} source {source}"
        );
    }
    println!("acceptance 7: ok ({:?})", start.elapsed());
}

#[test]
fn acceptance_8_persistence_and_handshake_identity() {
    let start = Instant::now();

    // Round-trip identity on 200 random ecosystems.
    let shape = Shape::default();
    for seed in 0..200u64 {
        let model = Model::ALL[(seed % 3) as usize];
        let eco = random_ecosystem(seed, model, &shape);
        let dir = tempfile::tempdir().unwrap();
        dump_ecosystem(&eco, dir.path()).unwrap();
        assert_eq!(load_ecosystem(dir.path()).unwrap(), eco, "seed {seed}");
    }

    // Handshake identity sum_f |O_f| = sum_o |F_o| after every mutation in
    // a 10,000-step randomized sequence on a record-typed store.
    let dir = tempfile::tempdir().unwrap();
    dump_ecosystem(&fixtures::record_fixture(), dir.path()).unwrap();
    let mut store = RegistryStore::open(dir.path()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut next_id = 0u64;
    for step in 0..10_000u32 {
        let ops: Vec<Pid> = store.ecosystem().operations().cloned().collect();
        let fdos: Vec<Pid> = store.ecosystem().fdos().cloned().collect();
        match rng.gen_range(0..10) {
            // Occasionally grow the ecosystem.
            0 => {
                next_id += 1;
                let pid = Pid::new("t.f", &format!("{next_id:06}")).unwrap();
                let mut record = InformationRecord::new(pid, RecordKind::DataFdo);
                record.push_attribute(PROFILE_REF_KEY, fixtures::pid("p0").as_str());
                let op = &ops[rng.gen_range(0..ops.len())];
                record.push_attribute(OPERATION_REF_KEY, op.as_str());
                store.register(Component::Record(record)).unwrap();
            }
            1 => {
                next_id += 1;
                let pid = Pid::new("t.o", &format!("{next_id:06}")).unwrap();
                store
                    .register(Component::Record(InformationRecord::new(
                        pid.clone(),
                        RecordKind::OperationFdo,
                    )))
                    .unwrap();
                store
                    .register(Component::OperationSpec(OperationSpec::new(pid)))
                    .unwrap();
            }
            // Mostly rewire existing associations.
            2..=5 => {
                let f = &fdos[rng.gen_range(0..fdos.len())];
                let mut record = store.ecosystem().records[f].clone();
                let op = &ops[rng.gen_range(0..ops.len())];
                record.push_attribute(OPERATION_REF_KEY, op.as_str());
                store.update(f, Component::Record(record)).unwrap();
            }
            _ => {
                let f = &fdos[rng.gen_range(0..fdos.len())];
                let mut record = store.ecosystem().records[f].clone();
                let refs: Vec<usize> = record
                    .attributes
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.key == OPERATION_REF_KEY)
                    .map(|(i, _)| i)
                    .collect();
                if !refs.is_empty() {
                    record.attributes.remove(refs[rng.gen_range(0..refs.len())]);
                }
                store.update(f, Component::Record(record)).unwrap();
            }
        }
        let engine = AssociationEngine::new(store.ecosystem().clone()).unwrap();
        let forward: usize = engine.index().ops_by_fdo.values().map(BTreeSet::len).sum();
        let backward: usize = engine.index().fdos_by_op.values().map(BTreeSet::len).sum();
        assert_eq!(forward, backward, "handshake identity broke at step {step}");
    }
    println!("acceptance 8: ok ({:?})", start.elapsed());
}
