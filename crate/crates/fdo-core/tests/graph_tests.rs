//! Graph layer: vertex/edge layouts per model, path-semantics equivalence
//! with the engine, orientation, divergence reporting and exports.

mod common;

use fdo_core::engine::AssociationEngine;
use fdo_core::fixtures;
use fdo_core::graph::{
    associations_from_graph, build_graph, divergence_from_engine, export_graph, ExportFormat,
    VertexKind,
};
use fdo_core::model::{
    AttributeDefinition, Ecosystem, InformationRecord, Model, OperationSpec, Profile, RecordKind,
    RequiredInput, ValueRestriction, PROFILE_REF_KEY,
};
use fdo_core::pid::Pid;

use common::{oracle_relation, random_ecosystem, Shape};

#[test]
fn record_fixture_graph_has_expected_shape() {
    let graph = build_graph(&fixtures::record_fixture()).unwrap();
    assert_eq!(graph.vertex_count(VertexKind::Fdo), 4);
    assert_eq!(graph.vertex_count(VertexKind::Operation), 5);
    // One attribute vertex per operation reference.
    assert_eq!(graph.vertex_count(VertexKind::Attribute), 6);
    // Each reference contributes has-attribute + references.
    assert_eq!(graph.edges.len(), 12);
}

#[test]
fn profile_fixture_graph_has_expected_shape() {
    let graph = build_graph(&fixtures::profile_fixture()).unwrap();
    assert_eq!(graph.vertex_count(VertexKind::Fdo), 4);
    assert_eq!(graph.vertex_count(VertexKind::Operation), 5);
    assert_eq!(graph.vertex_count(VertexKind::Profile), 3);
    // 4 profile-ref attributes + 3 operation-list attributes.
    assert_eq!(graph.vertex_count(VertexKind::Attribute), 7);
    // 4 + 4 fdo-side edges, 3 list edges, 5 list->operation references.
    assert_eq!(graph.edges.len(), 16);
}

#[test]
fn attribute_fixture_graph_has_expected_shape() {
    let graph = build_graph(&fixtures::attribute_fixture()).unwrap();
    assert_eq!(graph.vertex_count(VertexKind::Fdo), 4);
    assert_eq!(graph.vertex_count(VertexKind::Operation), 5);
    // 6 record attributes with matching keys + 5 required-input attributes.
    assert_eq!(graph.vertex_count(VertexKind::Attribute), 11);
    assert_eq!(graph.edges.len(), 17);
}

#[test]
fn graph_path_semantics_reproduce_the_fixture_relation() {
    for model in Model::ALL {
        let eco = fixtures::fixture(model);
        let graph = build_graph(&eco).unwrap();
        assert!(graph.check_orientation(), "orientation for {model}");
        assert_eq!(
            associations_from_graph(&graph),
            fixtures::expected_relation(),
            "relation via graph for {model}"
        );
    }
}

#[test]
fn graph_matches_oracle_without_value_constraints() {
    let shape = Shape {
        constraint_p: 0.0,
        ..Shape::default()
    };
    for seed in 0..60u64 {
        for model in Model::ALL {
            let eco = random_ecosystem(seed, model, &shape);
            let graph = build_graph(&eco).unwrap();
            assert!(graph.check_orientation());
            assert_eq!(
                associations_from_graph(&graph),
                oracle_relation(&eco),
                "seed {seed} model {model}"
            );
            let engine = AssociationEngine::new(eco).unwrap();
            assert!(divergence_from_engine(&graph, &engine).is_empty());
        }
    }
}

/// One operation with a value-constrained input, one record carrying the
/// key with the wrong value: the graph (key presence) says associated,
/// the engine (value-aware) says not.
fn value_constrained_ecosystem() -> Ecosystem {
    let mut eco = Ecosystem::new(Model::Attribute);
    for (i, key) in [PROFILE_REF_KEY, "format"].iter().enumerate() {
        let pid = Pid::new("t.t", &format!("{:04}", i + 1)).unwrap();
        eco.attribute_defs.insert(
            pid.clone(),
            AttributeDefinition {
                pid,
                key: key.to_string(),
                restriction: ValueRestriction::Any,
            },
        );
    }
    let p = Pid::parse("t.p/0001").unwrap();
    eco.profiles.insert(p.clone(), Profile::new(p.clone()));
    let o = Pid::parse("t.o/0001").unwrap();
    eco.records.insert(
        o.clone(),
        InformationRecord::new(o.clone(), RecordKind::OperationFdo),
    );
    let mut spec = OperationSpec::new(o.clone());
    spec.required_inputs.push(RequiredInput {
        key: "format".to_string(),
        value_constraint: Some("text/csv".to_string()),
    });
    eco.operation_specs.insert(o, spec);
    let f = Pid::parse("t.f/0001").unwrap();
    let mut record = InformationRecord::new(f.clone(), RecordKind::DataFdo);
    record.push_attribute(PROFILE_REF_KEY, p.as_str());
    record.push_attribute("format", "application/pdf");
    eco.records.insert(f, record);
    eco
}

#[test]
fn value_constraint_divergence_is_reported_not_hidden() {
    let eco = value_constrained_ecosystem();
    let graph = build_graph(&eco).unwrap();
    let engine = AssociationEngine::new(eco).unwrap();
    let diverging = divergence_from_engine(&graph, &engine);
    assert_eq!(diverging.len(), 1);
    let (f, o) = diverging.into_iter().next().unwrap();
    assert_eq!(f.as_str(), "t.f/0001");
    assert_eq!(o.as_str(), "t.o/0001");
    // Direction check: graph over-approximates, engine refuses.
    assert!(associations_from_graph(&graph).contains(&(f.clone(), o.clone())));
    assert!(!engine.is_associated(&f, &o).unwrap());
}

#[test]
fn exports_are_deterministic_and_well_formed() {
    let eco = fixtures::profile_fixture();
    let graph = build_graph(&eco).unwrap();
    let dot_a = export_graph(&graph, ExportFormat::Dot);
    let dot_b = export_graph(&build_graph(&eco).unwrap(), ExportFormat::Dot);
    assert_eq!(dot_a, dot_b);
    assert!(dot_a.starts_with("digraph g {"));
    assert!(dot_a.trim_end().ends_with('}'));
    assert!(dot_a.contains("\"fdo:demo/f1\""));

    let edges = export_graph(&graph, ExportFormat::EdgeList);
    assert_eq!(edges.lines().count(), graph.edges.len());
    for line in edges.lines() {
        assert_eq!(line.split('\t').count(), 3, "line {line:?}");
    }
}
