//! FAIR Digital Object type system: three pluggable mechanisms for
//! associating FDOs with operations (record, profile and attribute typing),
//! a registry store, a graph model, cost metrics with instrumented step
//! counting, and relation-preserving conversions between the models.

pub mod engine;
pub mod fixtures;
pub mod graph;
pub mod interop;
pub mod metrics;
pub mod model;
pub mod pid;
pub mod store;

pub use engine::{AssociationEngine, EngineError, QueryIndex, StepCounter, UpdatePlan};
pub use graph::{associations_from_graph, build_graph, AssociationGraph, ExportFormat};
pub use interop::{check_consistency, convert, ConsistencyReport, ModelMapping};
pub use metrics::{
    count_attributes, count_components, generate_ecosystem, metrics_report, scaling_report,
    GeneratorParams, MetricsReport,
};
pub use model::{
    Attribute, AttributeDefinition, Ecosystem, InformationRecord, Model, OperationSpec, Profile,
    RecordKind, RequiredInput, ValueRestriction, Violation,
};
pub use pid::{Pid, PidError, PidMinter};
pub use store::{
    dump_ecosystem, load_ecosystem, Component, Namespace, RegistryStore, StoreError,
};
