//! Directed association graphs built from an ecosystem, one layout per
//! association model.
//!
//! Every FDO-operation association appears as a directed path from the FDO
//! vertex to the operation vertex: length 2 under record typing, 4 under
//! profile typing, 3 under attribute typing. Attribute vertices carry their
//! owning record, so visually identical key-value pairs in different records
//! stay distinct. The attribute-model layer matches on key presence only;
//! value constraints live in the engine and any resulting divergence is
//! reported, not hidden.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::engine::AssociationEngine;
use crate::model::{
    Ecosystem, Model, RecordKind, PROFILE_REF_KEY, REQUIRED_INPUT_KEY,
};
use crate::pid::Pid;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("dangling reference to {0}")]
    DanglingReference(Pid),
    #[error("malformed reference value {0:?}")]
    MalformedReference(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKind {
    Fdo,
    Operation,
    Profile,
    Attribute,
}

impl VertexKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VertexKind::Fdo => "fdo",
            VertexKind::Operation => "operation",
            VertexKind::Profile => "profile",
            VertexKind::Attribute => "attribute",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub kind: VertexKind,
    pub id: String,
}

impl Vertex {
    fn fdo(pid: &Pid) -> Self {
        Vertex {
            kind: VertexKind::Fdo,
            id: pid.to_string(),
        }
    }

    fn operation(pid: &Pid) -> Self {
        Vertex {
            kind: VertexKind::Operation,
            id: pid.to_string(),
        }
    }

    fn profile(pid: &Pid) -> Self {
        Vertex {
            kind: VertexKind::Profile,
            id: pid.to_string(),
        }
    }

    fn attribute(owner: &Pid, key: &str, value: &str) -> Self {
        Vertex {
            kind: VertexKind::Attribute,
            id: format!("{owner}#{key}={value}"),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.as_str(), self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    HasAttribute,
    References,
}

impl EdgeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeLabel::HasAttribute => "has-attribute",
            EdgeLabel::References => "references",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
    pub label: EdgeLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    EdgeList,
}

/// Directed association graph G_i = (V_i, E_i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationGraph {
    pub model: Model,
    pub vertices: BTreeSet<Vertex>,
    pub edges: BTreeSet<Edge>,
}

impl AssociationGraph {
    pub fn vertex_count(&self, kind: VertexKind) -> usize {
        self.vertices.iter().filter(|v| v.kind == kind).count()
    }

    /// No anti-parallel edges may exist.
    pub fn check_orientation(&self) -> bool {
        !self
            .edges
            .iter()
            .any(|e| self.edges.iter().any(|r| r.from == e.to && r.to == e.from))
    }

    fn successors<'a>(&'a self, from: &'a Vertex) -> impl Iterator<Item = &'a Vertex> {
        self.edges
            .iter()
            .filter(move |e| &e.from == from)
            .map(|e| &e.to)
    }
}

fn parse_ref(value: &str) -> Result<Pid, GraphError> {
    Pid::parse(value).map_err(|_| GraphError::MalformedReference(value.to_string()))
}

/// Builds G_i from a referentially intact ecosystem.
pub fn build_graph(ecosystem: &Ecosystem) -> Result<AssociationGraph, GraphError> {
    let mut graph = AssociationGraph {
        model: ecosystem.model,
        vertices: BTreeSet::new(),
        edges: BTreeSet::new(),
    };
    let fdo_pids: BTreeSet<&Pid> = ecosystem.fdos().collect();
    let op_pids: BTreeSet<&Pid> = ecosystem.operations().collect();
    for f in &fdo_pids {
        graph.vertices.insert(Vertex::fdo(f));
    }
    for o in &op_pids {
        graph.vertices.insert(Vertex::operation(o));
    }

    let add_edge = |graph: &mut AssociationGraph, from: Vertex, to: Vertex, label: EdgeLabel| {
        graph.vertices.insert(from.clone());
        graph.vertices.insert(to.clone());
        graph.edges.insert(Edge { from, to, label });
    };

    match ecosystem.model {
        Model::Record => {
            for record in ecosystem.records.values() {
                if record.kind != RecordKind::DataFdo {
                    continue;
                }
                for attr in &record.attributes {
                    if attr.key != crate::model::OPERATION_REF_KEY {
                        continue;
                    }
                    let op = parse_ref(&attr.value)?;
                    if !op_pids.contains(&op) {
                        return Err(GraphError::DanglingReference(op));
                    }
                    let a = Vertex::attribute(&record.pid, &attr.key, &attr.value);
                    add_edge(&mut graph, Vertex::fdo(&record.pid), a.clone(), EdgeLabel::HasAttribute);
                    add_edge(&mut graph, a, Vertex::operation(&op), EdgeLabel::References);
                }
            }
        }
        Model::Profile => {
            for profile in ecosystem.profiles.values() {
                graph.vertices.insert(Vertex::profile(&profile.pid));
                if let Some(attr) = profile.operation_list_attribute() {
                    let a = Vertex::attribute(&profile.pid, &attr.key, &attr.value);
                    add_edge(
                        &mut graph,
                        Vertex::profile(&profile.pid),
                        a.clone(),
                        EdgeLabel::HasAttribute,
                    );
                    for op in &profile.operation_list {
                        if !op_pids.contains(op) {
                            return Err(GraphError::DanglingReference(op.clone()));
                        }
                        add_edge(&mut graph, a.clone(), Vertex::operation(op), EdgeLabel::References);
                    }
                }
            }
            for record in ecosystem.records.values() {
                if record.kind != RecordKind::DataFdo {
                    continue;
                }
                for attr in &record.attributes {
                    if attr.key != PROFILE_REF_KEY {
                        continue;
                    }
                    let p = parse_ref(&attr.value)?;
                    if !ecosystem.profiles.contains_key(&p) {
                        return Err(GraphError::DanglingReference(p));
                    }
                    let a = Vertex::attribute(&record.pid, &attr.key, &attr.value);
                    add_edge(&mut graph, Vertex::fdo(&record.pid), a.clone(), EdgeLabel::HasAttribute);
                    add_edge(&mut graph, a, Vertex::profile(&p), EdgeLabel::References);
                }
            }
        }
        Model::Attribute => {
            // Key presence only: value constraints are an engine-level mode
            // and do not appear in the graph.
            for spec in ecosystem.operation_specs.values() {
                if !op_pids.contains(&spec.pid) {
                    return Err(GraphError::DanglingReference(spec.pid.clone()));
                }
                for input in &spec.required_inputs {
                    let a = Vertex::attribute(&spec.pid, REQUIRED_INPUT_KEY, &input.key);
                    add_edge(
                        &mut graph,
                        a.clone(),
                        Vertex::operation(&spec.pid),
                        EdgeLabel::HasAttribute,
                    );
                    for record in ecosystem.records.values() {
                        if record.kind != RecordKind::DataFdo {
                            continue;
                        }
                        for attr in &record.attributes {
                            if attr.key != input.key {
                                continue;
                            }
                            let a_fdo = Vertex::attribute(&record.pid, &attr.key, &attr.value);
                            add_edge(
                                &mut graph,
                                Vertex::fdo(&record.pid),
                                a_fdo.clone(),
                                EdgeLabel::HasAttribute,
                            );
                            add_edge(&mut graph, a_fdo, a.clone(), EdgeLabel::References);
                        }
                    }
                }
            }
        }
    }
    debug_assert!(graph.check_orientation());
    Ok(graph)
}

/// Reads the association relation back off the graph. For record and
/// profile typing this is directed-path existence (length 2 and 4); for
/// attribute typing it is the closed-lines rule: every attribute vertex
/// feeding the operation must be reachable back from the FDO.
pub fn associations_from_graph(graph: &AssociationGraph) -> BTreeSet<(Pid, Pid)> {
    let mut relation = BTreeSet::new();
    let fdos: Vec<&Vertex> = graph
        .vertices
        .iter()
        .filter(|v| v.kind == VertexKind::Fdo)
        .collect();
    match graph.model {
        Model::Record => {
            for f in &fdos {
                for a in graph.successors(f) {
                    for o in graph.successors(a) {
                        if o.kind == VertexKind::Operation {
                            insert_pair(&mut relation, f, o);
                        }
                    }
                }
            }
        }
        Model::Profile => {
            for f in &fdos {
                for a in graph.successors(f) {
                    for p in graph.successors(a) {
                        if p.kind != VertexKind::Profile {
                            continue;
                        }
                        for a2 in graph.successors(p) {
                            for o in graph.successors(a2) {
                                if o.kind == VertexKind::Operation {
                                    insert_pair(&mut relation, f, o);
                                }
                            }
                        }
                    }
                }
            }
        }
        Model::Attribute => {
            // attrs_of_op[o] = attribute vertices pointing at o;
            // reachable[f] = attribute vertices two hops from f.
            let mut attrs_of_op: BTreeMap<&Vertex, BTreeSet<&Vertex>> = BTreeMap::new();
            for o in graph
                .vertices
                .iter()
                .filter(|v| v.kind == VertexKind::Operation)
            {
                attrs_of_op.insert(o, BTreeSet::new());
            }
            for e in &graph.edges {
                if e.to.kind == VertexKind::Operation && e.from.kind == VertexKind::Attribute {
                    attrs_of_op.entry(&e.to).or_default().insert(&e.from);
                }
            }
            for f in &fdos {
                let mut reachable: BTreeSet<&Vertex> = BTreeSet::new();
                for a_fdo in graph.successors(f) {
                    for a_op in graph.successors(a_fdo) {
                        reachable.insert(a_op);
                    }
                }
                for (o, needed) in &attrs_of_op {
                    if needed.iter().all(|a| reachable.contains(a)) {
                        insert_pair(&mut relation, f, o);
                    }
                }
            }
        }
    }
    relation
}

fn insert_pair(relation: &mut BTreeSet<(Pid, Pid)>, f: &Vertex, o: &Vertex) {
    if let (Ok(f), Ok(o)) = (Pid::parse(&f.id), Pid::parse(&o.id)) {
        relation.insert((f, o));
    }
}

/// Pairs on which the graph (key-presence semantics) and the engine
/// (which honors value constraints) disagree.
pub fn divergence_from_engine(
    graph: &AssociationGraph,
    engine: &AssociationEngine,
) -> BTreeSet<(Pid, Pid)> {
    let graph_relation = associations_from_graph(graph);
    let mut engine_relation = BTreeSet::new();
    for (f, ops) in &engine.index().ops_by_fdo {
        for o in ops {
            engine_relation.insert((f.clone(), o.clone()));
        }
    }
    graph_relation
        .symmetric_difference(&engine_relation)
        .cloned()
        .collect()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic export: vertices sorted by kind then id, then edges.
pub fn export_graph(graph: &AssociationGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => {
            let mut out = String::from("digraph g {\n");
            for v in &graph.vertices {
                out.push_str(&format!("  \"{}\";\n", dot_escape(&v.to_string())));
            }
            for e in &graph.edges {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                    dot_escape(&e.from.to_string()),
                    dot_escape(&e.to.to_string()),
                    e.label.as_str()
                ));
            }
            out.push_str("}\n");
            out
        }
        ExportFormat::EdgeList => {
            let mut out = String::new();
            for e in &graph.edges {
                out.push_str(&format!("{}\t{}\t{}\n", e.from, e.label.as_str(), e.to));
            }
            out
        }
    }
}
