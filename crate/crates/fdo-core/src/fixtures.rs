//! Shipped demonstration ecosystems: four data FDOs (f1..f4) and five
//! operations (o1..o5) carrying the same association relation under each of
//! the three models:
//! f1~{o1,o2,o3}, f2~{o3}, f3~{o3}, f4~{o5}; o4 is associated with nothing.

use std::collections::BTreeSet;

use crate::model::{
    AttributeDefinition, Ecosystem, InformationRecord, Model, OperationSpec, Profile, RecordKind,
    RequiredInput, ValueRestriction, OPERATION_LIST_KEY, OPERATION_REF_KEY, PROFILE_REF_KEY,
    REQUIRED_INPUT_KEY,
};
use crate::pid::Pid;

pub const PREFIX: &str = "demo";

pub fn pid(suffix: &str) -> Pid {
    Pid::new(PREFIX, suffix).expect("fixture pid")
}

/// The expected association relation, identical across all three fixtures.
pub fn expected_relation() -> BTreeSet<(Pid, Pid)> {
    [
        ("f1", "o1"),
        ("f1", "o2"),
        ("f1", "o3"),
        ("f2", "o3"),
        ("f3", "o3"),
        ("f4", "o5"),
    ]
    .into_iter()
    .map(|(f, o)| (pid(f), pid(o)))
    .collect()
}

fn def(eco: &mut Ecosystem, suffix: &str, key: &str) {
    let p = pid(suffix);
    eco.attribute_defs.insert(
        p.clone(),
        AttributeDefinition {
            pid: p,
            key: key.to_string(),
            restriction: ValueRestriction::Any,
        },
    );
}

fn operation(eco: &mut Ecosystem, suffix: &str, required: &[&str]) {
    let p = pid(suffix);
    let record = InformationRecord::new(p.clone(), RecordKind::OperationFdo);
    eco.records.insert(p.clone(), record);
    let mut spec = OperationSpec::new(p.clone());
    spec.executor_ref = format!("executor:{suffix}");
    for key in required {
        spec.required_inputs.push(RequiredInput {
            key: key.to_string(),
            value_constraint: None,
        });
    }
    eco.operation_specs.insert(p, spec);
}

fn profile(eco: &mut Ecosystem, suffix: &str, ops: &[&str]) -> Pid {
    let p = pid(suffix);
    let mut profile = Profile::new(p.clone());
    profile.operation_list = ops.iter().map(|o| pid(o)).collect();
    eco.profiles.insert(p.clone(), profile);
    p
}

fn fdo(eco: &mut Ecosystem, suffix: &str, profile: &Pid, attrs: &[(&str, &str)]) {
    let p = pid(suffix);
    let mut record = InformationRecord::new(p.clone(), RecordKind::DataFdo);
    record.push_attribute(PROFILE_REF_KEY, profile.as_str());
    for (key, value) in attrs {
        record.push_attribute(key, value);
    }
    eco.records.insert(p, record);
}

/// Record typing: operation references sit directly in the FDO records as
/// repeated `fdo-operation-ref` attributes (six in total: a..f).
pub fn record_fixture() -> Ecosystem {
    let mut eco = Ecosystem::new(Model::Record);
    def(&mut eco, "t-profile-ref", PROFILE_REF_KEY);
    def(&mut eco, "t-operation-ref", OPERATION_REF_KEY);
    for o in ["o1", "o2", "o3", "o4", "o5"] {
        operation(&mut eco, o, &[]);
    }
    let p0 = profile(&mut eco, "p0", &[]);
    fdo(
        &mut eco,
        "f1",
        &p0,
        &[
            (OPERATION_REF_KEY, "demo/o1"),
            (OPERATION_REF_KEY, "demo/o2"),
            (OPERATION_REF_KEY, "demo/o3"),
        ],
    );
    fdo(&mut eco, "f2", &p0, &[(OPERATION_REF_KEY, "demo/o3")]);
    fdo(&mut eco, "f3", &p0, &[(OPERATION_REF_KEY, "demo/o3")]);
    fdo(&mut eco, "f4", &p0, &[(OPERATION_REF_KEY, "demo/o5")]);
    eco
}

/// Profile typing: three profiles carry the operation lists; the FDOs only
/// reference their profile.
pub fn profile_fixture() -> Ecosystem {
    let mut eco = Ecosystem::new(Model::Profile);
    def(&mut eco, "t-profile-ref", PROFILE_REF_KEY);
    def(&mut eco, "t-operation-list", OPERATION_LIST_KEY);
    for o in ["o1", "o2", "o3", "o4", "o5"] {
        operation(&mut eco, o, &[]);
    }
    let p1 = profile(&mut eco, "p1", &["o1", "o2", "o3"]);
    let p2 = profile(&mut eco, "p2", &["o3"]);
    let p3 = profile(&mut eco, "p3", &["o5"]);
    fdo(&mut eco, "f1", &p1, &[]);
    fdo(&mut eco, "f2", &p2, &[]);
    fdo(&mut eco, "f3", &p2, &[]);
    fdo(&mut eco, "f4", &p3, &[]);
    eco
}

/// Attribute typing: each operation names the record keys it requires; the
/// association is implied by key presence in the FDO records.
pub fn attribute_fixture() -> Ecosystem {
    let mut eco = Ecosystem::new(Model::Attribute);
    def(&mut eco, "t-profile-ref", PROFILE_REF_KEY);
    def(&mut eco, "t-required-input", REQUIRED_INPUT_KEY);
    for (i, key) in ["k1", "k2", "k3", "k4", "k5"].iter().enumerate() {
        def(&mut eco, &format!("t-k{}", i + 1), key);
    }
    operation(&mut eco, "o1", &["k1"]);
    operation(&mut eco, "o2", &["k2"]);
    operation(&mut eco, "o3", &["k3"]);
    operation(&mut eco, "o4", &["k5"]);
    operation(&mut eco, "o5", &["k4"]);
    let p0 = profile(&mut eco, "p0", &[]);
    fdo(
        &mut eco,
        "f1",
        &p0,
        &[("k1", "v1"), ("k2", "v2"), ("k3", "v3")],
    );
    fdo(&mut eco, "f2", &p0, &[("k3", "v3")]);
    fdo(&mut eco, "f3", &p0, &[("k3", "other")]);
    fdo(&mut eco, "f4", &p0, &[("k4", "v4")]);
    eco
}

pub fn fixture(model: Model) -> Ecosystem {
    match model {
        Model::Record => record_fixture(),
        Model::Profile => profile_fixture(),
        Model::Attribute => attribute_fixture(),
    }
}
