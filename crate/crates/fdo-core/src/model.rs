//! Core domain types: attributes, information records, profiles, operation
//! specs and the ecosystem that holds them.
//!
//! All values are immutable after construction; mutation goes through the
//! registry store.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::pid::Pid;

/// Reserved attribute key that references an operation from a data FDO
/// record (record typing).
pub const OPERATION_REF_KEY: &str = "fdo-operation-ref";
/// Reserved attribute key that references the profile of an FDO.
pub const PROFILE_REF_KEY: &str = "fdo-profile-ref";
/// Reserved attribute key carrying a profile's operation list as a
/// `|`-separated PID list (profile typing).
pub const OPERATION_LIST_KEY: &str = "fdo-operation-list";
/// Reserved attribute key naming a required input inside an operation FDO
/// record (attribute typing).
pub const REQUIRED_INPUT_KEY: &str = "fdo-required-input";

/// Which association model an ecosystem runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Model {
    Record,
    Profile,
    Attribute,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Record, Model::Profile, Model::Attribute];

    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Record => "record",
            Model::Profile => "profile",
            Model::Attribute => "attribute",
        }
    }

    pub fn parse(s: &str) -> Option<Model> {
        match s {
            "record" => Some(Model::Record),
            "profile" => Some(Model::Profile),
            "attribute" => Some(Model::Attribute),
            _ => None,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a reference-restricted attribute value may point at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentKind {
    DataFdo,
    OperationFdo,
    Profile,
    AttributeDef,
}

impl ComponentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComponentKind::DataFdo => "data-fdo",
            ComponentKind::OperationFdo => "operation-fdo",
            ComponentKind::Profile => "profile",
            ComponentKind::AttributeDef => "attribute-def",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "data-fdo" => Some(ComponentKind::DataFdo),
            "operation-fdo" => Some(ComponentKind::OperationFdo),
            "profile" => Some(ComponentKind::Profile),
            "attribute-def" => Some(ComponentKind::AttributeDef),
            _ => None,
        }
    }
}

/// Restriction on the values an attribute definition admits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueRestriction {
    Any,
    Enumerated(BTreeSet<String>),
    Reference(ComponentKind),
}

/// A registered attribute definition (PID-Information Type). Keys are unique
/// per ecosystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDefinition {
    pub pid: Pid,
    pub key: String,
    pub restriction: ValueRestriction,
}

/// One key-value attribute instantiated in an information record.
///
/// Two attributes are the same element iff key, value and owning record all
/// match; equality derives from all three fields.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attribute {
    pub owner: Pid,
    pub key: String,
    pub value: String,
}

/// Record kind stored in the handles namespace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordKind {
    DataFdo,
    OperationFdo,
    Profile,
}

impl RecordKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordKind::DataFdo => "data-fdo",
            RecordKind::OperationFdo => "operation-fdo",
            RecordKind::Profile => "profile",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "data-fdo" => Some(RecordKind::DataFdo),
            "operation-fdo" => Some(RecordKind::OperationFdo),
            "profile" => Some(RecordKind::Profile),
            _ => None,
        }
    }
}

/// Kernel information record: an ordered list of attributes attached to a
/// PID. Duplicate keys are allowed (record typing repeats the operation
/// reference key).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationRecord {
    pub pid: Pid,
    pub kind: RecordKind,
    pub attributes: Vec<Attribute>,
    pub payload_ref: Option<String>,
}

impl InformationRecord {
    pub fn new(pid: Pid, kind: RecordKind) -> Self {
        InformationRecord {
            pid,
            kind,
            attributes: Vec::new(),
            payload_ref: None,
        }
    }

    pub fn push_attribute(&mut self, key: &str, value: &str) {
        self.attributes.push(Attribute {
            owner: self.pid.clone(),
            key: key.to_string(),
            value: value.to_string(),
        });
    }

    /// The profile reference, realized as the reserved `fdo-profile-ref`
    /// attribute. Mandatory for data FDOs.
    pub fn profile_ref(&self) -> Option<Pid> {
        self.attributes
            .iter()
            .find(|a| a.key == PROFILE_REF_KEY)
            .and_then(|a| Pid::parse(&a.value).ok())
    }

    /// Operation references carried directly in the record (record typing).
    pub fn operation_refs(&self) -> impl Iterator<Item = &str> {
        self.attributes
            .iter()
            .filter(|a| a.key == OPERATION_REF_KEY)
            .map(|a| a.value.as_str())
    }

    pub fn has_key(&self, key: &str) -> bool {
        self.attributes.iter().any(|a| a.key == key)
    }
}

/// Kernel information profile: mandatory/optional attribute keys plus, under
/// profile typing, the list of operations applicable to conforming FDOs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub pid: Pid,
    pub mandatory_keys: BTreeSet<String>,
    pub optional_keys: BTreeSet<String>,
    pub operation_list: Vec<Pid>,
}

impl Profile {
    pub fn new(pid: Pid) -> Self {
        Profile {
            pid,
            mandatory_keys: BTreeSet::new(),
            optional_keys: BTreeSet::new(),
            operation_list: Vec::new(),
        }
    }

    /// The profile's operation list viewed as its single connecting
    /// attribute (`fdo-operation-list` = `pid|pid|...`).
    pub fn operation_list_attribute(&self) -> Option<Attribute> {
        if self.operation_list.is_empty() {
            return None;
        }
        let value = self
            .operation_list
            .iter()
            .map(Pid::as_str)
            .collect::<Vec<_>>()
            .join("|");
        Some(Attribute {
            owner: self.pid.clone(),
            key: OPERATION_LIST_KEY.to_string(),
            value,
        })
    }
}

/// A required input of an operation: an attribute key the target FDO record
/// must instantiate, optionally pinned to a specific value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RequiredInput {
    pub key: String,
    pub value_constraint: Option<String>,
}

/// Registered operation description. `executor_ref` is opaque; operations
/// are never executed here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationSpec {
    pub pid: Pid,
    pub required_inputs: Vec<RequiredInput>,
    pub executor_ref: String,
}

impl OperationSpec {
    pub fn new(pid: Pid) -> Self {
        OperationSpec {
            pid,
            required_inputs: Vec::new(),
            executor_ref: String::new(),
        }
    }
}

/// A violation found when checking a record against its profile and the
/// registered attribute definitions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    MissingMandatory { key: String },
    UnregisteredKey { key: String },
    RestrictedValue { key: String, value: String },
    MissingProfile,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingMandatory { key } => write!(f, "missing-mandatory({key})"),
            Violation::UnregisteredKey { key } => write!(f, "unregistered-key({key})"),
            Violation::RestrictedValue { key, value } => {
                write!(f, "restricted-value({key}={value})")
            }
            Violation::MissingProfile => write!(f, "missing-profile"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("profile {0} referenced by record could not be resolved")]
    UnresolvedProfile(Pid),
    #[error("duplicate pid {0}")]
    DuplicatePid(Pid),
    #[error("dangling reference to {0}")]
    DanglingReference(Pid),
    #[error("duplicate attribute definition key {0:?}")]
    DuplicateKey(String),
    #[error("attribute key {0:?} is not registered")]
    UnknownKey(String),
}

/// A whole FDO ecosystem under one association model: the sets of data FDOs,
/// operations, profiles and attribute definitions, plus all records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ecosystem {
    pub model: Model,
    pub records: BTreeMap<Pid, InformationRecord>,
    pub profiles: BTreeMap<Pid, Profile>,
    pub operation_specs: BTreeMap<Pid, OperationSpec>,
    pub attribute_defs: BTreeMap<Pid, AttributeDefinition>,
}

impl Ecosystem {
    pub fn new(model: Model) -> Self {
        Ecosystem {
            model,
            records: BTreeMap::new(),
            profiles: BTreeMap::new(),
            operation_specs: BTreeMap::new(),
            attribute_defs: BTreeMap::new(),
        }
    }

    /// The set F of data FDOs.
    pub fn fdos(&self) -> impl Iterator<Item = &Pid> {
        self.records
            .values()
            .filter(|r| r.kind == RecordKind::DataFdo)
            .map(|r| &r.pid)
    }

    /// The set O of operation FDOs.
    pub fn operations(&self) -> impl Iterator<Item = &Pid> {
        self.records
            .values()
            .filter(|r| r.kind == RecordKind::OperationFdo)
            .map(|r| &r.pid)
    }

    pub fn fdo_count(&self) -> usize {
        self.fdos().count()
    }

    pub fn operation_count(&self) -> usize {
        self.operations().count()
    }

    pub fn definition_by_key(&self, key: &str) -> Option<&AttributeDefinition> {
        self.attribute_defs.values().find(|d| d.key == key)
    }

    pub fn contains_pid(&self, pid: &Pid) -> bool {
        self.records.contains_key(pid)
            || self.profiles.contains_key(pid)
            || self.operation_specs.contains_key(pid)
            || self.attribute_defs.contains_key(pid)
    }

    /// Checks pid uniqueness across namespaces, key uniqueness among
    /// attribute definitions, and referential integrity of all reserved
    /// reference attributes.
    pub fn check_integrity(&self) -> Result<(), ModelError> {
        let mut seen: BTreeSet<&Pid> = BTreeSet::new();
        for pid in self
            .records
            .keys()
            .chain(self.profiles.keys())
            .chain(self.attribute_defs.keys())
        {
            if !seen.insert(pid) {
                return Err(ModelError::DuplicatePid(pid.clone()));
            }
        }
        let mut keys: BTreeSet<&str> = BTreeSet::new();
        for def in self.attribute_defs.values() {
            if !keys.insert(&def.key) {
                return Err(ModelError::DuplicateKey(def.key.clone()));
            }
        }
        for record in self.records.values() {
            for attr in &record.attributes {
                let target = match attr.key.as_str() {
                    PROFILE_REF_KEY | OPERATION_REF_KEY => Pid::parse(&attr.value).ok(),
                    _ => None,
                };
                if let Some(target) = target {
                    if !self.contains_pid(&target) {
                        return Err(ModelError::DanglingReference(target));
                    }
                }
            }
        }
        for profile in self.profiles.values() {
            for op in &profile.operation_list {
                if !self.records.contains_key(op) {
                    return Err(ModelError::DanglingReference(op.clone()));
                }
            }
        }
        for spec in self.operation_specs.values() {
            for input in &spec.required_inputs {
                if self.definition_by_key(&input.key).is_none() {
                    return Err(ModelError::UnknownKey(input.key.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Checks a record against the registered definitions and, for data FDOs,
/// against its profile. Returns one violation per failure; the result does
/// not depend on attribute order.
pub fn validate_record(
    record: &InformationRecord,
    ecosystem: &Ecosystem,
) -> Result<Vec<Violation>, ModelError> {
    let mut violations = Vec::new();

    let profile = match record.profile_ref() {
        Some(pid) => match ecosystem.profiles.get(&pid) {
            Some(p) => Some(p),
            None => return Err(ModelError::UnresolvedProfile(pid)),
        },
        None => {
            if record.kind == RecordKind::DataFdo {
                violations.push(Violation::MissingProfile);
            }
            None
        }
    };

    for attr in &record.attributes {
        match ecosystem.definition_by_key(&attr.key) {
            None => violations.push(Violation::UnregisteredKey {
                key: attr.key.clone(),
            }),
            Some(def) => match &def.restriction {
                ValueRestriction::Any => {}
                ValueRestriction::Enumerated(allowed) => {
                    if !allowed.contains(&attr.value) {
                        violations.push(Violation::RestrictedValue {
                            key: attr.key.clone(),
                            value: attr.value.clone(),
                        });
                    }
                }
                ValueRestriction::Reference(kind) => {
                    let ok = Pid::parse(&attr.value).ok().is_some_and(|target| {
                        match kind {
                            ComponentKind::DataFdo => ecosystem
                                .records
                                .get(&target)
                                .is_some_and(|r| r.kind == RecordKind::DataFdo),
                            ComponentKind::OperationFdo => ecosystem
                                .records
                                .get(&target)
                                .is_some_and(|r| r.kind == RecordKind::OperationFdo),
                            ComponentKind::Profile => ecosystem.profiles.contains_key(&target),
                            ComponentKind::AttributeDef => {
                                ecosystem.attribute_defs.contains_key(&target)
                            }
                        }
                    });
                    if !ok {
                        violations.push(Violation::RestrictedValue {
                            key: attr.key.clone(),
                            value: attr.value.clone(),
                        });
                    }
                }
            },
        }
    }

    if let Some(profile) = profile {
        for key in &profile.mandatory_keys {
            if !record.has_key(key) {
                violations.push(Violation::MissingMandatory { key: key.clone() });
            }
        }
    }

    violations.sort();
    violations.dedup();
    Ok(violations)
}
