//! The three association strategies (record, profile, attribute typing)
//! behind one query interface.
//!
//! Every query exists twice: an indexed fast path over the `QueryIndex`
//! built at ingestion, and a direct path that walks the records the way the
//! model prescribes while counting elementary reads (one attribute read or
//! one list-element read = 1 step). Both paths return identical answers;
//! only the direct path is instrumented.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{
    Attribute, Ecosystem, InformationRecord, Model, OperationSpec, Profile, RecordKind,
    RequiredInput, OPERATION_REF_KEY, PROFILE_REF_KEY,
};
use crate::pid::Pid;
use crate::store::Component;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("unknown pid {0}")]
    UnknownPid(Pid),
    #[error("pid {pid} is a {actual}, expected {expected}")]
    KindMismatch {
        pid: Pid,
        expected: &'static str,
        actual: &'static str,
    },
    #[error("target set is not expressible as a union of existing profile blocks (offending fdo {0})")]
    UnexpressibleTargetSet(Pid),
    #[error("requested operation set differs from the model-implied set")]
    ModelMismatch { implied: BTreeSet<Pid> },
    #[error("fdo {0} has no profile reference")]
    MissingProfileRef(Pid),
}

/// Per-query-session counter of elementary reads.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct StepCounter(u64);

impl StepCounter {
    pub fn new() -> Self {
        StepCounter(0)
    }

    pub fn reset(&mut self) {
        self.0 = 0;
    }

    pub fn count(&self) -> u64 {
        self.0
    }

    fn read(&mut self) {
        self.0 += 1;
    }
}

/// Precomputed association maps, built once at ingestion. Queries through
/// the index never rescan records.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryIndex {
    pub ops_by_fdo: BTreeMap<Pid, BTreeSet<Pid>>,
    pub fdos_by_op: BTreeMap<Pid, BTreeSet<Pid>>,
    pub attrs_by_fdo: BTreeMap<Pid, Vec<Attribute>>,
    pub attrs_by_op: BTreeMap<Pid, Vec<RequiredInput>>,
    pub profiles_by_fdo: BTreeMap<Pid, Pid>,
    pub ops_by_profile: BTreeMap<Pid, Vec<Pid>>,
    pub fdos_by_profile: BTreeMap<Pid, BTreeSet<Pid>>,
}

/// One association engine over an immutable ecosystem snapshot.
#[derive(Debug, Clone)]
pub struct AssociationEngine {
    ecosystem: Ecosystem,
    index: QueryIndex,
}

/// Planned mutation produced by an association update. `registrations` are
/// the new components themselves (not counted as association writes);
/// `record_writes` are the counted updates to pre-existing components.
#[derive(Debug, Clone)]
pub struct UpdatePlan {
    pub registrations: Vec<Component>,
    pub record_writes: Vec<(Pid, Component)>,
    /// Target set implied by the model, where the model decides it.
    pub implied_targets: Option<BTreeSet<Pid>>,
    /// The ecosystem snapshot after applying the plan.
    pub ecosystem: Ecosystem,
}

impl UpdatePlan {
    pub fn write_count(&self) -> usize {
        self.record_writes.len()
    }
}

fn required_input_matches(attrs: &[Attribute], input: &RequiredInput) -> bool {
    attrs.iter().any(|a| {
        a.key == input.key
            && input
                .value_constraint
                .as_ref()
                .is_none_or(|v| v == &a.value)
    })
}

/// Attribute-model rule: every required input of the operation must be
/// satisfied by the FDO record. Empty input lists match universally.
fn attribute_rule(attrs: &[Attribute], spec: &OperationSpec) -> bool {
    spec.required_inputs
        .iter()
        .all(|input| required_input_matches(attrs, input))
}

impl AssociationEngine {
    pub fn new(ecosystem: Ecosystem) -> Result<Self, EngineError> {
        let index = build_index(&ecosystem)?;
        Ok(AssociationEngine { ecosystem, index })
    }

    pub fn ecosystem(&self) -> &Ecosystem {
        &self.ecosystem
    }

    pub fn model(&self) -> Model {
        self.ecosystem.model
    }

    pub fn index(&self) -> &QueryIndex {
        &self.index
    }

    fn fdo_record(&self, pid: &Pid) -> Result<&InformationRecord, EngineError> {
        let record = self
            .ecosystem
            .records
            .get(pid)
            .ok_or_else(|| EngineError::UnknownPid(pid.clone()))?;
        if record.kind != RecordKind::DataFdo {
            return Err(EngineError::KindMismatch {
                pid: pid.clone(),
                expected: "data-fdo",
                actual: record.kind.as_str(),
            });
        }
        Ok(record)
    }

    fn operation_record(&self, pid: &Pid) -> Result<&InformationRecord, EngineError> {
        let record = self
            .ecosystem
            .records
            .get(pid)
            .ok_or_else(|| EngineError::UnknownPid(pid.clone()))?;
        if record.kind != RecordKind::OperationFdo {
            return Err(EngineError::KindMismatch {
                pid: pid.clone(),
                expected: "operation-fdo",
                actual: record.kind.as_str(),
            });
        }
        Ok(record)
    }

    fn operation_spec(&self, pid: &Pid) -> Result<&OperationSpec, EngineError> {
        self.operation_record(pid)?;
        self.ecosystem
            .operation_specs
            .get(pid)
            .ok_or_else(|| EngineError::UnknownPid(pid.clone()))
    }

    fn profile_of(&self, record: &InformationRecord) -> Result<&Profile, EngineError> {
        let pid = record
            .profile_ref()
            .ok_or_else(|| EngineError::MissingProfileRef(record.pid.clone()))?;
        self.ecosystem
            .profiles
            .get(&pid)
            .ok_or_else(|| EngineError::UnknownPid(pid))
    }

    // ----- indexed fast path -------------------------------------------

    pub fn is_associated(&self, f: &Pid, o: &Pid) -> Result<bool, EngineError> {
        self.fdo_record(f)?;
        self.operation_record(o)?;
        Ok(self
            .index
            .ops_by_fdo
            .get(f)
            .is_some_and(|ops| ops.contains(o)))
    }

    pub fn ops_for_fdo(&self, f: &Pid) -> Result<BTreeSet<Pid>, EngineError> {
        self.fdo_record(f)?;
        Ok(self.index.ops_by_fdo.get(f).cloned().unwrap_or_default())
    }

    pub fn fdos_for_op(&self, o: &Pid) -> Result<BTreeSet<Pid>, EngineError> {
        self.operation_record(o)?;
        Ok(self.index.fdos_by_op.get(o).cloned().unwrap_or_default())
    }

    // ----- direct, instrumented path ------------------------------------

    pub fn is_associated_counted(
        &self,
        f: &Pid,
        o: &Pid,
        steps: &mut StepCounter,
    ) -> Result<bool, EngineError> {
        let record = self.fdo_record(f)?;
        self.operation_record(o)?;
        match self.ecosystem.model {
            Model::Record => {
                for attr in &record.attributes {
                    steps.read();
                    if attr.key == OPERATION_REF_KEY && attr.value == o.as_str() {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Model::Profile => {
                let mut profile_pid = None;
                for attr in &record.attributes {
                    steps.read();
                    if attr.key == PROFILE_REF_KEY {
                        profile_pid = Pid::parse(&attr.value).ok();
                        break;
                    }
                }
                let Some(profile_pid) = profile_pid else {
                    return Ok(false);
                };
                // Profile and list access is O(1) after resolution.
                let profile = self
                    .ecosystem
                    .profiles
                    .get(&profile_pid)
                    .ok_or(EngineError::UnknownPid(profile_pid))?;
                for op in &profile.operation_list {
                    steps.read();
                    if op == o {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Model::Attribute => {
                let spec = self.operation_spec(o)?;
                Ok(match_counted(&record.attributes, &spec.required_inputs, steps))
            }
        }
    }

    pub fn ops_for_fdo_counted(
        &self,
        f: &Pid,
        steps: &mut StepCounter,
    ) -> Result<BTreeSet<Pid>, EngineError> {
        let record = self.fdo_record(f)?;
        match self.ecosystem.model {
            Model::Record => {
                let mut ops = BTreeSet::new();
                for attr in &record.attributes {
                    steps.read();
                    if attr.key == OPERATION_REF_KEY {
                        if let Ok(pid) = Pid::parse(&attr.value) {
                            ops.insert(pid);
                        }
                    }
                }
                Ok(ops)
            }
            Model::Profile => {
                let mut profile_pid = None;
                for attr in &record.attributes {
                    steps.read();
                    if attr.key == PROFILE_REF_KEY {
                        profile_pid = Pid::parse(&attr.value).ok();
                        break;
                    }
                }
                let Some(profile_pid) = profile_pid else {
                    return Ok(BTreeSet::new());
                };
                let profile = self
                    .ecosystem
                    .profiles
                    .get(&profile_pid)
                    .ok_or(EngineError::UnknownPid(profile_pid))?;
                let mut ops = BTreeSet::new();
                for op in &profile.operation_list {
                    steps.read();
                    ops.insert(op.clone());
                }
                Ok(ops)
            }
            Model::Attribute => {
                // Convert the FDO record once, then check every operation.
                for _ in &record.attributes {
                    steps.read();
                }
                let mut ops = BTreeSet::new();
                for (pid, spec) in &self.ecosystem.operation_specs {
                    for _ in &spec.required_inputs {
                        steps.read();
                    }
                    if match_probes(&record.attributes, &spec.required_inputs, steps) {
                        ops.insert(pid.clone());
                    }
                }
                Ok(ops)
            }
        }
    }

    pub fn fdos_for_op_counted(
        &self,
        o: &Pid,
        steps: &mut StepCounter,
    ) -> Result<BTreeSet<Pid>, EngineError> {
        self.operation_record(o)?;
        match self.ecosystem.model {
            Model::Record => {
                let mut fdos = BTreeSet::new();
                for record in self.ecosystem.records.values() {
                    if record.kind != RecordKind::DataFdo {
                        continue;
                    }
                    for attr in &record.attributes {
                        steps.read();
                        if attr.key == OPERATION_REF_KEY && attr.value == o.as_str() {
                            fdos.insert(record.pid.clone());
                        }
                    }
                }
                Ok(fdos)
            }
            Model::Profile => {
                let mut profile_of: BTreeMap<Pid, Pid> = BTreeMap::new();
                for record in self.ecosystem.records.values() {
                    if record.kind != RecordKind::DataFdo {
                        continue;
                    }
                    for attr in &record.attributes {
                        steps.read();
                        if attr.key == PROFILE_REF_KEY {
                            if let Ok(pid) = Pid::parse(&attr.value) {
                                profile_of.insert(record.pid.clone(), pid);
                            }
                            break;
                        }
                    }
                }
                let mut contains: BTreeMap<Pid, bool> = BTreeMap::new();
                let referenced: BTreeSet<Pid> = profile_of.values().cloned().collect();
                for profile_pid in &referenced {
                    if contains.contains_key(profile_pid) {
                        continue;
                    }
                    let profile = self
                        .ecosystem
                        .profiles
                        .get(profile_pid)
                        .ok_or_else(|| EngineError::UnknownPid(profile_pid.clone()))?;
                    let mut found = false;
                    for op in &profile.operation_list {
                        steps.read();
                        if op == o {
                            found = true;
                        }
                    }
                    contains.insert(profile_pid.clone(), found);
                }
                Ok(profile_of
                    .into_iter()
                    .filter(|(_, p)| contains.get(p).copied().unwrap_or(false))
                    .map(|(f, _)| f)
                    .collect())
            }
            Model::Attribute => {
                let spec = self.operation_spec(o)?;
                for _ in &spec.required_inputs {
                    steps.read();
                }
                let mut fdos = BTreeSet::new();
                for record in self.ecosystem.records.values() {
                    if record.kind != RecordKind::DataFdo {
                        continue;
                    }
                    for _ in &record.attributes {
                        steps.read();
                    }
                    if match_probes(&record.attributes, &spec.required_inputs, steps) {
                        fdos.insert(record.pid.clone());
                    }
                }
                Ok(fdos)
            }
        }
    }

    // ----- concrete step ceilings ---------------------------------------

    /// Ceiling for one `is_associated` query under the elementary-step
    /// definition (constant 1).
    pub fn ceiling_is_associated(&self, f: &Pid, o: &Pid) -> Result<u64, EngineError> {
        let a_f = self.fdo_record(f)?.attributes.len() as u64;
        match self.ecosystem.model {
            Model::Record => Ok(a_f),
            Model::Profile => {
                let record = self.fdo_record(f)?;
                let ops = match self.profile_of(record) {
                    Ok(p) => p.operation_list.len() as u64,
                    Err(EngineError::MissingProfileRef(_)) => 0,
                    Err(e) => return Err(e),
                };
                Ok(a_f + ops)
            }
            Model::Attribute => {
                let a_o = self.operation_spec(o)?.required_inputs.len() as u64;
                Ok(a_f + a_o + a_f.min(a_o))
            }
        }
    }

    pub fn ceiling_ops_for_fdo(&self, f: &Pid) -> Result<u64, EngineError> {
        let a_f = self.fdo_record(f)?.attributes.len() as u64;
        match self.ecosystem.model {
            Model::Record => Ok(a_f),
            Model::Profile => {
                let record = self.fdo_record(f)?;
                let ops = match self.profile_of(record) {
                    Ok(p) => p.operation_list.len() as u64,
                    Err(EngineError::MissingProfileRef(_)) => 0,
                    Err(e) => return Err(e),
                };
                Ok(a_f + ops)
            }
            Model::Attribute => {
                let mut total = a_f;
                for spec in self.ecosystem.operation_specs.values() {
                    let a_o = spec.required_inputs.len() as u64;
                    total += a_o + a_f.min(a_o);
                }
                Ok(total)
            }
        }
    }

    pub fn ceiling_fdos_for_op(&self, o: &Pid) -> Result<u64, EngineError> {
        self.operation_record(o)?;
        let sum_a_f: u64 = self
            .ecosystem
            .records
            .values()
            .filter(|r| r.kind == RecordKind::DataFdo)
            .map(|r| r.attributes.len() as u64)
            .sum();
        match self.ecosystem.model {
            Model::Record => Ok(sum_a_f),
            Model::Profile => {
                let mut referenced: BTreeSet<&Pid> = BTreeSet::new();
                for (f, p) in &self.index.profiles_by_fdo {
                    let _ = f;
                    referenced.insert(p);
                }
                let list_total: u64 = referenced
                    .iter()
                    .filter_map(|p| self.ecosystem.profiles.get(p))
                    .map(|p| p.operation_list.len() as u64)
                    .sum();
                Ok(sum_a_f + list_total)
            }
            Model::Attribute => {
                let a_o = self.operation_spec(o)?.required_inputs.len() as u64;
                let mut total = a_o;
                for record in self.ecosystem.records.values() {
                    if record.kind != RecordKind::DataFdo {
                        continue;
                    }
                    let a_f = record.attributes.len() as u64;
                    total += a_f + a_f.min(a_o);
                }
                Ok(total)
            }
        }
    }

    // ----- association updates ------------------------------------------

    /// Associates a new operation with a target set of FDOs. The caller
    /// supplies the operation's record and spec; registering those is never
    /// counted as an association write.
    pub fn associate_new_operation(
        &self,
        op_record: InformationRecord,
        spec: OperationSpec,
        targets: &BTreeSet<Pid>,
    ) -> Result<UpdatePlan, EngineError> {
        assert_eq!(op_record.pid, spec.pid);
        if self.ecosystem.contains_pid(&spec.pid) {
            return Err(EngineError::KindMismatch {
                pid: spec.pid,
                expected: "fresh pid",
                actual: "already bound",
            });
        }
        for f in targets {
            self.fdo_record(f)?;
        }
        let mut ecosystem = self.ecosystem.clone();
        let op_pid = spec.pid.clone();
        ecosystem
            .records
            .insert(op_pid.clone(), op_record.clone());
        ecosystem.operation_specs.insert(op_pid.clone(), spec.clone());
        let registrations = vec![
            Component::Record(op_record),
            Component::OperationSpec(spec.clone()),
        ];
        let mut record_writes = Vec::new();
        let mut implied_targets = None;

        match self.ecosystem.model {
            Model::Record => {
                for f in targets {
                    let record = ecosystem.records.get_mut(f).expect("checked above");
                    record.push_attribute(OPERATION_REF_KEY, op_pid.as_str());
                    record_writes.push((f.clone(), Component::Record(record.clone())));
                }
            }
            Model::Profile => {
                // The target set must be a union of existing profile blocks.
                let mut profiles_to_update: BTreeSet<Pid> = BTreeSet::new();
                for f in targets {
                    let profile_pid = self
                        .index
                        .profiles_by_fdo
                        .get(f)
                        .ok_or_else(|| EngineError::MissingProfileRef(f.clone()))?;
                    let block = self
                        .index
                        .fdos_by_profile
                        .get(profile_pid)
                        .cloned()
                        .unwrap_or_default();
                    if !block.is_subset(targets) {
                        return Err(EngineError::UnexpressibleTargetSet(f.clone()));
                    }
                    profiles_to_update.insert(profile_pid.clone());
                }
                for profile_pid in profiles_to_update {
                    let profile = ecosystem
                        .profiles
                        .get_mut(&profile_pid)
                        .ok_or_else(|| EngineError::UnknownPid(profile_pid.clone()))?;
                    profile.operation_list.push(op_pid.clone());
                    record_writes.push((profile_pid.clone(), Component::Profile(profile.clone())));
                }
            }
            Model::Attribute => {
                // F' is implicitly defined by the operation's attributes.
                let implied: BTreeSet<Pid> = self
                    .ecosystem
                    .records
                    .values()
                    .filter(|r| r.kind == RecordKind::DataFdo)
                    .filter(|r| attribute_rule(&r.attributes, &spec))
                    .map(|r| r.pid.clone())
                    .collect();
                implied_targets = Some(implied);
            }
        }

        Ok(UpdatePlan {
            registrations,
            record_writes,
            implied_targets,
            ecosystem,
        })
    }

    /// Associates a new FDO with a set of operations. Under record typing
    /// each operation reference is one counted attribute insertion; under
    /// profile and attribute typing the set is implied by the model and no
    /// updates happen.
    pub fn associate_new_fdo(
        &self,
        record: InformationRecord,
        ops: &BTreeSet<Pid>,
    ) -> Result<UpdatePlan, EngineError> {
        if self.ecosystem.contains_pid(&record.pid) {
            return Err(EngineError::KindMismatch {
                pid: record.pid,
                expected: "fresh pid",
                actual: "already bound",
            });
        }
        for o in ops {
            self.operation_record(o)?;
        }
        let mut ecosystem = self.ecosystem.clone();
        let fdo_pid = record.pid.clone();
        let mut record_writes = Vec::new();

        match self.ecosystem.model {
            Model::Record => {
                ecosystem.records.insert(fdo_pid.clone(), record.clone());
                let registrations = vec![Component::Record(record)];
                for o in ops {
                    let r = ecosystem.records.get_mut(&fdo_pid).expect("just inserted");
                    r.push_attribute(OPERATION_REF_KEY, o.as_str());
                    record_writes.push((fdo_pid.clone(), Component::Record(r.clone())));
                }
                Ok(UpdatePlan {
                    registrations,
                    record_writes,
                    implied_targets: None,
                    ecosystem,
                })
            }
            Model::Profile => {
                let profile_pid = record
                    .profile_ref()
                    .ok_or_else(|| EngineError::MissingProfileRef(fdo_pid.clone()))?;
                let profile = self
                    .ecosystem
                    .profiles
                    .get(&profile_pid)
                    .ok_or(EngineError::UnknownPid(profile_pid))?;
                let implied: BTreeSet<Pid> = profile.operation_list.iter().cloned().collect();
                if &implied != ops {
                    return Err(EngineError::ModelMismatch { implied });
                }
                ecosystem.records.insert(fdo_pid, record.clone());
                Ok(UpdatePlan {
                    registrations: vec![Component::Record(record)],
                    record_writes,
                    implied_targets: Some(implied),
                    ecosystem,
                })
            }
            Model::Attribute => {
                let implied: BTreeSet<Pid> = self
                    .ecosystem
                    .operation_specs
                    .values()
                    .filter(|spec| attribute_rule(&record.attributes, spec))
                    .map(|spec| spec.pid.clone())
                    .collect();
                if &implied != ops {
                    return Err(EngineError::ModelMismatch { implied });
                }
                ecosystem.records.insert(fdo_pid, record.clone());
                Ok(UpdatePlan {
                    registrations: vec![Component::Record(record)],
                    record_writes,
                    implied_targets: Some(implied),
                    ecosystem,
                })
            }
        }
    }
}

/// Matching phase for the attribute model, counting only probe reads. The
/// record's attributes are assumed already read (converted) by the caller;
/// probes iterate the smaller side, so the phase costs at most
/// `min(|A_f|, |A_o|)` reads.
fn match_probes(attrs: &[Attribute], inputs: &[RequiredInput], steps: &mut StepCounter) -> bool {
    if inputs.is_empty() {
        return true;
    }
    if inputs.len() <= attrs.len() {
        for input in inputs {
            steps.read();
            if !required_input_matches(attrs, input) {
                return false;
            }
        }
        true
    } else {
        let mut matched = vec![false; inputs.len()];
        for attr in attrs {
            steps.read();
            for (i, input) in inputs.iter().enumerate() {
                if !matched[i]
                    && input.key == attr.key
                    && input
                        .value_constraint
                        .as_ref()
                        .is_none_or(|v| v == &attr.value)
                {
                    matched[i] = true;
                }
            }
            if matched.iter().all(|m| *m) {
                return true;
            }
        }
        matched.iter().all(|m| *m)
    }
}

/// Full attribute-model check for one (f, o) pair: read the record, read
/// the required inputs, then match.
fn match_counted(attrs: &[Attribute], inputs: &[RequiredInput], steps: &mut StepCounter) -> bool {
    for _ in attrs {
        steps.read();
    }
    for _ in inputs {
        steps.read();
    }
    match_probes(attrs, inputs, steps)
}

/// Builds the query index by structural traversal (a code path separate
/// from the instrumented queries).
fn build_index(ecosystem: &Ecosystem) -> Result<QueryIndex, EngineError> {
    let mut index = QueryIndex::default();
    for record in ecosystem.records.values() {
        match record.kind {
            RecordKind::DataFdo => {
                index
                    .attrs_by_fdo
                    .insert(record.pid.clone(), record.attributes.clone());
                if let Some(p) = record.profile_ref() {
                    index.profiles_by_fdo.insert(record.pid.clone(), p.clone());
                    index
                        .fdos_by_profile
                        .entry(p)
                        .or_default()
                        .insert(record.pid.clone());
                }
                index.ops_by_fdo.entry(record.pid.clone()).or_default();
            }
            RecordKind::OperationFdo => {
                index.fdos_by_op.entry(record.pid.clone()).or_default();
            }
            RecordKind::Profile => {}
        }
    }
    for profile in ecosystem.profiles.values() {
        index
            .ops_by_profile
            .insert(profile.pid.clone(), profile.operation_list.clone());
    }
    for spec in ecosystem.operation_specs.values() {
        index
            .attrs_by_op
            .insert(spec.pid.clone(), spec.required_inputs.clone());
    }

    let op_pids: BTreeSet<Pid> = index.fdos_by_op.keys().cloned().collect();
    match ecosystem.model {
        Model::Record => {
            for record in ecosystem.records.values() {
                if record.kind != RecordKind::DataFdo {
                    continue;
                }
                for value in record.operation_refs() {
                    let op = Pid::parse(value)
                        .map_err(|_| EngineError::UnknownPid(record.pid.clone()))?;
                    if !op_pids.contains(&op) {
                        return Err(EngineError::UnknownPid(op));
                    }
                    index
                        .ops_by_fdo
                        .entry(record.pid.clone())
                        .or_default()
                        .insert(op.clone());
                    index
                        .fdos_by_op
                        .entry(op)
                        .or_default()
                        .insert(record.pid.clone());
                }
            }
        }
        Model::Profile => {
            let profiles_by_fdo = index.profiles_by_fdo.clone();
            for (f, p) in profiles_by_fdo {
                let ops = index.ops_by_profile.get(&p).cloned().unwrap_or_default();
                for op in ops {
                    if !op_pids.contains(&op) {
                        return Err(EngineError::UnknownPid(op));
                    }
                    index
                        .ops_by_fdo
                        .entry(f.clone())
                        .or_default()
                        .insert(op.clone());
                    index.fdos_by_op.entry(op).or_default().insert(f.clone());
                }
            }
        }
        Model::Attribute => {
            for record in ecosystem.records.values() {
                if record.kind != RecordKind::DataFdo {
                    continue;
                }
                for spec in ecosystem.operation_specs.values() {
                    if attribute_rule(&record.attributes, spec) {
                        index
                            .ops_by_fdo
                            .entry(record.pid.clone())
                            .or_default()
                            .insert(spec.pid.clone());
                        index
                            .fdos_by_op
                            .entry(spec.pid.clone())
                            .or_default()
                            .insert(record.pid.clone());
                    }
                }
            }
        }
    }
    Ok(index)
}
