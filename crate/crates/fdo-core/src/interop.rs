//! Conversions between association models that preserve the association
//! relation, plus the cross-model consistency check.
//!
//! FDO and operation PIDs are kept identical across models (the bijections
//! are identity maps); only the association machinery is rebuilt:
//! converting to record typing materializes one operation-reference
//! attribute per pair, converting to attribute typing synthesizes one
//! marker attribute definition per operation, and converting to profile
//! typing groups FDOs by identical operation sets into synthesized profiles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{AssociationEngine, EngineError};
use crate::metrics::engine_relation;
use crate::model::{
    AttributeDefinition, Ecosystem, Model, Profile, RequiredInput, ValueRestriction,
    OPERATION_REF_KEY, PROFILE_REF_KEY,
};
use crate::pid::{Pid, PidMinter};

#[derive(Debug, Error)]
pub enum InteropError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("mapping has no image for {0}")]
    MappingIncomplete(Pid),
}

/// Bijective mappings between the FDOs and operations of two models, plus
/// the components synthesized to express the relation in the target model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMapping {
    pub source: Model,
    pub target: Model,
    pub fdo_map: BTreeMap<Pid, Pid>,
    pub op_map: BTreeMap<Pid, Pid>,
    pub synthesized: Vec<Pid>,
}

impl ModelMapping {
    pub fn identity(source: Model, target: Model, ecosystem: &Ecosystem) -> Self {
        ModelMapping {
            source,
            target,
            fdo_map: ecosystem.fdos().map(|p| (p.clone(), p.clone())).collect(),
            op_map: ecosystem
                .operations()
                .map(|p| (p.clone(), p.clone()))
                .collect(),
            synthesized: Vec::new(),
        }
    }

    /// Two-column PID table for one bijection.
    pub fn table(map: &BTreeMap<Pid, Pid>) -> String {
        let mut out = String::new();
        for (from, to) in map {
            let _ = writeln!(out, "{from}\t{to}");
        }
        out
    }
}

fn strip_association_machinery(ecosystem: &mut Ecosystem) {
    for record in ecosystem.records.values_mut() {
        record.attributes.retain(|a| a.key != OPERATION_REF_KEY);
    }
    for profile in ecosystem.profiles.values_mut() {
        profile.operation_list.clear();
    }
    for spec in ecosystem.operation_specs.values_mut() {
        spec.required_inputs.clear();
    }
}

/// Converts an ecosystem to the target model, preserving the association
/// relation exactly. Returns the converted ecosystem and the mapping.
pub fn convert(
    ecosystem: &Ecosystem,
    target: Model,
) -> Result<(Ecosystem, ModelMapping), InteropError> {
    let mut mapping = ModelMapping::identity(ecosystem.model, target, ecosystem);
    if ecosystem.model == target {
        return Ok((ecosystem.clone(), mapping));
    }
    let engine = AssociationEngine::new(ecosystem.clone())?;
    let relation = engine_relation(&engine);
    let mut ops_of: BTreeMap<&Pid, BTreeSet<&Pid>> = BTreeMap::new();
    for f in ecosystem.fdos() {
        ops_of.insert(f, BTreeSet::new());
    }
    for (f, o) in &relation {
        ops_of.entry(f).or_default().insert(o);
    }

    let mut converted = ecosystem.clone();
    converted.model = target;
    strip_association_machinery(&mut converted);
    let mut minter = PidMinter::new();
    for pid in ecosystem.records.keys().chain(ecosystem.profiles.keys()) {
        minter.observe(pid);
    }

    let ensure_def = |converted: &mut Ecosystem,
                          minter: &mut PidMinter,
                          mapping: &mut ModelMapping,
                          key: &str| {
        if converted.definition_by_key(key).is_none() {
            let pid = minter.mint("syn.t").expect("syn prefix");
            converted.attribute_defs.insert(
                pid.clone(),
                AttributeDefinition {
                    pid: pid.clone(),
                    key: key.to_string(),
                    restriction: ValueRestriction::Any,
                },
            );
            mapping.synthesized.push(pid);
        }
    };

    match target {
        Model::Record => {
            ensure_def(&mut converted, &mut minter, &mut mapping, OPERATION_REF_KEY);
            for (f, ops) in &ops_of {
                let record = converted
                    .records
                    .get_mut(f)
                    .expect("fdo record present in clone");
                for o in ops {
                    record.push_attribute(OPERATION_REF_KEY, o.as_str());
                }
            }
        }
        Model::Profile => {
            ensure_def(&mut converted, &mut minter, &mut mapping, PROFILE_REF_KEY);
            // Group FDOs by identical operation sets; one synthesized
            // profile per group (the minimal-profile choice).
            let mut groups: BTreeMap<Vec<&Pid>, Vec<&Pid>> = BTreeMap::new();
            for (f, ops) in &ops_of {
                groups
                    .entry(ops.iter().copied().collect())
                    .or_default()
                    .push(f);
            }
            for (ops, members) in groups {
                let pid = minter.mint("syn.p").expect("syn prefix");
                let mut profile = Profile::new(pid.clone());
                profile.operation_list = ops.into_iter().cloned().collect();
                converted.profiles.insert(pid.clone(), profile);
                mapping.synthesized.push(pid.clone());
                for f in members {
                    let record = converted
                        .records
                        .get_mut(f)
                        .expect("fdo record present in clone");
                    let mut replaced = false;
                    for attr in record.attributes.iter_mut() {
                        if attr.key == PROFILE_REF_KEY {
                            attr.value = pid.to_string();
                            replaced = true;
                            break;
                        }
                    }
                    if !replaced {
                        record.push_attribute(PROFILE_REF_KEY, pid.as_str());
                    }
                }
            }
        }
        Model::Attribute => {
            // One marker definition per operation; the marker becomes the
            // operation's single required input, so operations without
            // associations never match universally.
            let op_pids: Vec<Pid> = ecosystem.operations().cloned().collect();
            let mut marker_key: BTreeMap<&Pid, String> = BTreeMap::new();
            for o in &op_pids {
                let key = format!("marker:{o}");
                let def_pid = minter.mint("syn.t").expect("syn prefix");
                converted.attribute_defs.insert(
                    def_pid.clone(),
                    AttributeDefinition {
                        pid: def_pid.clone(),
                        key: key.clone(),
                        restriction: ValueRestriction::Any,
                    },
                );
                mapping.synthesized.push(def_pid);
                let spec = converted
                    .operation_specs
                    .get_mut(o)
                    .expect("operation spec present in clone");
                spec.required_inputs = vec![RequiredInput {
                    key: key.clone(),
                    value_constraint: None,
                }];
                marker_key.insert(o, key);
            }
            for (f, ops) in &ops_of {
                let record = converted
                    .records
                    .get_mut(f)
                    .expect("fdo record present in clone");
                for o in ops {
                    record.push_attribute(&marker_key[o], "1");
                }
            }
        }
    }
    Ok((converted, mapping))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub fdo: Pid,
    pub per_model: Vec<(Model, BTreeSet<Pid>)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub disagreements: Vec<Disagreement>,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Verifies that every FDO resolves to the same set of associated
/// operations in all provided ecosystems. `mappings[k]` maps the first
/// ecosystem's PIDs onto `ecosystems[k + 1]`.
pub fn check_consistency(
    ecosystems: &[&Ecosystem],
    mappings: &[&ModelMapping],
) -> Result<ConsistencyReport, InteropError> {
    let mut report = ConsistencyReport::default();
    let Some((base, rest)) = ecosystems.split_first() else {
        return Ok(report);
    };
    assert_eq!(rest.len(), mappings.len(), "one mapping per non-base ecosystem");
    let engines: Vec<AssociationEngine> = ecosystems
        .iter()
        .map(|e| AssociationEngine::new((*e).clone()))
        .collect::<Result<_, _>>()?;
    for f in base.fdos() {
        let base_ops = engines[0].ops_for_fdo(f)?;
        let mut per_model = vec![(base.model, base_ops.clone())];
        let mut agree = true;
        for (k, mapping) in mappings.iter().enumerate() {
            let f_mapped = mapping
                .fdo_map
                .get(f)
                .ok_or_else(|| InteropError::MappingIncomplete(f.clone()))?;
            let ops = engines[k + 1].ops_for_fdo(f_mapped)?;
            // Map back through the operation bijection for comparison.
            let inverse: BTreeMap<&Pid, &Pid> =
                mapping.op_map.iter().map(|(a, b)| (b, a)).collect();
            let ops_in_base: BTreeSet<Pid> = ops
                .iter()
                .map(|o| {
                    inverse
                        .get(o)
                        .map(|p| (*p).clone())
                        .ok_or_else(|| InteropError::MappingIncomplete(o.clone()))
                })
                .collect::<Result<_, _>>()?;
            if ops_in_base != base_ops {
                agree = false;
            }
            per_model.push((rest[k].model, ops_in_base));
        }
        if !agree {
            report.disagreements.push(Disagreement {
                fdo: f.clone(),
                per_model,
            });
        }
    }
    Ok(report)
}
