//! Shared test substrate: an exhaustive brute-force oracle for the
//! association relation, written directly against the model definitions
//! (no engine, graph or index code), plus an independent random-ecosystem
//! builder.
//!
//! Not every integration target uses every helper.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fdo_core::model::{
    AttributeDefinition, Ecosystem, InformationRecord, Model, OperationSpec, Profile, RecordKind,
    RequiredInput, ValueRestriction, OPERATION_LIST_KEY, OPERATION_REF_KEY, PROFILE_REF_KEY,
    REQUIRED_INPUT_KEY,
};
use fdo_core::pid::Pid;

/// Brute-force oracle: enumerates every (FDO, operation) pair and decides
/// association straight from the model definition.
pub fn oracle_relation(eco: &Ecosystem) -> BTreeSet<(Pid, Pid)> {
    let mut relation = BTreeSet::new();
    let fdos: Vec<&InformationRecord> = eco
        .records
        .values()
        .filter(|r| r.kind == RecordKind::DataFdo)
        .collect();
    let ops: Vec<&Pid> = eco
        .records
        .values()
        .filter(|r| r.kind == RecordKind::OperationFdo)
        .map(|r| &r.pid)
        .collect();
    for f in &fdos {
        for o in &ops {
            if oracle_is_associated(eco, f, o) {
                relation.insert((f.pid.clone(), (*o).clone()));
            }
        }
    }
    relation
}

/// Decides one pair by a literal reading of each mechanism.
pub fn oracle_is_associated(eco: &Ecosystem, f: &InformationRecord, o: &Pid) -> bool {
    match eco.model {
        // Record typing: an `fdo-operation-ref` attribute naming o.
        Model::Record => f
            .attributes
            .iter()
            .any(|a| a.key == OPERATION_REF_KEY && a.value == o.as_str()),
        // Profile typing: o appears in the operation list of f's profile.
        Model::Profile => {
            let Some(profile_pid) = f
                .attributes
                .iter()
                .find(|a| a.key == PROFILE_REF_KEY)
                .and_then(|a| Pid::parse(&a.value).ok())
            else {
                return false;
            };
            eco.profiles
                .get(&profile_pid)
                .map(|p| p.operation_list.contains(o))
                .unwrap_or(false)
        }
        // Attribute typing: every required input of o is satisfied by some
        // attribute of f (key match, plus value match when constrained).
        Model::Attribute => {
            let Some(spec) = eco.operation_specs.get(o) else {
                return false;
            };
            spec.required_inputs.iter().all(|input| {
                f.attributes.iter().any(|a| {
                    a.key == input.key
                        && match &input.value_constraint {
                            Some(v) => v == &a.value,
                            None => true,
                        }
                })
            })
        }
    }
}

/// Shape knobs for [`random_ecosystem`].
pub struct Shape {
    pub max_fdos: usize,
    pub max_ops: usize,
    pub max_profiles: usize,
    pub max_attrs: usize,
    pub max_inputs: usize,
    /// Probability that a required input pins a value.
    pub constraint_p: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_fdos: 12,
            max_ops: 6,
            max_profiles: 4,
            max_attrs: 4,
            max_inputs: 3,
            constraint_p: 0.3,
        }
    }
}

const KEYS: [&str; 6] = ["title", "format", "license", "creator", "subject", "size"];
const VALUES: [&str; 4] = ["alpha", "beta", "gamma", "delta"];

/// Builds a random but referentially intact ecosystem without touching the
/// library's generator. PIDs use the `t.*` prefixes.
pub fn random_ecosystem(seed: u64, model: Model, shape: &Shape) -> Ecosystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eco = Ecosystem::new(model);

    let mut def_counter = 0u32;
    let mut add_def = |eco: &mut Ecosystem, key: &str| {
        def_counter += 1;
        let pid = Pid::new("t.t", &format!("{def_counter:04}")).unwrap();
        eco.attribute_defs.insert(
            pid.clone(),
            AttributeDefinition {
                pid,
                key: key.to_string(),
                restriction: ValueRestriction::Any,
            },
        );
    };
    for key in [
        PROFILE_REF_KEY,
        OPERATION_REF_KEY,
        OPERATION_LIST_KEY,
        REQUIRED_INPUT_KEY,
    ] {
        add_def(&mut eco, key);
    }
    for key in KEYS {
        add_def(&mut eco, key);
    }

    let n_ops = rng.gen_range(1..=shape.max_ops);
    let op_pids: Vec<Pid> = (1..=n_ops)
        .map(|i| Pid::new("t.o", &format!("{i:04}")).unwrap())
        .collect();
    for pid in &op_pids {
        eco.records.insert(
            pid.clone(),
            InformationRecord::new(pid.clone(), RecordKind::OperationFdo),
        );
        let mut spec = OperationSpec::new(pid.clone());
        spec.executor_ref = format!("executor:{pid}");
        if model == Model::Attribute {
            let n_inputs = rng.gen_range(0..=shape.max_inputs);
            let mut used = BTreeSet::new();
            for _ in 0..n_inputs {
                let key = KEYS[rng.gen_range(0..KEYS.len())];
                if !used.insert(key) {
                    continue;
                }
                spec.required_inputs.push(RequiredInput {
                    key: key.to_string(),
                    value_constraint: if rng.gen_bool(shape.constraint_p) {
                        Some(VALUES[rng.gen_range(0..VALUES.len())].to_string())
                    } else {
                        None
                    },
                });
            }
        }
        eco.operation_specs.insert(pid.clone(), spec);
    }

    let n_profiles = rng.gen_range(1..=shape.max_profiles);
    let profile_pids: Vec<Pid> = (1..=n_profiles)
        .map(|i| Pid::new("t.p", &format!("{i:04}")).unwrap())
        .collect();
    for pid in &profile_pids {
        let mut profile = Profile::new(pid.clone());
        if model == Model::Profile {
            profile.operation_list = op_pids
                .iter()
                .filter(|_| rng.gen_bool(0.4))
                .cloned()
                .collect();
        }
        eco.profiles.insert(pid.clone(), profile);
    }

    let n_fdos = rng.gen_range(1..=shape.max_fdos);
    for i in 1..=n_fdos {
        let pid = Pid::new("t.f", &format!("{i:04}")).unwrap();
        let mut record = InformationRecord::new(pid.clone(), RecordKind::DataFdo);
        let n_attrs = rng.gen_range(0..=shape.max_attrs);
        for _ in 0..n_attrs {
            record.push_attribute(
                KEYS[rng.gen_range(0..KEYS.len())],
                VALUES[rng.gen_range(0..VALUES.len())],
            );
        }
        let profile = &profile_pids[rng.gen_range(0..profile_pids.len())];
        record.push_attribute(PROFILE_REF_KEY, profile.as_str());
        if model == Model::Record {
            let mut linked: Vec<&Pid> = op_pids.iter().filter(|_| rng.gen_bool(0.4)).collect();
            linked.sort();
            for op in linked {
                record.push_attribute(OPERATION_REF_KEY, op.as_str());
            }
        }
        eco.records.insert(pid, record);
    }
    eco
}
