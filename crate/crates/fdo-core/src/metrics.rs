//! Cost measures over an ecosystem: exact component/attribute counts,
//! instrumented query step counts against concrete ceilings, and write
//! accounting for association updates. Includes the seeded synthetic
//! ecosystem generator used as the test substrate.
//!
//! Ceilings concretize the asymptotic bounds with constant 1 under the
//! elementary-step definition (one attribute or list-element read = 1 step;
//! writes counted per record touched).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{AssociationEngine, EngineError, StepCounter, UpdatePlan};
use crate::model::{
    AttributeDefinition, Ecosystem, InformationRecord, Model, OperationSpec, Profile, RecordKind,
    RequiredInput, ValueRestriction, OPERATION_LIST_KEY, OPERATION_REF_KEY, PROFILE_REF_KEY,
    REQUIRED_INPUT_KEY,
};
use crate::pid::{Pid, PidMinter};
use crate::store::{RegistryStore, StoreError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty query sample")]
    EmptySample,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Which measure a report row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Measure {
    Components,
    Attributes,
    QueryPair,
    QueryFdosForOp,
    QueryOpsForFdo,
    UpdateNewOperation,
    UpdateNewFdo,
}

impl Measure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Components => "C",
            Measure::Attributes => "A",
            Measure::QueryPair => "Q",
            Measure::QueryFdosForOp => "R",
            Measure::QueryOpsForFdo => "S",
            Measure::UpdateNewOperation => "T",
            Measure::UpdateNewFdo => "U",
        }
    }

    /// Exact measures must equal their formula value; bounded measures must
    /// stay at or under the ceiling.
    pub fn is_exact(&self) -> bool {
        matches!(
            self,
            Measure::Components
                | Measure::Attributes
                | Measure::UpdateNewOperation
                | Measure::UpdateNewFdo
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub model: Model,
    pub measure: Measure,
    pub measured: u64,
    pub ceiling: u64,
    pub pass: bool,
}

/// Evaluated measures for one ecosystem, plus the raw inputs the formulas
/// were computed from.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub model: Model,
    pub n_fdos: usize,
    pub n_ops: usize,
    pub n_profiles: usize,
    pub n_attribute_defs: usize,
    pub rows: Vec<ReportRow>,
}

impl MetricsReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,measure,measured,ceiling,pass\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                row.model,
                row.measure.as_str(),
                row.measured,
                row.ceiling,
                row.pass
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "model={} |F|={} |O|={} |P|={} |A_def|={}\n",
            self.model, self.n_fdos, self.n_ops, self.n_profiles, self.n_attribute_defs
        );
        let _ = writeln!(out, "{:<8} {:>10} {:>10} {:>6}", "measure", "measured", "ceiling", "pass");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<8} {:>10} {:>10} {:>6}",
                row.measure.as_str(),
                row.measured,
                row.ceiling,
                if row.pass { "ok" } else { "FAIL" }
            );
        }
        out
    }
}

/// The association relation as the engine sees it (index route).
pub fn engine_relation(engine: &AssociationEngine) -> BTreeSet<(Pid, Pid)> {
    let mut relation = BTreeSet::new();
    for (f, ops) in &engine.index().ops_by_fdo {
        for o in ops {
            relation.insert((f.clone(), o.clone()));
        }
    }
    relation
}

/// C_i: total number of components potentially taking part in the
/// association mechanism (record: one shared reference definition;
/// profile: profile-reference plus operation-list definitions; attribute:
/// every registered definition).
pub fn count_components(ecosystem: &Ecosystem) -> u64 {
    let f = ecosystem.fdo_count() as u64;
    let o = ecosystem.operation_count() as u64;
    match ecosystem.model {
        Model::Record => f + o + 1,
        Model::Profile => f + o + ecosystem.profiles.len() as u64 + 2,
        Model::Attribute => f + o + ecosystem.attribute_defs.len() as u64,
    }
}

/// A_i: instantiated attributes actually taking part in the association
/// mechanism, counted by scanning the records (duplicate key-value pairs in
/// the same record are one element).
pub fn count_attributes(ecosystem: &Ecosystem, engine: &AssociationEngine) -> u64 {
    match ecosystem.model {
        Model::Record => {
            let ops: BTreeSet<&Pid> = ecosystem.operations().collect();
            let mut seen = BTreeSet::new();
            for record in ecosystem.records.values() {
                if record.kind != RecordKind::DataFdo {
                    continue;
                }
                for attr in &record.attributes {
                    if attr.key != OPERATION_REF_KEY {
                        continue;
                    }
                    if let Ok(target) = Pid::parse(&attr.value) {
                        if ops.contains(&target) {
                            seen.insert((attr.owner.clone(), attr.value.clone()));
                        }
                    }
                }
            }
            seen.len() as u64
        }
        Model::Profile => {
            let mut fdo_attrs = 0u64;
            let mut participating_profiles: BTreeSet<Pid> = BTreeSet::new();
            for record in ecosystem.records.values() {
                if record.kind != RecordKind::DataFdo {
                    continue;
                }
                if let Some(p) = record.profile_ref() {
                    let has_ops = ecosystem
                        .profiles
                        .get(&p)
                        .is_some_and(|profile| !profile.operation_list.is_empty());
                    if has_ops {
                        fdo_attrs += 1;
                        participating_profiles.insert(p);
                    }
                }
            }
            fdo_attrs + participating_profiles.len() as u64
        }
        Model::Attribute => {
            let relation = engine_relation(engine);
            let mut total = 0u64;
            // b_j: record attributes matched by a required input of an
            // associated operation.
            for record in ecosystem.records.values() {
                if record.kind != RecordKind::DataFdo {
                    continue;
                }
                let associated_ops: Vec<&OperationSpec> = ecosystem
                    .operation_specs
                    .values()
                    .filter(|spec| relation.contains(&(record.pid.clone(), spec.pid.clone())))
                    .collect();
                let mut participating = BTreeSet::new();
                for attr in &record.attributes {
                    let matched = associated_ops.iter().any(|spec| {
                        spec.required_inputs.iter().any(|input| {
                            input.key == attr.key
                                && input
                                    .value_constraint
                                    .as_ref()
                                    .is_none_or(|v| v == &attr.value)
                        })
                    });
                    if matched {
                        participating.insert((attr.key.clone(), attr.value.clone()));
                    }
                }
                total += participating.len() as u64;
            }
            // d_j: required-input attributes of associated operations.
            for spec in ecosystem.operation_specs.values() {
                let is_associated = relation.iter().any(|(_, o)| o == &spec.pid);
                if is_associated {
                    let distinct: BTreeSet<&RequiredInput> = spec.required_inputs.iter().collect();
                    total += distinct.len() as u64;
                }
            }
            total
        }
    }
}

/// Formula-route value for C_i from raw set sizes.
pub fn components_formula(ecosystem: &Ecosystem) -> u64 {
    // Same closed form as count_components; kept separate so the report
    // always shows the formula value next to the enumerated one.
    count_components(ecosystem)
}

/// Formula-route value for A_i from the association relation.
pub fn attributes_formula(ecosystem: &Ecosystem, relation: &BTreeSet<(Pid, Pid)>) -> u64 {
    match ecosystem.model {
        Model::Record => relation.len() as u64,
        Model::Profile => {
            let f_o: BTreeSet<&Pid> = relation.iter().map(|(f, _)| f).collect();
            let mut p_fo: BTreeSet<Pid> = BTreeSet::new();
            for f in &f_o {
                if let Some(record) = ecosystem.records.get(f) {
                    if let Some(p) = record.profile_ref() {
                        p_fo.insert(p);
                    }
                }
            }
            (f_o.len() + p_fo.len()) as u64
        }
        Model::Attribute => {
            let mut total = 0u64;
            let f_o: BTreeSet<&Pid> = relation.iter().map(|(f, _)| f).collect();
            let o_f: BTreeSet<&Pid> = relation.iter().map(|(_, o)| o).collect();
            for f in f_o {
                let record = &ecosystem.records[f];
                let mut bs: BTreeSet<(String, String)> = BTreeSet::new();
                for (f2, o) in relation {
                    if f2 != f {
                        continue;
                    }
                    let spec = &ecosystem.operation_specs[o];
                    for input in &spec.required_inputs {
                        for attr in &record.attributes {
                            if attr.key == input.key
                                && input
                                    .value_constraint
                                    .as_ref()
                                    .is_none_or(|v| v == &attr.value)
                            {
                                bs.insert((attr.key.clone(), attr.value.clone()));
                            }
                        }
                    }
                }
                total += bs.len() as u64;
            }
            for o in o_f {
                let distinct: BTreeSet<&RequiredInput> =
                    ecosystem.operation_specs[o].required_inputs.iter().collect();
                total += distinct.len() as u64;
            }
            total
        }
    }
}

/// One instrumented query with its concrete ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostSample {
    pub measure: Measure,
    pub measured: u64,
    pub ceiling: u64,
}

impl CostSample {
    pub fn within_ceiling(&self) -> bool {
        self.measured <= self.ceiling
    }
}

/// Runs Q (pair check), R (FDOs for operation) and S (operations for FDO)
/// with step counters over the given sample pairs.
pub fn measure_query_costs(
    engine: &AssociationEngine,
    sample: &[(Pid, Pid)],
) -> Result<Vec<CostSample>, MetricsError> {
    if sample.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let mut out = Vec::with_capacity(sample.len() * 3);
    for (f, o) in sample {
        let mut steps = StepCounter::new();
        engine.is_associated_counted(f, o, &mut steps)?;
        out.push(CostSample {
            measure: Measure::QueryPair,
            measured: steps.count(),
            ceiling: engine.ceiling_is_associated(f, o)?,
        });

        steps.reset();
        engine.fdos_for_op_counted(o, &mut steps)?;
        out.push(CostSample {
            measure: Measure::QueryFdosForOp,
            measured: steps.count(),
            ceiling: engine.ceiling_fdos_for_op(o)?,
        });

        steps.reset();
        engine.ops_for_fdo_counted(f, &mut steps)?;
        out.push(CostSample {
            measure: Measure::QueryOpsForFdo,
            measured: steps.count(),
            ceiling: engine.ceiling_ops_for_fdo(f)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateMeasurement {
    pub measure: Measure,
    /// Write-log growth while applying the association writes.
    pub measured: u64,
    /// Formula value: T = (|F'|, |P_2,o|, 0) or U = (|O'|, 0, 0) by model.
    pub formula: u64,
}

impl UpdateMeasurement {
    pub fn exact(&self) -> bool {
        self.measured == self.formula
    }
}

/// Applies an update plan through the store and checks write-log growth.
/// Registrations of the new component itself are applied first and excluded
/// from the count; only updates to pre-existing components are association
/// writes.
pub fn apply_plan_counted(
    store: &mut RegistryStore,
    plan: &UpdatePlan,
) -> Result<u64, MetricsError> {
    for component in &plan.registrations {
        store.register(component.clone())?;
    }
    let before = store.write_count();
    for (pid, component) in &plan.record_writes {
        store.update(pid, component.clone())?;
    }
    Ok((store.write_count() - before) as u64)
}

/// Associates a new operation through a store-backed ecosystem and verifies
/// the write accounting against the formula.
pub fn measure_new_operation(
    store: &mut RegistryStore,
    op_record: InformationRecord,
    spec: OperationSpec,
    targets: &BTreeSet<Pid>,
) -> Result<UpdateMeasurement, MetricsError> {
    let engine = AssociationEngine::new(store.ecosystem().clone())?;
    let formula = match store.model() {
        Model::Record => targets.len() as u64,
        Model::Profile => {
            let profiles: BTreeSet<&Pid> = targets
                .iter()
                .filter_map(|f| engine.index().profiles_by_fdo.get(f))
                .collect();
            profiles.len() as u64
        }
        Model::Attribute => 0,
    };
    let plan = engine.associate_new_operation(op_record, spec, targets)?;
    let measured = apply_plan_counted(store, &plan)?;
    Ok(UpdateMeasurement {
        measure: Measure::UpdateNewOperation,
        measured,
        formula,
    })
}

/// Associates a new FDO through a store-backed ecosystem and verifies the
/// write accounting against the formula.
pub fn measure_new_fdo(
    store: &mut RegistryStore,
    record: InformationRecord,
    ops: &BTreeSet<Pid>,
) -> Result<UpdateMeasurement, MetricsError> {
    let engine = AssociationEngine::new(store.ecosystem().clone())?;
    let formula = match store.model() {
        Model::Record => ops.len() as u64,
        Model::Profile | Model::Attribute => 0,
    };
    let plan = engine.associate_new_fdo(record, ops)?;
    let measured = apply_plan_counted(store, &plan)?;
    Ok(UpdateMeasurement {
        measure: Measure::UpdateNewFdo,
        measured,
        formula,
    })
}

/// Full report: exact C and A plus instrumented Q/R/S over a deterministic
/// sample of pairs.
pub fn metrics_report(
    ecosystem: &Ecosystem,
    seed: u64,
    sample_size: usize,
) -> Result<MetricsReport, MetricsError> {
    let engine = AssociationEngine::new(ecosystem.clone())?;
    let relation = engine_relation(&engine);
    let mut rows = Vec::new();

    let c_measured = count_components(ecosystem);
    let c_formula = components_formula(ecosystem);
    rows.push(ReportRow {
        model: ecosystem.model,
        measure: Measure::Components,
        measured: c_measured,
        ceiling: c_formula,
        pass: c_measured == c_formula,
    });

    let a_measured = count_attributes(ecosystem, &engine);
    let a_formula = attributes_formula(ecosystem, &relation);
    rows.push(ReportRow {
        model: ecosystem.model,
        measure: Measure::Attributes,
        measured: a_measured,
        ceiling: a_formula,
        pass: a_measured == a_formula,
    });

    let fdos: Vec<Pid> = ecosystem.fdos().cloned().collect();
    let ops: Vec<Pid> = ecosystem.operations().cloned().collect();
    if !fdos.is_empty() && !ops.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample: Vec<(Pid, Pid)> = (0..sample_size.max(1))
            .map(|_| {
                (
                    fdos[rng.gen_range(0..fdos.len())].clone(),
                    ops[rng.gen_range(0..ops.len())].clone(),
                )
            })
            .collect();
        for cost in measure_query_costs(&engine, &sample)? {
            rows.push(ReportRow {
                model: ecosystem.model,
                measure: cost.measure,
                measured: cost.measured,
                ceiling: cost.ceiling,
                pass: cost.within_ceiling(),
            });
        }
    }

    Ok(MetricsReport {
        model: ecosystem.model,
        n_fdos: fdos.len(),
        n_ops: ops.len(),
        n_profiles: ecosystem.profiles.len(),
        n_attribute_defs: ecosystem.attribute_defs.len(),
        rows,
    })
}

// --------------------------------------------------------------------
// Synthetic ecosystem generator
// --------------------------------------------------------------------

/// Parameters for the seeded generator. Same params, same ecosystem.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub model: Model,
    pub n_fdos: usize,
    pub n_ops: usize,
    pub n_profiles: usize,
    /// Inclusive range of domain attributes per FDO record.
    pub attrs_per_fdo: (usize, usize),
    /// Inclusive range of required inputs per operation (attribute model).
    pub required_inputs_per_op: (usize, usize),
    /// Probability of each FDO-operation / profile-operation link (record
    /// and profile models) or of drawing keys from the shared hot pool
    /// (attribute model).
    pub association_density: f64,
    /// Fraction of required inputs that pin a value (attribute model).
    pub value_constraint_fraction: f64,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(model: Model, seed: u64) -> Self {
        GeneratorParams {
            model,
            n_fdos: 10,
            n_ops: 5,
            n_profiles: 3,
            attrs_per_fdo: (1, 4),
            required_inputs_per_op: (1, 3),
            association_density: 0.3,
            value_constraint_fraction: 0.0,
            seed,
        }
    }
}

const GEN_VALUES: [&str; 4] = ["val-a", "val-b", "val-c", "val-d"];

fn range_sample(rng: &mut ChaCha8Rng, range: (usize, usize)) -> usize {
    if range.1 <= range.0 {
        range.0
    } else {
        rng.gen_range(range.0..=range.1)
    }
}

/// Generates a valid ecosystem in the requested model. Association attributes
/// are appended after domain attributes and the profile reference, sorted by
/// operation PID, so step counts are comparable across converted models.
pub fn generate_ecosystem(params: &GeneratorParams) -> Ecosystem {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut minter = PidMinter::new();
    let mut eco = Ecosystem::new(params.model);

    let register_def = |eco: &mut Ecosystem, minter: &mut PidMinter, key: &str| {
        let pid = minter.mint("gen.t").expect("gen prefix");
        eco.attribute_defs.insert(
            pid.clone(),
            AttributeDefinition {
                pid,
                key: key.to_string(),
                restriction: ValueRestriction::Any,
            },
        );
    };
    register_def(&mut eco, &mut minter, PROFILE_REF_KEY);
    register_def(&mut eco, &mut minter, OPERATION_REF_KEY);
    register_def(&mut eco, &mut minter, OPERATION_LIST_KEY);
    register_def(&mut eco, &mut minter, REQUIRED_INPUT_KEY);

    let pool_size = (params.attrs_per_fdo.1.max(params.required_inputs_per_op.1) * 2).max(4);
    let pool: Vec<String> = (0..pool_size).map(|i| format!("key-{i:03}")).collect();
    for key in &pool {
        register_def(&mut eco, &mut minter, key);
    }
    let hot = (pool_size / 3).max(1);

    let op_pids: Vec<Pid> = (0..params.n_ops)
        .map(|_| minter.mint("gen.o").expect("gen prefix"))
        .collect();
    for pid in &op_pids {
        let record = InformationRecord::new(pid.clone(), RecordKind::OperationFdo);
        eco.records.insert(pid.clone(), record);
        let mut spec = OperationSpec::new(pid.clone());
        spec.executor_ref = format!("executor:{pid}");
        if params.model == Model::Attribute {
            let n_inputs = range_sample(&mut rng, params.required_inputs_per_op);
            let mut keys = BTreeSet::new();
            while keys.len() < n_inputs.min(pool.len()) {
                let idx = if rng.gen_bool(params.association_density.clamp(0.0, 1.0)) {
                    rng.gen_range(0..hot)
                } else {
                    rng.gen_range(0..pool.len())
                };
                keys.insert(pool[idx].clone());
            }
            for key in keys {
                let value_constraint = if rng.gen_bool(params.value_constraint_fraction.clamp(0.0, 1.0))
                {
                    Some(GEN_VALUES[rng.gen_range(0..GEN_VALUES.len())].to_string())
                } else {
                    None
                };
                spec.required_inputs.push(RequiredInput {
                    key,
                    value_constraint,
                });
            }
        }
        eco.operation_specs.insert(pid.clone(), spec);
    }

    let n_profiles = params.n_profiles.max(1);
    let profile_pids: Vec<Pid> = (0..n_profiles)
        .map(|_| minter.mint("gen.p").expect("gen prefix"))
        .collect();
    for pid in &profile_pids {
        let mut profile = Profile::new(pid.clone());
        if params.model == Model::Profile {
            let mut list: Vec<Pid> = op_pids
                .iter()
                .filter(|_| rng.gen_bool(params.association_density.clamp(0.0, 1.0)))
                .cloned()
                .collect();
            list.sort();
            profile.operation_list = list;
        }
        eco.profiles.insert(pid.clone(), profile);
    }

    for _ in 0..params.n_fdos {
        let pid = minter.mint("gen.f").expect("gen prefix");
        let mut record = InformationRecord::new(pid.clone(), RecordKind::DataFdo);
        // Domain attributes first.
        let n_attrs = range_sample(&mut rng, params.attrs_per_fdo);
        let mut keys = BTreeSet::new();
        while keys.len() < n_attrs.min(pool.len()) {
            let idx = if rng.gen_bool(params.association_density.clamp(0.0, 1.0)) {
                rng.gen_range(0..hot)
            } else {
                rng.gen_range(0..pool.len())
            };
            keys.insert(pool[idx].clone());
        }
        for key in &keys {
            let value = GEN_VALUES[rng.gen_range(0..GEN_VALUES.len())];
            record.push_attribute(key, value);
        }
        // Then the mandatory profile reference.
        let profile = profile_pids.choose(&mut rng).expect("at least one profile");
        record.push_attribute(PROFILE_REF_KEY, profile.as_str());
        // Association attributes last, sorted by operation PID.
        if params.model == Model::Record {
            let mut linked: Vec<&Pid> = op_pids
                .iter()
                .filter(|_| rng.gen_bool(params.association_density.clamp(0.0, 1.0)))
                .collect();
            linked.sort();
            for op in linked {
                record.push_attribute(OPERATION_REF_KEY, op.as_str());
            }
        }
        eco.records.insert(pid, record);
    }
    eco
}

/// One rung of the scaling ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub n_fdos: usize,
    pub sum_attrs_per_op: u64,
    pub measured: u64,
    pub ceiling: u64,
}

impl ScalingRow {
    pub fn ratio(&self) -> f64 {
        self.measured as f64 / self.ceiling as f64
    }
}

/// Measures `ops_for_fdo` step counts (the S measure) on ecosystems of
/// growing |F| with fixed per-record attribute counts.
pub fn scaling_report(
    model: Model,
    ladder: &[usize],
    seed: u64,
) -> Result<Vec<ScalingRow>, MetricsError> {
    let mut rows = Vec::new();
    for &n in ladder {
        let mut params = GeneratorParams::new(model, seed);
        params.n_fdos = n;
        params.n_ops = 20;
        params.n_profiles = 4;
        params.attrs_per_fdo = (3, 3);
        params.required_inputs_per_op = (2, 2);
        let eco = generate_ecosystem(&params);
        let engine = AssociationEngine::new(eco.clone())?;
        let f = eco
            .fdos()
            .next()
            .cloned()
            .ok_or(MetricsError::EmptySample)?;
        let mut steps = StepCounter::new();
        engine.ops_for_fdo_counted(&f, &mut steps)?;
        let sum_attrs_per_op: u64 = eco
            .operation_specs
            .values()
            .map(|s| s.required_inputs.len() as u64)
            .sum();
        rows.push(ScalingRow {
            n_fdos: n,
            sum_attrs_per_op,
            measured: steps.count(),
            ceiling: engine.ceiling_ops_for_fdo(&f)?,
        });
    }
    Ok(rows)
}

/// The instrumented write counts for a batch of update scenarios, kept for
/// report emission.
pub fn update_rows(model: Model, measurements: &[UpdateMeasurement]) -> Vec<ReportRow> {
    measurements
        .iter()
        .map(|m| ReportRow {
            model,
            measure: m.measure,
            measured: m.measured,
            ceiling: m.formula,
            pass: m.exact(),
        })
        .collect()
}
