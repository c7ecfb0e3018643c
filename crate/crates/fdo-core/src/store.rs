//! Registry store: a single local directory standing in for the handle,
//! profile, operation and attribute-type registries.
//!
//! Layout: `<root>/{handles,profiles,operations,attribute_defs}.ndrec`, one
//! line-delimited record per component, plus `<root>/writes.log` (one line
//! per successful write) and `<root>/model` naming the association model.
//!
//! Line format: `pid<TAB>kind<TAB>field=value;field=value;...` where `\t`,
//! `;`, `=`, `\` and newlines are backslash-escaped inside values.
//! List-valued fields use `|` as an element separator.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{
    AttributeDefinition, ComponentKind, Ecosystem, InformationRecord, Model, ModelError,
    OperationSpec, Profile, RecordKind, RequiredInput, ValueRestriction, Violation,
};
use crate::pid::Pid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Namespace {
    Handles,
    Profiles,
    Operations,
    AttributeDefs,
}

impl Namespace {
    pub const ALL: [Namespace; 4] = [
        Namespace::Handles,
        Namespace::Profiles,
        Namespace::Operations,
        Namespace::AttributeDefs,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Namespace::Handles => "handles",
            Namespace::Profiles => "profiles",
            Namespace::Operations => "operations",
            Namespace::AttributeDefs => "attribute_defs",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "handles" => Some(Namespace::Handles),
            "profiles" => Some(Namespace::Profiles),
            "operations" => Some(Namespace::Operations),
            "attribute_defs" => Some(Namespace::AttributeDefs),
            _ => None,
        }
    }

    fn file_name(&self) -> String {
        format!("{}.ndrec", self.as_str())
    }
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One storable component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Component {
    Record(InformationRecord),
    Profile(Profile),
    OperationSpec(OperationSpec),
    AttributeDef(AttributeDefinition),
}

impl Component {
    pub fn pid(&self) -> &Pid {
        match self {
            Component::Record(r) => &r.pid,
            Component::Profile(p) => &p.pid,
            Component::OperationSpec(o) => &o.pid,
            Component::AttributeDef(d) => &d.pid,
        }
    }

    pub fn namespace(&self) -> Namespace {
        match self {
            Component::Record(_) => Namespace::Handles,
            Component::Profile(_) => Namespace::Profiles,
            Component::OperationSpec(_) => Namespace::Operations,
            Component::AttributeDef(_) => Namespace::AttributeDefs,
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("component {0} not found")]
    NotFound(Pid),
    #[error("pid {0} already bound in namespace {1}")]
    DuplicatePid(Pid, Namespace),
    #[error("validation failed: {}", format_violations(.0))]
    ValidationFailed(Vec<Violation>),
    #[error("association model is unset (missing {0})")]
    ModelUnset(PathBuf),
    #[error("component {0} does not belong in namespace {1}")]
    NamespaceMismatch(Pid, Namespace),
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Append-only write-log entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WriteLogEntry {
    pub timestamp: String,
    pub namespace: Namespace,
    pub pid: Pid,
    pub action: WriteAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WriteAction {
    Register,
    Update,
}

impl WriteAction {
    fn as_str(&self) -> &'static str {
        match self {
            WriteAction::Register => "register",
            WriteAction::Update => "update",
        }
    }
}

/// Single-writer, multi-reader local registry store. All components are
/// kept in memory and mirrored to disk on every write.
#[derive(Debug)]
pub struct RegistryStore {
    root: PathBuf,
    ecosystem: Ecosystem,
    write_count: usize,
}

impl RegistryStore {
    /// Initializes an empty store for the given model. Fails if the root
    /// already holds one.
    pub fn create(root: &Path, model: Model) -> Result<Self, StoreError> {
        fs::create_dir_all(root)?;
        let model_path = root.join("model");
        if model_path.exists() {
            return Err(StoreError::Io(std::io::Error::new(
                std::io::ErrorKind::AlreadyExists,
                format!("store already initialized at {}", root.display()),
            )));
        }
        fs::write(&model_path, format!("{model}\n"))?;
        for ns in Namespace::ALL {
            fs::write(root.join(ns.file_name()), "")?;
        }
        fs::write(root.join("writes.log"), "")?;
        Ok(RegistryStore {
            root: root.to_path_buf(),
            ecosystem: Ecosystem::new(model),
            write_count: 0,
        })
    }

    /// Opens an existing store, loading every namespace into memory.
    pub fn open(root: &Path) -> Result<Self, StoreError> {
        let model_path = root.join("model");
        let model_text = match fs::read_to_string(&model_path) {
            Ok(s) => s,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(StoreError::ModelUnset(model_path))
            }
            Err(e) => return Err(e.into()),
        };
        let model = Model::parse(model_text.trim()).ok_or_else(|| StoreError::Parse {
            path: model_path,
            line: 1,
            message: format!("unknown model {:?}", model_text.trim()),
        })?;
        let mut ecosystem = Ecosystem::new(model);
        for ns in Namespace::ALL {
            let path = root.join(ns.file_name());
            let text = match fs::read_to_string(&path) {
                Ok(s) => s,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
                Err(e) => return Err(e.into()),
            };
            for (i, line) in text.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let component = parse_line(ns, line).map_err(|message| StoreError::Parse {
                    path: path.clone(),
                    line: i + 1,
                    message,
                })?;
                insert_component(&mut ecosystem, component);
            }
        }
        let write_count = match fs::read_to_string(root.join("writes.log")) {
            Ok(s) => s.lines().filter(|l| !l.is_empty()).count(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => 0,
            Err(e) => return Err(e.into()),
        };
        Ok(RegistryStore {
            root: root.to_path_buf(),
            ecosystem,
            write_count,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn ecosystem(&self) -> &Ecosystem {
        &self.ecosystem
    }

    pub fn model(&self) -> Model {
        self.ecosystem.model
    }

    /// Number of successful writes so far (length of `writes.log`).
    pub fn write_count(&self) -> usize {
        self.write_count
    }

    pub fn write_log(&self) -> Result<Vec<WriteLogEntry>, StoreError> {
        let path = self.root.join("writes.log");
        let text = fs::read_to_string(&path)?;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let entry = (|| {
                let timestamp = parts.next()?.to_string();
                let namespace = Namespace::parse(parts.next()?)?;
                let pid = Pid::parse(parts.next()?).ok()?;
                let action = match parts.next()? {
                    "register" => WriteAction::Register,
                    "update" => WriteAction::Update,
                    _ => return None,
                };
                Some(WriteLogEntry {
                    timestamp,
                    namespace,
                    pid,
                    action,
                })
            })()
            .ok_or_else(|| StoreError::Parse {
                path: path.clone(),
                line: i + 1,
                message: "malformed write-log line".to_string(),
            })?;
            entries.push(entry);
        }
        Ok(entries)
    }

    /// Resolves a registered PID. Handles take precedence, then profiles,
    /// attribute definitions and operation specs.
    pub fn resolve(&self, pid: &Pid) -> Result<Component, StoreError> {
        if let Some(r) = self.ecosystem.records.get(pid) {
            return Ok(Component::Record(r.clone()));
        }
        if let Some(p) = self.ecosystem.profiles.get(pid) {
            return Ok(Component::Profile(p.clone()));
        }
        if let Some(d) = self.ecosystem.attribute_defs.get(pid) {
            return Ok(Component::AttributeDef(d.clone()));
        }
        if let Some(o) = self.ecosystem.operation_specs.get(pid) {
            return Ok(Component::OperationSpec(o.clone()));
        }
        Err(StoreError::NotFound(pid.clone()))
    }

    pub fn resolve_in(&self, namespace: Namespace, pid: &Pid) -> Result<Component, StoreError> {
        let found = match namespace {
            Namespace::Handles => self.ecosystem.records.get(pid).cloned().map(Component::Record),
            Namespace::Profiles => self
                .ecosystem
                .profiles
                .get(pid)
                .cloned()
                .map(Component::Profile),
            Namespace::Operations => self
                .ecosystem
                .operation_specs
                .get(pid)
                .cloned()
                .map(Component::OperationSpec),
            Namespace::AttributeDefs => self
                .ecosystem
                .attribute_defs
                .get(pid)
                .cloned()
                .map(Component::AttributeDef),
        };
        found.ok_or_else(|| StoreError::NotFound(pid.clone()))
    }

    /// Registers a new component. Records are validated against the current
    /// ecosystem first. Appends exactly one write-log line on success.
    pub fn register(&mut self, component: Component) -> Result<Pid, StoreError> {
        let ns = component.namespace();
        let pid = component.pid().clone();
        if self.bound_in(ns, &pid) {
            return Err(StoreError::DuplicatePid(pid, ns));
        }
        if let Component::Record(record) = &component {
            let violations = crate::model::validate_record(record, &self.ecosystem)?;
            if !violations.is_empty() {
                return Err(StoreError::ValidationFailed(violations));
            }
        }
        let line = serialize_component(&component);
        insert_component(&mut self.ecosystem, component);
        self.append_line(ns, &line)?;
        self.append_log(ns, &pid, WriteAction::Register)?;
        Ok(pid)
    }

    /// Replaces a registered component, last-write-wins. Appends exactly one
    /// write-log line.
    pub fn update(&mut self, pid: &Pid, component: Component) -> Result<(), StoreError> {
        let ns = component.namespace();
        if component.pid() != pid {
            return Err(StoreError::NamespaceMismatch(pid.clone(), ns));
        }
        if !self.bound_in(ns, pid) {
            return Err(StoreError::NotFound(pid.clone()));
        }
        insert_component(&mut self.ecosystem, component);
        self.rewrite_namespace(ns)?;
        self.append_log(ns, pid, WriteAction::Update)?;
        Ok(())
    }

    fn bound_in(&self, ns: Namespace, pid: &Pid) -> bool {
        match ns {
            Namespace::Handles => self.ecosystem.records.contains_key(pid),
            Namespace::Profiles => self.ecosystem.profiles.contains_key(pid),
            Namespace::Operations => self.ecosystem.operation_specs.contains_key(pid),
            Namespace::AttributeDefs => self.ecosystem.attribute_defs.contains_key(pid),
        }
    }

    fn append_line(&self, ns: Namespace, line: &str) -> Result<(), StoreError> {
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.root.join(ns.file_name()))?;
        writeln!(file, "{line}")?;
        Ok(())
    }

    fn rewrite_namespace(&self, ns: Namespace) -> Result<(), StoreError> {
        let mut out = String::new();
        match ns {
            Namespace::Handles => {
                for r in self.ecosystem.records.values() {
                    out.push_str(&serialize_component(&Component::Record(r.clone())));
                    out.push('\n');
                }
            }
            Namespace::Profiles => {
                for p in self.ecosystem.profiles.values() {
                    out.push_str(&serialize_component(&Component::Profile(p.clone())));
                    out.push('\n');
                }
            }
            Namespace::Operations => {
                for o in self.ecosystem.operation_specs.values() {
                    out.push_str(&serialize_component(&Component::OperationSpec(o.clone())));
                    out.push('\n');
                }
            }
            Namespace::AttributeDefs => {
                for d in self.ecosystem.attribute_defs.values() {
                    out.push_str(&serialize_component(&Component::AttributeDef(d.clone())));
                    out.push('\n');
                }
            }
        }
        fs::write(self.root.join(ns.file_name()), out)?;
        Ok(())
    }

    fn append_log(&mut self, ns: Namespace, pid: &Pid, action: WriteAction) -> Result<(), StoreError> {
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.root.join("writes.log"))?;
        let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Micros, true);
        writeln!(file, "{timestamp}\t{ns}\t{pid}\t{}", action.as_str())?;
        self.write_count += 1;
        Ok(())
    }
}

/// Writes a whole ecosystem to a fresh store directory.
/// `load_ecosystem(dump_ecosystem(e)) == e`.
pub fn dump_ecosystem(ecosystem: &Ecosystem, root: &Path) -> Result<(), StoreError> {
    let mut store = RegistryStore::create(root, ecosystem.model)?;
    for def in ecosystem.attribute_defs.values() {
        store.register(Component::AttributeDef(def.clone()))?;
    }
    for profile in ecosystem.profiles.values() {
        store.register(Component::Profile(profile.clone()))?;
    }
    for spec in ecosystem.operation_specs.values() {
        store.register(Component::OperationSpec(spec.clone()))?;
    }
    for record in ecosystem.records.values() {
        store.register(Component::Record(record.clone()))?;
    }
    Ok(())
}

pub fn load_ecosystem(root: &Path) -> Result<Ecosystem, StoreError> {
    Ok(RegistryStore::open(root)?.ecosystem)
}

fn insert_component(ecosystem: &mut Ecosystem, component: Component) {
    match component {
        Component::Record(r) => {
            ecosystem.records.insert(r.pid.clone(), r);
        }
        Component::Profile(p) => {
            ecosystem.profiles.insert(p.pid.clone(), p);
        }
        Component::OperationSpec(o) => {
            ecosystem.operation_specs.insert(o.pid.clone(), o);
        }
        Component::AttributeDef(d) => {
            ecosystem.attribute_defs.insert(d.pid.clone(), d);
        }
    }
}

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            ';' => out.push_str("\\;"),
            '=' => out.push_str("\\="),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(value: &str) -> Result<String, String> {
    let mut out = String::with_capacity(value.len());
    let mut chars = value.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some(';') => out.push(';'),
            Some('=') => out.push('='),
            Some('n') => out.push('\n'),
            other => return Err(format!("bad escape sequence \\{:?}", other)),
        }
    }
    Ok(out)
}

fn push_field(out: &mut String, name: &str, value: &str) {
    if !out.is_empty() {
        out.push(';');
    }
    out.push_str(name);
    out.push('=');
    out.push_str(&escape(value));
}

pub fn serialize_component(component: &Component) -> String {
    let mut fields = String::new();
    let (pid, kind) = match component {
        Component::Record(r) => {
            if let Some(p) = &r.payload_ref {
                push_field(&mut fields, "payload", p);
            }
            for attr in &r.attributes {
                push_field(&mut fields, "ak", &attr.key);
                push_field(&mut fields, "av", &attr.value);
            }
            (&r.pid, r.kind.as_str())
        }
        Component::Profile(p) => {
            let mandatory: Vec<&str> = p.mandatory_keys.iter().map(String::as_str).collect();
            let optional: Vec<&str> = p.optional_keys.iter().map(String::as_str).collect();
            let ops: Vec<&str> = p.operation_list.iter().map(Pid::as_str).collect();
            push_field(&mut fields, "mandatory", &mandatory.join("|"));
            push_field(&mut fields, "optional", &optional.join("|"));
            push_field(&mut fields, "ops", &ops.join("|"));
            (&p.pid, "profile")
        }
        Component::OperationSpec(o) => {
            push_field(&mut fields, "executor", &o.executor_ref);
            for input in &o.required_inputs {
                push_field(&mut fields, "rk", &input.key);
                if let Some(v) = &input.value_constraint {
                    push_field(&mut fields, "rv", v);
                }
            }
            (&o.pid, "operation")
        }
        Component::AttributeDef(d) => {
            push_field(&mut fields, "key", &d.key);
            let restriction = match &d.restriction {
                ValueRestriction::Any => "any".to_string(),
                ValueRestriction::Enumerated(set) => {
                    let items: Vec<&str> = set.iter().map(String::as_str).collect();
                    format!("enum:{}", items.join("|"))
                }
                ValueRestriction::Reference(kind) => format!("ref:{}", kind.as_str()),
            };
            push_field(&mut fields, "restriction", &restriction);
            (&d.pid, "attribute-def")
        }
    };
    format!("{pid}\t{kind}\t{fields}")
}

fn split_fields(s: &str) -> Result<Vec<(String, String)>, String> {
    let mut fields = Vec::new();
    if s.is_empty() {
        return Ok(fields);
    }
    // Split on unescaped ';', then on the first unescaped '='.
    let mut current = String::new();
    let mut parts = Vec::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                current.push(c);
                if let Some(n) = chars.next() {
                    current.push(n);
                }
            }
            ';' => parts.push(std::mem::take(&mut current)),
            c => current.push(c),
        }
    }
    parts.push(current);
    for part in parts {
        let eq = part
            .char_indices()
            .scan(false, |escaped, (i, c)| {
                let hit = c == '=' && !*escaped;
                *escaped = c == '\\' && !*escaped;
                Some((i, hit))
            })
            .find(|(_, hit)| *hit)
            .map(|(i, _)| i)
            .ok_or_else(|| format!("field without '=': {part:?}"))?;
        let name = part[..eq].to_string();
        let value = unescape(&part[eq + 1..])?;
        fields.push((name, value));
    }
    Ok(fields)
}

fn split_list(s: &str) -> Vec<String> {
    if s.is_empty() {
        Vec::new()
    } else {
        s.split('|').map(str::to_string).collect()
    }
}

pub fn parse_line(ns: Namespace, line: &str) -> Result<Component, String> {
    let mut cols = line.splitn(3, '\t');
    let pid = Pid::parse(cols.next().ok_or("missing pid column")?)
        .map_err(|e| e.to_string())?;
    let kind = cols.next().ok_or("missing kind column")?;
    let fields = split_fields(cols.next().unwrap_or(""))?;

    match ns {
        Namespace::Handles => {
            let kind = RecordKind::parse(kind).ok_or_else(|| format!("bad record kind {kind:?}"))?;
            let mut record = InformationRecord::new(pid, kind);
            let mut pending_key: Option<String> = None;
            for (name, value) in fields {
                match name.as_str() {
                    "payload" => record.payload_ref = Some(value),
                    "ak" => {
                        if let Some(k) = pending_key.take() {
                            return Err(format!("attribute key {k:?} without value"));
                        }
                        pending_key = Some(value);
                    }
                    "av" => {
                        let key = pending_key
                            .take()
                            .ok_or("attribute value without preceding key")?;
                        record.push_attribute(&key, &value);
                    }
                    other => return Err(format!("unknown record field {other:?}")),
                }
            }
            if let Some(k) = pending_key {
                return Err(format!("attribute key {k:?} without value"));
            }
            Ok(Component::Record(record))
        }
        Namespace::Profiles => {
            let mut profile = Profile::new(pid);
            for (name, value) in fields {
                match name.as_str() {
                    "mandatory" => profile.mandatory_keys = split_list(&value).into_iter().collect(),
                    "optional" => profile.optional_keys = split_list(&value).into_iter().collect(),
                    "ops" => {
                        profile.operation_list = split_list(&value)
                            .iter()
                            .map(|s| Pid::parse(s).map_err(|e| e.to_string()))
                            .collect::<Result<_, _>>()?
                    }
                    other => return Err(format!("unknown profile field {other:?}")),
                }
            }
            Ok(Component::Profile(profile))
        }
        Namespace::Operations => {
            let mut spec = OperationSpec::new(pid);
            for (name, value) in fields {
                match name.as_str() {
                    "executor" => spec.executor_ref = value,
                    "rk" => spec.required_inputs.push(RequiredInput {
                        key: value,
                        value_constraint: None,
                    }),
                    "rv" => {
                        let last = spec
                            .required_inputs
                            .last_mut()
                            .ok_or("value constraint without preceding key")?;
                        last.value_constraint = Some(value);
                    }
                    other => return Err(format!("unknown operation field {other:?}")),
                }
            }
            Ok(Component::OperationSpec(spec))
        }
        Namespace::AttributeDefs => {
            let mut key = None;
            let mut restriction = ValueRestriction::Any;
            for (name, value) in fields {
                match name.as_str() {
                    "key" => key = Some(value),
                    "restriction" => {
                        restriction = if value == "any" {
                            ValueRestriction::Any
                        } else if let Some(items) = value.strip_prefix("enum:") {
                            ValueRestriction::Enumerated(split_list(items).into_iter().collect())
                        } else if let Some(kind) = value.strip_prefix("ref:") {
                            ValueRestriction::Reference(
                                ComponentKind::parse(kind)
                                    .ok_or_else(|| format!("bad component kind {kind:?}"))?,
                            )
                        } else {
                            return Err(format!("bad restriction {value:?}"));
                        }
                    }
                    other => return Err(format!("unknown definition field {other:?}")),
                }
            }
            Ok(Component::AttributeDef(AttributeDefinition {
                pid,
                key: key.ok_or("attribute definition without key")?,
                restriction,
            }))
        }
    }
}
