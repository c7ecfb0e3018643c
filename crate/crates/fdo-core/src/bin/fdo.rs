//! `fdo`: command-line surface over the registry store, association
//! engines, graph layer, metrics and model conversions.
//!
//! Exit codes: 0 ok, 1 validation failure (or other error), 2 not found,
//! 3 metrics violation. Results go to stdout, diagnostics to stderr.

use std::collections::BTreeSet;
use std::io::{BufRead, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fdo_core::engine::AssociationEngine;
use fdo_core::graph::{
    associations_from_graph, build_graph, divergence_from_engine, export_graph, ExportFormat,
};
use fdo_core::interop::{check_consistency, convert, ModelMapping};
use fdo_core::metrics::{
    generate_ecosystem, metrics_report, scaling_report, GeneratorParams, MetricsReport,
};
use fdo_core::model::Model;
use fdo_core::pid::Pid;
use fdo_core::store::{
    dump_ecosystem, parse_line, serialize_component, Namespace, RegistryStore, StoreError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Record,
    Profile,
    Attribute,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Record => Model::Record,
            ModelArg::Profile => Model::Profile,
            ModelArg::Attribute => Model::Attribute,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Dot,
    JsonLines,
}

#[derive(Debug, Parser)]
#[command(name = "fdo", version, about = "FDO type-system registry and analyzer")]
struct Cli {
    /// Registry store root directory.
    #[arg(long, global = true, default_value = "./store")]
    store: PathBuf,
    /// Association model (required by init/generate, ignored elsewhere).
    #[arg(long, global = true, value_enum)]
    model: Option<ModelArg>,
    /// Seed for anything randomized.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Initialize an empty store for --model, or seed the shipped
    /// demonstration fixture with --fixture.
    Init {
        /// Seed the store with the demonstration ecosystem for the model.
        #[arg(long)]
        fixture: bool,
    },
    /// Register components read as store lines (pid<TAB>kind<TAB>fields)
    /// from a file or stdin.
    Register {
        /// Target namespace: handles, profiles, operations, attribute_defs.
        namespace: String,
        /// Input file; stdin when omitted.
        file: Option<PathBuf>,
    },
    /// Resolve one PID and print its stored representation.
    Resolve { pid: String },
    /// Association queries.
    Query {
        #[command(subcommand)]
        kind: QueryKind,
    },
    /// Convert the store's ecosystem to another model into a new store.
    Convert {
        /// Target model.
        #[arg(long, value_enum)]
        target: ModelArg,
        /// Directory for the converted store.
        #[arg(long)]
        out: PathBuf,
        /// Also run the cross-model consistency check and fail on mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Export the association graph (--format dot or text for edge list).
    Graph {
        /// Print the relation read back off the graph instead of the graph.
        #[arg(long)]
        relation: bool,
        /// Print pairs where graph and engine disagree.
        #[arg(long)]
        divergence: bool,
    },
    /// Verify the cost measures; exit 3 on any violation.
    Metrics {
        /// Number of sampled query pairs.
        #[arg(long, default_value_t = 50)]
        sample: usize,
    },
    /// Generate a synthetic ecosystem into the store.
    Generate(GenerateArgs),
    /// Measure query scaling across an |F| ladder.
    Scaling {
        /// Comma-separated |F| rungs.
        #[arg(long, default_value = "10,100,1000")]
        ladder: String,
    },
}

#[derive(Debug, Subcommand)]
enum QueryKind {
    /// Operations associated with an FDO.
    OpsFor { fdo: String },
    /// FDOs associated with an operation.
    FdosFor { op: String },
    /// Whether the pair is associated; prints true|false.
    Check { fdo: String, op: String },
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 20)]
    fdos: usize,
    #[arg(long, default_value_t = 8)]
    ops: usize,
    #[arg(long, default_value_t = 4)]
    profiles: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0.0)]
    value_constraints: f64,
}

/// Application error with the exit code it maps to.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn metrics(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => CliError::not_found(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<fdo_core::engine::EngineError> for CliError {
    fn from(e: fdo_core::engine::EngineError) -> Self {
        match e {
            fdo_core::engine::EngineError::UnknownPid(_) => CliError::not_found(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

fn parse_pid(s: &str) -> Result<Pid, CliError> {
    Pid::parse(s).map_err(|e| CliError::validation(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Init { fixture } => {
            let model: Model = cli
                .model
                .ok_or_else(|| CliError::validation("init requires --model"))?
                .into();
            if fixture {
                dump_ecosystem(&fdo_core::fixtures::fixture(model), &cli.store)?;
            } else {
                RegistryStore::create(&cli.store, model)?;
            }
            eprintln!("initialized {} store at {}", model, cli.store.display());
            Ok(())
        }
        Command::Register { namespace, file } => {
            let ns = Namespace::parse(&namespace).ok_or_else(|| {
                CliError::validation(format!("unknown namespace {namespace:?}"))
            })?;
            let text = match file {
                Some(path) => std::fs::read_to_string(path)
                    .map_err(|e| CliError::validation(e.to_string()))?,
                None => {
                    let mut buf = String::new();
                    for line in std::io::stdin().lock().lines() {
                        buf.push_str(&line.map_err(|e| CliError::validation(e.to_string()))?);
                        buf.push('\n');
                    }
                    buf
                }
            };
            let mut store = RegistryStore::open(&cli.store)?;
            let mut count = 0usize;
            for line in text.lines().filter(|l| !l.is_empty()) {
                let component =
                    parse_line(ns, line).map_err(CliError::validation)?;
                let pid = store.register(component)?;
                println!("{pid}");
                count += 1;
            }
            eprintln!("registered {count} component(s) in {ns}");
            Ok(())
        }
        Command::Resolve { pid } => {
            let store = RegistryStore::open(&cli.store)?;
            let component = store.resolve(&parse_pid(&pid)?)?;
            println!("{}", serialize_component(&component));
            Ok(())
        }
        Command::Query { kind } => {
            let store = RegistryStore::open(&cli.store)?;
            let engine = AssociationEngine::new(store.ecosystem().clone())?;
            match kind {
                QueryKind::OpsFor { fdo } => {
                    print_pid_set(&engine.ops_for_fdo(&parse_pid(&fdo)?)?, cli.format)
                }
                QueryKind::FdosFor { op } => {
                    print_pid_set(&engine.fdos_for_op(&parse_pid(&op)?)?, cli.format)
                }
                QueryKind::Check { fdo, op } => {
                    let answer = engine.is_associated(&parse_pid(&fdo)?, &parse_pid(&op)?)?;
                    match cli.format {
                        Format::JsonLines => println!("{{\"associated\":{answer}}}"),
                        _ => println!("{answer}"),
                    }
                }
            }
            Ok(())
        }
        Command::Convert { target, out, check } => {
            let store = RegistryStore::open(&cli.store)?;
            let target: Model = target.into();
            let (converted, mapping) = convert(store.ecosystem(), target)
                .map_err(|e| CliError::validation(e.to_string()))?;
            dump_ecosystem(&converted, &out)?;
            print!("{}", ModelMapping::table(&mapping.fdo_map));
            if check {
                let report = check_consistency(
                    &[store.ecosystem(), &converted],
                    &[&mapping],
                )
                .map_err(|e| CliError::validation(e.to_string()))?;
                if !report.consistent() {
                    return Err(CliError::validation(format!(
                        "{} FDO(s) resolve to different operation sets after conversion",
                        report.disagreements.len()
                    )));
                }
                eprintln!("consistency check passed");
            }
            eprintln!(
                "converted {} -> {} store at {}",
                store.model(),
                target,
                out.display()
            );
            Ok(())
        }
        Command::Graph {
            relation,
            divergence,
        } => {
            let store = RegistryStore::open(&cli.store)?;
            let graph = build_graph(store.ecosystem())
                .map_err(|e| CliError::validation(e.to_string()))?;
            if divergence {
                let engine = AssociationEngine::new(store.ecosystem().clone())?;
                for (f, o) in divergence_from_engine(&graph, &engine) {
                    println!("{f}\t{o}");
                }
            } else if relation {
                for (f, o) in associations_from_graph(&graph) {
                    println!("{f}\t{o}");
                }
            } else {
                let format = match cli.format {
                    Format::Dot => ExportFormat::Dot,
                    _ => ExportFormat::EdgeList,
                };
                print!("{}", export_graph(&graph, format));
            }
            Ok(())
        }
        Command::Metrics { sample } => {
            let store = RegistryStore::open(&cli.store)?;
            let report = metrics_report(store.ecosystem(), cli.seed, sample)
                .map_err(|e| CliError::validation(e.to_string()))?;
            print_report(&report, cli.format);
            if report.all_pass() {
                Ok(())
            } else {
                Err(CliError::metrics("one or more measures violated"))
            }
        }
        Command::Generate(args) => {
            let model: Model = cli
                .model
                .ok_or_else(|| CliError::validation("generate requires --model"))?
                .into();
            let mut params = GeneratorParams::new(model, cli.seed);
            params.n_fdos = args.fdos;
            params.n_ops = args.ops;
            params.n_profiles = args.profiles;
            params.association_density = args.density;
            params.value_constraint_fraction = args.value_constraints;
            let eco = generate_ecosystem(&params);
            dump_ecosystem(&eco, &cli.store)?;
            eprintln!(
                "generated {} ecosystem (|F|={} |O|={}) at {}",
                model,
                eco.fdo_count(),
                eco.operation_count(),
                cli.store.display()
            );
            Ok(())
        }
        Command::Scaling { ladder } => {
            let model: Model = cli
                .model
                .ok_or_else(|| CliError::validation("scaling requires --model"))?
                .into();
            let rungs: Vec<usize> = ladder
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::validation(format!("bad ladder: {e}")))?;
            let rows = scaling_report(model, &rungs, cli.seed)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let mut out = std::io::stdout().lock();
            match cli.format {
                Format::Csv => {
                    let _ = writeln!(out, "n_fdos,sum_attrs_per_op,measured,ceiling");
                    for r in &rows {
                        let _ = writeln!(
                            out,
                            "{},{},{},{}",
                            r.n_fdos, r.sum_attrs_per_op, r.measured, r.ceiling
                        );
                    }
                }
                Format::JsonLines => {
                    for r in &rows {
                        let _ = writeln!(
                            out,
                            "{{\"n_fdos\":{},\"sum_attrs_per_op\":{},\"measured\":{},\"ceiling\":{}}}",
                            r.n_fdos, r.sum_attrs_per_op, r.measured, r.ceiling
                        );
                    }
                }
                _ => {
                    let _ = writeln!(
                        out,
                        "{:>8} {:>16} {:>10} {:>10}",
                        "n_fdos", "sum_attrs/op", "measured", "ceiling"
                    );
                    for r in &rows {
                        let _ = writeln!(
                            out,
                            "{:>8} {:>16} {:>10} {:>10}",
                            r.n_fdos, r.sum_attrs_per_op, r.measured, r.ceiling
                        );
                    }
                }
            }
            Ok(())
        }
    }
}

fn print_pid_set(pids: &BTreeSet<Pid>, format: Format) {
    match format {
        Format::JsonLines => {
            for pid in pids {
                println!("{{\"pid\":\"{pid}\"}}");
            }
        }
        _ => {
            for pid in pids {
                println!("{pid}");
            }
        }
    }
}

fn print_report(report: &MetricsReport, format: Format) {
    match format {
        Format::Csv => print!("{}", report.to_csv()),
        Format::JsonLines => {
            for row in &report.rows {
                println!(
                    "{{\"model\":\"{}\",\"measure\":\"{}\",\"measured\":{},\"ceiling\":{},\"pass\":{}}}",
                    row.model,
                    row.measure.as_str(),
                    row.measured,
                    row.ceiling,
                    row.pass
                );
            }
        }
        _ => print!("{}", report.to_text()),
    }
}
