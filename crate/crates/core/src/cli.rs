//! Command-line front end.
//!
//! Exit codes: 0 success, 1 success with warnings, 2 errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::behavioral;
use crate::bench;
use crate::codegen::{self, CodegenError, GeneratedTree, PlanOptions, WrapperPlan};
use crate::config::{ConfigError, ToolConfig};
use crate::cosim::{self, instantiate, CoSimSchedule, CosimError, LibraryBackend, PortRef, Trace};
use crate::diag::Diagnostic;
use crate::fmi_map::Value;
use crate::package::{self, FmuArchive, PackageError, PlatformTuple};
use crate::tlm_scan::{analyze, Analysis, ScanError, SourceUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "tlm2fmu", version, about = "SystemC TLM targets as FMI 3.0 co-simulation FMUs")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find the payload record and infer field directions.
    Scan {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Source units; used instead of the config's `sources`.
        sources: Vec<PathBuf>,
        #[arg(long)]
        record: Option<String>,
    },
    /// Write the wrapper sources and modelDescription.xml.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the .fmu archive and validate it.
    Package {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check an .fmu archive.
    Validate { path: PathBuf },
    /// Run the co-simulation schedule and write a CSV trace.
    Cosim {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Platform whose binaries are loaded; defaults to the host.
        #[arg(long)]
        platform: Option<PlatformTuple>,
    },
    /// Time 250, 1000 and 10000 steps of one model.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<u64>>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error(transparent)]
    Package(#[from] PackageError),
    #[error(transparent)]
    Cosim(#[from] CosimError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot write trace: {0}")]
    Csv(#[from] csv::Error),
}

/// What a command produced: text for humans, a JSON value for tools.
struct Outcome {
    text: String,
    json: serde_json::Value,
    warnings: bool,
}

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("report types serialize")
}

fn load(config: &Path) -> Result<ToolConfig, CliError> {
    Ok(ToolConfig::load(config)?)
}

fn scan_units(paths: &[PathBuf]) -> Result<Vec<SourceUnit>, CliError> {
    if paths.is_empty() {
        return Err(CliError::Usage("no source files given".into()));
    }
    Ok(paths.iter().map(SourceUnit::load).collect::<Result<_, _>>()?)
}

fn render_diagnostics(out: &mut String, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        out.push_str(&d.to_string());
        out.push('\n');
    }
}

fn scan_report(analysis: &Analysis) -> Outcome {
    let mut text = format!("record {}\n", analysis.spec.record_name);
    for f in &analysis.spec.fields {
        let dir = f.direction.map_or_else(|| "unknown".to_string(), |d| d.to_string());
        let fmi = crate::fmi_map::map_type(&f.source_type).map_or_else(|e| e.to_string(), |t| t.to_string());
        text.push_str(&format!("  {:<16} {:<7} {:<22} {}\n", f.name, dir, f.source_type.to_string(), fmi));
    }
    render_diagnostics(&mut text, &analysis.diagnostics);
    let json = serde_json::json!({
        "record": analysis.spec.record_name,
        "module": analysis.surface.module_name,
        "fields": analysis.spec.fields.iter().map(|f| serde_json::json!({
            "name": f.name,
            "direction": f.direction,
            "type": f.source_type.to_string(),
            "fmi_type": crate::fmi_map::map_type(&f.source_type).ok().map(|t| t.to_string()),
        })).collect::<Vec<_>>(),
        "diagnostics": to_json(&analysis.diagnostics),
    });
    Outcome { text, json, warnings: !analysis.diagnostics.is_empty() }
}

fn plan(config: &ToolConfig, output_dir: PathBuf) -> Result<(WrapperPlan, Analysis), CliError> {
    let units = scan_units(&config.sources)?;
    let analysis = analyze(&units, config.record_hint.as_deref())?;
    let model_name = match &config.model_name {
        Some(name) => name.clone(),
        None => analysis.surface.module_name.clone().ok_or(CodegenError::NoTargetModule)?.to_lowercase(),
    };
    let options = PlanOptions {
        model_name,
        step_size: config.communication_step_size,
        start_overrides: config.start_overrides(),
        output_dir,
        build_flavor: config.build_flavor,
        sources: units.iter().map(|u| u.path().to_path_buf()).collect(),
    };
    let plan = WrapperPlan::from_analysis(&analysis, &options)?;
    Ok((plan, analysis))
}

fn generated(config: &ToolConfig, output: Option<PathBuf>) -> Result<(GeneratedTree, Analysis), CliError> {
    let dir = output
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| CliError::Usage("no output directory: pass --output or set output_dir".into()))?;
    let (plan, analysis) = plan(config, dir)?;
    Ok((codegen::generate(&plan)?, analysis))
}

fn cmd_generate(config: &ToolConfig, output: Option<PathBuf>) -> Result<Outcome, CliError> {
    let (tree, analysis) = generated(config, output)?;
    tree.write()?;
    let files: Vec<String> = tree.files.keys().map(|p| p.display().to_string()).collect();
    let mut text = files.iter().map(|f| format!("wrote {f}\n")).collect::<String>();
    render_diagnostics(&mut text, &analysis.diagnostics);
    let json = serde_json::json!({ "files": files, "entry_points": tree.entry_points, "diagnostics": to_json(&analysis.diagnostics) });
    Ok(Outcome { text, json, warnings: !analysis.diagnostics.is_empty() })
}

fn cmd_package(config: &ToolConfig, output: Option<PathBuf>) -> Result<Outcome, CliError> {
    let plan_dir = config.output_dir.clone().or_else(|| output.clone()).unwrap_or_else(|| PathBuf::from("."));
    let (tree, analysis) = generated(config, Some(plan_dir))?;
    let mut binaries = BTreeMap::new();
    for (platform, path) in &config.binaries {
        let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        binaries.insert(*platform, bytes);
    }
    let archive = FmuArchive::from_tree(&tree, binaries)?;
    let file_name = format!("{}.fmu", archive.model_identifier()?);
    let target = match (output, &config.fmu) {
        (Some(dir), _) => dir.join(file_name),
        (None, Some(fmu)) => fmu.clone(),
        (None, None) => config
            .output_dir
            .as_ref()
            .map(|d| d.join(&file_name))
            .ok_or_else(|| CliError::Usage("no archive path: pass --output or set fmu".into()))?,
    };
    archive.write(&target)?;
    let report = package::validate(&target)?;
    let mut text = format!("wrote {}\n", target.display());
    render_diagnostics(&mut text, &analysis.diagnostics);
    text.push_str(&report.to_string());
    text.push('\n');
    let json = serde_json::json!({ "archive": target, "entries": archive.entries()?, "validation": to_json(&report) });
    Ok(Outcome { text, json, warnings: report.exit_code() == 1 || !analysis.diagnostics.is_empty() })
}

fn cmd_validate(path: &Path) -> Result<(Outcome, i32), CliError> {
    let report = package::validate(path)?;
    let code = report.exit_code();
    Ok((Outcome { text: format!("{report}\n"), json: to_json(&report), warnings: code == 1 }, code))
}

fn parameter_value(backend: &dyn cosim::Backend, id: &str, name: &str, literal: &str) -> Result<Value, CliError> {
    let var = backend
        .model_description()
        .variable(name)
        .ok_or_else(|| CosimError::UnknownVariable { instance: id.into(), variable: name.into() })?;
    Value::parse_literal(var.fmi_type, literal)
        .ok_or_else(|| CliError::Usage(format!("'{literal}' is not a valid {} for {id}.{name}", var.fmi_type)))
}

/// Builds the schedule described by the config's `cosim` section.
pub fn schedule_from_config(config: &ToolConfig, platform: Option<PlatformTuple>) -> Result<CoSimSchedule, CliError> {
    let cosim = config.cosim.as_ref().ok_or(ConfigError::MissingSection { path: PathBuf::new(), section: "cosim" })?;
    let mut schedule = CoSimSchedule::new(cosim.stop_time);
    for inst in &cosim.instances {
        let backend: Box<dyn cosim::Backend> = match (&inst.model, &inst.fmu) {
            (Some(model), _) => behavioral::backend(model).ok_or_else(|| {
                CliError::Usage(format!("unknown model '{model}'; known: {}", behavioral::MODELS.join(", ")))
            })?,
            (None, Some(fmu)) => {
                let platform = platform
                    .or_else(PlatformTuple::host)
                    .ok_or_else(|| CliError::Usage("host platform unknown; pass --platform".into()))?;
                Box::new(LibraryBackend::load(fmu, platform)?)
            }
            (None, None) => unreachable!("checked when the config was loaded"),
        };
        for (name, literal) in &inst.parameters {
            let value = parameter_value(backend.as_ref(), &inst.id, name, &literal.0)?;
            schedule = schedule.parameter(PortRef::new(&inst.id, name), value);
        }
        schedule = schedule.instance(&inst.id, backend, inst.step);
    }
    schedule.connections = cosim.connections.clone();
    schedule.record = cosim.record.clone();
    Ok(schedule)
}

fn cmd_cosim(config: &ToolConfig, output: Option<PathBuf>, platform: Option<PlatformTuple>) -> Result<Outcome, CliError> {
    let schedule = schedule_from_config(config, platform)?;
    let cosim = config.cosim.as_ref().expect("checked by schedule_from_config");
    let trace_path = output
        .map(|d| d.join("trace.csv"))
        .or_else(|| cosim.trace.clone())
        .or_else(|| config.output_dir.as_ref().map(|d| d.join("trace.csv")))
        .ok_or_else(|| CliError::Usage("no trace path: pass --output or set cosim.trace".into()))?;
    if let Some(dir) = trace_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    let file = fs::File::create(&trace_path).map_err(|source| CliError::Io { path: trace_path.clone(), source })?;
    let mut writer = csv::Writer::from_writer(io::BufWriter::new(file));

    let mut network = instantiate(schedule)?;
    Trace::write_header(network.columns(), &mut writer)?;
    let mut write_error = None;
    let stats = network.run_with(|row| {
        if write_error.is_none() {
            write_error = Trace::write_row(row, &mut writer).err();
        }
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    writer.flush().map_err(|source| CliError::Io { path: trace_path.clone(), source })?;

    let mut text = format!(
        "wrote {} ({} rows, micro-step {} s)\n",
        trace_path.display(),
        stats.rows,
        stats.micro_step
    );
    for (id, steps) in &stats.steps {
        text.push_str(&format!("  {id}: {steps} steps, {} doStep calls\n", stats.do_step_calls[id]));
    }
    for (id, at) in &stats.truncated {
        text.push_str(&format!("warning: final step of '{id}' at t={at} was shortened to end at the stop time\n"));
    }
    let json = serde_json::json!({ "trace": trace_path, "stats": to_json(&stats) });
    Ok(Outcome { text, json, warnings: !stats.truncated.is_empty() })
}

fn cmd_bench(config: Option<&ToolConfig>, model: Option<String>, steps: Option<Vec<u64>>) -> Result<Outcome, CliError> {
    let mut bench_config = config.and_then(|c| c.bench.clone()).unwrap_or_default();
    if let Some(model) = model {
        bench_config.model = model;
    }
    if let Some(steps) = steps {
        bench_config.steps = steps;
    }
    if behavioral::backend(&bench_config.model).is_none() {
        return Err(CliError::Usage(format!(
            "unknown model '{}'; known: {}",
            bench_config.model,
            behavioral::MODELS.join(", ")
        )));
    }
    let report = bench::run(&bench_config)?;
    Ok(Outcome { text: report.to_string(), json: to_json(&report), warnings: false })
}

fn dispatch(command: Command) -> Result<(Outcome, Option<i32>), CliError> {
    Ok(match command {
        Command::Scan { config, sources, record } => {
            let (paths, hint) = match config {
                Some(path) => {
                    let c = load(&path)?;
                    let paths = if sources.is_empty() { c.sources.clone() } else { sources };
                    (paths, record.or(c.record_hint))
                }
                None => (sources, record),
            };
            let units = scan_units(&paths)?;
            (scan_report(&analyze(&units, hint.as_deref())?), None)
        }
        Command::Generate { config, output } => (cmd_generate(&load(&config)?, output)?, None),
        Command::Package { config, output } => (cmd_package(&load(&config)?, output)?, None),
        Command::Validate { path } => {
            let (outcome, code) = cmd_validate(&path)?;
            (outcome, Some(code))
        }
        Command::Cosim { config, output, platform } => (cmd_cosim(&load(&config)?, output, platform)?, None),
        Command::Bench { config, model, steps } => {
            let config = config.as_deref().map(load).transpose()?;
            (cmd_bench(config.as_ref(), model, steps)?, None)
        }
    })
}

/// Runs a parsed command line, writing results to `out` and errors to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let format = cli.format;
    match dispatch(cli.command) {
        Ok((outcome, code)) => {
            let written = match format {
                Format::Text => out.write_all(outcome.text.as_bytes()),
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&outcome.json).expect("json")),
            };
            if written.is_err() {
                return 2;
            }
            code.unwrap_or(if outcome.warnings { 1 } else { 0 })
        }
        Err(e) => {
            let _ = match format {
                Format::Text => writeln!(err, "error: {e}"),
                Format::Json => writeln!(err, "{}", serde_json::json!({ "error": e.to_string() })),
            };
            2
        }
    }
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    run(cli, &mut io::stdout().lock(), &mut io::stderr().lock())
}
