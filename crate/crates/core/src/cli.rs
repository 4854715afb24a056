//! Command-line interface and config-driven experiments.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::entropy::{self, BiasMode, EntropyReport, EstimatorParams, OrderSampling, SuccessorReport};
use crate::error::Error;
use crate::folner::{self, UniformAudit, UniformAuditParams};
use crate::group::{GroupElement, GroupSpec, MAX_DIM};
use crate::order::{IncrementWindow, OrderRanking, OrderWindow};
use crate::process::ProcessSpec;
use crate::tiling::{BuiltinTiling, TilingDocument, TilingSystemSpec, ValidationReport};

pub const SCHEMA: &str = include_str!("../schema/experiment.schema.json");
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;
pub const EXIT_UNDERSAMPLED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "multiorder",
    version,
    about = "Tiling multiorders on Z and Z^2, Følner audits and entropy estimates"
)]
pub struct Cli {
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, env = "MULTIORDER_THREADS")]
    pub threads: Option<usize>,
    /// Raise log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a JSON config.
    Run(ConfigArgs),
    /// Dump, print and validate tiling systems.
    #[command(subcommand)]
    Tiling(TilingCommand),
    /// Audit invariance of order intervals.
    #[command(subcommand)]
    Folner(FolnerCommand),
    /// Convert between order representations.
    #[command(subcommand)]
    Order(OrderCommand),
    /// Entropy estimation along multiorders.
    #[command(subcommand)]
    Entropy(EntropyCommand),
    /// Print the experiment config JSON schema.
    Schema,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TilingCommand {
    /// Ordered cells of a level-k shape as CSV (rank then coordinates).
    Dump {
        #[arg(long)]
        name: BuiltinTiling,
        #[arg(long)]
        level: usize,
        /// Shape label; the first shape of the level by default.
        #[arg(long)]
        shape: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Built-in system truncated at a level, as a JSON document.
    Spec {
        #[arg(long)]
        name: BuiltinTiling,
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check partition, congruence and determinism up to a level.
    Validate {
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        name: Option<BuiltinTiling>,
        /// JSON tiling document.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum FolnerCommand {
    /// Worst and mean invariance ratios of order intervals per length (CSV).
    Audit {
        #[arg(long)]
        name: BuiltinTiling,
        #[arg(long, value_enum, default_value = "unit-cross")]
        k: NamedK,
        #[arg(long)]
        epsilon: f64,
        /// Comma-separated interval lengths in cells.
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<u64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 16)]
        anchors: usize,
        /// Address depth; the top tile must hold the longest candidate.
        #[arg(long, default_value_t = 8)]
        level: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum OrderCommand {
    /// Convert among window, increment and ranking JSON forms.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        to: OrderFormat,
        /// Anchor for ranking input, comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        anchor: Option<Vec<i64>>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum EntropyCommand {
    /// Run an entropy experiment config.
    Run(ConfigArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum NamedK {
    /// `e` and the unit vectors with their inverses.
    UnitCross,
    /// The box of radius 1.
    Box1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSet {
    Named(NamedK),
    Explicit(Vec<GroupElement>),
}

impl KSet {
    fn resolve(&self, group: GroupSpec) -> Result<Vec<GroupElement>, Error> {
        match self {
            KSet::Named(NamedK::UnitCross) => Ok(group.unit_cross()),
            KSet::Named(NamedK::Box1) => Ok(group.box_set(1)),
            KSet::Explicit(v) => {
                for g in v {
                    group.check(g)?;
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OrderFormat {
    Window,
    Increments,
    Ranking,
}

/// Any of the three serialized order forms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderForm {
    Window(OrderWindow),
    Increments(IncrementWindow),
    Ranking(OrderRanking),
}

impl OrderForm {
    pub fn convert(&self, to: OrderFormat, anchor: Option<&GroupElement>) -> Result<OrderForm, Error> {
        let window = match self {
            OrderForm::Window(w) => w.clone(),
            OrderForm::Increments(iw) => OrderWindow::from_increments(iw)?,
            OrderForm::Ranking(r) => {
                let d = r.order.first().ok_or_else(|| Error::input("empty ranking"))?.dim();
                let group = GroupSpec::int_grid(d)?;
                let e = group.identity();
                r.to_window(group, anchor.unwrap_or(&e))?
            }
        };
        Ok(match to {
            OrderFormat::Window => OrderForm::Window(window),
            OrderFormat::Increments => OrderForm::Increments(window.to_increments()),
            OrderFormat::Ranking => OrderForm::Ranking(window.to_ranking()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TilingRef {
    Builtin(BuiltinTiling),
    File { file: PathBuf },
}

impl TilingRef {
    fn load(&self, base: &Path) -> Result<TilingSystemSpec, CliError> {
        match self {
            TilingRef::Builtin(kind) => Ok(TilingSystemSpec::builtin(*kind)),
            TilingRef::File { file } => {
                let text = fs::read_to_string(base.join(file)).map_err(Error::from)?;
                let doc: TilingDocument =
                    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
                TilingSystemSpec::from_document(doc).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

fn default_name() -> String {
    "report".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Relative paths are resolved against the config file's directory.
    pub dir: PathBuf,
    /// File stem of the artifacts.
    #[serde(default = "default_name")]
    pub name: String,
}

fn default_samples() -> usize {
    100
}

fn default_anchors() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    TilingDump {
        tiling: TilingRef,
        level: usize,
        #[serde(default)]
        shape: Option<String>,
    },
    TilingValidate {
        tiling: TilingRef,
        level: usize,
    },
    FolnerAudit {
        tiling: TilingRef,
        k: KSet,
        epsilon: f64,
        candidates: Vec<u64>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_anchors")]
        anchors: usize,
        level: usize,
    },
    OrderConvert {
        input: PathBuf,
        to: OrderFormat,
        #[serde(default)]
        anchor: Option<GroupElement>,
    },
    Entropy {
        tiling: TilingRef,
        process: ProcessSpec,
        samples: u64,
        #[serde(default)]
        bias: BiasMode,
        orders: usize,
        level: usize,
        tasks: Vec<EntropyTask>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::TilingDump { .. } => "tiling_dump",
            Experiment::TilingValidate { .. } => "tiling_validate",
            Experiment::FolnerAudit { .. } => "folner_audit",
            Experiment::OrderConvert { .. } => "order_convert",
            Experiment::Entropy { .. } => "entropy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntropyTask {
    McIntegral { j: u64 },
    RemotePastMi { n: u64, j: u64 },
    SuccessorConsistency { j: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    /// Undersampled estimates make the run fail with exit code 4.
    #[serde(default)]
    pub acceptance: bool,
    pub output: OutputSpec,
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.schema_version != SCHEMA_VERSION {
            return bad(&format!("schema_version must be {SCHEMA_VERSION}"));
        }
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return bad("output.name must be a plain file stem");
        }
        match &self.experiment {
            Experiment::TilingDump { level, .. } | Experiment::TilingValidate { level, .. } if *level > 12 => {
                bad("level above 12 is too large to dump or validate")
            }
            Experiment::FolnerAudit {
                epsilon,
                candidates,
                samples,
                anchors,
                level,
                ..
            } => {
                if !(*epsilon > 0.0) || candidates.is_empty() || *samples == 0 || *anchors == 0 || *level == 0 {
                    bad("folner_audit needs epsilon > 0, candidates, samples, anchors and level ≥ 1")
                } else {
                    Ok(())
                }
            }
            Experiment::Entropy {
                samples,
                orders,
                level,
                tasks,
                ..
            } => {
                if *samples == 0 || *orders == 0 || *level == 0 || tasks.is_empty() {
                    bad("entropy needs samples, orders, level ≥ 1 and at least one task")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("undersampled estimates in an acceptance run: {0}")]
    Undersampled(String),
    #[error(transparent)]
    Other(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ConsistencyFailure(m) => CliError::Consistency(m),
            other => CliError::Other(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Consistency(_) => EXIT_CONSISTENCY,
            CliError::Undersampled(_) => EXIT_UNDERSAMPLED,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

/// Audit trail wrapped around every config-driven report.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    schema_version: u32,
    config_sha256: String,
    seed: u64,
    experiment: &'static str,
    config: &'a ExperimentConfig,
    result: T,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum TaskOutcome {
    Estimate(EntropyReport),
    Successor(SuccessorReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskResult {
    pub task: EntropyTask,
    pub report: TaskOutcome,
}

#[derive(Serialize)]
struct DumpSummary {
    system: String,
    level: usize,
    shape: String,
    rows: usize,
}

#[derive(Serialize)]
struct AuditSummary {
    k: Vec<GroupElement>,
    audit: UniformAudit,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn dump_csv<W: Write>(spec: &TilingSystemSpec, level: usize, shape: usize, out: W) -> Result<usize, Error> {
    let cells = spec.ordered_cells(level, shape)?;
    let mut wtr = csv::Writer::from_writer(out);
    let header: Vec<&str> = match spec.group().dim() {
        1 => vec!["rank", "x"],
        _ => vec!["rank", "x", "y"],
    };
    wtr.write_record(&header)?;
    for (r, c) in cells.iter().enumerate() {
        let mut row = vec![r.to_string()];
        row.extend(c.coords().iter().map(|x| x.to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(cells.len())
}

fn shape_arg(spec: &TilingSystemSpec, level: usize, shape: Option<&str>) -> Result<usize, Error> {
    match shape {
        Some(label) => spec.shape_index(level, label),
        None => Ok(0),
    }
}

fn open_out(out: &OutArgs) -> Result<Box<dyn Write>, Error> {
    Ok(match &out.out {
        Some(p) => Box::new(std::io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(out: &OutArgs, value: &T) -> Result<(), Error> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => run_config(&args.config, None),
        Command::Entropy(EntropyCommand::Run(args)) => run_config(&args.config, Some("entropy")),
        Command::Schema => {
            print!("{SCHEMA}");
            Ok(())
        }
        Command::Tiling(cmd) => tiling_command(cmd),
        Command::Folner(FolnerCommand::Audit {
            name,
            k,
            epsilon,
            candidates,
            samples,
            anchors,
            level,
            seed,
            out,
        }) => {
            let spec = TilingSystemSpec::builtin(name);
            let params = UniformAuditParams {
                k: KSet::Named(k).resolve(spec.group())?,
                epsilon,
                candidates,
                samples,
                anchors,
                level,
                seed,
            };
            let audit = folner::uniform_audit(&spec, &params)?;
            audit.write_csv(open_out(&out)?)?;
            Ok(())
        }
        Command::Order(OrderCommand::Convert { input, to, anchor, out }) => {
            let text = fs::read_to_string(&input)?;
            let form: OrderForm = serde_json::from_str(&text).map_err(|e| {
                CliError::Config(format!(
                    "{}: not an order window, increments or ranking: {e}",
                    input.display()
                ))
            })?;
            let anchor = match anchor {
                Some(c) if c.is_empty() || c.len() > MAX_DIM => {
                    return Err(CliError::Config(format!("anchor needs 1..={MAX_DIM} coordinates")));
                }
                c => c.map(|c| GroupElement::new(&c)),
            };
            emit_json(&out, &form.convert(to, anchor.as_ref())?)?;
            Ok(())
        }
    }
}

fn tiling_command(cmd: TilingCommand) -> Result<(), CliError> {
    match cmd {
        TilingCommand::Dump {
            name,
            level,
            shape,
            out,
        } => {
            let spec = TilingSystemSpec::builtin(name);
            let s = shape_arg(&spec, level, shape.as_deref())?;
            dump_csv(&spec, level, s, open_out(&out)?)?;
            Ok(())
        }
        TilingCommand::Spec { name, level, out } => {
            let doc = TilingSystemSpec::builtin(name).to_document(level)?;
            emit_json(&out, &doc)?;
            Ok(())
        }
        TilingCommand::Validate { name, file, level, out } => {
            let spec = match (name, file) {
                (Some(n), _) => TilingSystemSpec::builtin(n),
                (None, Some(f)) => TilingRef::File { file: f }.load(Path::new("."))?,
                (None, None) => unreachable!("clap requires one of --name/--file"),
            };
            let report = spec.validate(level);
            emit_json(&out, &report)?;
            if report.is_valid() {
                Ok(())
            } else {
                Err(CliError::Consistency(format!("{} violations", report.violations.len())))
            }
        }
    }
}

/// Executes a config file; `expect` restricts the experiment kind.
pub fn run_config(path: &Path, expect: Option<&str>) -> Result<(), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Config(e.to_string()))?;
    let cfg = ExperimentConfig::parse(text)?;
    if let Some(kind) = expect {
        if cfg.experiment.kind() != kind {
            return Err(CliError::Config(format!(
                "expected a {kind} experiment, found {}",
                cfg.experiment.kind()
            )));
        }
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let hash = sha256_hex(&bytes);
    log::info!(
        "running {} with seed {} (config sha256 {hash})",
        cfg.experiment.kind(),
        cfg.seed
    );
    let out_dir = base.join(&cfg.output.dir);
    fs::create_dir_all(&out_dir)?;
    let json_path = out_dir.join(format!("{}.json", cfg.output.name));
    let csv_path = out_dir.join(format!("{}.csv", cfg.output.name));
    let envelope = |result| Envelope {
        tool: "multiorder",
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        config_sha256: hash.clone(),
        seed: cfg.seed,
        experiment: cfg.experiment.kind(),
        config: &cfg,
        result,
    };

    match &cfg.experiment {
        Experiment::TilingDump { tiling, level, shape } => {
            let spec = tiling.load(&base)?;
            let s = shape_arg(&spec, *level, shape.as_deref()).map_err(|e| CliError::Config(e.to_string()))?;
            let file = std::io::BufWriter::new(fs::File::create(&csv_path)?);
            let rows = dump_csv(&spec, *level, s, file)?;
            let summary = DumpSummary {
                system: spec.name().to_string(),
                level: *level,
                shape: spec.shape_label(*level, s)?,
                rows,
            };
            write_json(
                &json_path,
                &envelope(serde_json::to_value(summary).map_err(Error::from)?),
            )?;
            Ok(())
        }
        Experiment::TilingValidate { tiling, level } => {
            let report: ValidationReport = tiling.load(&base)?.validate(*level);
            write_json(
                &json_path,
                &envelope(serde_json::to_value(&report).map_err(Error::from)?),
            )?;
            if report.is_valid() {
                Ok(())
            } else {
                Err(CliError::Consistency(format!(
                    "{} tiling violations",
                    report.violations.len()
                )))
            }
        }
        Experiment::FolnerAudit {
            tiling,
            k,
            epsilon,
            candidates,
            samples,
            anchors,
            level,
        } => {
            let spec = tiling.load(&base)?;
            let k = k.resolve(spec.group()).map_err(|e| CliError::Config(e.to_string()))?;
            let params = UniformAuditParams {
                k: k.clone(),
                epsilon: *epsilon,
                candidates: candidates.clone(),
                samples: *samples,
                anchors: *anchors,
                level: *level,
                seed: cfg.seed,
            };
            let audit = folner::uniform_audit(&spec, &params)?;
            audit.write_csv(std::io::BufWriter::new(fs::File::create(&csv_path)?))?;
            let summary = AuditSummary { k, audit };
            write_json(
                &json_path,
                &envelope(serde_json::to_value(summary).map_err(Error::from)?),
            )?;
            Ok(())
        }
        Experiment::OrderConvert { input, to, anchor } => {
            let text = fs::read_to_string(base.join(input))?;
            let form: OrderForm = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
            let converted = form.convert(*to, anchor.as_ref())?;
            write_json(
                &json_path,
                &envelope(serde_json::to_value(converted).map_err(Error::from)?),
            )?;
            Ok(())
        }
        Experiment::Entropy {
            tiling,
            process,
            samples,
            bias,
            orders,
            level,
            tasks,
        } => {
            let spec = tiling.load(&base)?;
            if spec.group() != process.group {
                return Err(CliError::Config("process and tiling live on different groups".into()));
            }
            let sampling = OrderSampling {
                orders: *orders,
                level: *level,
            };
            let mut results = Vec::with_capacity(tasks.len());
            for (t, task) in tasks.iter().enumerate() {
                let params =
                    EstimatorParams::new(*samples, crate::seed::derive(cfg.seed, &[t as u64])).with_bias(*bias);
                log::info!("task {t}: {task:?}");
                let report = match *task {
                    EntropyTask::McIntegral { j } => {
                        TaskOutcome::Estimate(entropy::mc_integral(&spec, process, j, &sampling, &params)?)
                    }
                    EntropyTask::RemotePastMi { n, j } => {
                        TaskOutcome::Estimate(entropy::remote_past_mi(&spec, process, n, j, &sampling, &params)?)
                    }
                    EntropyTask::SuccessorConsistency { j } => {
                        TaskOutcome::Successor(entropy::successor_consistency(process, &spec, j, &sampling, &params)?)
                    }
                };
                results.push(TaskResult { task: *task, report });
            }
            write_entropy_csv(&csv_path, &results)?;
            write_json(
                &json_path,
                &envelope(serde_json::to_value(&results).map_err(Error::from)?),
            )?;
            let under: Vec<String> = results
                .iter()
                .enumerate()
                .filter(|(_, r)| matches!(&r.report, TaskOutcome::Estimate(e) if e.undersampled))
                .map(|(i, _)| format!("task {i}"))
                .collect();
            if cfg.acceptance && !under.is_empty() {
                return Err(CliError::Undersampled(under.join(", ")));
            }
            Ok(())
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_entropy_csv(path: &Path, results: &[TaskResult]) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(fs::File::create(path)?));
    wtr.write_record([
        "task",
        "estimator",
        "truncation",
        "offset",
        "orders",
        "samples",
        "bias",
        "estimate",
        "standard_error",
        "oracle",
        "exact_truncated",
        "undersampled",
    ])
    .map_err(Error::from)?;
    for (i, r) in results.iter().enumerate() {
        let bias = |b: BiasMode| {
            serde_json::to_value(b)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default()
        };
        let row = match &r.report {
            TaskOutcome::Estimate(e) => [
                i.to_string(),
                serde_json::to_value(e.quantity)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                e.truncation.to_string(),
                e.offset.map(|n| n.to_string()).unwrap_or_default(),
                e.orders.to_string(),
                e.samples.to_string(),
                bias(e.bias),
                e.estimate.to_string(),
                e.standard_error.to_string(),
                opt(e.oracle),
                opt(e.exact_truncated),
                e.undersampled.to_string(),
            ],
            TaskOutcome::Successor(s) => [
                i.to_string(),
                "successor_consistency".into(),
                s.truncation.to_string(),
                String::new(),
                s.orders.to_string(),
                s.samples.to_string(),
                bias(s.bias),
                s.mean_successor.to_string(),
                s.standard_error.to_string(),
                String::new(),
                String::new(),
                s.undersampled.to_string(),
            ],
        };
        wtr.write_record(&row).map_err(Error::from)?;
    }
    wtr.flush()?;
    Ok(())
}
