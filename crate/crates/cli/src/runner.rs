//! `run` and `validate`: config in, artifacts and manifest out.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Map, Value};

use crate::config::{RunConfig, SchemaError};
use crate::output;
use crate::tasks::{InvalidMetric, Scenario, TaskResult};

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_TASK_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("schema error: {0}")]
    Schema(#[from] SchemaError),
    #[error("invalid metric: {}", .0.message)]
    InvalidMetric(InvalidMetric),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Schema(_) | CliError::InvalidMetric(_) => EXIT_SCHEMA,
        }
    }

    /// Machine-readable error report.
    pub fn report(&self) -> Value {
        match self {
            CliError::Io { path, message } => {
                json!({"status": "error", "error": "io", "path": path.display().to_string(), "message": message})
            }
            CliError::Schema(e) => {
                json!({"status": "error", "error": "schema", "pointer": e.pointer, "message": e.message})
            }
            CliError::InvalidMetric(m) => json!({
                "status": "error",
                "error": "invalid_metric",
                "pointer": m.pointer,
                "message": m.message,
                "worst_point": m.worst_point,
                "max_omega_norm": m.max_omega_norm,
            }),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io { path: path.to_path_buf(), message: e.to_string() }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunFlags {
    /// Overrides the config's `output_dir`.
    pub out: Option<PathBuf>,
    /// Overrides the config's `seed`.
    pub seed: Option<u64>,
    /// Worker threads; 0 and 1 run sequentially.
    pub parallel: usize,
    pub quiet: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub manifest: Value,
    pub failed: usize,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            EXIT_OK
        } else {
            EXIT_TASK_FAILED
        }
    }
}

/// Reads and parses a config; returns it with the raw bytes for hashing.
pub fn load(path: &Path) -> Result<(RunConfig, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| SchemaError::new("", "config is not valid UTF-8"))?;
    Ok((RunConfig::from_json(text)?, bytes))
}

/// Schema, expression and metric-validity checks without running tasks.
pub fn validate(path: &Path) -> Result<Value, CliError> {
    let (config, _) = load(path)?;
    let sc = Scenario::prepare(config).map_err(CliError::InvalidMetric)?;
    Ok(json!({
        "status": "ok",
        "scenario": sc.config.scenario,
        "metric": sc.config.metric.key(),
        "tasks": sc.config.tasks.len(),
        "samples": sc.samples.len(),
        "max_omega_norm": sc.max_omega_norm(),
        "max_randers_norm": sc.validity.max_randers_norm,
    }))
}

fn execute(sc: &Scenario, parallel: usize) -> Vec<TaskResult> {
    let tasks = &sc.config.tasks;
    if parallel <= 1 || tasks.len() <= 1 {
        return tasks.iter().map(|t| sc.run_task(t)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<TaskResult>>> = tasks.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..parallel.min(tasks.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= tasks.len() {
                    break;
                }
                let res = sc.run_task(&tasks[k]);
                *slots[k].lock().expect("slot lock") = Some(res);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every task ran")).collect()
}

fn resolve_out_dir(config_path: &Path, config: &RunConfig, flags: &RunFlags) -> PathBuf {
    if let Some(o) = &flags.out {
        return o.clone();
    }
    let base = config_path.parent().unwrap_or_else(|| Path::new("."));
    base.join(config.output_dir.as_deref().unwrap_or("out"))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| io_error(path, e))
}

/// Runs every task in order and writes artifacts plus `manifest.json`.
/// Task failures are recorded in the manifest, not returned as errors.
pub fn run(config_path: &Path, flags: &RunFlags, log: &mut dyn FnMut(&str)) -> Result<RunOutcome, CliError> {
    let (mut config, raw) = load(config_path)?;
    if let Some(seed) = flags.seed {
        config.seed = seed;
    }
    let out_dir = resolve_out_dir(config_path, &config, flags);
    let sc = Scenario::prepare(config).map_err(CliError::InvalidMetric)?;
    std::fs::create_dir_all(&out_dir).map_err(|e| io_error(&out_dir, e))?;

    let results = execute(&sc, flags.parallel);
    let total = results.len();
    let mut tasks = Vec::with_capacity(total);
    let mut files = Vec::new();
    let mut failed = 0;
    for (k, (spec, res)) in sc.config.tasks.iter().zip(results).enumerate() {
        let mut entry = Map::new();
        entry.insert("id".into(), json!(spec.id));
        entry.insert("type".into(), json!(spec.kind.name()));
        match res {
            Ok(out) => {
                let mut names = Vec::with_capacity(out.files.len());
                for a in &out.files {
                    write(&out_dir.join(&a.name), &a.bytes)?;
                    files.push(json!({
                        "path": a.name,
                        "task": spec.id,
                        "bytes": a.bytes.len(),
                        "sha256": output::sha256_hex(&a.bytes),
                    }));
                    names.push(a.name.clone());
                }
                entry.insert("status".into(), json!("ok"));
                entry.insert("files".into(), json!(names));
                entry.insert("summary".into(), Value::Object(out.summary));
                log(&format!("[{}/{total}] {} ({}): ok", k + 1, spec.id, spec.kind.name()));
            }
            Err(e) => {
                failed += 1;
                entry.insert("status".into(), json!("failed"));
                entry.insert("files".into(), json!([]));
                log(&format!("[{}/{total}] {} ({}): FAILED: {e}", k + 1, spec.id, spec.kind.name()));
                entry.insert("error".into(), json!(e));
            }
        }
        tasks.push(Value::Object(entry));
    }
    let manifest = json!({
        "scenario": sc.config.scenario,
        "config_sha256": output::sha256_hex(&raw),
        "seed": sc.config.seed,
        "metric": sc.config.metric.key(),
        "status": if failed == 0 { "ok" } else { "failed" },
        "tasks": tasks,
        "files": files,
    });
    write(&out_dir.join("manifest.json"), &output::json_bytes(&manifest))?;
    Ok(RunOutcome { out_dir, manifest, failed })
}
