//! Parallel corpus encoding.
//!
//! Entries are independent: each derives its outputs from its clip id,
//! so worker count and completion order never change the bytes written.
//! The report is sorted by clip id for the same reason.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use star_core::corpus::{self, ManifestEntry};

use crate::args::BatchArgs;
use crate::encode::{encode_and_write, ensure_writable_dir};
use crate::error::{CliError, CliResult, EXIT_PARTIAL_FAILURE};

#[derive(Serialize)]
pub struct EntryReport {
    pub clip_id: String,
    pub status: EntryStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_ms: f64,
    pub outputs: Vec<PathBuf>,
}

#[derive(Serialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Ok,
    Failed,
}

#[derive(Serialize)]
pub struct BatchReport {
    pub manifest: PathBuf,
    pub jobs: usize,
    pub total: usize,
    pub failures: usize,
    pub wall_ms: f64,
    pub entries: Vec<EntryReport>,
}

/// Summary line for stdout; the full report lands in the output dir.
#[derive(Serialize)]
struct BatchSummary<'a> {
    total: usize,
    failures: usize,
    wall_ms: f64,
    report: &'a Path,
}

fn encode_entry(entry: &ManifestEntry, args: &BatchArgs) -> EntryReport {
    let started = Instant::now();
    let result = args.encode.resolve().and_then(|(mode, config)| {
        let clip = corpus::load_clip(entry)?;
        encode_and_write(&clip, mode, &config, &args.out)
    });
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(summary) => EntryReport {
            clip_id: entry.clip_id.clone(),
            status: EntryStatus::Ok,
            error: None,
            wall_ms,
            outputs: summary.outputs,
        },
        Err(err) => {
            log::error!("{}: {err}", entry.clip_id);
            EntryReport {
                clip_id: entry.clip_id.clone(),
                status: EntryStatus::Failed,
                error: Some(err.to_string()),
                wall_ms,
                outputs: Vec::new(),
            }
        }
    }
}

/// Returns the process exit code: 0 clean, 1 when any entry failed.
pub fn cmd_batch(args: &BatchArgs) -> CliResult<i32> {
    args.encode.resolve()?;
    ensure_writable_dir(&args.out)?;

    let text = std::fs::read_to_string(&args.manifest)?;
    let mut entries = corpus::parse_manifest(&text)?;
    let base = args
        .manifest
        .parent()
        .unwrap_or(Path::new("."))
        .to_path_buf();
    for entry in &mut entries {
        entry.source = entry.resolved_source(&base);
    }

    let mut seen = std::collections::HashSet::new();
    for entry in &entries {
        if !seen.insert(entry.clip_id.as_str()) {
            return Err(CliError::input(format!(
                "duplicate clip_id {:?} would collide on output paths",
                entry.clip_id
            )));
        }
    }

    if args.jobs == Some(0) {
        return Err(CliError::input("--jobs must be at least 1"));
    }
    let jobs = args.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::input(format!("cannot build worker pool: {e}")))?;

    log::info!("encoding {} entries with {jobs} workers", entries.len());
    let started = Instant::now();
    let mut reports: Vec<EntryReport> =
        pool.install(|| entries.par_iter().map(|e| encode_entry(e, args)).collect());
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    reports.sort_by(|a, b| a.clip_id.cmp(&b.clip_id));
    let failures = reports
        .iter()
        .filter(|r| r.status == EntryStatus::Failed)
        .count();

    let report = BatchReport {
        manifest: args.manifest.clone(),
        jobs,
        total: reports.len(),
        failures,
        wall_ms,
        entries: reports,
    };
    let report_path = args.out.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;

    println!(
        "{}",
        serde_json::to_string(&BatchSummary {
            total: report.total,
            failures,
            wall_ms,
            report: &report_path,
        })?
    );
    Ok(if failures > 0 { EXIT_PARTIAL_FAILURE } else { 0 })
}
