//! File output helpers: atomic writes and plain-text serialization.

use std::fmt::Write as _;
use std::path::Path;

use irp::archive::ParetoArchive;
use irp::search::SearchStats;

/// User-facing failure, split by exit code.
#[derive(Debug)]
pub enum UserError {
    /// Bad flags or config (exit 1).
    Usage(String),
    /// Bad input data or runtime failure (exit 2).
    Data(String),
}

impl UserError {
    pub fn data(err: impl std::fmt::Display) -> Self {
        UserError::Data(err.to_string())
    }
}

/// Writes via a sibling temp file and rename, so readers never observe a
/// half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), UserError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .map_err(|e| UserError::Data(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| UserError::Data(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn stats_text(stats: &SearchStats, archive: &ParetoArchive) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ev {}", stats.ev);
    let _ = writeln!(out, "evaluations {}", stats.evaluations);
    let _ = writeln!(out, "ev_init {}", stats.ev_init);
    let _ = writeln!(out, "iterations {}", stats.iterations);
    let _ = writeln!(out, "charge_per_solution {}", stats.charge_per_solution);
    let _ = writeln!(
        out,
        "min_archive_at_selection {}",
        stats
            .min_archive_at_selection
            .map_or_else(|| "-".to_string(), |v| v.to_string())
    );
    let _ = writeln!(out, "archive_size {}", archive.len());
    out
}
