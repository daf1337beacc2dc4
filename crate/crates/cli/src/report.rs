//! Report plumbing: every emitted file carries the tool version and an echo
//! of the fully resolved configuration (semantic values only, never paths),
//! so any output can be re-derived from the file alone.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo { name: "direx", version: env!("CARGO_PKG_VERSION") }
    }
}

/// A self-describing report: tool version, resolved config echo, payload.
#[derive(Debug, Clone, Serialize)]
pub struct Report<C: Serialize, P: Serialize> {
    pub tool: ToolInfo,
    pub config: C,
    #[serde(flatten)]
    pub payload: P,
}

impl<C: Serialize, P: Serialize> Report<C, P> {
    pub fn new(config: C, payload: P) -> Self {
        Report { tool: ToolInfo::current(), config, payload }
    }
}

/// Writes pretty JSON with a trailing newline; creates the directory first.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).context("serializing report")?;
    text.push('\n');
    write_text(dir, name, &text)
}

/// Writes a CSV table: header row plus one line per record, `\n` endings.
/// Fields here are plain numbers, booleans, and input symbols, so no
/// quoting is ever needed.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_text(dir, name, &text)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
