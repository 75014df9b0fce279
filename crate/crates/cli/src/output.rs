//! Output plumbing: deterministic renderers and atomic file writes.
//!
//! Everything written here is a pure function of the command's inputs:
//! CSV cells format floats with the shortest round-trip representation,
//! JSON objects sort their keys, and files land via a temp-file rename
//! so readers never observe a partial artifact.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// Writes to the path via a sibling temp file and rename, or to stdout
/// when no path is given.
pub fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => atomic_write(path, bytes),
        None => {
            std::io::stdout()
                .write_all(bytes)
                .context("writing to stdout")?;
            Ok(())
        }
    }
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut temp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temp file next to {}", path.display()))?;
    temp.write_all(bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    temp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Runs `write` against a temp path, then renames the result into place.
/// For writers that insist on producing the file themselves.
pub fn atomic_write_with(
    path: &Path,
    write: impl FnOnce(&Path) -> std::result::Result<(), gridatlas::Error>,
) -> Result<()> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let temp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temp file next to {}", path.display()))?;
    let temp_path = temp.into_temp_path();
    write(&temp_path).with_context(|| format!("writing {}", path.display()))?;
    temp_path
        .persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Renders rows of cells as CSV bytes.
pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    Ok(writer.into_inner()?)
}

/// Pretty JSON with sorted object keys and a trailing newline.
pub fn json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("value serializes");
    bytes.push(b'\n');
    bytes
}

/// Shortest round-trip float formatting, shared by every CSV cell.
pub fn fmt_f64(value: f64) -> String {
    format!("{value}")
}
