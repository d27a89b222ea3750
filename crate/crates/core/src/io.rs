//! Artifact formatting shared by every CSV/JSON writer.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Fixed 17-significant-digit scientific notation; round-trips every `f64`
/// and is byte-stable across runs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
