//! Output helpers: fixed-format numbers, CSV/manifest writing.

use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::settings::Settings;
use crate::CliError;

/// 17 significant digits, enough to reproduce any f64 bit-exactly.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Create `dir` if needed and write `name` into it.
pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Write the run manifest next to the outputs. The manifest doubles as a
/// config file: replaying it with `--config` reproduces the CSV outputs
/// byte for byte.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    settings: &Settings,
    outputs: &[&str],
    elapsed: Duration,
) -> Result<PathBuf, CliError> {
    let mut text = String::new();
    text.push_str("# uca-mimo run manifest; replay with `--config <this file>`\n");
    text.push_str(&format!("command = {command}\n"));
    text.push_str(&format!(
        "artifact_version = {}\n",
        env!("CARGO_PKG_VERSION")
    ));
    text.push_str(&format!("duration_secs = {}\n", elapsed.as_secs_f64()));
    text.push_str(&format!("outputs = {}\n", outputs.join(",")));
    text.push_str(&settings.to_config_lines());
    write_file(dir, "manifest.txt", &text)
}
