//! Output plumbing shared by the subcommands: the `--format` choice and
//! the `--out` sink.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use ivmb_core::{CoreError, Result};
use serde::Serialize;

/// Serialization format selected with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Machine-readable JSON.
    Json,
    /// Comma-separated values.
    Csv,
    /// Human-readable plain text.
    Text,
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CoreError::Data(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Write the payload to `--out` when given, otherwise to stdout. A
/// closed stdout (e.g. a downstream `head`) ends the program quietly,
/// as Unix filters do.
pub fn emit(payload: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, payload)
            .map_err(|e| CoreError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            if let Err(e) = std::io::stdout().write_all(payload.as_bytes()) {
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    std::process::exit(0);
                }
                return Err(CoreError::Data(format!("cannot write to stdout: {e}")));
            }
            Ok(())
        }
    }
}

/// Ensure the payload ends with exactly one newline.
pub fn with_newline(mut payload: String) -> String {
    if !payload.ends_with('\n') {
        payload.push('\n');
    }
    payload
}
