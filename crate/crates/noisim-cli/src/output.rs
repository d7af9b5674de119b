//! Output helpers: run directories, JSON writing, config hashing, exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use noisim_core::Error;
use serde::Serialize;

/// 2 for validation problems, 3 for numerical failures.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NonConvergence(_) | Error::NumericalBreakdown(_) => 3,
        _ => 2,
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn in_dir(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// FNV-1a over the canonical config JSON; good enough to spot mismatched
/// artifacts, not a cryptographic digest.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

pub fn hash_of<T: Serialize>(value: &T) -> Result<String, Error> {
    Ok(fnv1a_hex(serde_json::to_string(value)?.as_bytes()))
}

/// Comma-separated list parsing for numeric flags like --depths 1,2,4.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::InvalidParameter(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

/// Minimal CSV escaping: quote fields containing separators or quotes.
pub fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
