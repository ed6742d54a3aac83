//! `manifest.txt`: the configuration followed by `sha256  name` per file.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_NAME: &str = "manifest.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Manifest text for `files` (names relative to `dir`), sorted by name.
pub fn build(dir: &Path, files: &[String], config: &str) -> Result<String, CliError> {
    let mut names = files.to_vec();
    names.sort();
    names.dedup();
    let mut out = String::from(config);
    out.push('\n');
    for name in names {
        let path = dir.join(&name);
        let bytes = fs::read(&path).map_err(|source| CliError::Output { path, source })?;
        out.push_str(&format!("{}  {name}\n", sha256_hex(&bytes)));
    }
    Ok(out)
}

/// `(digest, name)` pairs from a manifest's checksum lines.
pub fn parse_checksums(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once("  "))
        .filter(|(h, _)| h.len() == 64 && h.bytes().all(|b| b.is_ascii_hexdigit()))
        .map(|(h, n)| (h.to_string(), n.to_string()))
        .collect()
}
