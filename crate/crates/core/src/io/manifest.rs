//! Run manifest: one tab-separated line per output file with its path
//! relative to the output directory, byte length and SHA-256.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;

pub const MANIFEST_NAME: &str = "manifest.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `manifest.txt` into `dir` covering `files` (paths relative to
/// `dir`), sorted by path.
pub fn write_manifest(dir: &Path, files: &[PathBuf]) -> Result<PathBuf> {
    let mut sorted: Vec<&PathBuf> = files.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut text = String::new();
    for rel in sorted {
        let bytes = fs::read(dir.join(rel))?;
        text.push_str(&format!(
            "{}\t{}\t{}\n",
            rel.to_string_lossy().replace('\\', "/"),
            bytes.len(),
            sha256_hex(&bytes)
        ));
    }
    let path = dir.join(MANIFEST_NAME);
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
