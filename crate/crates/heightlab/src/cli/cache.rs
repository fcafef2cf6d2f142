//! On-disk result cache: exact-key lookups, atomic writes via temp + rename.
//! I/O failures degrade to compute-only with a warning on stderr.

use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::Path;

use super::CliError;

/// Content hash of (operation, canonicalized inputs).
pub fn key_of(op: &str, canonical_inputs: &str) -> String {
    let mut h = Sha256::new();
    h.update(op.as_bytes());
    h.update([0u8]);
    h.update(canonical_inputs.as_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Returns the cached JSON string on an exact key hit, otherwise computes,
/// writes atomically and returns. Corrupted entries are recomputed and
/// overwritten; unwritable cache directories fall back to compute-only.
pub fn get_put(
    dir: Option<&Path>,
    key: &str,
    compute: impl FnOnce() -> Result<String, CliError>,
) -> Result<String, CliError> {
    let Some(dir) = dir else {
        return compute();
    };
    let path = dir.join(format!("{key}.json"));
    if let Ok(bytes) = fs::read(&path) {
        if let Ok(text) = String::from_utf8(bytes) {
            if serde_json::from_str::<serde_json::Value>(&text).is_ok() {
                return Ok(text);
            }
        }
        eprintln!("warning: corrupted cache entry {}, recomputing", path.display());
    }
    let value = compute()?;
    if let Err(e) = write_atomic(dir, &path, &value) {
        eprintln!("warning: cache write failed ({e}), continuing without cache");
    }
    Ok(value)
}

fn write_atomic(dir: &Path, path: &Path, value: &str) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(value.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
