use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::report::FileDigest;
use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Reads a UTF-8 file and records its digest.
pub fn read_text(path: &Path, digests: &mut Vec<FileDigest>) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    digests.push(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    });
    String::from_utf8(bytes).map_err(|_| CliError::Parse(format!("{} is not UTF-8", path.display())))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str, digests: &mut Vec<FileDigest>) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Precondition(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    digests.push(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(contents.as_bytes()),
    });
    Ok(())
}
