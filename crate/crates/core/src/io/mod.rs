//! Serialization: path columns, edge lists, vertex fields, SVG, and the
//! atomic-write and content-hash helpers shared by the command line.

mod field;
mod graph;
mod path;
mod svg;

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub use field::{read_field_csv, write_embedding_csv, write_harmonic_csv, write_trial_log};
pub use graph::{graph_summary, read_edge_list, write_edge_list, GraphSummary};
pub use path::{read_path_binary, read_path_csv, write_path_binary, write_path_csv, PATH_MAGIC, PATH_VERSION};
pub use svg::{embedding_svg, loglog_svg};

/// Writes `bytes` to `dest` through a temporary file in the same directory,
/// so readers see either the old file or the complete new one.
pub fn write_atomic(dest: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match dest.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dest).map_err(|e| e.error)?;
    Ok(())
}

/// Git-style blob hash (`sha256("blob {len}\0" ++ json)`) of the canonical JSON of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> Result<String> {
    let json = serde_json::to_vec(value)?;
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", json.len()).as_bytes());
    h.update(&json);
    Ok(hex::encode(h.finalize()))
}
