//! File helpers shared by the commands.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mscd_core::graph::{parse_edge_list_with_stats, ParseStats};
use mscd_core::Graph;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

/// Reads a whole input file. A missing or unreadable input is a usage error.
pub fn read_input(path: &Path) -> Result<(Vec<u8>, InputDigest)> {
    let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let digest = InputDigest {
        path: path.to_path_buf(),
        bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    Ok((bytes, digest))
}

pub fn load_graph(path: &Path) -> Result<(Graph, ParseStats, InputDigest)> {
    let (bytes, digest) = read_input(path)?;
    let (graph, stats) = parse_edge_list_with_stats(bytes.as_slice()).map_err(CliError::input(path))?;
    Ok((graph, stats, digest))
}

/// Creates `path` and fills it through a buffered writer.
pub fn write_file(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(CliError::io(path))?;
    let mut out = BufWriter::new(file);
    fill(&mut out)?;
    out.flush().map_err(CliError::io(path))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(CliError::io(path))
}

/// Peak resident set size in KiB where the platform reports it.
pub fn peak_memory_kib() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .and_then(|v| v.trim().trim_end_matches("kB").trim().parse().ok())
}
