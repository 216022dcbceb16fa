//! `.ldf` field snapshots.
//!
//! Layout: the 4-byte magic `LDF1`, a little-endian `u32` header length, a
//! UTF-8 JSON header, then every node value as a little-endian `f64`,
//! row-major within a time slice (last axis fastest) and slices in time
//! order. Values round-trip bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ScalarField, SpaceTimeGrid};
use crate::report::write_atomic;
use crate::scalar::Real;

pub const MAGIC: &[u8; 4] = b"LDF1";
pub const FORMAT_VERSION: u32 = 1;

/// JSON header of a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdfHeader {
    pub version: u32,
    #[serde(rename = "N")]
    pub dim: usize,
    pub nodes_per_axis: usize,
    pub h: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub origin: Vec<f64>,
    pub t0: f64,
    pub eps_floor: f64,
}

impl LdfHeader {
    pub fn of<T: Real>(field: &ScalarField<T>) -> Self {
        let g = field.grid();
        Self {
            version: FORMAT_VERSION,
            dim: g.dim(),
            nodes_per_axis: g.nodes_per_axis(),
            h: g.h().as_f64(),
            dt: g.dt().as_f64(),
            n_steps: g.n_steps(),
            origin: g.origin().iter().map(|v| v.as_f64()).collect(),
            t0: g.t0().as_f64(),
            eps_floor: field.eps_floor().as_f64(),
        }
    }

    pub fn grid(&self) -> Result<SpaceTimeGrid<f64>> {
        SpaceTimeGrid::new(
            self.dim,
            self.h,
            self.nodes_per_axis,
            self.dt,
            self.n_steps,
            self.origin.clone(),
            self.t0,
        )
        .map_err(|e| Error::Format(format!("snapshot header describes an invalid grid: {e}")))
    }
}

/// Serialises a field (converted to `f64`).
pub fn encode<T: Real>(field: &ScalarField<T>, out: &mut impl Write) -> Result<()> {
    let header = serde_json::to_vec(&LdfHeader::of(field)).map_err(|e| Error::Format(e.to_string()))?;
    let len = u32::try_from(header.len()).map_err(|_| Error::Format("snapshot header too large".into()))?;
    out.write_all(MAGIC)?;
    out.write_all(&len.to_le_bytes())?;
    out.write_all(&header)?;
    let mut buf = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.as_f64().to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn to_bytes<T: Real>(field: &ScalarField<T>) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(64 + 8 * field.values().len());
    encode(field, &mut out)?;
    Ok(out)
}

/// Parses a complete snapshot; trailing bytes are an error.
pub fn from_bytes(bytes: &[u8]) -> Result<ScalarField<f64>> {
    let short = || Error::Format("snapshot truncated".into());
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(Error::Format("not an LDF1 snapshot (bad magic)".into()));
    }
    let len = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let body = 8usize
        .checked_add(len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(short)?;
    let text = std::str::from_utf8(&bytes[8..body]).map_err(|e| Error::Format(format!("header is not UTF-8: {e}")))?;
    let header: LdfHeader = serde_json::from_str(text).map_err(|e| Error::Format(format!("bad header: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported snapshot version {}",
            header.version
        )));
    }
    let grid = header.grid()?;
    let data = &bytes[body..];
    let expected = grid.node_count() * 8;
    if data.len() != expected {
        return Err(Error::Format(format!(
            "snapshot payload has {} bytes, grid needs {expected}",
            data.len()
        )));
    }
    let values = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    ScalarField::new(grid, values, header.eps_floor).map_err(|e| Error::Format(format!("invalid snapshot data: {e}")))
}

pub fn decode(input: &mut impl Read) -> Result<ScalarField<f64>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

/// Writes a snapshot atomically (temporary file in the target directory,
/// then rename).
pub fn write_snapshot<T: Real>(path: impl AsRef<Path>, field: &ScalarField<T>) -> Result<()> {
    write_atomic(path, &to_bytes(field)?)
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<ScalarField<f64>> {
    from_bytes(&std::fs::read(path)?)
}
