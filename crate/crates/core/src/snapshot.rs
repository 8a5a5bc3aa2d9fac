//! Bit-exact binary field snapshots.
//!
//! Layout, in order:
//!
//! 1. 16-byte magic `LLGFIELD\0\0\0\0v001`;
//! 2. `u32` little-endian byte length of the JSON header;
//! 3. the JSON header: `dim`, `sizes`, `lengths`, `dtype` (`"f64"` or
//!    `"c128"`), `components`, `time`, `epsilon`, `a`;
//! 4. the payload: little-endian `f64`s in storage (row-major) order, one per
//!    point per component for `"f64"`, interleaved re/im pairs for `"c128"`.
//!    Multi-component payloads are concatenated component blocks.
//!
//! Every `f64` goes through `to_le_bytes`/`from_le_bytes`, so a write/read
//! cycle reproduces the exact bit pattern, NaN payloads and negative zeros
//! included.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::grid::Grid;
use crate::sphere::SphereField;

pub const MAGIC: &[u8; 16] = b"LLGFIELD\0\0\0\0v001";

/// Run context stored next to the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub time: f64,
    pub epsilon: f64,
    pub a: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    dim: usize,
    sizes: Vec<usize>,
    lengths: Vec<f64>,
    dtype: String,
    components: usize,
    time: f64,
    epsilon: f64,
    a: f64,
}

/// A decoded snapshot.
#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Real(RealField),
    Complex(ComplexField),
    Sphere(SphereField),
}

impl Snapshot {
    pub fn grid(&self) -> &Grid {
        match self {
            Snapshot::Real(f) => f.grid(),
            Snapshot::Complex(f) => f.grid(),
            Snapshot::Sphere(s) => s.grid(),
        }
    }
}

fn encode(grid: &Grid, dtype: &str, components: usize, meta: &SnapshotMeta, values: &[f64]) -> Vec<u8> {
    let header = Header {
        dim: grid.dim(),
        sizes: grid.sizes().to_vec(),
        lengths: grid.lengths().to_vec(),
        dtype: dtype.to_string(),
        components,
        time: meta.time,
        epsilon: meta.epsilon,
        a: meta.a,
    };
    let header_json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(16 + 4 + header_json.len() + 8 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(header_json.len() as u32).to_le_bytes());
    out.extend_from_slice(&header_json);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn encode_real(f: &RealField, meta: &SnapshotMeta) -> Vec<u8> {
    encode(f.grid(), "f64", 1, meta, f.data())
}

pub fn encode_complex(f: &ComplexField, meta: &SnapshotMeta) -> Vec<u8> {
    let mut values = Vec::with_capacity(2 * f.data().len());
    for v in f.data() {
        values.push(v.re);
        values.push(v.im);
    }
    encode(f.grid(), "c128", 1, meta, &values)
}

pub fn encode_sphere(s: &SphereField, meta: &SnapshotMeta) -> Vec<u8> {
    let mut values = Vec::with_capacity(3 * s.grid().num_points());
    for c in 0..3 {
        values.extend_from_slice(s.comp(c));
    }
    encode(s.grid(), "f64", 3, meta, &values)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::SnapshotFormat(msg.into())
}

pub fn decode(bytes: &[u8]) -> Result<(Snapshot, SnapshotMeta)> {
    if bytes.len() < 20 {
        return Err(bad("shorter than magic and header length"));
    }
    if &bytes[..16] != MAGIC {
        return Err(bad("magic mismatch; not a field snapshot or wrong version"));
    }
    let header_len = u32::from_le_bytes(bytes[16..20].try_into().expect("4 bytes")) as usize;
    let body = &bytes[20..];
    if body.len() < header_len {
        return Err(bad("truncated header"));
    }
    let header: Header = serde_json::from_slice(&body[..header_len])?;
    let grid = Grid::new(&header.sizes, &header.lengths)?;
    if header.dim != grid.dim() {
        return Err(bad(format!("dim field {} disagrees with sizes", header.dim)));
    }
    let doubles_per_point = match (header.dtype.as_str(), header.components) {
        ("f64", c @ (1 | 3)) => c,
        ("c128", 1) => 2,
        _ => {
            return Err(bad(format!(
                "unsupported dtype/components: {}/{}",
                header.dtype, header.components
            )))
        }
    };
    let payload = &body[header_len..];
    let expect = grid.num_points() * doubles_per_point * 8;
    if payload.len() != expect {
        return Err(bad(format!("payload is {} bytes, expected {expect}", payload.len())));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let meta = SnapshotMeta { time: header.time, epsilon: header.epsilon, a: header.a };
    let n = grid.num_points();
    let snap = match (header.dtype.as_str(), header.components) {
        ("f64", 1) => Snapshot::Real(RealField::from_data(grid, values)?),
        ("c128", 1) => {
            let data = values
                .chunks_exact(2)
                .map(|p| num_complex::Complex64::new(p[0], p[1]))
                .collect();
            Snapshot::Complex(ComplexField::from_data(grid, data)?)
        }
        ("f64", 3) => {
            let comps = [
                values[..n].to_vec(),
                values[n..2 * n].to_vec(),
                values[2 * n..].to_vec(),
            ];
            Snapshot::Sphere(SphereField::from_components(grid, comps)?)
        }
        _ => unreachable!("filtered above"),
    };
    Ok((snap, meta))
}

pub fn save_real(path: &std::path::Path, f: &RealField, meta: &SnapshotMeta) -> Result<()> {
    Ok(std::fs::write(path, encode_real(f, meta))?)
}

pub fn save_complex(path: &std::path::Path, f: &ComplexField, meta: &SnapshotMeta) -> Result<()> {
    Ok(std::fs::write(path, encode_complex(f, meta))?)
}

pub fn save_sphere(path: &std::path::Path, s: &SphereField, meta: &SnapshotMeta) -> Result<()> {
    Ok(std::fs::write(path, encode_sphere(s, meta))?)
}

pub fn load(path: &std::path::Path) -> Result<(Snapshot, SnapshotMeta)> {
    decode(&std::fs::read(path)?)
}
