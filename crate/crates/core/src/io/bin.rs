// .rmx layout, all little-endian:
//   "RMX1" | u32 dim | u32 arity | u64 vertex count | u64 element count
//   | vertex count * dim f32 | element count * arity u32

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{ensure_valid, Mesh, MAX_VERTICES};

pub const BIN_MAGIC: [u8; 4] = *b"RMX1";
pub const BIN_HEADER_LEN: usize = 28;

pub fn encode_bin(mesh: &Mesh) -> Result<Vec<u8>> {
    ensure_valid(mesh)?;
    let mut out =
        Vec::with_capacity(BIN_HEADER_LEN + 4 * (mesh.coords().len() + mesh.indices().len()));
    out.extend_from_slice(&BIN_MAGIC);
    out.extend_from_slice(&(mesh.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(mesh.arity() as u32).to_le_bytes());
    out.extend_from_slice(&(mesh.vertex_count() as u64).to_le_bytes());
    out.extend_from_slice(&(mesh.element_count() as u64).to_le_bytes());
    for c in mesh.coords() {
        out.extend_from_slice(&c.to_bits().to_le_bytes());
    }
    for i in mesh.indices() {
        out.extend_from_slice(&i.to_le_bytes());
    }
    Ok(out)
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

/// Parses an `.rmx` image. Index ranges are not checked; see
/// [`validate`](crate::mesh::validate).
pub fn decode_bin(bytes: &[u8]) -> Result<Mesh> {
    let found = bytes.len() as u64;
    if bytes.len() < BIN_HEADER_LEN {
        return Err(Error::Truncated { needed: BIN_HEADER_LEN as u64, found });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != BIN_MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let dim = u32_at(bytes, 4) as u64;
    let arity = u32_at(bytes, 8) as u64;
    let nv = u64_at(bytes, 12);
    let ne = u64_at(bytes, 20);
    if nv > MAX_VERTICES {
        return Err(Error::TooManyVertices { count: nv });
    }
    let payload = nv
        .checked_mul(dim)
        .and_then(|c| ne.checked_mul(arity).and_then(|i| c.checked_add(i)))
        .and_then(|words| words.checked_mul(4))
        .and_then(|b| b.checked_add(BIN_HEADER_LEN as u64));
    let needed = payload.unwrap_or(u64::MAX);
    if found < needed {
        return Err(Error::Truncated { needed, found });
    }
    if found > needed {
        return Err(Error::TrailingBytes(found - needed));
    }

    let coord_end = BIN_HEADER_LEN + (nv * dim) as usize * 4;
    let coords = bytes[BIN_HEADER_LEN..coord_end]
        .chunks_exact(4)
        .map(|c| f32::from_bits(u32::from_le_bytes(c.try_into().unwrap())))
        .collect();
    let indices = bytes[coord_end..]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Mesh::new(dim as usize, arity as usize, coords, indices)
}

pub fn read_bin(path: &Path) -> Result<Mesh> {
    let mut bytes = Vec::new();
    super::open(path)?
        .read_to_end(&mut bytes)
        .map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    decode_bin(&bytes)
}

pub fn write_bin(mesh: &Mesh, path: &Path) -> Result<()> {
    let bytes = encode_bin(mesh)?;
    let mut w = super::create(path)?;
    w.write_all(&bytes).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    super::finish(w, path.to_path_buf())
}
