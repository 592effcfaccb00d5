//! Single-threaded map-based re-indexing.
//!
//! Walks the elements in order and appends each vertex value the first time
//! it is seen, remembering its new index in an ordered map. This is the
//! straightforward baseline the data-parallel pipeline is checked and timed
//! against. Its output lists vertices in first-use order.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::mesh::{self, dereference, ensure_valid, with_vertex_key, Mesh, VertexKey};

fn reindex_serial_keyed<K: VertexKey>(mesh: &Mesh) -> Result<Mesh> {
    let dim = mesh.dim();
    let mut inserted: BTreeMap<K, u32> = BTreeMap::new();
    let mut coords = Vec::new();
    let mut indices = Vec::with_capacity(mesh.indices().len());
    for element in mesh.elements() {
        for &old in element {
            let v = mesh.vertex(old as usize);
            let next = inserted.len() as u32;
            let idx = *inserted.entry(K::from_coords(v)).or_insert_with(|| {
                coords.extend_from_slice(v);
                next
            });
            indices.push(idx);
        }
    }
    Mesh::new(dim, mesh.arity(), coords, indices)
}

/// Map-based duplicate and unused vertex removal.
pub fn reindex_serial(mesh: &Mesh) -> Result<Mesh> {
    ensure_valid(mesh)?;
    with_vertex_key!(mesh.dim(), Key => reindex_serial_keyed::<Key>(mesh))
}

fn sorted_vertices(m: &Mesh) -> Vec<mesh::Vertex> {
    let mut v: Vec<_> = m.vertices().map(mesh::Vertex::new).collect();
    v.sort_unstable();
    v
}

/// Same elements (bitwise, in order) and the same vertex multiset.
///
/// Vertex order is ignored, so a sorted-order and a first-use-order result
/// compare equal. Meshes that fail to dereference are never equivalent.
pub fn equivalent(a: &Mesh, b: &Mesh) -> bool {
    if a.dim() != b.dim() || a.vertex_count() != b.vertex_count() {
        return false;
    }
    match (dereference(a), dereference(b)) {
        (Ok(sa), Ok(sb)) if sa == sb => sorted_vertices(a) == sorted_vertices(b),
        _ => false,
    }
}
