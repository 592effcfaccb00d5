//! Indexed mesh model: flat coordinate and index buffers with a per-mesh
//! vertex dimension `D` and element arity `K`.
//!
//! Vertices are identified by the raw bit patterns of their coordinates.
//! Two vertices are equal only if every component has the same `f32` bits,
//! so `-0.0` and `+0.0` differ and a NaN equals itself when its payload
//! matches. Ordering is lexicographic over the components' bits read as
//! `u32`, which is a strict total order.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::primitives;

/// Largest number of vertices addressable by a `u32` index.
pub const MAX_VERTICES: u64 = u32::MAX as u64;

/// An owned vertex compared bitwise.
#[derive(Clone)]
pub struct Vertex(Box<[f32]>);

impl Vertex {
    pub fn new(coords: &[f32]) -> Self {
        Vertex(coords.into())
    }

    pub fn coords(&self) -> &[f32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn bits(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|c| c.to_bits())
    }
}

impl<const D: usize> From<[f32; D]> for Vertex {
    fn from(coords: [f32; D]) -> Self {
        Vertex(Box::new(coords))
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Vertex").field(&&*self.0).finish()
    }
}

impl PartialEq for Vertex {
    fn eq(&self, other: &Self) -> bool {
        self.bits().eq(other.bits())
    }
}

impl Eq for Vertex {}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits().cmp(other.bits())
    }
}

impl Hash for Vertex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for b in self.bits() {
            b.hash(state);
        }
    }
}

/// A sortable stand-in for one vertex.
///
/// `[u32; N]` holds the coordinate bits inline for small fixed dimensions;
/// [`Vertex`] covers any dimension. Both order exactly like the bitwise
/// vertex order described in the module docs.
pub trait VertexKey: Ord + Clone + Send + Sync + fmt::Debug {
    fn from_coords(coords: &[f32]) -> Self;
    fn write_coords(&self, out: &mut [f32]);

    /// Stable key-value sort, specialised per key type.
    fn sort_pairs(keys: &[Self], values: &[u32]) -> Result<(Vec<Self>, Vec<u32>)> {
        primitives::key_value_sort(keys, values)
    }
}

impl<const N: usize> VertexKey for [u32; N] {
    #[inline]
    fn from_coords(coords: &[f32]) -> Self {
        debug_assert_eq!(coords.len(), N);
        std::array::from_fn(|i| coords[i].to_bits())
    }

    #[inline]
    fn write_coords(&self, out: &mut [f32]) {
        for (o, b) in out.iter_mut().zip(self) {
            *o = f32::from_bits(*b);
        }
    }

    fn sort_pairs(keys: &[Self], values: &[u32]) -> Result<(Vec<Self>, Vec<u32>)> {
        primitives::key_value_sort_words(keys, values)
    }
}

impl VertexKey for Vertex {
    fn from_coords(coords: &[f32]) -> Self {
        Vertex::new(coords)
    }

    fn write_coords(&self, out: &mut [f32]) {
        out.copy_from_slice(&self.0);
    }
}

/// Runs `$body` with `$key` bound to the key type best suited to `$dim`.
macro_rules! with_vertex_key {
    ($dim:expr, $key:ident => $body:expr) => {
        match $dim {
            1 => {
                type $key = [u32; 1];
                $body
            }
            2 => {
                type $key = [u32; 2];
                $body
            }
            3 => {
                type $key = [u32; 3];
                $body
            }
            4 => {
                type $key = [u32; 4];
                $body
            }
            _ => {
                type $key = $crate::mesh::Vertex;
                $body
            }
        }
    };
}
pub(crate) use with_vertex_key;

/// Converts a flat coordinate buffer into one key per vertex.
pub fn keys_from_coords<K: VertexKey>(coords: &[f32], dim: usize) -> Vec<K> {
    exec::map_range(coords.len() / dim, |i| {
        K::from_coords(&coords[i * dim..(i + 1) * dim])
    })
}

/// Inverse of [`keys_from_coords`].
pub fn coords_from_keys<K: VertexKey>(keys: &[K], dim: usize) -> Vec<f32> {
    let mut out = vec![0.0f32; keys.len() * dim];
    exec::for_each_chunk_mut(&mut out, dim, |i, c| keys[i].write_coords(c));
    out
}

pub(crate) fn bits_eq(a: &[f32], b: &[f32]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// One out-of-range index found by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub element: usize,
    pub slot: usize,
    pub index: u32,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "element {} slot {} references missing vertex {}",
            self.element, self.slot, self.index
        )
    }
}

/// An indexed mesh of fixed-arity elements.
///
/// Construction checks buffer shapes but not index ranges; use [`validate`]
/// for that. Equality is bitwise on coordinates.
#[derive(Clone)]
pub struct Mesh {
    dim: usize,
    arity: usize,
    coords: Vec<f32>,
    indices: Vec<u32>,
}

impl Mesh {
    pub fn new(dim: usize, arity: usize, coords: Vec<f32>, indices: Vec<u32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::RaggedCoordinates { len: coords.len(), dim });
        }
        if !indices.len().is_multiple_of(arity) {
            return Err(Error::RaggedIndices { len: indices.len(), arity });
        }
        let count = (coords.len() / dim) as u64;
        if count > MAX_VERTICES {
            return Err(Error::TooManyVertices { count });
        }
        Ok(Mesh { dim, arity, coords, indices })
    }

    pub fn empty(dim: usize, arity: usize) -> Result<Self> {
        Mesh::new(dim, arity, Vec::new(), Vec::new())
    }

    /// Builds a mesh from fixed-size vertex and element arrays.
    pub fn from_arrays<const D: usize, const K: usize>(
        vertices: &[[f32; D]],
        elements: &[[u32; K]],
    ) -> Result<Self> {
        Mesh::new(
            D,
            K,
            vertices.iter().flatten().copied().collect(),
            elements.iter().flatten().copied().collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn element_count(&self) -> usize {
        self.indices.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty() && self.indices.is_empty()
    }

    /// Flat coordinates, `dim` per vertex.
    pub fn coords(&self) -> &[f32] {
        &self.coords
    }

    /// Flat indices, `arity` per element.
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn vertex(&self, i: usize) -> &[f32] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn element(&self, e: usize) -> &[u32] {
        &self.indices[e * self.arity..(e + 1) * self.arity]
    }

    pub fn vertices(&self) -> std::slice::ChunksExact<'_, f32> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn elements(&self) -> std::slice::ChunksExact<'_, u32> {
        self.indices.chunks_exact(self.arity)
    }

    pub fn into_parts(self) -> (Vec<f32>, Vec<u32>) {
        (self.coords, self.indices)
    }
}

impl fmt::Debug for Mesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mesh")
            .field("dim", &self.dim)
            .field("arity", &self.arity)
            .field("vertices", &self.vertices().collect::<Vec<_>>())
            .field("elements", &self.elements().collect::<Vec<_>>())
            .finish()
    }
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.arity == other.arity
            && self.indices == other.indices
            && bits_eq(&self.coords, &other.coords)
    }
}

impl Eq for Mesh {}

/// Lists every index that does not name a vertex. Empty means well-formed.
pub fn validate(mesh: &Mesh) -> Vec<Issue> {
    let n = mesh.vertex_count();
    let k = mesh.arity;
    let indices = &mesh.indices;
    exec::filter_map_range(indices.len(), |p| {
        let index = indices[p];
        ((index as usize) >= n).then_some(Issue { element: p / k, slot: p % k, index })
    })
}

pub(crate) fn ensure_valid(mesh: &Mesh) -> Result<()> {
    let issues = validate(mesh);
    if issues.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidMesh { issues })
    }
}

/// A dereferenced mesh: every element stores its `arity` vertices by value.
#[derive(Clone)]
pub struct ElementSoup {
    dim: usize,
    arity: usize,
    coords: Vec<f32>,
}

impl ElementSoup {
    pub fn new(dim: usize, arity: usize, coords: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        let stride = dim * arity;
        if !coords.len().is_multiple_of(stride) {
            return Err(Error::RaggedCoordinates { len: coords.len(), dim: stride });
        }
        Ok(ElementSoup { dim, arity, coords })
    }

    /// Builds a soup from per-element vertex lists, rejecting ragged input.
    pub fn from_elements(dim: usize, arity: usize, elements: &[Vec<Vertex>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(elements.len() * arity * dim);
        for (e, tuple) in elements.iter().enumerate() {
            if tuple.len() != arity {
                return Err(Error::RaggedSoup { element: e, expected: arity, found: tuple.len() });
            }
            for v in tuple {
                if v.dim() != dim {
                    return Err(Error::SoupDimension { expected: dim, found: v.dim() });
                }
                coords.extend_from_slice(v.coords());
            }
        }
        ElementSoup::new(dim, arity, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.coords.len() / (self.dim * self.arity)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f32] {
        &self.coords
    }

    /// All coordinates of element `e`, `arity * dim` values.
    pub fn element(&self, e: usize) -> &[f32] {
        let stride = self.dim * self.arity;
        &self.coords[e * stride..(e + 1) * stride]
    }

    pub fn vertex(&self, e: usize, slot: usize) -> &[f32] {
        &self.element(e)[slot * self.dim..(slot + 1) * self.dim]
    }

    /// Concatenates soups of a common shape.
    pub fn concat<'a>(soups: impl IntoIterator<Item = &'a ElementSoup>) -> Option<ElementSoup> {
        let mut it = soups.into_iter();
        let first = it.next()?;
        let mut out = first.clone();
        for s in it {
            if s.dim != out.dim || s.arity != out.arity {
                return None;
            }
            out.coords.extend_from_slice(&s.coords);
        }
        Some(out)
    }

    /// The sub-soup of the listed elements, in the listed order.
    pub fn select(&self, elements: &[usize]) -> ElementSoup {
        let mut coords = Vec::with_capacity(elements.len() * self.dim * self.arity);
        for &e in elements {
            coords.extend_from_slice(self.element(e));
        }
        ElementSoup { dim: self.dim, arity: self.arity, coords }
    }
}

impl fmt::Debug for ElementSoup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stride = self.dim * self.arity;
        let elems: Vec<Vec<&[f32]>> = if stride == 0 {
            Vec::new()
        } else {
            self.coords
                .chunks_exact(stride)
                .map(|e| e.chunks_exact(self.dim).collect())
                .collect()
        };
        f.debug_struct("ElementSoup")
            .field("dim", &self.dim)
            .field("arity", &self.arity)
            .field("elements", &elems)
            .finish()
    }
}

impl PartialEq for ElementSoup {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.arity == other.arity && bits_eq(&self.coords, &other.coords)
    }
}

impl Eq for ElementSoup {}

/// Replaces every index by the vertex it names.
pub fn dereference(mesh: &Mesh) -> Result<ElementSoup> {
    let n = mesh.vertex_count();
    if let Some(p) = mesh.indices.iter().position(|&i| i as usize >= n) {
        return Err(Error::DanglingIndex {
            element: p / mesh.arity,
            index: mesh.indices[p],
            vertex_count: n,
        });
    }
    let (d, k) = (mesh.dim, mesh.arity);
    let mut coords = vec![0.0f32; mesh.indices.len() * d];
    exec::for_each_chunk_mut(&mut coords, k * d, |e, out| {
        for (slot, dst) in out.chunks_exact_mut(d).enumerate() {
            dst.copy_from_slice(mesh.vertex(mesh.indices[e * k + slot] as usize));
        }
    });
    Ok(ElementSoup { dim: d, arity: k, coords })
}
