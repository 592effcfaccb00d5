//! Mesh composition built on [`reindex`](crate::reindex::reindex): each
//! operation assembles a cheap mesh that may contain duplicate or unused
//! vertices and lets re-indexing clean it up.

use crate::error::{Error, Result};
use crate::exec;
use crate::mesh::{ensure_valid, ElementSoup, Mesh, MAX_VERTICES};
use crate::primitives::fill_sequence;
use crate::reindex::reindex_mesh;

/// Concatenates the meshes and welds shared vertices.
pub fn merge(meshes: &[Mesh]) -> Result<Mesh> {
    let first = meshes.first().ok_or(Error::NothingToMerge)?;
    let (dim, arity) = (first.dim(), first.arity());
    let mut total_vertices = 0u64;
    for m in meshes {
        if m.dim() != dim {
            return Err(Error::Incompatible { what: "dimension", left: dim, right: m.dim() });
        }
        if m.arity() != arity {
            return Err(Error::Incompatible { what: "arity", left: arity, right: m.arity() });
        }
        ensure_valid(m)?;
        total_vertices += m.vertex_count() as u64;
    }
    if total_vertices > MAX_VERTICES {
        return Err(Error::TooManyVertices { count: total_vertices });
    }

    let mut coords = Vec::with_capacity(total_vertices as usize * dim);
    let mut indices = Vec::with_capacity(meshes.iter().map(|m| m.indices().len()).sum());
    for m in meshes {
        let offset = (coords.len() / dim) as u32;
        coords.extend_from_slice(m.coords());
        let src = m.indices();
        indices.extend(exec::map_range(src.len(), |p| src[p] + offset));
    }
    reindex_mesh(&Mesh::new(dim, arity, coords, indices)?)
}

/// Builds a compact indexed mesh from independent elements.
pub fn soup_to_mesh(soup: &ElementSoup) -> Result<Mesh> {
    let (dim, arity) = (soup.dim(), soup.arity());
    let n = soup.len() * arity;
    if n as u64 > MAX_VERTICES {
        return Err(Error::TooManyVertices { count: n as u64 });
    }
    reindex_mesh(&Mesh::new(dim, arity, soup.coords().to_vec(), fill_sequence(n))?)
}

/// Which elements [`subset`] keeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetSelector {
    /// Strictly ascending element positions.
    Positions(Vec<usize>),
    /// One flag per element.
    Mask(Vec<bool>),
}

impl SubsetSelector {
    pub fn to_mask(&self, element_count: usize) -> Result<Vec<bool>> {
        match self {
            SubsetSelector::Mask(mask) => {
                if mask.len() != element_count {
                    return Err(Error::BadSelector(format!(
                        "mask has {} entries for {} elements",
                        mask.len(),
                        element_count
                    )));
                }
                Ok(mask.clone())
            }
            SubsetSelector::Positions(keep) => {
                let mut mask = vec![false; element_count];
                let mut prev = None;
                for &e in keep {
                    if e >= element_count {
                        return Err(Error::BadSelector(format!(
                            "element {e} out of range for {element_count} elements"
                        )));
                    }
                    if prev.is_some_and(|p| p >= e) {
                        return Err(Error::BadSelector(format!(
                            "positions must be strictly ascending ({} then {e})",
                            prev.unwrap()
                        )));
                    }
                    mask[e] = true;
                    prev = Some(e);
                }
                Ok(mask)
            }
        }
    }

    /// Selected positions in ascending order.
    pub fn positions(&self, element_count: usize) -> Result<Vec<usize>> {
        Ok(self
            .to_mask(element_count)?
            .iter()
            .enumerate()
            .filter_map(|(e, &k)| k.then_some(e))
            .collect())
    }
}

/// Compact mesh of the selected elements, in their original relative order.
pub fn subset(mesh: &Mesh, selector: &SubsetSelector) -> Result<Mesh> {
    ensure_valid(mesh)?;
    let keep = selector.positions(mesh.element_count())?;
    let mut indices = Vec::with_capacity(keep.len() * mesh.arity());
    for &e in &keep {
        indices.extend_from_slice(mesh.element(e));
    }
    reindex_mesh(&Mesh::new(mesh.dim(), mesh.arity(), mesh.coords().to_vec(), indices)?)
}
