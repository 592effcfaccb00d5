//! Sort-and-scan re-indexing.
//!
//! Removes bitwise-duplicate and unreferenced vertices from a mesh using only
//! per-element maps and the primitives in [`crate::primitives`]:
//!
//! 1. mark referenced vertices and overwrite unreferenced ones with a
//!    referenced vertex, turning them into duplicates;
//! 2. stable key-value sort the vertices against their original positions,
//!    flag the first vertex of each run of equal values and number the runs
//!    with an inclusive scan minus one;
//! 3. scatter one representative per run into the compact vertex array;
//! 4. invert the sort permutation and rewrite each index `i` as
//!    `new_idx[perm[i]]`.
//!
//! The output vertices come out in ascending bitwise order, which makes the
//! result canonical: re-indexing it again is a no-op.

use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};

use crate::error::{Error, Result};
use crate::exec;
use crate::mesh::{self, with_vertex_key, Mesh, VertexKey, MAX_VERTICES};
use crate::primitives::{fill_sequence, inclusive_scan, scatter};

/// Intermediate arrays of one [`reindex`] run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReindexScratch {
    /// One flag per input vertex: referenced by some element.
    pub is_used: Vec<bool>,
    /// Original position of each sorted vertex.
    pub org_id: Vec<u32>,
    /// One flag per sorted vertex: first of its run of equal values.
    pub nodup: Vec<bool>,
    /// Inclusive scan of `nodup`, before subtracting one.
    pub scan: Vec<u32>,
    /// Compact position of each sorted vertex.
    pub new_idx: Vec<u32>,
    /// Sorted position of each input vertex; inverse of `org_id`.
    pub perm: Vec<u32>,
    /// Number of distinct vertices.
    pub new_n: usize,
}

/// Flags every vertex some element references.
pub fn mark_used(mesh: &Mesh) -> Result<Vec<bool>> {
    let n = mesh.vertex_count();
    let indices = mesh.indices();
    let used: Vec<AtomicBool> = exec::map_range(n, |_| AtomicBool::new(false));
    let bad = exec::filter_map_range(indices.len(), |p| match used.get(indices[p] as usize) {
        Some(flag) => {
            flag.store(true, Ordering::Relaxed);
            None
        }
        None => Some(p),
    });
    if let Some(&p) = bad.first() {
        return Err(Error::DanglingIndex {
            element: p / mesh.arity(),
            index: indices[p],
            vertex_count: n,
        });
    }
    Ok(used.into_iter().map(AtomicBool::into_inner).collect())
}

/// Replaces every unused vertex with `replacement`.
pub fn overwrite_unused<K: VertexKey>(
    vertices: &[K],
    is_used: &[bool],
    replacement: &K,
) -> Result<Vec<K>> {
    if vertices.len() != is_used.len() {
        return Err(Error::LengthMismatch {
            what: "vertices vs used flags",
            left: vertices.len(),
            right: is_used.len(),
        });
    }
    Ok(exec::map_range(vertices.len(), |i| {
        if is_used[i] {
            vertices[i].clone()
        } else {
            replacement.clone()
        }
    }))
}

/// Sorts the vertices, returning them with the original position of each.
/// Ties keep ascending original positions.
pub fn compute_sort_permutation<K: VertexKey>(vertices: &[K]) -> (Vec<K>, Vec<u32>) {
    K::sort_pairs(vertices, &fill_sequence(vertices.len()))
        .expect("keys and sequence have equal length")
}

/// `out[i]` is set iff `i == 0` or `sorted[i]` differs from its predecessor.
pub fn flag_first_occurrences<K: VertexKey>(sorted: &[K]) -> Vec<bool> {
    exec::map_range(sorted.len(), |i| i == 0 || sorted[i] != sorted[i - 1])
}

fn subtract_one(scan: &[u32]) -> Result<Vec<u32>> {
    if scan.first() == Some(&0) {
        return Err(Error::LeadingDuplicateFlag);
    }
    Ok(exec::map_range(scan.len(), |i| scan[i] - 1))
}

fn count_from_new_indices(new_idx: &[u32]) -> usize {
    new_idx.last().map_or(0, |&last| last as usize + 1)
}

/// Compact index of every sorted vertex, and the number of distinct ones.
pub fn compute_new_indices(nodup: &[bool]) -> Result<(Vec<u32>, usize)> {
    let new_idx = subtract_one(&inclusive_scan(nodup)?)?;
    let new_n = count_from_new_indices(&new_idx);
    Ok((new_idx, new_n))
}

/// Scatters the first vertex of every run to its compact position.
///
/// Without a mask every duplicate writes too; since they are bitwise equal
/// the output is the same.
pub fn compact_vertices<K: VertexKey>(
    sorted: &[K],
    nodup: Option<&[bool]>,
    new_idx: &[u32],
    new_n: usize,
) -> Result<Vec<K>> {
    scatter(sorted, new_idx, nodup, new_n)
}

/// `out[org_id[i]] = i`, rejecting anything that is not a permutation.
///
/// A scatter of the identity sequence; a repeated or out-of-range entry is
/// caught when it hits an occupied slot or misses the output.
pub fn invert_permutation(org_id: &[u32]) -> Result<Vec<u32>> {
    const EMPTY: u32 = u32::MAX;
    let n = org_id.len();
    if n as u64 > MAX_VERTICES {
        return Err(Error::NotAPermutation { len: n });
    }
    let out: Vec<AtomicU32> = exec::map_range(n, |_| AtomicU32::new(EMPTY));
    let clashes = exec::filter_map_range(n, |i| match out.get(org_id[i] as usize) {
        Some(slot) if slot.swap(i as u32, Ordering::Relaxed) == EMPTY => None,
        _ => Some(i),
    });
    if !clashes.is_empty() {
        return Err(Error::NotAPermutation { len: n });
    }
    Ok(out.into_iter().map(AtomicU32::into_inner).collect())
}

/// Rewrites every index `i` to `new_idx[perm[i]]`.
pub fn remap_elements(indices: &[u32], perm: &[u32], new_idx: &[u32]) -> Result<Vec<u32>> {
    if perm.len() != new_idx.len() {
        return Err(Error::LengthMismatch {
            what: "perm vs new_idx",
            left: perm.len(),
            right: new_idx.len(),
        });
    }
    exec::try_map_range(indices.len(), |p| {
        let i = indices[p];
        match perm.get(i as usize) {
            Some(&sorted) => Ok(new_idx[sorted as usize]),
            None => Err(Error::IndexOutOfRange { position: p, index: i, len: perm.len() }),
        }
    })
}

fn reindex_keyed<K: VertexKey>(mesh: &Mesh) -> Result<(Mesh, ReindexScratch)> {
    let (dim, arity) = (mesh.dim(), mesh.arity());
    let is_used = mark_used(mesh)?;
    if mesh.element_count() == 0 {
        let scratch = ReindexScratch { is_used, ..Default::default() };
        return Ok((Mesh::empty(dim, arity)?, scratch));
    }

    let keys = mesh::keys_from_coords::<K>(mesh.coords(), dim);
    let replacement = keys[mesh.indices()[0] as usize].clone();
    let cleaned = overwrite_unused(&keys, &is_used, &replacement)?;
    drop(keys);

    let (sorted, org_id) = compute_sort_permutation(&cleaned);
    drop(cleaned);
    let nodup = flag_first_occurrences(&sorted);
    let scan = inclusive_scan(&nodup)?;
    let new_idx = subtract_one(&scan)?;
    let new_n = count_from_new_indices(&new_idx);

    let compact = compact_vertices(&sorted, Some(&nodup), &new_idx, new_n)?;
    let perm = invert_permutation(&org_id)?;
    let indices = remap_elements(mesh.indices(), &perm, &new_idx)?;

    let out = Mesh::new(dim, arity, mesh::coords_from_keys(&compact, dim), indices)?;
    let scratch = ReindexScratch { is_used, org_id, nodup, scan, new_idx, perm, new_n };
    Ok((out, scratch))
}

/// Removes duplicate and unused vertices, returning the compact mesh and
/// every intermediate array.
///
/// A mesh without elements has only unused vertices and yields an empty
/// mesh.
pub fn reindex(mesh: &Mesh) -> Result<(Mesh, ReindexScratch)> {
    mesh::ensure_valid(mesh)?;
    with_vertex_key!(mesh.dim(), Key => reindex_keyed::<Key>(mesh))
}

/// [`reindex`] without the intermediates.
pub fn reindex_mesh(mesh: &Mesh) -> Result<Mesh> {
    reindex(mesh).map(|(m, _)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::*;

    type K2 = [u32; 2];

    fn keys(vs: &[[f32; 2]]) -> Vec<K2> {
        vs.iter().map(|v| K2::from_coords(v)).collect()
    }

    const WORKED_USED: [bool; 10] = [true, true, true, false, true, true, true, true, false, true];
    const WORKED_NODUP: [bool; 10] = [true, false, false, true, true, false, true, false, true, true];
    const WORKED_ORG_ID: [u32; 10] = [0, 3, 8, 1, 2, 5, 4, 9, 6, 7];
    const WORKED_PERM: [u32; 10] = [0, 3, 4, 1, 6, 5, 8, 9, 2, 7];
    const WORKED_NEW_IDX: [u32; 10] = [0, 0, 0, 1, 2, 2, 3, 3, 4, 5];

    #[test]
    fn mark_used_examples() {
        assert_eq!(mark_used(&worked_mesh()).unwrap(), WORKED_USED);

        let no_elements = Mesh::from_arrays::<2, 3>(&[A, B], &[]).unwrap();
        assert_eq!(mark_used(&no_elements).unwrap(), vec![false, false]);

        let full = Mesh::from_arrays(&[A, B, C], &[[2, 1, 0]]).unwrap();
        assert_eq!(mark_used(&full).unwrap(), vec![true; 3]);
    }

    #[test]
    fn overwrite_unused_examples() {
        let vtx = keys(&WORKED_VERTICES);
        let cleaned = overwrite_unused(&vtx, &WORKED_USED, &keys(&[A])[0]).unwrap();
        assert_eq!(cleaned, keys(&[A, B, C, A, D, C, E, F, A, D]));

        assert_eq!(overwrite_unused(&vtx, &[true; 10], &keys(&[A])[0]).unwrap(), vtx);
        assert_eq!(
            overwrite_unused(&vtx, &[false; 10], &keys(&[Y])[0]).unwrap(),
            keys(&[Y; 10])
        );
    }

    #[test]
    fn sort_permutation_examples() {
        let (sorted, org) = compute_sort_permutation(&keys(&[A, B, C, A, D, C, E, F, A, D]));
        assert_eq!(sorted, keys(&[A, A, A, B, C, C, D, D, E, F]));
        assert_eq!(org, WORKED_ORG_ID);

        let (sorted, org) = compute_sort_permutation(&keys(&[A, B, C]));
        assert_eq!(sorted, keys(&[A, B, C]));
        assert_eq!(org, vec![0, 1, 2]);

        let (sorted, org) = compute_sort_permutation::<K2>(&[]);
        assert!(sorted.is_empty() && org.is_empty());
    }

    #[test]
    fn first_occurrence_examples() {
        assert_eq!(flag_first_occurrences(&keys(&[A, A, A, B, C, C, D, D, E, F])), WORKED_NODUP);
        assert_eq!(flag_first_occurrences(&keys(&[A, B, C])), vec![true; 3]);
        assert_eq!(flag_first_occurrences(&keys(&[B; 4])), vec![true, false, false, false]);
    }

    #[test]
    fn new_index_examples() {
        assert_eq!(compute_new_indices(&WORKED_NODUP).unwrap(), (WORKED_NEW_IDX.to_vec(), 6));
        assert_eq!(compute_new_indices(&[true]).unwrap(), (vec![0], 1));
        assert_eq!(compute_new_indices(&[true; 3]).unwrap(), (vec![0, 1, 2], 3));
        assert_eq!(compute_new_indices(&[]).unwrap(), (vec![], 0));
        assert!(matches!(compute_new_indices(&[false, true]), Err(Error::LeadingDuplicateFlag)));
    }

    #[test]
    fn compaction_examples() {
        let sorted = keys(&[A, A, A, B, C, C, D, D, E, F]);
        let expected = keys(&[A, B, C, D, E, F]);
        assert_eq!(
            compact_vertices(&sorted, Some(&WORKED_NODUP), &WORKED_NEW_IDX, 6).unwrap(),
            expected
        );
        // The mask is optional.
        assert_eq!(compact_vertices(&sorted, None, &WORKED_NEW_IDX, 6).unwrap(), expected);

        let distinct = keys(&[A, B, C]);
        assert_eq!(compact_vertices(&distinct, None, &[0, 1, 2], 3).unwrap(), distinct);
        assert_eq!(compact_vertices(&keys(&[E; 5]), None, &[0; 5], 1).unwrap(), keys(&[E]));
        assert!(matches!(
            compact_vertices(&distinct, None, &[0, 1, 3], 3),
            Err(Error::ScatterOutOfRange { .. })
        ));
    }

    #[test]
    fn invert_permutation_examples() {
        let perm = invert_permutation(&WORKED_ORG_ID).unwrap();
        assert_eq!(perm, WORKED_PERM);
        for (i, &o) in WORKED_ORG_ID.iter().enumerate() {
            assert_eq!(perm[o as usize] as usize, i);
        }
        assert_eq!(invert_permutation(&[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(invert_permutation(&[1, 0]).unwrap(), vec![1, 0]);
        // The printed post-sort orgID repeats 5 and drops 7.
        assert!(matches!(
            invert_permutation(&[0, 3, 8, 1, 5, 2, 4, 9, 5, 6]),
            Err(Error::NotAPermutation { len: 10 })
        ));
        assert!(matches!(invert_permutation(&[0, 2]), Err(Error::NotAPermutation { len: 2 })));
    }

    #[test]
    fn remap_examples() {
        let old: Vec<u32> = WORKED_ELEMENTS.iter().flatten().copied().collect();
        let new = remap_elements(&old, &WORKED_PERM, &WORKED_NEW_IDX).unwrap();
        assert_eq!(new, vec![0, 1, 2, 0, 2, 3, 2, 4, 5, 2, 5, 3]);

        let id = [0, 1, 2];
        assert_eq!(remap_elements(&[2, 0, 1], &id, &id).unwrap(), vec![2, 0, 1]);
        assert_eq!(remap_elements(&[0, 0, 0], &[1, 0], &[7, 9]).unwrap(), vec![9, 9, 9]);
        assert!(matches!(
            remap_elements(&[0, 3], &id, &id),
            Err(Error::IndexOutOfRange { position: 1, index: 3, len: 3 })
        ));
    }

    #[test]
    fn reindex_worked_mesh() {
        let (out, scratch) = reindex(&worked_mesh()).unwrap();
        let expected =
            Mesh::from_arrays(&[A, B, C, D, E, F], &[[0, 1, 2], [0, 2, 3], [2, 4, 5], [2, 5, 3]])
                .unwrap();
        assert_eq!(out, expected);
        assert_eq!(scratch.is_used, WORKED_USED);
        assert_eq!(scratch.org_id, WORKED_ORG_ID);
        assert_eq!(scratch.nodup, WORKED_NODUP);
        assert_eq!(scratch.scan, vec![1, 1, 1, 2, 3, 3, 4, 4, 5, 6]);
        assert_eq!(scratch.new_idx, WORKED_NEW_IDX);
        assert_eq!(scratch.perm, WORKED_PERM);
        assert_eq!(scratch.new_n, 6);
    }

    #[test]
    fn reindex_compact_mesh_sorts_vertices() {
        let m = Mesh::from_arrays(&[C, A, B], &[[0, 1, 2]]).unwrap();
        let out = reindex_mesh(&m).unwrap();
        assert_eq!(out, Mesh::from_arrays(&[A, B, C], &[[2, 0, 1]]).unwrap());
        assert_eq!(mesh::dereference(&out).unwrap(), mesh::dereference(&m).unwrap());
    }

    #[test]
    fn reindex_without_elements_is_empty() {
        let m = Mesh::from_arrays::<2, 4>(&[A, B, X], &[]).unwrap();
        let out = reindex_mesh(&m).unwrap();
        assert_eq!(out, Mesh::empty(2, 4).unwrap());
    }

    #[test]
    fn reindex_rejects_invalid_mesh() {
        let m = Mesh::from_arrays(&[A], &[[0, 0, 1]]).unwrap();
        assert!(matches!(reindex(&m), Err(Error::InvalidMesh { issues }) if issues.len() == 1));
    }

    #[test]
    fn reindex_higher_dimensions() {
        // Dimension 5 takes the boxed-key path.
        let v = |x: f32| [x, 1.0, 2.0, 3.0, 4.0];
        let m = Mesh::from_arrays(&[v(2.0), v(1.0), v(2.0), v(9.0)], &[[0, 1], [2, 1]]).unwrap();
        let out = reindex_mesh(&m).unwrap();
        assert_eq!(out, Mesh::from_arrays(&[v(1.0), v(2.0)], &[[1, 0], [1, 0]]).unwrap());
    }

    #[test]
    fn signed_zero_is_not_merged() {
        let m = Mesh::from_arrays(&[[0.0f32], [-0.0]], &[[0, 1]]).unwrap();
        assert_eq!(reindex_mesh(&m).unwrap().vertex_count(), 2);
    }

    proptest::proptest! {
        #[test]
        fn masked_and_unmasked_compaction_agree(
            raw in proptest::collection::vec((0u8..5, 0u8..3), 1..200)
        ) {
            let vs: Vec<[f32; 2]> = raw.iter().map(|&(x, y)| [x as f32, y as f32]).collect();
            let (sorted, _) = compute_sort_permutation(&keys(&vs));
            let nodup = flag_first_occurrences(&sorted);
            let (new_idx, new_n) = compute_new_indices(&nodup).unwrap();
            proptest::prop_assert_eq!(
                compact_vertices(&sorted, Some(&nodup), &new_idx, new_n).unwrap(),
                compact_vertices(&sorted, None, &new_idx, new_n).unwrap()
            );
        }
    }
}
