//! Seeded random meshes and a battery of cross-checks binding the parallel
//! pipeline, the serial baseline and the composition operations together.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exec;
use crate::mesh::{dereference, ElementSoup, Mesh, Vertex};
use crate::ops::{merge, soup_to_mesh, subset, SubsetSelector};
use crate::reindex::{mark_used, reindex, reindex_mesh, ReindexScratch};
use crate::serial::{equivalent, reindex_serial};

/// Parameters for [`random_mesh`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMeshSpec {
    pub seed: u64,
    pub dim: usize,
    pub arity: usize,
    /// Vertices drawn from the pool; elements reference only these and the
    /// duplicates.
    pub n_base_vertices: usize,
    pub n_elements: usize,
    /// Extra copies of base vertices, as a fraction of `n_base_vertices`.
    pub dup_fraction: f64,
    /// Unreferenced vertices, as a fraction of the referenced ones.
    pub unused_fraction: f64,
    /// Number of distinct lattice points base vertices are drawn from.
    pub coord_pool_size: usize,
}

impl Default for RandomMeshSpec {
    fn default() -> Self {
        RandomMeshSpec {
            seed: 0,
            dim: 2,
            arity: 3,
            n_base_vertices: 64,
            n_elements: 48,
            dup_fraction: 0.25,
            unused_fraction: 0.25,
            coord_pool_size: 40,
        }
    }
}

const LATTICE_HALF_WIDTH: i32 = 1 << 12;

fn lattice_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    (0..dim).map(|_| rng.gen_range(-LATTICE_HALF_WIDTH..=LATTICE_HALF_WIDTH) as f32).collect()
}

/// Generates a mesh whose coordinates come from a small integer lattice, so
/// exact duplicates arise from the pool as well as from explicit copies.
/// The same spec always yields the same mesh.
pub fn random_mesh(spec: &RandomMeshSpec) -> Mesh {
    let dim = spec.dim.max(1);
    let arity = spec.arity.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let pool: Vec<Vec<f32>> =
        (0..spec.coord_pool_size.max(1)).map(|_| lattice_point(&mut rng, dim)).collect();

    let mut referenced: Vec<Vec<f32>> = (0..spec.n_base_vertices)
        .map(|_| pool[rng.gen_range(0..pool.len())].clone())
        .collect();
    let n_dup = (spec.dup_fraction.clamp(0.0, 1.0) * spec.n_base_vertices as f64).round() as usize;
    if spec.n_base_vertices > 0 {
        for _ in 0..n_dup {
            let v = referenced[rng.gen_range(0..spec.n_base_vertices)].clone();
            referenced.push(v);
        }
    }
    let n_unused = (spec.unused_fraction.clamp(0.0, 1.0) * referenced.len() as f64).round() as usize;

    // (vertex, may be referenced)
    let mut all: Vec<(Vec<f32>, bool)> = referenced.into_iter().map(|v| (v, true)).collect();
    for _ in 0..n_unused {
        let v = if rng.gen_bool(0.5) {
            pool[rng.gen_range(0..pool.len())].clone()
        } else {
            lattice_point(&mut rng, dim)
        };
        all.push((v, false));
    }
    all.shuffle(&mut rng);

    let targets: Vec<u32> =
        all.iter().enumerate().filter_map(|(i, (_, r))| r.then_some(i as u32)).collect();
    let n_elements = if targets.is_empty() { 0 } else { spec.n_elements };
    let indices = (0..n_elements * arity)
        .map(|_| targets[rng.gen_range(0..targets.len())])
        .collect();
    let coords = all.into_iter().flat_map(|(v, _)| v).collect();
    Mesh::new(dim, arity, coords, indices).expect("generated mesh has consistent shape")
}

/// The spec used for seed `seed` of the standard sweep: duplicate and unused
/// fractions over {0, 0.25, 0.5} and arity over {3, 4}.
pub fn sweep_spec(seed: u64) -> RandomMeshSpec {
    const FRACTIONS: [f64; 3] = [0.0, 0.25, 0.5];
    let s = seed as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    RandomMeshSpec {
        seed,
        dim: 2 + s % 2,
        arity: 3 + (s / 9) % 2,
        n_base_vertices: rng.gen_range(1..160),
        n_elements: rng.gen_range(0..120),
        dup_fraction: FRACTIONS[s % 3],
        unused_fraction: FRACTIONS[(s / 3) % 3],
        coord_pool_size: rng.gen_range(1..200),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    OracleEquivalence,
    SoupPreservation,
    NoDuplicates,
    NoUnused,
    SizeBound,
    CanonicalOrder,
    Idempotence,
    ScratchCoherence,
    Determinism,
    OracleOutput,
    OracleIdempotence,
    MergeLaw,
    SoupRoundTrip,
    SubsetLaw,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Outcome of every property for one mesh.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub entries: Vec<(Property, Result<(), String>)>,
}

impl CheckReport {
    fn record(&mut self, p: Property, outcome: Result<(), String>) {
        self.entries.push((p, outcome));
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|(_, r)| r.is_ok())
    }

    pub fn failures(&self) -> Vec<(Property, &str)> {
        self.entries
            .iter()
            .filter_map(|(p, r)| r.as_ref().err().map(|e| (*p, e.as_str())))
            .collect()
    }

    pub fn outcome(&self, p: Property) -> Option<&Result<(), String>> {
        self.entries.iter().find(|(q, _)| *q == p).map(|(_, r)| r)
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sorted_distinct(m: &Mesh) -> Result<(), String> {
    let verts: Vec<Vertex> = m.vertices().map(Vertex::new).collect();
    match verts.windows(2).position(|w| w[0] >= w[1]) {
        None => Ok(()),
        Some(i) => Err(format!("vertices {i} and {} are not strictly ascending", i + 1)),
    }
}

fn no_duplicates(m: &Mesh) -> Result<(), String> {
    let mut verts: Vec<Vertex> = m.vertices().map(Vertex::new).collect();
    verts.sort_unstable();
    ensure(verts.windows(2).all(|w| w[0] != w[1]), || "output holds duplicate vertices".into())
}

fn all_used(m: &Mesh) -> Result<(), String> {
    let used = mark_used(m).map_err(|e| e.to_string())?;
    match used.iter().position(|u| !u) {
        None => Ok(()),
        Some(v) => Err(format!("vertex {v} is unused")),
    }
}

/// Invariants every re-indexed output must satisfy: no duplicates, no unused
/// vertices and ascending bitwise vertex order.
pub fn check_canonical(m: &Mesh) -> Result<(), String> {
    no_duplicates(m)?;
    all_used(m)?;
    sorted_distinct(m)
}

fn soup_of(m: &Mesh) -> Result<ElementSoup, String> {
    dereference(m).map_err(|e| e.to_string())
}

fn distinct_count(m: &Mesh) -> usize {
    let mut verts: Vec<Vertex> = m.vertices().map(Vertex::new).collect();
    verts.sort_unstable();
    verts.dedup();
    verts.len()
}

fn scratch_coherence(input: &Mesh, out: &Mesh, s: &ReindexScratch) -> Result<(), String> {
    let n = input.vertex_count();
    ensure(s.is_used.len() == n, || "is_used length".into())?;
    if input.element_count() == 0 {
        return ensure(s.new_n == 0 && out.vertex_count() == 0, || "empty case".into());
    }
    for (name, len) in [
        ("org_id", s.org_id.len()),
        ("nodup", s.nodup.len()),
        ("scan", s.scan.len()),
        ("new_idx", s.new_idx.len()),
        ("perm", s.perm.len()),
    ] {
        ensure(len == n, || format!("{name} has length {len}, expected {n}"))?;
    }
    for (j, &o) in s.org_id.iter().enumerate() {
        ensure((o as usize) < n && s.perm[o as usize] as usize == j, || {
            format!("perm[org_id[{j}]] != {j}")
        })?;
    }
    ensure(s.nodup.first() == Some(&true), || "nodup[0] is not set".into())?;
    ensure(s.new_idx.first() == Some(&0), || "new_idx[0] != 0".into())?;
    for i in 1..n {
        let step = s.new_idx[i].wrapping_sub(s.new_idx[i - 1]);
        ensure(step == s.nodup[i] as u32, || format!("new_idx step {step} at {i}"))?;
    }
    for i in 0..n {
        ensure(s.scan[i] == s.new_idx[i] + 1, || format!("scan[{i}] != new_idx[{i}] + 1"))?;
    }
    let flagged = s.nodup.iter().filter(|&&f| f).count();
    ensure(s.new_n == flagged && s.new_n == out.vertex_count(), || {
        format!("new_n {} vs {flagged} flags vs {} vertices", s.new_n, out.vertex_count())
    })?;
    ensure(s.new_n == *s.new_idx.last().unwrap() as usize + 1, || "new_n != last + 1".into())
}

/// Worker counts compared by the determinism check: one, and the larger of
/// the machine's parallelism and four.
pub fn determinism_workers() -> [usize; 2] {
    [1, exec::available_workers().max(4)]
}

/// Checks a given re-indexing result of `input` (everything that does not
/// require re-running the pipeline on `input`).
pub fn check_result(input: &Mesh, out: &Mesh, scratch: &ReindexScratch) -> CheckReport {
    let mut report = CheckReport::default();
    let soup_in = soup_of(input);

    let oracle = reindex_serial(input).map_err(|e| e.to_string());
    report.record(
        Property::OracleEquivalence,
        oracle.as_ref().map_err(Clone::clone).and_then(|o| {
            ensure(equivalent(out, o), || "pipeline and serial results differ".into())
        }),
    );
    report.record(
        Property::SoupPreservation,
        soup_in.clone().and_then(|si| {
            ensure(soup_of(out)? == si, || "dereferenced elements changed".into())
        }),
    );
    report.record(Property::NoDuplicates, no_duplicates(out));
    report.record(
        Property::NoUnused,
        if input.element_count() > 0 { all_used(out) } else { Ok(()) },
    );
    report.record(Property::SizeBound, {
        let (vin, vout) = (input.vertex_count(), out.vertex_count());
        let used = mark_used(input).map(|u| u.iter().all(|&b| b)).unwrap_or(false);
        let clean = used && distinct_count(input) == vin && input.element_count() > 0;
        ensure(vout <= vin && ((vout == vin) == (clean || vin == 0)), || {
            format!("{vout} output vertices from {vin} (clean input: {clean})")
        })
    });
    report.record(Property::CanonicalOrder, sorted_distinct(out));
    report.record(
        Property::Idempotence,
        reindex_mesh(out).map_err(|e| e.to_string()).and_then(|again| {
            ensure(&again == out, || "re-indexing the output changed it".into())
        }),
    );
    report.record(Property::ScratchCoherence, scratch_coherence(input, out, scratch));
    report.record(
        Property::OracleOutput,
        oracle.as_ref().map_err(Clone::clone).and_then(|o| {
            no_duplicates(o)?;
            if input.element_count() > 0 {
                all_used(o)?;
            }
            Ok(())
        }),
    );
    report.record(
        Property::OracleIdempotence,
        oracle.as_ref().map_err(Clone::clone).and_then(|o| {
            let again = reindex_serial(o).map_err(|e| e.to_string())?;
            ensure(&again == o, || "serial re-run changed the result".into())
        }),
    );
    report
}

fn check_ops(input: &Mesh, report: &mut CheckReport) {
    let soup_in = match soup_of(input) {
        Ok(s) => s,
        Err(e) => {
            for p in [Property::MergeLaw, Property::SoupRoundTrip, Property::SubsetLaw] {
                report.record(p, Err(e.clone()));
            }
            return;
        }
    };

    // Merge with a copy of itself and with its own reindexed form.
    let merged = (|| -> Result<(), String> {
        let other = reindex_mesh(input).map_err(|e| e.to_string())?;
        let m = merge(&[input.clone(), other.clone()]).map_err(|e| e.to_string())?;
        let expected = ElementSoup::concat([&soup_in, &soup_of(&other)?]).unwrap();
        ensure(soup_of(&m)? == expected, || "merged soup is not the concatenation".into())?;
        check_canonical(&m)
    })();
    report.record(Property::MergeLaw, merged);

    let round = (|| -> Result<(), String> {
        let m = soup_to_mesh(&soup_in).map_err(|e| e.to_string())?;
        ensure(soup_of(&m)? == soup_in, || "soup round trip changed elements".into())?;
        check_canonical(&m)
    })();
    report.record(Property::SoupRoundTrip, round);

    let sub = (|| -> Result<(), String> {
        let keep: Vec<usize> = (0..input.element_count()).filter(|e| e % 3 != 1).collect();
        let m = subset(input, &SubsetSelector::Positions(keep.clone())).map_err(|e| e.to_string())?;
        ensure(soup_of(&m)? == soup_in.select(&keep), || "subset soup differs".into())?;
        check_canonical(&m)
    })();
    report.record(Property::SubsetLaw, sub);
}

/// Runs every property against `mesh`.
pub fn check_all(mesh: &Mesh) -> CheckReport {
    let [few, many] = determinism_workers();
    let first = exec::with_workers(few, || reindex(mesh));
    let (out, scratch) = match first {
        Ok(r) => r,
        Err(e) => {
            let mut report = CheckReport::default();
            report.record(Property::OracleEquivalence, Err(format!("reindex failed: {e}")));
            return report;
        }
    };
    let mut report = check_result(mesh, &out, &scratch);

    let second = exec::with_workers(many, || reindex(mesh));
    report.record(
        Property::Determinism,
        match second {
            Ok((out2, scratch2)) => ensure(out2 == out && scratch2 == scratch, || {
                format!("results differ between {few} and {many} workers")
            }),
            Err(e) => Err(e.to_string()),
        },
    );
    check_ops(mesh, &mut report);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::worked_mesh;

    #[test]
    fn generation_is_deterministic() {
        let spec = RandomMeshSpec { seed: 42, ..Default::default() };
        assert_eq!(random_mesh(&spec), random_mesh(&spec));
        let other = RandomMeshSpec { seed: 43, ..Default::default() };
        assert_ne!(random_mesh(&spec), random_mesh(&other));
    }

    #[test]
    fn no_elements_gives_empty_output() {
        let spec = RandomMeshSpec { n_elements: 0, ..Default::default() };
        let m = random_mesh(&spec);
        assert!(m.vertex_count() > 0);
        assert_eq!(reindex_mesh(&m).unwrap().vertex_count(), 0);
    }

    #[test]
    fn clean_spec_output_counts_distinct_referenced_vertices() {
        for seed in 0..20 {
            let spec = RandomMeshSpec {
                seed,
                dup_fraction: 0.0,
                unused_fraction: 0.0,
                coord_pool_size: 1 << 16,
                ..Default::default()
            };
            let m = random_mesh(&spec);
            // Distinct count of referenced vertices by sorting.
            let mut referenced: Vec<Vertex> =
                m.indices().iter().map(|&i| Vertex::new(m.vertex(i as usize))).collect();
            referenced.sort();
            referenced.dedup();
            assert_eq!(reindex_mesh(&m).unwrap().vertex_count(), referenced.len());
        }
    }

    #[test]
    fn worked_mesh_passes_everything() {
        let report = check_all(&worked_mesh());
        assert!(report.passed(), "{:?}", report.failures());
        assert_eq!(report.entries.len(), 14);
    }

    #[test]
    fn flipped_index_breaks_soup_preservation() {
        let m = worked_mesh();
        let (out, scratch) = reindex(&m).unwrap();
        let (coords, mut indices) = out.into_parts();
        indices[0] = 1;
        let corrupt = Mesh::new(2, 3, coords, indices).unwrap();
        let report = check_result(&m, &corrupt, &scratch);
        assert!(report.outcome(Property::SoupPreservation).unwrap().is_err());
        assert!(report.outcome(Property::OracleEquivalence).unwrap().is_err());
        assert!(!report.passed());
    }

    #[test]
    fn sweep_covers_all_combinations() {
        let mut seen = std::collections::HashSet::new();
        for seed in 0..18 {
            let s = sweep_spec(seed);
            seen.insert(((s.dup_fraction * 4.0) as u32, (s.unused_fraction * 4.0) as u32, s.arity));
        }
        assert_eq!(seen.len(), 18);
    }
}
