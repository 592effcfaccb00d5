use remeshx::bench::{expected_grid_vertices, grid_quads};
use remeshx::check::{random_mesh, RandomMeshSpec};
use remeshx::io::{read_mesh, write_mesh, ObjOptions};
use remeshx::{
    dereference, equivalent, merge, reindex, reindex_mesh, reindex_serial, subset, validate, with_workers, Error,
    Mesh, SubsetSelector,
};

#[test]
fn pipeline_and_map_baseline_agree_across_dimensions() {
    for dim in 1..=6 {
        for arity in [1, 2, 3, 4, 8] {
            let spec = RandomMeshSpec { seed: (dim * 10 + arity) as u64, dim, arity, ..Default::default() };
            let mesh = random_mesh(&spec);
            let fast = reindex_mesh(&mesh).unwrap();
            let slow = reindex_serial(&mesh).unwrap();
            assert!(equivalent(&fast, &slow), "dim {dim} arity {arity}");
            assert_eq!(dereference(&fast).unwrap(), dereference(&mesh).unwrap());
            assert!(validate(&fast).is_empty());
        }
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let mesh = random_mesh(&RandomMeshSpec { seed: 99, n_elements: 20_000, ..Default::default() });
    let one = with_workers(1, || reindex(&mesh)).unwrap();
    for workers in [2, 3, 8] {
        let many = with_workers(workers, || reindex(&mesh)).unwrap();
        assert_eq!(many.0, one.0, "{workers} workers");
        assert_eq!(many.1, one.1, "{workers} workers");
    }
}

#[test]
fn reindex_is_idempotent_and_fixes_grid_counts() {
    for n in [1, 3, 16] {
        let once = reindex_mesh(&grid_quads(n).unwrap()).unwrap();
        assert_eq!(once.vertex_count(), expected_grid_vertices(n));
        assert_eq!(reindex_mesh(&once).unwrap(), once);
    }
}

#[test]
fn signed_zero_and_nan_payloads_stay_distinct() {
    let nan = f32::from_bits(0x7fc0_0001);
    let mesh = Mesh::new(2, 2, vec![0.0, 1.0, -0.0, 1.0, nan, 0.0, nan, 0.0], vec![0, 1, 2, 3]).unwrap();
    let out = reindex_mesh(&mesh).unwrap();
    assert_eq!(out.vertex_count(), 3);
    assert_eq!(out.element(1)[0], out.element(1)[1]);
}

#[test]
fn dangling_indices_are_rejected_everywhere() {
    let mesh = Mesh::new(2, 3, vec![0.0; 6], vec![0, 1, 3]).unwrap();
    assert!(matches!(reindex(&mesh), Err(Error::InvalidMesh { .. })));
    assert!(reindex_serial(&mesh).is_err());
    assert!(merge(std::slice::from_ref(&mesh)).is_err());
    assert!(subset(&mesh, &SubsetSelector::Positions(vec![0])).is_err());
}

#[test]
fn files_round_trip_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = reindex_mesh(&grid_quads(5).unwrap()).unwrap();
    for name in ["grid.obj", "grid.rmx"] {
        let path = dir.path().join(name);
        write_mesh(&mesh, &path, None).unwrap();
        let loaded = read_mesh(&path, None, &ObjOptions::default()).unwrap();
        assert_eq!(loaded.mesh, mesh, "{name}");
    }
}
