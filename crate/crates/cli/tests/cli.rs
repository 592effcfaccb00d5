use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn remeshx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_remeshx"))
        .args(args)
        .env_remove("REMESHX_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = remeshx(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn stat(stdout: &str, label: &str) -> usize {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(label).filter(|rest| rest.starts_with(' ')))
        .unwrap_or_else(|| panic!("no {label:?} in\n{stdout}"))
        .trim()
        .parse()
        .unwrap()
}

const TWO_QUADS: &str = "\
v 0 0
v 1 0
v 1 1
v 0 1
v 1 0
v 2 0
v 2 1
v 1 1
g left
f 1 2 3 4
g right
f 5 6 7 8
";

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn gen_reindex_stats() {
    let dir = TempDir::new().unwrap();
    let grid = path(&dir, "grid.rmx");
    let clean = path(&dir, "clean.rmx");
    ok(&["gen", "--n", "8", &grid]);

    let before = ok(&["stats", &grid]);
    assert_eq!(stat(&before, "vertices"), 320);
    assert_eq!(stat(&before, "unused vertices"), 64);

    let note = ok(&["reindex", &grid, &clean]);
    assert!(note.contains("320 vertices, 64 elements -> 81 vertices, 64 elements"), "{note}");

    let after = ok(&["stats", &clean]);
    assert_eq!(stat(&after, "vertices"), 81);
    assert_eq!(stat(&after, "elements"), 64);
    assert_eq!(stat(&after, "duplicate vertices"), 0);
    assert_eq!(stat(&after, "unused vertices"), 0);
}

#[test]
fn reindex_converts_between_formats() {
    let dir = TempDir::new().unwrap();
    let obj = write(&dir, "quads.obj", TWO_QUADS);
    let rmx = path(&dir, "quads.rmx");
    let back = path(&dir, "quads_out.obj");
    ok(&["-q", "reindex", &obj, &rmx]);
    ok(&["-q", "reindex", &rmx, &back]);
    let stats = ok(&["stats", &back]);
    assert_eq!(stat(&stats, "dimension"), 2);
    assert_eq!(stat(&stats, "arity"), 4);
    assert_eq!(stat(&stats, "vertices"), 6);
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.obj", TWO_QUADS);
    assert!(ok(&["validate", &good]).starts_with("ok: 8 vertices, 2 elements"));

    // .rmx carries indices verbatim, so it can hold a dangling one
    let mut bytes = b"RMX1".to_vec();
    for word in [2u32, 3] {
        bytes.extend(word.to_le_bytes());
    }
    for count in [3u64, 2] {
        bytes.extend(count.to_le_bytes());
    }
    for x in [0f32, 0., 1., 0., 0., 1.] {
        bytes.extend(x.to_le_bytes());
    }
    for i in [0u32, 1, 2, 0, 1, 9] {
        bytes.extend(i.to_le_bytes());
    }
    let bad = path(&dir, "bad.rmx");
    std::fs::write(&bad, bytes).unwrap();
    let out = remeshx(&["validate", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 invalid index(es)"));

    // reindex refuses the same file instead of producing garbage
    let out = remeshx(&["reindex", &bad, &path(&dir, "never.obj")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new(&path(&dir, "never.obj")).exists());

    let obj = write(&dir, "bad.obj", "v 0 0\nv 1 0\nv 0 1\nf 1 2 9\n");
    assert_eq!(remeshx(&["validate", &obj]).status.code(), Some(1));
}

#[test]
fn runtime_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let missing = path(&dir, "missing.obj");
    let out = remeshx(&["stats", &missing]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.obj"));

    assert_eq!(remeshx(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(remeshx(&["merge", &missing]).status.code(), Some(2));
    assert_eq!(remeshx(&["--dim", "4", "stats", &missing]).status.code(), Some(2));

    let unknown = write(&dir, "mesh.ply", "");
    assert_eq!(remeshx(&["stats", &unknown]).status.code(), Some(1));
}

#[test]
fn merge_soup_and_subset() {
    let dir = TempDir::new().unwrap();
    let quads = write(&dir, "quads.obj", TWO_QUADS);
    let merged = path(&dir, "merged.rmx");
    let note = ok(&["merge", &quads, &quads, &merged]);
    assert!(note.contains("merged 2 meshes -> 6 vertices, 4 elements"), "{note}");

    let soup = path(&dir, "soup.rmx");
    let note = ok(&["soup", &quads, &soup]);
    assert!(note.contains("2 elements -> 6 vertices, 2 elements"), "{note}");

    let right = path(&dir, "right.obj");
    ok(&["subset", &quads, &right, "--group", "right"]);
    let stats = ok(&["stats", &right]);
    assert_eq!((stat(&stats, "vertices"), stat(&stats, "elements")), (4, 1));

    let kept = path(&dir, "kept.obj");
    ok(&["subset", &quads, &kept, "--keep", "0-1"]);
    assert_eq!(stat(&ok(&["stats", &kept]), "vertices"), 6);

    assert_eq!(remeshx(&["subset", &quads, &kept, "--group", "nope"]).status.code(), Some(1));
    assert_eq!(remeshx(&["subset", &quads, &kept, "--keep", "5"]).status.code(), Some(1));
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "bench.csv");
    ok(&["-q", "--threads", "1", "bench", "--sizes", "2,4", "--reps", "1", "--csv", &csv]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,quads_in,vertices_in,vertices_out,t_serial_ms,t_parallel_ms,threads"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][..4], ["2", "4", "20", "9"]);
    assert_eq!(rows[1][..4], ["4", "16", "80", "25"]);
    assert!(rows.iter().all(|r| r[6] == "1"));
}
